#pragma once

#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "grix/error.hpp"

namespace grix {

// Little-endian byte sink/source used by every serialized structure.
class byte_writer {
public:
    void u8(std::uint8_t v) { buf_.push_back(char(v)); }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) buf_.push_back(char((v >> (8 * i)) & 0xff));
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) buf_.push_back(char((v >> (8 * i)) & 0xff));
    }
    void words(const std::vector<std::uint64_t>& w) {
        u64(w.size());
        for (auto x : w) u64(x);
    }
    void raw(const std::string& s) {
        u64(s.size());
        buf_ += s;
    }
    const std::string& str() const { return buf_; }
    std::string take() { return std::move(buf_); }

private:
    std::string buf_;
};

class byte_reader {
public:
    explicit byte_reader(const std::string& s) : s_(s) {}
    std::uint8_t u8() {
        need(1);
        return std::uint8_t(s_[i_++]);
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int k = 0; k < 4; ++k) v |= std::uint32_t(std::uint8_t(s_[i_++])) << (8 * k);
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int k = 0; k < 8; ++k) v |= std::uint64_t(std::uint8_t(s_[i_++])) << (8 * k);
        return v;
    }
    std::vector<std::uint64_t> words() {
        std::uint64_t n = u64();
        if (n > (s_.size() - i_) / 8) fail(errc::invalid_argument, "corrupt word array length");
        std::vector<std::uint64_t> w(n);
        for (auto& x : w) x = u64();
        return w;
    }
    std::string raw() {
        std::uint64_t n = u64();
        need(n);
        std::string out = s_.substr(i_, n);
        i_ += n;
        return out;
    }
    bool done() const { return i_ == s_.size(); }

private:
    void need(std::uint64_t n) const {
        if (s_.size() - i_ < n) fail(errc::invalid_argument, "truncated input");
    }
    const std::string& s_;
    std::size_t i_ = 0;
};

}  // namespace grix

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "grix/bytes.hpp"
#include "grix/error.hpp"

namespace grix {

using u64 = std::uint64_t;

unsigned bits_for(u64 maxval);  // width needed to store values in [0, maxval]

// Fixed-width packed integer array.
class int_vector {
public:
    int_vector() = default;
    int_vector(std::size_t n, unsigned width);
    static int_vector of(const std::vector<u64>& v);
    static int_vector of(const std::vector<u64>& v, unsigned width);

    u64 get(std::size_t i) const {
        if (w_ == 0) return 0;
        u64 pos = u64(i) * w_;
        std::size_t k = pos >> 6;
        unsigned off = pos & 63;
        u64 v = words_[k] >> off;
        if (off + w_ > 64) v |= words_[k + 1] << (64 - off);
        return w_ == 64 ? v : v & ((u64(1) << w_) - 1);
    }
    u64 operator[](std::size_t i) const { return get(i); }
    void set(std::size_t i, u64 v);

    std::size_t size() const { return n_; }
    bool empty() const { return n_ == 0; }
    unsigned width() const { return w_; }
    u64 bits() const { return u64(n_) * w_; }
    std::vector<u64> to_vector() const;

    void save(byte_writer& out) const;
    static int_vector load(byte_reader& in);
    bool operator==(const int_vector& o) const { return n_ == o.n_ && w_ == o.w_ && words_ == o.words_; }

private:
    std::vector<u64> words_;
    std::size_t n_ = 0;
    unsigned w_ = 0;
};

// Bit-packed string over an alphabet of 2^cbits symbols.
class packed_string {
public:
    explicit packed_string(unsigned cbits = 8) : cb_(cbits ? cbits : 1) {}
    static packed_string of(const std::vector<std::uint32_t>& s, unsigned cbits);

    std::size_t size() const { return n_; }
    bool empty() const { return n_ == 0; }
    unsigned char_bits() const { return cb_; }
    std::uint32_t char_at(std::size_t i) const;
    packed_string slice(std::size_t i, std::size_t len) const;
    void append(const packed_string& o);
    void append(const packed_string& o, std::size_t i, std::size_t len);
    void push_back(std::uint32_t c);
    std::vector<std::uint32_t> to_vector() const;
    u64 bits() const { return u64(n_) * cb_; }
    bool operator==(const packed_string& o) const;

    void save(byte_writer& out) const;
    static packed_string load(byte_reader& in);

private:
    u64 get_bits(u64 pos, unsigned len) const;
    void put_bits(u64 pos, unsigned len, u64 v);
    void grow(std::size_t n);

    std::vector<u64> words_;
    std::size_t n_ = 0;
    unsigned cb_;
};

enum class bucket_search : std::uint8_t { scan, binary };

// rank over a sparse set: answers |{x in X : x < y}| by bucketing [0, u) into
// width-s intervals and searching the elements of one bucket.
class bucketed_rank {
public:
    bucketed_rank() = default;
    bucketed_rank(const std::vector<u64>& xs, u64 u, u64 s, bucket_search how = bucket_search::scan);

    u64 rank(u64 y) const;
    u64 universe() const { return u_; }
    u64 width() const { return s_; }
    std::size_t count() const { return xs_.size(); }
    std::size_t max_bucket() const;
    u64 bits() const { return xs_.bits() + pref_.bits() + 3 * 64; }

    void save(byte_writer& out) const;
    static bucketed_rank load(byte_reader& in);

private:
    int_vector xs_;
    int_vector pref_;  // pref_[b] = number of elements in buckets before b
    u64 u_ = 0, s_ = 1;
    bucket_search how_ = bucket_search::scan;
};

// Plain bitvector with rank1 and select1 directories.
class bitvector_rs {
public:
    bitvector_rs() = default;
    explicit bitvector_rs(const std::vector<bool>& bits);
    bitvector_rs(std::vector<u64> words, u64 nbits);

    bool get(u64 i) const { return (words_[i >> 6] >> (i & 63)) & 1; }
    u64 size() const { return n_; }
    u64 ones() const { return ones_; }
    u64 rank1(u64 i) const;    // ones in [0, i)
    u64 select1(u64 r) const;  // position of the r-th one, 0-based
    u64 bits() const;

    void save(byte_writer& out) const;
    static bitvector_rs load(byte_reader& in);

private:
    void build();

    std::vector<u64> words_;
    u64 n_ = 0, ones_ = 0;
    std::vector<u64> super_;           // ones before each 512-bit superblock
    std::vector<std::uint16_t> block_; // ones before each word within its superblock
    std::vector<u64> sample_;          // superblock holding every 512th one
};

// Elias-Fano encoding of a non-decreasing sequence; select in O(1) amortized words.
class elias_fano {
public:
    elias_fano() = default;
    elias_fano(const std::vector<u64>& xs, u64 u);

    u64 select(u64 r) const;
    std::size_t size() const { return n_; }
    u64 universe() const { return u_; }
    u64 bits() const;

    void save(byte_writer& out) const;
    static elias_fano load(byte_reader& in);

private:
    int_vector low_;
    std::vector<u64> high_;
    u64 high_len_ = 0;
    int_vector sample_;  // position in high_ of every 64th one
    u64 n_ = 0, u_ = 0;
    unsigned l_ = 0;
};

// Level ancestors in a forest. Jump pointers bring a query within reach of a
// ladder (long path extended upward), which then answers by indexing.
class level_ancestor {
public:
    static constexpr std::uint32_t none = ~std::uint32_t(0);

    level_ancestor() = default;
    explicit level_ancestor(const std::vector<std::uint32_t>& parent);

    std::uint32_t level(std::uint32_t v) const { return depth_[v]; }
    std::uint32_t query(std::uint32_t v, std::uint32_t l) const;
    std::size_t size() const { return depth_.size(); }
    u64 bits() const;

private:
    std::vector<std::uint32_t> depth_;
    std::vector<std::vector<std::uint32_t>> up_;  // up_[h][v] = 2^h-th ancestor or none
    std::vector<std::uint32_t> ladder_of_, index_in_;
    std::vector<std::uint32_t> ladder_begin_, ladders_;
};

}  // namespace grix

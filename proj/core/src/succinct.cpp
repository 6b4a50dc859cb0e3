#include "grix/succinct.hpp"

#include <algorithm>
#include <array>
#include <bit>

namespace grix {

namespace {

// select_in_byte[b][r]: position of the r-th one in byte b
const std::array<std::array<std::uint8_t, 8>, 256>& byte_select_table() {
    static const auto table = [] {
        std::array<std::array<std::uint8_t, 8>, 256> t{};
        for (unsigned b = 0; b < 256; ++b) {
            unsigned r = 0;
            for (unsigned i = 0; i < 8; ++i)
                if ((b >> i) & 1) t[b][r++] = std::uint8_t(i);
        }
        return t;
    }();
    return table;
}

unsigned select_in_word(u64 w, unsigned r) {
    const auto& t = byte_select_table();
    for (unsigned i = 0; i < 8; ++i) {
        unsigned byte = (w >> (8 * i)) & 0xff;
        unsigned c = std::popcount(byte);
        if (r < c) return 8 * i + t[byte][r];
        r -= c;
    }
    return 64;
}

std::size_t words_for(u64 bits) { return std::size_t((bits + 63) / 64); }

}  // namespace

unsigned bits_for(u64 maxval) { return unsigned(std::bit_width(maxval)); }

// ---- int_vector

int_vector::int_vector(std::size_t n, unsigned width) : n_(n), w_(width) {
    if (width > 64) fail(errc::invalid_argument, "int_vector width above 64");
    words_.assign(words_for(u64(n) * width), 0);
}

int_vector int_vector::of(const std::vector<u64>& v) {
    u64 mx = 0;
    for (auto x : v) mx = std::max(mx, x);
    return of(v, bits_for(mx));
}

int_vector int_vector::of(const std::vector<u64>& v, unsigned width) {
    int_vector out(v.size(), width);
    for (std::size_t i = 0; i < v.size(); ++i) out.set(i, v[i]);
    return out;
}

void int_vector::set(std::size_t i, u64 v) {
    if (w_ == 0) return;
    u64 mask = w_ == 64 ? ~u64(0) : (u64(1) << w_) - 1;
    v &= mask;
    u64 pos = u64(i) * w_;
    std::size_t k = pos >> 6;
    unsigned off = pos & 63;
    words_[k] = (words_[k] & ~(mask << off)) | (v << off);
    if (off + w_ > 64) {
        unsigned hi = off + w_ - 64;
        u64 hmask = (u64(1) << hi) - 1;
        words_[k + 1] = (words_[k + 1] & ~hmask) | (v >> (64 - off));
    }
}

std::vector<u64> int_vector::to_vector() const {
    std::vector<u64> out(n_);
    for (std::size_t i = 0; i < n_; ++i) out[i] = get(i);
    return out;
}

void int_vector::save(byte_writer& out) const {
    out.u64(n_);
    out.u8(std::uint8_t(w_));
    out.words(words_);
}

int_vector int_vector::load(byte_reader& in) {
    int_vector v;
    v.n_ = in.u64();
    v.w_ = in.u8();
    v.words_ = in.words();
    if (v.w_ > 64 || v.words_.size() != words_for(u64(v.n_) * v.w_))
        fail(errc::invalid_argument, "corrupt int_vector");
    return v;
}

// ---- packed_string

packed_string packed_string::of(const std::vector<std::uint32_t>& s, unsigned cbits) {
    packed_string p(cbits);
    p.grow(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) p.put_bits(u64(i) * p.cb_, p.cb_, s[i]);
    return p;
}

void packed_string::grow(std::size_t n) {
    n_ = n;
    words_.resize(words_for(u64(n) * cb_), 0);
}

u64 packed_string::get_bits(u64 pos, unsigned len) const {
    std::size_t k = pos >> 6;
    unsigned off = pos & 63;
    u64 v = words_[k] >> off;
    if (off + len > 64) v |= words_[k + 1] << (64 - off);
    return len == 64 ? v : v & ((u64(1) << len) - 1);
}

void packed_string::put_bits(u64 pos, unsigned len, u64 v) {
    u64 mask = len == 64 ? ~u64(0) : (u64(1) << len) - 1;
    v &= mask;
    std::size_t k = pos >> 6;
    unsigned off = pos & 63;
    words_[k] = (words_[k] & ~(mask << off)) | (v << off);
    if (off + len > 64) {
        unsigned hi = off + len - 64;
        u64 hmask = (u64(1) << hi) - 1;
        words_[k + 1] = (words_[k + 1] & ~hmask) | (v >> (64 - off));
    }
}

std::uint32_t packed_string::char_at(std::size_t i) const {
    if (i >= n_) fail(errc::out_of_bounds, "char_at " + std::to_string(i) + " of " + std::to_string(n_));
    return std::uint32_t(get_bits(u64(i) * cb_, cb_));
}

packed_string packed_string::slice(std::size_t i, std::size_t len) const {
    packed_string out(cb_);
    out.append(*this, i, len);
    return out;
}

void packed_string::append(const packed_string& o) { append(o, 0, o.n_); }

void packed_string::append(const packed_string& o, std::size_t i, std::size_t len) {
    if (i > o.n_ || len > o.n_ - i) fail(errc::out_of_bounds, "slice past end of packed string");
    if (o.cb_ != cb_) fail(errc::invalid_argument, "packed strings with different character widths");
    u64 src = u64(i) * cb_, dst = u64(n_) * cb_, total = u64(len) * cb_;
    grow(n_ + len);
    while (total > 0) {
        unsigned chunk = unsigned(std::min<u64>(64, total));
        put_bits(dst, chunk, o.get_bits(src, chunk));
        src += chunk;
        dst += chunk;
        total -= chunk;
    }
}

void packed_string::push_back(std::uint32_t c) {
    grow(n_ + 1);
    put_bits(u64(n_ - 1) * cb_, cb_, c);
}

std::vector<std::uint32_t> packed_string::to_vector() const {
    std::vector<std::uint32_t> out(n_);
    for (std::size_t i = 0; i < n_; ++i) out[i] = std::uint32_t(get_bits(u64(i) * cb_, cb_));
    return out;
}

bool packed_string::operator==(const packed_string& o) const {
    if (n_ != o.n_ || cb_ != o.cb_) return false;
    u64 total = u64(n_) * cb_;
    for (u64 p = 0; p < total; p += 64) {
        unsigned chunk = unsigned(std::min<u64>(64, total - p));
        if (get_bits(p, chunk) != o.get_bits(p, chunk)) return false;
    }
    return true;
}

void packed_string::save(byte_writer& out) const {
    out.u64(n_);
    out.u8(std::uint8_t(cb_));
    out.words(words_);
}

packed_string packed_string::load(byte_reader& in) {
    u64 n = in.u64();
    unsigned cb = in.u8();
    packed_string p(cb);
    p.n_ = n;
    p.words_ = in.words();
    if (cb == 0 || cb > 32 || p.words_.size() != words_for(n * cb))
        fail(errc::invalid_argument, "corrupt packed string");
    return p;
}

// ---- bucketed_rank

bucketed_rank::bucketed_rank(const std::vector<u64>& xs, u64 u, u64 s, bucket_search how)
    : u_(u), s_(s), how_(how) {
    if (s == 0) fail(errc::invalid_argument, "bucket width must be positive");
    for (std::size_t i = 1; i < xs.size(); ++i)
        if (xs[i] <= xs[i - 1]) fail(errc::unsorted_input, "rank set must be strictly increasing");
    if (!xs.empty() && xs.back() >= u) fail(errc::invalid_argument, "universe must exceed every element");
    u64 nb = u == 0 ? 1 : (u + s - 1) / s;
    std::vector<u64> pref(nb + 1, 0);
    for (auto x : xs) ++pref[x / s + 1];
    for (u64 b = 0; b < nb; ++b) pref[b + 1] += pref[b];
    xs_ = int_vector::of(xs);
    pref_ = int_vector::of(pref);
}

u64 bucketed_rank::rank(u64 y) const {
    if (y >= u_) return xs_.size();
    u64 b = y / s_;
    u64 lo = pref_[b], hi = pref_[b + 1];
    if (how_ == bucket_search::scan) {
        u64 c = lo;
        for (u64 i = lo; i < hi; ++i) c += xs_[i] < y;
        return c;
    }
    while (lo < hi) {
        u64 mid = (lo + hi) / 2;
        if (xs_[mid] < y) lo = mid + 1;
        else hi = mid;
    }
    return lo;
}

std::size_t bucketed_rank::max_bucket() const {
    std::size_t m = 0;
    for (std::size_t b = 0; b + 1 < pref_.size(); ++b) m = std::max<std::size_t>(m, pref_[b + 1] - pref_[b]);
    return m;
}

void bucketed_rank::save(byte_writer& out) const {
    out.u64(u_);
    out.u64(s_);
    out.u8(std::uint8_t(how_));
    xs_.save(out);
    pref_.save(out);
}

bucketed_rank bucketed_rank::load(byte_reader& in) {
    bucketed_rank r;
    r.u_ = in.u64();
    r.s_ = in.u64();
    r.how_ = bucket_search(in.u8());
    r.xs_ = int_vector::load(in);
    r.pref_ = int_vector::load(in);
    if (r.s_ == 0) fail(errc::invalid_argument, "corrupt bucketed rank");
    return r;
}

// ---- bitvector_rs

bitvector_rs::bitvector_rs(const std::vector<bool>& bits) : n_(bits.size()) {
    words_.assign(words_for(n_), 0);
    for (u64 i = 0; i < n_; ++i)
        if (bits[i]) words_[i >> 6] |= u64(1) << (i & 63);
    build();
}

bitvector_rs::bitvector_rs(std::vector<u64> words, u64 nbits) : words_(std::move(words)), n_(nbits) {
    words_.resize(words_for(n_), 0);
    if (n_ & 63) words_.back() &= (u64(1) << (n_ & 63)) - 1;
    build();
}

void bitvector_rs::build() {
    std::size_t nw = words_.size();
    std::size_t nsb = nw / 8 + 1;
    super_.assign(nsb + 1, 0);
    block_.assign(nw, 0);
    u64 total = 0;
    for (std::size_t sb = 0; sb < nsb; ++sb) {
        super_[sb] = total;
        u64 inner = 0;
        for (std::size_t k = sb * 8; k < std::min(nw, sb * 8 + 8); ++k) {
            block_[k] = std::uint16_t(inner);
            inner += std::popcount(words_[k]);
        }
        total += inner;
    }
    super_[nsb] = total;
    ones_ = total;
    sample_.clear();
    std::size_t sb = 0;
    for (u64 r = 0; r < ones_; r += 512) {
        while (super_[sb + 1] <= r) ++sb;
        sample_.push_back(sb);
    }
}

u64 bitvector_rs::rank1(u64 i) const {
    if (i > n_) fail(errc::out_of_bounds, "rank position past end of bitvector");
    std::size_t k = i >> 6;
    if (k == words_.size()) return ones_;
    u64 r = super_[k / 8] + block_[k];
    unsigned off = i & 63;
    if (off) r += std::popcount(words_[k] & ((u64(1) << off) - 1));
    return r;
}

u64 bitvector_rs::select1(u64 r) const {
    if (r >= ones_) fail(errc::rank_out_of_range, "select1 rank " + std::to_string(r) + " of " + std::to_string(ones_));
    std::size_t sb = sample_[r / 512];
    while (super_[sb + 1] <= r) ++sb;
    u64 rem = r - super_[sb];
    std::size_t k = sb * 8;
    std::size_t end = std::min(words_.size(), k + 8);
    while (k + 1 < end && block_[k + 1] <= rem) ++k;
    rem -= block_[k];
    return u64(k) * 64 + select_in_word(words_[k], unsigned(rem));
}

u64 bitvector_rs::bits() const {
    return u64(words_.size()) * 64 + u64(super_.size()) * 64 + u64(block_.size()) * 16 + u64(sample_.size()) * 64;
}

void bitvector_rs::save(byte_writer& out) const {
    out.u64(n_);
    out.words(words_);
}

bitvector_rs bitvector_rs::load(byte_reader& in) {
    u64 n = in.u64();
    auto w = in.words();
    if (w.size() != words_for(n)) fail(errc::invalid_argument, "corrupt bitvector");
    return bitvector_rs(std::move(w), n);
}

// ---- elias_fano

elias_fano::elias_fano(const std::vector<u64>& xs, u64 u) : n_(xs.size()), u_(u) {
    for (std::size_t i = 1; i < xs.size(); ++i)
        if (xs[i] < xs[i - 1]) fail(errc::unsorted_input, "Elias-Fano input must be non-decreasing");
    if (!xs.empty() && xs.back() >= u) fail(errc::invalid_argument, "universe must exceed every element");
    if (n_ == 0) return;
    l_ = u > n_ ? unsigned(std::bit_width(u / n_) - 1) : 0;
    high_len_ = n_ + ((u - 1) >> l_) + 1;
    high_.assign(words_for(high_len_), 0);
    std::vector<u64> lows(n_), samples;
    u64 lmask = l_ == 0 ? 0 : (u64(1) << l_) - 1;
    for (u64 i = 0; i < n_; ++i) {
        lows[i] = xs[i] & lmask;
        u64 p = (xs[i] >> l_) + i;
        high_[p >> 6] |= u64(1) << (p & 63);
        if (i % 64 == 0) samples.push_back(p);
    }
    low_ = int_vector::of(lows, l_);
    sample_ = int_vector::of(samples, bits_for(high_len_));
}

u64 elias_fano::select(u64 r) const {
    if (r >= n_) fail(errc::rank_out_of_range, "select rank " + std::to_string(r) + " of " + std::to_string(n_));
    u64 pos = sample_[r / 64];
    unsigned rem = unsigned(r % 64);
    std::size_t k = pos >> 6;
    u64 w = high_[k] & (~u64(0) << (pos & 63));
    for (unsigned c = std::popcount(w); c <= rem; c = std::popcount(w)) {
        rem -= c;
        w = high_[++k];
    }
    u64 p = u64(k) * 64 + select_in_word(w, rem);
    return ((p - r) << l_) | low_[r];
}

u64 elias_fano::bits() const { return low_.bits() + high_len_ + sample_.bits(); }

void elias_fano::save(byte_writer& out) const {
    out.u64(n_);
    out.u64(u_);
    out.u8(std::uint8_t(l_));
    out.u64(high_len_);
    low_.save(out);
    out.words(high_);
    sample_.save(out);
}

elias_fano elias_fano::load(byte_reader& in) {
    elias_fano e;
    e.n_ = in.u64();
    e.u_ = in.u64();
    e.l_ = in.u8();
    e.high_len_ = in.u64();
    e.low_ = int_vector::load(in);
    e.high_ = in.words();
    e.sample_ = int_vector::load(in);
    if (e.low_.size() != e.n_ || e.high_.size() != words_for(e.high_len_) ||
        e.sample_.size() != (e.n_ + 63) / 64)
        fail(errc::invalid_argument, "corrupt Elias-Fano structure");
    return e;
}

// ---- level_ancestor

level_ancestor::level_ancestor(const std::vector<std::uint32_t>& parent) {
    std::size_t n = parent.size();
    depth_.assign(n, none);
    std::vector<std::uint32_t> stack;
    for (std::uint32_t v = 0; v < n; ++v) {
        std::uint32_t x = v;
        while (depth_[x] == none && parent[x] != none) {
            if (parent[x] >= n) fail(errc::invalid_argument, "parent id out of range");
            stack.push_back(x);
            x = parent[x];
            if (stack.size() > n) fail(errc::cyclic_grammar, "parent pointers contain a cycle");
        }
        if (depth_[x] == none) depth_[x] = 0;
        while (!stack.empty()) {
            depth_[stack.back()] = depth_[parent[stack.back()]] + 1;
            stack.pop_back();
        }
    }

    std::uint32_t maxd = 0;
    for (auto d : depth_) maxd = std::max(maxd, d);
    up_.emplace_back(parent);
    for (unsigned h = 1; (std::uint64_t(1) << h) <= maxd; ++h) {
        const auto& prev = up_.back();
        std::vector<std::uint32_t> next(n, none);
        for (std::size_t v = 0; v < n; ++v)
            if (prev[v] != none) next[v] = prev[prev[v]];
        up_.push_back(std::move(next));
    }

    // long-path decomposition, children processed before parents by depth
    std::vector<std::uint32_t> order(n);
    for (std::uint32_t v = 0; v < n; ++v) order[v] = v;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return depth_[a] > depth_[b]; });
    std::vector<std::uint32_t> height(n, 0), longc(n, none);
    for (auto v : order) {
        std::uint32_t p = parent[v];
        if (p == none) continue;
        if (longc[p] == none || height[v] + 1 > height[p]) {
            longc[p] = v;
            height[p] = height[v] + 1;
        }
    }
    ladder_of_.assign(n, none);
    index_in_.assign(n, 0);
    for (std::uint32_t t = 0; t < n; ++t) {
        if (parent[t] != none && longc[parent[t]] == t) continue;
        std::vector<std::uint32_t> path;
        for (std::uint32_t x = t; x != none; x = longc[x]) path.push_back(x);
        std::uint32_t ext = std::min<std::uint32_t>(std::uint32_t(path.size()), depth_[t]);
        std::vector<std::uint32_t> above(ext);
        std::uint32_t x = t;
        for (std::uint32_t i = 0; i < ext; ++i) above[ext - 1 - i] = x = parent[x];
        std::uint32_t id = std::uint32_t(ladder_begin_.size());
        ladder_begin_.push_back(std::uint32_t(ladders_.size()));
        ladders_.insert(ladders_.end(), above.begin(), above.end());
        for (std::size_t i = 0; i < path.size(); ++i) {
            ladder_of_[path[i]] = id;
            index_in_[path[i]] = ext + std::uint32_t(i);
        }
        ladders_.insert(ladders_.end(), path.begin(), path.end());
    }
}

std::uint32_t level_ancestor::query(std::uint32_t v, std::uint32_t l) const {
    if (v >= depth_.size()) fail(errc::invalid_argument, "node id out of range");
    if (l > depth_[v])
        fail(errc::level_out_of_range, "level " + std::to_string(l) + " above node at level " + std::to_string(depth_[v]));
    std::uint32_t d = depth_[v] - l;
    if (d == 0) return v;
    unsigned h = unsigned(std::bit_width(d) - 1);
    std::uint32_t u = up_[h][v];
    std::uint32_t rem = d - (std::uint32_t(1) << h);
    return ladders_[ladder_begin_[ladder_of_[u]] + index_in_[u] - rem];
}

u64 level_ancestor::bits() const {
    u64 b = 32 * (depth_.size() * 3 + ladder_begin_.size() + ladders_.size());
    for (const auto& t : up_) b += 32 * t.size();
    return b;
}

}  // namespace grix

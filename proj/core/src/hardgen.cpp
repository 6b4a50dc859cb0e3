#include "grix/hardgen.hpp"

#include <bit>
#include <cmath>

namespace grix {

namespace {

u64 checked_mul(u64 a, u64 b, const char* what) {
    u64 r;
    if (__builtin_mul_overflow(a, b, &r)) fail(errc::parameter_overflow, std::string(what) + " does not fit in 64 bits");
    return r;
}

u64 checked_pow(u64 b, u64 e, const char* what) {
    u64 r = 1;
    for (u64 k = 0; k < e; ++k) r = checked_mul(r, b, what);
    return r;
}

grammar binary_base(flavor kind) {
    grammar g;
    g.sigma = 2;
    g.weights = {1, 1};
    g.codes = {'0', '1'};
    g.quoted = {1, 1};
    g.kind = kind;
    return g;
}

std::uint32_t block_width(const block_sets& t) {
    if (t.empty()) fail(errc::invalid_argument, "at least one block is needed");
    const auto b = std::uint32_t(t[0].size());
    if (b == 0) fail(errc::invalid_argument, "blocks need B >= 1");
    for (const auto& s : t)
        if (s.size() != b) fail(errc::invalid_argument, "all blocks must have the same size");
    return b;
}

// W_i(1) is shared between parts; W_i(0) is built per part.
class level_builder {
public:
    level_builder(grammar& g, std::uint32_t b) : g_(g), b_(b), ones_{1} {}

    sym_t ones(std::size_t i) {
        while (ones_.size() <= i) {
            rule r;
            add(r, ones_.back(), b_);
            ones_.push_back(emit(std::move(r)));
        }
        return ones_[i];
    }

    sym_t part(const block_sets& t, std::size_t from, std::size_t n) {
        sym_t zero = 0;
        for (std::size_t i = 1; i <= n; ++i) {
            const auto& set = t[from + i - 1];
            const sym_t one = ones(i - 1);
            rule r;
            for (std::uint32_t x = 0; x < b_; ++x) add(r, set[x] ? one : zero, 1);
            zero = emit(std::move(r));
        }
        return zero;
    }

    void add(rule& r, sym_t s, u64 e) {
        if (g_.kind == flavor::rlslg) return append_run(r, s, e);
        for (u64 k = 0; k < e; ++k) r.push_back({s, 1});
    }

    sym_t emit(rule r) {
        if (r.size() == 1 && r[0].exp == 1) return r[0].sym;
        return g_.add_var(std::move(r));
    }

private:
    grammar& g_;
    std::uint32_t b_;
    std::vector<sym_t> ones_;
};

}  // namespace

grammar vy_grammar(const block_sets& t, flavor kind) {
    const auto b = block_width(t);
    checked_pow(b, t.size(), "B^N");
    grammar g = binary_base(kind);
    level_builder lb(g, b);
    g.start = lb.part(t, 0, t.size());
    return compact(g).g;
}

std::vector<u64> hard_instance::probes(const std::vector<std::uint32_t>& s) const {
    if (s.size() != std::size_t(p) * q) fail(errc::invalid_argument, "S needs one pick per block");
    std::vector<u64> out(q);
    for (std::uint32_t k = 0; k < q; ++k) {
        u64 pos = 0;
        for (std::uint32_t j = p; j-- > 0;) {
            if (s[std::size_t(k) * p + j] >= b) fail(errc::invalid_argument, "a pick lies outside [0, B)");
            pos = pos * b + s[std::size_t(k) * p + j];
        }
        out[k] = k * part_length + pos;
    }
    return out;
}

hard_instance blsd_grammar(const block_sets& t, std::uint32_t p, std::uint32_t q, flavor kind) {
    if (p == 0 || q == 0) fail(errc::invalid_argument, "P and Q must be positive");
    if (t.size() != std::size_t(p) * q) fail(errc::invalid_argument, "PQ blocks are needed");
    hard_instance h;
    h.p = p;
    h.q = q;
    h.b = block_width(t);
    h.t = t;
    h.part_length = checked_pow(h.b, p, "B^P");
    checked_mul(h.part_length, q, "Q B^P");
    h.g = binary_base(kind);
    level_builder lb(h.g, h.b);
    rule top;
    for (std::uint32_t k = 0; k < q; ++k) lb.add(top, lb.part(t, std::size_t(k) * p, p), 1);
    h.g.start = q == 1 ? top[0].sym : lb.emit(std::move(top));
    h.g = compact(h.g).g;
    return h;
}

std::vector<bool> blsd_eval(const block_sets& t, const std::vector<std::uint32_t>& s, std::uint32_t p,
                            std::uint32_t q) {
    std::vector<bool> out(q, false);
    for (std::uint32_t k = 0; k < q; ++k)
        for (std::uint32_t j = 0; j < p; ++j) {
            const std::size_t i = std::size_t(k) * p + j;
            if (t[i][s[i]]) out[k] = true;
        }
    return out;
}

grammar pad_grammar(const grammar& g, u64 n_target, sym_t zero) {
    if (!g.is_terminal(zero)) fail(errc::invalid_argument, "the padding symbol must be a terminal");
    const u64 n = derive_stats(g).length[g.start];
    if (n_target < n) fail(errc::invalid_argument, "target length below the current length");
    const u64 m = n_target - n;
    if (m == 0) return g;
    grammar out = g;
    const unsigned top = unsigned(std::bit_width(m)) - 1;
    std::vector<sym_t> z{zero};
    for (unsigned i = 1; i <= top; ++i) {
        if (out.kind == flavor::rlslg) z.push_back(out.add_var({{z.back(), 2}}));
        else z.push_back(out.add_var({{z.back(), 1}, {z.back(), 1}}));
    }
    rule r{{g.start, 1}};
    for (unsigned i = top + 1; i-- > 0;)
        if (m >> i & 1) {
            if (out.kind == flavor::rlslg) append_run(r, z[i], 1);
            else r.push_back({z[i], 1});
        }
    out.start = out.add_var(std::move(r));
    return out;
}

hard_params pick_params(u64 n, u64 g, unsigned w, double epsilon) {
    if (n < 2 || g < 1 || w < 1 || epsilon < 0) fail(errc::invalid_argument, "need n >= 2, g >= 1, w >= 1, epsilon >= 0");
    if (n < g) fail(errc::regime_violation, "n >= g fails");
    const double logn = std::log2(double(n));
    const double wp = std::pow(double(w), 1 + epsilon);
    if (double(g) < 25 * wp * logn) fail(errc::regime_violation, "g >= 25 w^(1+eps) log n fails");
    hard_params h;
    h.b = std::uint32_t(1 + std::floor(wp));
    // P - 1 is the largest k with B^k g <= n
    h.p = 1;
    for (unsigned __int128 x = h.b * (unsigned __int128)g; x <= n; x *= h.b) ++h.p;
    const double qd = std::floor((double(g) - 5 * logn) / (5.0 * h.p * h.b));
    if (qd < 1) fail(errc::regime_violation, "Q >= 1 fails");
    h.q = std::uint32_t(qd);
    h.n_prime = checked_mul(checked_pow(h.b, h.p, "B^P"), h.q, "Q B^P");
    h.g_prime = 5 * u64(h.p) * h.q * h.b;
    if (h.n_prime > n) fail(errc::regime_violation, "Q B^P <= n fails");
    if (double(h.g_prime) > double(g) - 5 * logn) fail(errc::regime_violation, "5PQB <= g - 5 log n fails");
    return h;
}

block_sets random_blocks(std::size_t count, std::uint32_t b, std::mt19937_64& rng, double density, std::uint32_t p) {
    if (density < 0) density = 1 - std::pow(0.5, 1.0 / std::max<std::uint32_t>(p, 1));
    std::bernoulli_distribution coin(std::clamp(density, 0.0, 1.0));
    block_sets t(count, std::vector<bool>(b));
    for (auto& s : t)
        for (std::uint32_t x = 0; x < b; ++x) s[x] = coin(rng);
    return t;
}

hard_instance generate_hard(u64 n, u64 g, unsigned w, double epsilon, std::uint64_t seed, flavor kind) {
    const auto prm = pick_params(n, g, w, epsilon);
    std::mt19937_64 rng(seed);
    auto t = random_blocks(std::size_t(prm.p) * prm.q, prm.b, rng, -1, prm.p);
    auto h = blsd_grammar(std::move(t), prm.p, prm.q, kind);
    h.g = pad_grammar(h.g, n);
    return h;
}

}  // namespace grix

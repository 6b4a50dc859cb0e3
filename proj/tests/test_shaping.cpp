#include <doctest.h>

#include <boost/multiprecision/cpp_int.hpp>
#include <random>

#include "grix/contracting.hpp"
#include "grix/shaping.hpp"
#include "oracle.hpp"

using namespace grix;
using boost::multiprecision::cpp_int;

namespace {

sym_t term(const grammar& g, char ch) {
    for (sym_t s = 0; s < g.sigma; ++s)
        if (g.code_of(s) == u64(ch)) return s;
    return no_sym;
}

sym_t var(const grammar& g, std::size_t idx) { return g.sigma + sym_t(idx); }

// calls f(symbol, weight, depth) for every node of the parse tree below s
template <class F>
void walk(const grammar& g, const std::vector<u64>& w, sym_t s, unsigned depth, F&& f) {
    f(s, w[s], depth);
    if (g.is_terminal(s)) return;
    for (const auto& r : g.rhs(s))
        for (u64 k = 0; k < r.exp; ++k) walk(g, w, r.sym, depth + 1, f);
}

cpp_int pow_int(u64 x, unsigned k) {
    cpp_int p = 1;
    for (unsigned i = 0; i < k; ++i) p *= x;
    return p;
}

// depth <= slack + max(0, log_tv(total / (tr * w))) in exact arithmetic
bool depth_ok(unsigned depth, unsigned slack, u64 total, u64 w, ratio tr, ratio tv) {
    if (depth <= slack) return true;
    unsigned k = depth - slack;
    return pow_int(tv.num, k) * tr.num * w <= cpp_int(total) * pow_int(tv.den, k) * tr.den;
}

grammar random_input(std::mt19937_64& rng, int it, u64 max_length) {
    oracle::gen_opts o;
    o.sigma = 2 + rng() % 4;
    o.vars = 5 + rng() % 60;
    o.max_rule = 2 + rng() % 4;
    o.max_exp = it % 2 ? 1 : 1 + rng() % 5;
    o.max_weight = it % 3 == 0 ? 4 : 1;
    o.max_length = max_length;
    return oracle::random_grammar(rng, o);
}

}  // namespace

TEST_CASE("make_nice_rhs inlines heavy children") {
    auto g = parse_text(
        "start: A\nA -> B C\nB -> D E\nC -> F G\n"
        "D -> 'a' 'b'\nE -> 'c' 'd'\nF -> 'e' 'f'\nG -> 'g' 'h'\n");
    auto w = derive_stats(g).weight;
    REQUIRE(w[g.start] == 8);
    sym_t d = var(g, 3), e = var(g, 4), f = var(g, 5), gg = var(g, 6);
    CHECK(make_nice_rhs(g, w, g.start, ratio::of(4)) == rule{{d, 1}, {e, 1}, {f, 1}, {gg, 1}});
    CHECK(make_nice_rhs(g, w, g.start, ratio::of(2)) == g.rhs(g.start));
    CHECK(make_nice_rhs(g, w, g.start, ratio::of(3, 2)) == g.rhs(g.start));
    auto deep = make_nice_rhs(g, w, g.start, ratio::of(8));
    CHECK(deep.size() == 8);
    for (const auto& r : deep) CHECK(g.is_terminal(r.sym));
}

TEST_CASE("make_nice_rhs splits powers") {
    auto g = parse_text("start: S\nS -> A^3 'z'\nA -> B^4\nB -> 'x' 'y'\n");
    auto w = derive_stats(g).weight;
    REQUIRE(w[g.start] == 25);
    auto r = make_nice_rhs(g, w, g.start, ratio::of(5));
    CHECK(r == rule{{var(g, 2), 12}, {term(g, 'z'), 1}});
}

TEST_CASE("the checker flags each condition") {
    auto g = parse_text("start: S\nS -> 'a'^10 'b' 'c' 'd' 'e'\n");
    auto w = derive_stats(g).weight;
    CHECK(nice_violation(g, w, g.start, ratio::of(2), 1) == 2);
    CHECK(nice_violation(g, w, g.start, ratio::of(2), 2) == 3);
    CHECK(nice_violation(g, w, g.start, ratio::of(2), 3) == 0);

    auto h = parse_text("start: S\nS -> A 'c'\nA -> 'a' 'b'\n");
    CHECK(nice_violation(h, derive_stats(h).weight, h.start, ratio::of(2), 4) == 1);
    CHECK_FALSE(is_nice(h, ratio::of(2), ratio::of(2), 4));
}

TEST_CASE("fan-out parameters are validated") {
    auto g = parse_text("start: S\nS -> 'a' 'b'\n");
    CHECK_THROWS_AS(make_nice(g, 2, ratio::of(1), ratio::of(1)), error);
    CHECK_THROWS_AS(make_nice(g, 2, ratio::of(2), ratio::of(4)), error);
}

TEST_CASE("random contracting grammars become nice") {
    std::mt19937_64 rng(21);
    const std::vector<u64> taus{2, 4, 16, 256};
    for (int it = 0; it < 60; ++it) {
        auto g = random_input(rng, it, 10000);
        auto c = contract_rlslg(g);
        REQUIRE(is_contracting(c.g));
        auto cw = derive_stats(c.g).weight;
        for (u64 t : taus) {
            for (u64 rootf : {u64(1), u64(4)}) {
                ratio tv = ratio::of(t), tr = ratio::of(t * rootf);
                auto n = make_nice(c.g, c.d, tr, tv);
                CHECK(is_nice(n.g, tr, tv, c.d));
                auto w = derive_stats(n.g).weight;
                for (sym_t v = n.g.sigma; v < n.g.num_symbols(); ++v)
                    CHECK(expand(n.g, v) == expand(c.g, v));
                if (t == 2 && rootf == 1)
                    for (sym_t v = c.g.sigma; v < c.g.num_symbols(); ++v)
                        CHECK(n.g.rhs(v) == canonical(c.g.rhs(v)));
                bool heights = true;
                u64 total = w[n.g.start];
                walk(n.g, w, n.g.start, 0, [&](sym_t, u64 ws, unsigned depth) {
                    heights = heights && depth_ok(depth, 2, total, ws, tr, tv);
                });
                CHECK(heights);
            }
            (void)cw;
        }
    }
}

TEST_CASE("nice grammar size against the recorded constant") {
    // max over the corpus of |H| / (tau_r + |G| * tau_v)
    constexpr double golden = 1.0;  // measured 0.739
    std::mt19937_64 rng(22);
    double worst = 0;
    for (int it = 0; it < 40; ++it) {
        auto g = random_input(rng, it, 100000);
        auto c = contract_rlslg(g);
        u64 size_in = derive_stats(compact(c.g).g).size;
        for (u64 t : {2, 4, 16}) {
            auto n = make_nice(c.g, c.d, ratio::of(4 * t), ratio::of(t));
            u64 size_out = derive_stats(compact(n.g).g).size;
            worst = std::max(worst, double(size_out) / double(4 * t + size_in * t));
        }
    }
    MESSAGE("worst nice size ratio " << worst);
    CHECK(worst <= golden);
}

TEST_CASE("leafy: short variables become a single leaf") {
    auto g = parse_text("start: S\nS -> A A 'x'\nA -> 'a' 'b' 'c'\n");
    auto h = make_leafy(g, 2);
    CHECK(leafy_shape_error(h, true).empty());
    sym_t a = h.map[var(g, 1)];
    REQUIRE(a != no_sym);
    const rule& r = h.g.rhs(a);
    REQUIRE(r.size() == 1);
    CHECK(h.is_leaf(r[0].sym));
    CHECK(expand(h.g, r[0].sym) == std::vector<sym_t>{term(g, 'a'), term(g, 'b'), term(g, 'c')});
    CHECK(h.map[term(g, 'x')] == no_sym);
    CHECK(expand(h.g) == expand(g));
}

TEST_CASE("leafy: short powers repeat one middle leaf") {
    auto g = parse_text("start: S\nS -> A^9\nA -> 'a' 'b'\n");
    auto h = make_leafy(g, 3);
    CHECK(leafy_shape_error(h, true).empty());
    CHECK(expand(h.g) == expand(g));
    const rule& s = h.g.rhs(h.g.start);
    REQUIRE(s.size() == 3);
    const sym_t a = term(g, 'a'), b = term(g, 'b');
    CHECK(expand(h.g, s[0].sym) == std::vector<sym_t>{a, b, a});
    CHECK(expand(h.g, s[2].sym) == std::vector<sym_t>{b, a, b});
    const rule& mid = h.g.rhs(s[1].sym);
    REQUIRE(mid.size() == 1);
    CHECK(mid[0].exp == 3);
    CHECK(h.is_leaf(mid[0].sym));
    CHECK(h.block[mid[0].sym - h.g.sigma].to_vector() == std::vector<std::uint32_t>{b, a, b, a});
}

TEST_CASE("leafy: block size one keeps single characters") {
    std::mt19937_64 rng(23);
    for (int it = 0; it < 30; ++it) {
        auto g = random_input(rng, it, 3000);
        auto h = make_leafy(g, 1);
        CHECK(leafy_shape_error(h, true).empty());
        for (std::size_t v = 0; v < h.g.num_vars(); ++v)
            if (h.leaf[v]) CHECK(rule_length(h.g.rules[v]) == 1);
        for (sym_t s = 0; s < g.num_symbols(); ++s) CHECK(expand(h.g, h.map[s]) == expand(g, s));
    }
}

TEST_CASE("leafy: parameter errors") {
    auto g = parse_text("start: S\nS -> 'a' 'b' 'a'\n");
    try {
        make_leafy(g, 3, 2);
        FAIL("wide block accepted");
    } catch (const error& e) {
        CHECK(e.code() == errc::block_too_wide);
    }
    CHECK_THROWS_AS(make_leafy(g, 0), error);
    CHECK_THROWS_AS(make_leafy(g, 4), error);
    CHECK_NOTHROW(make_leafy(g, 3));
}

TEST_CASE("leafy: random grammars keep every long expansion") {
    std::mt19937_64 rng(24);
    for (int it = 0; it < 150; ++it) {
        auto g = random_input(rng, it, 20000);
        auto len = derive_stats(g).length;
        u64 b = 1 + rng() % std::min<u64>(len[g.start], 40);
        auto h = make_leafy(g, b);
        auto err = leafy_shape_error(h, true);
        CHECK_MESSAGE(err.empty(), err);
        for (sym_t s = 0; s < g.num_symbols(); ++s) {
            if (len[s] >= b) {
                REQUIRE(h.map[s] != no_sym);
                CHECK(expand(h.g, h.map[s]) == expand(g, s));
            } else {
                CHECK(h.map[s] == no_sym);
            }
        }
        for (std::size_t v = 0; v < h.g.num_vars(); ++v)
            if (!h.leaf[v]) CHECK(h.g.rules[v].size() <= 6);
    }
}

TEST_CASE("leafy nice grammars: shape, niceness and height") {
    std::mt19937_64 rng(25);
    struct params {
        u64 b, tr, tv;
    };
    for (params p : {params{4, 8, 2}, params{8, 64, 4}}) {
        for (int it = 0; it < 60; ++it) {
            auto g = random_input(rng, it, 10000);
            auto len = derive_stats(g).length;
            if (len[g.start] < p.b) continue;
            ratio tr = ratio::of(p.tr), tv = ratio::of(p.tv);
            auto h = make_leafy_nice(g, p.b, tr, tv);
            auto err = leafy_shape_error(h, false);
            CHECK_MESSAGE(err.empty(), err);
            for (sym_t s = 0; s < g.num_symbols(); ++s)
                if (len[s] >= p.b) CHECK(expand(h.g, h.map[s]) == expand(g, s));
            auto top = h.top();
            CHECK(is_nice(top.g, tr, tv, h.d));

            auto w = derive_stats(h.g).weight;
            u64 total = w[h.g.start];
            unsigned height = 0;
            walk(h.g, w, h.g.start, 0, [&](sym_t, u64, unsigned depth) { height = std::max(height, depth); });
            CHECK(depth_ok(height, 3, total, p.b, tr, tv));
        }
    }
}

TEST_CASE("leafy nice with one-character blocks") {
    std::mt19937_64 rng(26);
    for (int it = 0; it < 20; ++it) {
        auto g = random_input(rng, it, 5000);
        auto h = make_leafy_nice(g, 1, ratio::of(4), ratio::of(2));
        CHECK(leafy_shape_error(h, false).empty());
        CHECK(expand(h.g) == expand(g));
    }
}

#include <doctest.h>

#include <cmath>
#include <random>
#include <thread>

#include "grix/aggregates.hpp"
#include "oracle.hpp"

using namespace grix;

namespace {

// Last W characters of the concatenation, 4 bits each, with the count in the top byte.
class window_concat final : public monoid {
public:
    static constexpr unsigned W = 8;
    u64 identity() const override { return 0; }
    u64 combine(u64 x, u64 y) const override {
        u64 lx = x >> 56, ly = y >> 56;
        u64 cx = x & mask(lx), cy = y & mask(ly);
        u64 len = std::min<u64>(W, lx + ly);
        u64 chars = ((cx << (4 * ly)) | cy) & mask(len);
        return (len << 56) | chars;
    }
    unsigned element_bits() const override { return 64; }
    static u64 of(u64 c) { return (u64(1) << 56) | (c & 15); }

private:
    static u64 mask(u64 len) { return len >= 14 ? ~u64(0) >> 8 : (u64(1) << (4 * len)) - 1; }
};

grammar random_input(std::mt19937_64& rng, int it, u64 max_length, u64 max_weight, std::uint32_t sigma = 0) {
    oracle::gen_opts o;
    o.sigma = sigma ? sigma : 2 + rng() % 5;
    o.vars = 4 + rng() % 50;
    o.max_rule = 2 + rng() % 4;
    o.max_exp = it % 2 ? 1 : 1 + rng() % 8;
    o.max_weight = max_weight;
    o.max_length = max_length;
    return oracle::random_grammar(rng, o);
}

std::vector<u64> df_codes(const grammar& g) {
    std::vector<u64> out;
    for (sym_t t : expand(g)) out.push_back(g.code_of(t));
    return out;
}

}  // namespace

TEST_CASE("monoid laws") {
    std::mt19937_64 rng(41);
    capped_sum cs(1000);
    max_monoid mx(20);
    window_concat wc;
    std::vector<std::pair<const monoid*, std::function<u64()>>> ms = {
        {&cs, [&] { return rng() % 300; }},
        {&mx, [&] { return rng() % (1 << 20); }},
        {&wc, [&] {
             u64 x = wc.identity();
             for (u64 k = rng() % 12; k > 0; --k) x = wc.combine(x, window_concat::of(rng() % 16));
             return x;
         }},
    };
    for (auto& [m, draw] : ms) {
        for (int t = 0; t < 2000; ++t) {
            u64 a = draw(), b = draw(), c = draw();
            REQUIRE(m->combine(m->combine(a, b), c) == m->combine(a, m->combine(b, c)));
            REQUIRE(m->combine(a, m->identity()) == a);
            REQUIRE(m->combine(m->identity(), a) == a);
        }
        for (u64 k = 0; k <= 64; ++k) {
            u64 x = draw(), fold = m->identity();
            for (u64 j = 0; j < k; ++j) fold = m->combine(fold, x);
            REQUIRE(m->repeat(k, x) == fold);
        }
    }
    CHECK(cs.repeat(u64(1) << 40, 7) == 1000);
    CHECK(cs.element_bits() == 10);
}

TEST_CASE("prefix sums on a small text") {
    auto g = parse_text("start: S\nS -> A A\nA -> 'a' 'b'\n");
    auto ix = access_index::build(g);
    prefix_sums ps(ix.primary(), std::make_shared<capped_sum>(), {1, 0});
    CHECK(ps.query(0) == 0);
    CHECK(ps.query(3) == 2);
    CHECK(ps.query(1) == 1);
    CHECK(ps.total() == 2);
    CHECK_THROWS_AS(ps.query(4), error);
}

TEST_CASE("prefix sums agree with a fold of the text") {
    std::mt19937_64 rng(42);
    window_concat wc;
    for (int it = 0; it < 90; ++it) {
        bool weighted = it % 3 == 0;
        auto g = normalize(random_input(rng, it, 3000, weighted ? 4 : 1)).g;
        build_config cfg;
        cfg.leafy = it % 2 == 1;
        cfg.tau = ratio::of(2 + rng() % 8);
        auto ix = access_index::build(g, cfg);
        auto text = expand(g);
        auto starts = oracle::weighted_starts(g, text);

        std::vector<std::shared_ptr<const monoid>> ms = {std::make_shared<capped_sum>(1 + rng() % 5000),
                                                         std::make_shared<max_monoid>(),
                                                         std::make_shared<window_concat>()};
        for (std::size_t which = 0; which < ms.size(); ++which) {
            std::vector<u64> phi(g.sigma);
            for (auto& x : phi) x = which == 2 ? window_concat::of(rng() % 16) : rng() % 100;
            prefix_sums ps(ix.primary(), ms[which], phi);
            const monoid& m = *ms[which];
            u64 acc = m.identity();
            std::size_t k = 0;
            for (u64 i = 0; i < ix.weight(); ++i) {
                while (k + 1 < starts.size() && starts[k + 1] <= i) acc = m.combine(acc, phi[text[k++]]);
                REQUIRE(ps.query(i) == acc);
            }
            REQUIRE(ps.total() == m.combine(acc, phi[text.back()]));
        }
    }
}

TEST_CASE("weight monoid reproduces access offsets") {
    std::mt19937_64 rng(43);
    for (int it = 0; it < 30; ++it) {
        auto g = normalize(random_input(rng, it, 2000, 6)).g;
        auto ix = access_index::build(g);
        prefix_sums ps(ix.primary(), std::make_shared<capped_sum>(), g.weights);
        for (u64 i = 0; i < ix.weight(); ++i) REQUIRE(ps.query(i) == ix.access(i).offset);
    }
}

TEST_CASE("rank on a small text") {
    auto g = parse_text("start: S\nS -> A A\nA -> 'a' 'b'\n");
    for (bool leafy : {false, true}) {
        build_config cfg;
        cfg.leafy = leafy;
        auto ix = access_index::build(g, cfg);
        aggregate_index ai(ix);
        CHECK(ai.rank(1, 4) == 2);
        CHECK(ai.rank(0, 0) == 0);
        CHECK(ai.rank(0, 3) == 2);
        CHECK(ai.count(0) == 2);
        try {
            ai.rank(2, 0);
            FAIL("expected an error");
        } catch (const error& e) {
            CHECK(e.code() == errc::unknown_terminal);
        }
        CHECK_THROWS_AS(ai.rank(0, 5), error);
    }
}

TEST_CASE("rank agrees with counting and with access") {
    std::mt19937_64 rng(44);
    for (int it = 0; it < 60; ++it) {
        bool weighted = it % 4 == 3;
        auto g = normalize(random_input(rng, it, 4000, weighted ? 3 : 1)).g;
        build_config cfg;
        cfg.leafy = it % 2 == 0;
        cfg.tau = ratio::of(2 + rng() % 6);
        auto ix = access_index::build(g, cfg);
        aggregate_index ai(ix, it % 5 == 0);
        auto text = expand(g);
        auto starts = oracle::weighted_starts(g, text);
        for (sym_t c = 0; c < g.sigma; ++c) {
            u64 cnt = 0;
            std::size_t k = 0;
            for (u64 i = 0; i < ix.weight(); ++i) {
                while (k + 1 < starts.size() && starts[k + 1] <= i) cnt += text[k++] == c;
                REQUIRE(ai.rank(c, i) == cnt);
            }
            REQUIRE(ai.rank(c, ix.weight()) == cnt + (text.back() == c));
            if (!weighted)
                for (u64 i = 0; i < ix.length(); ++i)
                    REQUIRE((ix.access(i).c == c) == (ai.rank(c, i) < ai.rank(c, i + 1)));
        }
    }
}

TEST_CASE("df transform by hand") {
    auto one = parse_text("start: S\nS -> '1'\n");
    auto d1 = df_transform(one, 0);
    CHECK(df_codes(d1.g) == std::vector<u64>{0, 0});
    CHECK(d1.ones == 1);

    auto t = trivial_builder({0, 0, 1, 0, 1, 1, 0}, 2);
    auto d = df_transform(t, 1);
    CHECK(df_codes(d.g) == std::vector<u64>{2, 1, 0, 1});
    CHECK(d.ones == 3);
    CHECK(df_of({0, 0, 1, 0, 1, 1, 0}, 1) == std::vector<u64>{2, 1, 0, 1});

    auto zeros = parse_text("start: S\nS -> A^5\nA -> '0'^2\n");
    CHECK(df_codes(df_transform(zeros, 0).g) == std::vector<u64>(11, 0));
    CHECK_THROWS_AS(df_transform(zeros, 1), error);

    auto three = parse_text("start: S\nS -> 'a' 'b' 'c'\n");
    try {
        df_transform(three, 0);
        FAIL("expected an error");
    } catch (const error& e) {
        CHECK(e.code() == errc::non_binary_alphabet);
    }
}

TEST_CASE("df transform matches df of the expansion") {
    std::mt19937_64 rng(45);
    for (int it = 0; it < 300; ++it) {
        auto g = random_input(rng, it, 100000, 1, 2);
        sym_t one = sym_t(rng() % 2);
        auto d = df_transform(g, one);
        validate(d.g);
        auto text = expand(g);
        auto want = df_of(text, one);
        REQUIRE(df_codes(d.g) == want);
        REQUIRE(d.ones == want.size() - 1);
        CHECK(derive_stats(d.g).size <= 4 * derive_stats(normalize(g).g).size + 3);
    }
}

TEST_CASE("select on a small text") {
    auto t = trivial_builder({0, 0, 1, 0, 1, 1, 0}, 2);
    auto ix = access_index::build(t);
    aggregate_index ai(ix);
    CHECK(ai.select(1, 0) == 2);
    CHECK(ai.select(1, 1) == 4);
    CHECK(ai.select(1, 2) == 5);
    CHECK(ai.select(0, 3) == 6);
    try {
        ai.select(1, 3);
        FAIL("expected an error");
    } catch (const error& e) {
        CHECK(e.code() == errc::rank_out_of_range);
    }
    auto single = parse_text("start: S\nS -> A A 'x'\nA -> 'y' 'y' 'y'\n");
    auto is = access_index::build(single);
    aggregate_index as(is);
    sym_t x = single.code_of(0) == 'x' ? 0 : 1;
    CHECK(as.select(x, 0) == 6);
    CHECK(as.select(1 - x, 5) == 5);
}

TEST_CASE("select through the df grammar") {
    // long periodic texts keep the grammar small, so select takes the df route
    std::mt19937_64 rng(46);
    int df_route = 0;
    for (int it = 0; it < 40; ++it) {
        grammar g = random_input(rng, it, 200, 1, 2 + it % 3);
        g = normalize(g).g;
        g.rules.push_back({{g.start, 200 + rng() % 800}});
        g.start = g.sigma + sym_t(g.rules.size() - 1);
        g.kind = flavor::rlslg;
        build_config cfg;
        cfg.tau = ratio::of(2 + rng() % 3);
        cfg.leafy = it % 2 == 0;
        auto ix = access_index::build(g, cfg);
        aggregate_index ai(ix);
        auto text = expand(g);
        for (sym_t c = 0; c < g.sigma; ++c) {
            std::vector<u64> pos;
            for (u64 i = 0; i < text.size(); ++i)
                if (text[i] == c) pos.push_back(i);
            const auto& sel = ai.selects_of(c);
            df_route += !sel.plain();
            REQUIRE(sel.ones() == pos.size());
            for (u64 r = 0; r < pos.size(); r += 1 + rng() % 7) REQUIRE(ai.select(c, r) == pos[r]);
            for (int q = 0; q < 200; ++q) {
                u64 i = rng() % text.size();
                u64 r = ai.rank(c, i);
                if (r == pos.size()) continue;
                u64 s = ai.select(c, r);
                REQUIRE(s >= i);
                REQUIRE((s == i) == (text[i] == c));
            }
        }
    }
    CHECK(df_route > 20);
}

TEST_CASE("Elias-Fano leaves stay within m log(u/m) per leaf") {
    std::mt19937_64 rng(47);
    double worst = 0;
    int checked = 0;
    for (int it = 0; it < 40; ++it) {
        grammar g = normalize(random_input(rng, it, 300, 1, 2)).g;
        g.rules.push_back({{g.start, 500 + rng() % 2000}});
        g.start = g.sigma + sym_t(g.rules.size() - 1);
        g.kind = flavor::rlslg;
        select_support s(g, 1, ratio::of(2));
        const child_engine* e = s.df_engine();
        if (!e) continue;
        // a leaf with m gaps summing below u needs about m(2 + log(u/m)) bits
        double bound = 0;
        for (sym_t v = e->sigma() + e->num_top(); v < e->num_symbols(); ++v) {
            double m = double(e->leaf_size(v)), u = 1;
            for (u64 k = 0; k < e->leaf_size(v); ++k) u += double(s.gap_sums().of_symbol(e->leaf_char(v, k)));
            bound += m * (2 + std::log2(std::max(1.0, u / m))) + 64;
        }
        worst = std::max(worst, double(s.gap_bits()) / bound);
        ++checked;
    }
    MESSAGE("largest ratio to the per-leaf bound: " << worst);
    CHECK(checked > 10);
    CHECK(worst <= 1.0);
}

TEST_CASE("concurrent first queries publish one structure") {
    std::mt19937_64 rng(48);
    auto g = normalize(random_input(rng, 0, 5000, 1, 4)).g;
    auto ix = access_index::build(g);
    aggregate_index ai(ix);
    auto text = expand(g);
    std::vector<std::thread> ts;
    std::vector<u64> got(8);
    for (int k = 0; k < 8; ++k)
        ts.emplace_back([&, k] {
            sym_t c = sym_t(k % 4);
            got[k] = ai.rank(c, ix.length()) + (ai.count(c) > 0 ? ai.select(c, 0) : 0);
        });
    for (auto& t : ts) t.join();
    for (int k = 0; k < 8; ++k) {
        sym_t c = sym_t(k % 4);
        u64 cnt = std::count(text.begin(), text.end(), c);
        u64 first = cnt ? u64(std::find(text.begin(), text.end(), c) - text.begin()) : 0;
        CHECK(got[k] == cnt + first);
    }
    CHECK(&ai.ranks_of(0) == &ai.ranks_of(0));
}

#include <doctest.h>

#include <boost/multiprecision/cpp_int.hpp>
#include <random>

#include "grix/access.hpp"
#include "grix/planner.hpp"
#include "oracle.hpp"

using namespace grix;
using boost::multiprecision::cpp_int;

namespace {

grammar random_input(std::mt19937_64& rng, int it, u64 max_length, u64 max_weight) {
    oracle::gen_opts o;
    o.sigma = 2 + rng() % 5;
    o.vars = 5 + rng() % 50;
    o.max_rule = 2 + rng() % 4;
    o.max_exp = it % 2 ? 1 : 1 + rng() % 6;
    o.max_weight = max_weight;
    o.max_length = max_length;
    return oracle::random_grammar(rng, o);
}

cpp_int pow_int(u64 x, unsigned k) {
    cpp_int p = 1;
    for (unsigned i = 0; i < k; ++i) p *= x;
    return p;
}

// steps <= 3 + max(0, log_tv(total / (tr * b))), exactly
bool steps_ok(unsigned steps, const engine_report& r) {
    if (steps <= 3) return true;
    unsigned k = steps - 3;
    return pow_int(r.tau_var.num, k) * r.tau_root.num * r.b <= cpp_int(r.total) * pow_int(r.tau_var.den, k) * r.tau_root.den;
}

void sweep(const access_index& ix, const grammar& g) {
    auto text = expand(g);
    auto starts = oracle::weighted_starts(g, text);
    REQUIRE(ix.length() == text.size());
    REQUIRE(ix.weight() == starts.back() + g.weights[text.back()]);
    const auto& rep = ix.answering_report();
    for (u64 i = 0; i < ix.weight(); ++i) {
        auto a = ix.access(i);
        std::size_t k = oracle::covering(starts, i);
        REQUIRE(a.c == text[k]);
        REQUIRE(a.pos == k);
        REQUIRE(a.offset == starts[k]);
        REQUIRE(steps_ok(a.steps, rep));
        REQUIRE(a.steps <= step_bound(rep));
    }
}

}  // namespace

TEST_CASE("default block is ceil(log n / log sigma)") {
    CHECK(default_block(1, 2) == 1);
    CHECK(default_block(2, 2) == 1);
    CHECK(default_block(1024, 2) == 10);
    CHECK(default_block(1025, 2) == 11);
    CHECK(default_block(1 << 20, 4) == 10);
    CHECK(default_block(1000, 10) == 3);
    CHECK(default_block(5, 1) == 3);  // unary alphabets count as binary
    CHECK(default_block(3, 2) == 2);
}

TEST_CASE("unroll_weights marks the first copy of each character") {
    auto g = parse_text("weights: 'a'=3 'b'=1\nstart: S\nS -> 'a' 'b' 'a'\n");
    auto h = unroll_weights(g);
    validate(h);
    CHECK(h.sigma == 4);
    CHECK(h.unit_weights());
    sym_t a = 0, b = 1;
    CHECK(expand(h) == std::vector<sym_t>{a + 2, a, a, b + 2, a + 2, a, a});
}

TEST_CASE("access on every index flavour") {
    std::mt19937_64 rng(21);
    for (int it = 0; it < 120; ++it) {
        bool weighted = it % 4 >= 2;
        auto g = random_input(rng, it, 2500, weighted ? 5 : 1);
        build_config cfg;
        cfg.tau = ratio::of(2 + rng() % 14);
        cfg.leafy = it % 2 == 0;
        cfg.how = it % 8 < 4 ? bucket_search::scan : bucket_search::binary;
        auto ix = access_index::build(g, cfg);
        CHECK(ix.report().unrolled.has_value() == (weighted && cfg.leafy));
        CHECK(ix.leafy() == (cfg.leafy && !weighted));
        sweep(ix, ix.source());
        CHECK(ix.bits() == ix.report().primary.bits + (ix.unrolled() ? ix.report().unrolled->bits : 0));
    }
}

TEST_CASE("weighted leafy indexes keep both engines correct") {
    std::mt19937_64 rng(22);
    for (int it = 0; it < 30; ++it) {
        auto g = normalize(random_input(rng, it, 1500, 4)).g;
        if (g.unit_weights()) continue;
        build_config cfg;
        cfg.leafy = true;
        cfg.tau = ratio::of(3);
        auto ix = access_index::build(g, cfg);
        REQUIRE(ix.unrolled());
        auto text = expand(g);
        auto starts = oracle::weighted_starts(g, text);
        for (u64 i = 0; i < ix.weight(); ++i) {
            auto p = ix.primary().access(i), q = ix.unrolled()->access(i);
            std::size_t k = oracle::covering(starts, i);
            REQUIRE(p.c == text[k]);
            REQUIRE(q.c - (q.c >= g.sigma ? g.sigma : 0) == text[k]);
            REQUIRE(p.pos == k);
            REQUIRE(q.pos == k);
            REQUIRE(p.offset == q.offset);
        }
        CHECK(ix.report().answer_from_unrolled == (ix.report().unrolled->height < ix.report().primary.height));
    }
}

TEST_CASE("single character and explicit single leaf") {
    auto g = parse_text("start: S\nS -> 'q'\n");
    for (bool leafy : {false, true}) {
        build_config cfg;
        cfg.leafy = leafy;
        auto ix = access_index::build(g, cfg);
        CHECK(ix.weight() == 1);
        CHECK(ix.access(0).c == 0);
        CHECK_THROWS_AS(ix.access(1), error);
    }
    auto t = parse_text("start: S\nS -> A A 'c'\nA -> 'a' 'b' 'a'\n");
    build_config cfg;
    cfg.leafy = true;
    cfg.block = 7;
    auto ix = access_index::build(t, cfg);
    CHECK(ix.primary().num_leaves() == 1);
    CHECK(ix.report().primary.height == 1);
    sweep(ix, ix.source());
}

TEST_CASE("tau must exceed one") {
    auto g = parse_text("start: S\nS -> 'a' 'b'\n");
    build_config cfg;
    cfg.tau = ratio::of(1);
    try {
        access_index::build(g, cfg);
        FAIL("expected an error");
    } catch (const error& e) {
        CHECK(e.code() == errc::invalid_argument);
    }
}

TEST_CASE("index serialization round-trips byte for byte") {
    std::mt19937_64 rng(23);
    for (int it = 0; it < 24; ++it) {
        auto g = random_input(rng, it, 1500, it % 3 == 0 ? 3 : 1);
        build_config cfg;
        cfg.leafy = it % 2 == 0;
        cfg.tau = ratio::of(7, 2);
        auto ix = access_index::build(g, cfg);
        auto bytes = ix.serialize();
        auto back = access_index::deserialize(bytes);
        CHECK(back.serialize() == bytes);
        CHECK(back.bits() == ix.bits());
        CHECK(back.config().tau == cfg.tau);
        for (u64 i = 0; i < ix.weight(); i += 1 + rng() % 3) REQUIRE(back.access(i) == ix.access(i));
    }
}

TEST_CASE("corrupt index bytes are rejected") {
    auto ix = access_index::build(parse_text("start: S\nS -> A A\nA -> 'a' 'b' 'c'\n"));
    auto bytes = ix.serialize();
    CHECK_THROWS_AS(access_index::deserialize("GRXG" + bytes.substr(4)), error);
    CHECK_THROWS_AS(access_index::deserialize(bytes.substr(0, bytes.size() - 3)), error);
    CHECK_THROWS_AS(access_index::deserialize(bytes + "x"), error);
    auto v2 = bytes;
    v2[4] = 9;
    CHECK_THROWS_AS(access_index::deserialize(v2), error);
}

TEST_CASE("planner picks tau and block from the budget") {
    auto p = plan(u64(1) << 20, 1000, 2, 1250, 64);
    CHECK(p.tau == ratio::of(4));
    CHECK(p.b == 20);
    CHECK_FALSE(p.explicit_text);
    // log_4(2^20 / 80000) = 1.86
    CHECK(p.predicted_depth == 2);

    auto q = plan(u64(1) << 20, 1000, 2, 400, 64);
    CHECK(q.tau == ratio::of(2));  // 25600 / 20000 rounds up to the floor of 2

    try {
        plan(u64(1) << 20, 1000, 2, 312, 64);
        FAIL("expected an error");
    } catch (const error& e) {
        CHECK(e.code() == errc::budget_out_of_range);
    }
    auto r = plan(1000, 10, 2, 16, 64);
    CHECK(r.explicit_text);
    CHECK(r.b == 1000);
}

TEST_CASE("budget builds stay within the slack and answer correctly") {
    std::mt19937_64 rng(24);
    for (int it = 0; it < 20; ++it) {
        auto g = normalize(random_input(rng, it, 3000, it % 4 == 0 ? 3 : 1)).g;
        auto st = derive_stats(g);
        u64 n = st.length[g.start];
        double logn = std::max(1.0, std::log2(double(n)));
        u64 m = u64(double(st.size) * logn / 64.0 * (1.5 + it)) + 1;
        build_config base;
        base.leafy = it % 2 == 0;
        access_index ix = [&] {
            try {
                return build_for_budget(g, m, 64, base);
            } catch (const error& e) {
                if (e.code() != errc::budget_out_of_range) throw;
                return build_for_budget(g, m * 4, 64, base);
            }
        }();
        CHECK(ix.bits() <= planner_slack * ix.report().budget_bits);
        sweep(ix, g);
    }
}

TEST_CASE("plain-text budgets store one leaf") {
    auto g = parse_text("start: S\nS -> A A A 'z'\nA -> 'x' 'y' 'x' 'x'\n");
    auto ix = build_for_budget(g, 100, 64);
    CHECK(ix.primary().num_leaves() == 1);
    CHECK(ix.report().primary.b == 13);
    sweep(ix, ix.source());
}

#include <doctest.h>

#include <cmath>
#include <random>

#include "grix/contracting.hpp"
#include "oracle.hpp"

using namespace grix;

namespace {

void check_mapped(const grammar& in, const contracted& c) {
    REQUIRE(c.map.size() == in.num_symbols());
    for (sym_t s = 0; s < in.num_symbols(); ++s) CHECK(expand(c.g, c.map[s]) == expand(in, s));
}

void check_invariants(const contracted& c) {
    CHECK_NOTHROW(validate(c.g));
    CHECK(is_contracting(c.g));
    CHECK(max_rule_runs(c.g) <= c.d);
}

}  // namespace

TEST_CASE("already contracting input keeps its expansions") {
    auto g = parse_text("start: S\nS -> A B\nA -> 'a' 'b'\nB -> 'c' 'd'\n");
    REQUIRE(is_contracting(g));
    auto c = contract_slg(g);
    check_invariants(c);
    check_mapped(g, c);
}

TEST_CASE("a heavy chain is unfolded into the parent") {
    auto g = parse_text("start: A\nA -> B 'c'\nB -> D 'e'\nD -> 'x' 'y'\n");
    CHECK_FALSE(is_contracting(g));
    auto e = find_heavy_child(g);
    REQUIRE(e);
    CHECK(e->child == g.rhs(g.start)[0].sym);

    for (auto how : {prefix_strategy::shared, prefix_strategy::per_node}) {
        auto c = contract_slg(g, how);
        check_invariants(c);
        check_mapped(g, c);
        auto w = derive_stats(c.g).weight;
        sym_t a = c.map[g.start];
        std::vector<sym_t> kids;
        for (const auto& r : c.g.rhs(a)) {
            kids.push_back(r.sym);
            if (!c.g.is_terminal(r.sym)) CHECK(w[r.sym] <= 2);
        }
        // the path A -> B -> D ends at D, whose rule is spliced in between the labels
        auto t = [&](char ch) {
            for (sym_t s = 0; s < g.sigma; ++s)
                if (g.code_of(s) == u64(ch)) return s;
            return no_sym;
        };
        CHECK(kids == std::vector<sym_t>{t('x'), t('y'), t('e'), t('c')});
    }
}

TEST_CASE("a heavy terminal stays in the spliced rule") {
    auto g = parse_text("start: A\nweights: 'D'=2\nA -> B 'c'\nB -> 'D' 'e'\n");
    for (auto how : {prefix_strategy::shared, prefix_strategy::per_node}) {
        auto c = contract_slg(g, how);
        check_invariants(c);
        check_mapped(g, c);
        std::vector<u64> kids;
        for (const auto& r : c.g.rhs(c.map[g.start])) kids.push_back(c.g.code_of(r.sym));
        CHECK(kids == std::vector<u64>{'D', 'e', 'c'});
    }
}

TEST_CASE("run-length input: S -> A^4") {
    auto g = parse_text("start: S\nS -> A^4\nA -> 'a' 'b'\n");
    auto c = contract_rlslg(g);
    check_invariants(c);
    check_mapped(g, c);
}

TEST_CASE("SLG and RLSLG contraction agree on pure SLGs") {
    std::mt19937_64 rng(11);
    for (int it = 0; it < 50; ++it) {
        auto g = oracle::random_grammar(rng, {.sigma = 3, .vars = 30, .max_rule = 4});
        auto a = contract_slg(g), b = contract_rlslg(g);
        for (sym_t s = 0; s < g.num_symbols(); ++s) CHECK(expand(a.g, a.map[s]) == expand(b.g, b.map[s]));
    }
}

TEST_CASE("exponents are rejected by the SLG path") {
    auto g = parse_text("start: S\nS -> 'a'^3 'b'\n");
    try {
        contract_slg(g);
        FAIL("exponent accepted");
    } catch (const error& e) {
        CHECK(e.code() == errc::exponent_in_slg);
    }
}

TEST_CASE("random grammars contract and keep every expansion") {
    std::mt19937_64 rng(12);
    for (int it = 0; it < 120; ++it) {
        oracle::gen_opts o;
        o.sigma = 2 + rng() % 5;
        o.vars = 5 + rng() % 100;
        o.max_rule = 2 + rng() % 5;
        o.max_exp = it % 2 ? 1 : 1 + rng() % 6;
        o.max_weight = it % 3 ? 1 : 5;
        auto g = oracle::random_grammar(rng, o);
        auto how = it % 4 == 3 ? prefix_strategy::per_node : prefix_strategy::shared;
        auto c = o.max_exp == 1 ? contract_slg(g, how) : contract_rlslg(g, how);
        check_invariants(c);
        check_mapped(g, c);
    }
}

TEST_CASE("unbalanced chains stay contracting with a small rule bound") {
    // left comb of depth 2000 over two terminals
    grammar g;
    g.sigma = 2;
    g.weights = {1, 3};
    g.rules.push_back({{0, 1}, {1, 1}});
    for (sym_t v = 1; v < 2000; ++v) g.rules.push_back({{g.sigma + v - 1, 1}, {sym_t(v % 2), 1}});
    g.start = g.sigma + 1999;
    g.kind = flavor::slg;
    for (auto how : {prefix_strategy::shared, prefix_strategy::per_node}) {
        auto c = contract_slg(g, how);
        check_invariants(c);
        CHECK(expand(c.g) == expand(g));
        CHECK(c.d <= 16);
    }
}

TEST_CASE("output size stays within the recorded constant") {
    // max over the corpus of |out| / (|in| * log2 W)
    constexpr double golden = 0.5;  // measured 0.339 on this corpus
    std::mt19937_64 rng(13);
    double worst = 0;
    for (int it = 0; it < 60; ++it) {
        auto g = oracle::random_grammar(rng, {.sigma = 4, .vars = 200, .max_rule = 3, .max_length = 100000});
        auto n = compact(g).g;
        auto c = contract_slg(n);
        auto in = derive_stats(n), out = derive_stats(compact(c.g).g);
        double ratio = double(out.size) / (double(in.size) * std::log2(double(in.weight[n.start])));
        worst = std::max(worst, ratio);
    }
    MESSAGE("worst size ratio " << worst);
    CHECK(worst <= golden);
}

TEST_CASE("prefix fragments expand to root-path label concatenations") {
    grammar base;
    base.sigma = 3;
    base.weights = {1, 1, 1};
    base.rules.push_back({{0, 1}});
    base.start = 3;
    base.kind = flavor::slg;

    SUBCASE("single node") {
        auto f = prefix_grammar(base, {level_none}, {{}});
        CHECK(f.node_sym[0] == no_sym);
        f = prefix_grammar(base, {level_none}, {{2}});
        CHECK(f.node_sym[0] == 2);
    }
    SUBCASE("path of three") {
        auto f = prefix_grammar(base, {level_none, 0, 1}, {{0}, {1}, {2}});
        CHECK(expand(f.g, f.node_sym[2]) == std::vector<sym_t>{0, 1, 2});
        CHECK(is_contracting(f.g));
    }
    SUBCASE("random forests") {
        std::mt19937_64 rng(14);
        for (int it = 0; it < 200; ++it) {
            std::uint32_t n = 1 + rng() % 100;
            std::vector<std::uint32_t> parent(n, level_none);
            std::vector<std::vector<sym_t>> labels(n);
            for (std::uint32_t v = 0; v < n; ++v) {
                if (v > 0 && rng() % 8 != 0) parent[v] = std::uint32_t(rng() % v);
                labels[v].resize(rng() % 4);
                for (auto& s : labels[v]) s = sym_t(rng() % 4);  // terminals and the base variable
            }
            for (auto how : {prefix_strategy::shared, prefix_strategy::per_node}) {
                auto f = prefix_grammar(base, parent, labels, how);
                CHECK(is_contracting(f.g));
                for (std::uint32_t v = 0; v < n; ++v) {
                    std::vector<std::uint32_t> chain{v};
                    while (parent[chain.back()] != level_none) chain.push_back(parent[chain.back()]);
                    std::vector<sym_t> want;
                    for (auto it2 = chain.rbegin(); it2 != chain.rend(); ++it2)
                        for (sym_t s : labels[*it2]) {
                            auto e = expand(base, s);
                            want.insert(want.end(), e.begin(), e.end());
                        }
                    if (want.empty()) CHECK(f.node_sym[v] == no_sym);
                    else CHECK(expand(f.g, f.node_sym[v]) == want);
                }
            }
        }
    }
    SUBCASE("cycles are rejected") {
        try {
            prefix_grammar(base, {1, 0}, {{0}, {1}});
            FAIL("cycle accepted");
        } catch (const error& e) {
            CHECK(e.code() == errc::cyclic_grammar);
        }
    }
}

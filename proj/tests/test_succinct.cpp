#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "grix/succinct.hpp"

using namespace grix;

namespace {

std::vector<u64> random_set(std::mt19937_64& rng, u64 u, std::size_t n) {
    std::set<u64> s;
    while (s.size() < std::min<u64>(n, u)) s.insert(rng() % u);
    return {s.begin(), s.end()};
}

u64 naive_rank(const std::vector<u64>& xs, u64 y) {
    return u64(std::lower_bound(xs.begin(), xs.end(), y) - xs.begin());
}

}  // namespace

TEST_CASE("int_vector stores values at every width") {
    std::mt19937_64 rng(1);
    for (unsigned w = 0; w <= 64; ++w) {
        std::vector<u64> v(300);
        for (auto& x : v) x = w == 0 ? 0 : (w == 64 ? rng() : rng() & ((u64(1) << w) - 1));
        auto iv = int_vector::of(v, w);
        CHECK(iv.to_vector() == v);
        CHECK(iv.bits() == 300 * w);
        byte_writer out;
        iv.save(out);
        byte_reader in(out.str());
        CHECK(int_vector::load(in) == iv);
    }
}

TEST_CASE("packed strings behave like plain strings") {
    CHECK(packed_string::of({0, 1}, 1).slice(0, 2) == packed_string::of({0, 1}, 1));
    auto ab = packed_string::of({'a', 'b'}, 8);
    auto joined = ab;
    joined.append(packed_string(8));
    CHECK(joined == ab);

    std::mt19937_64 rng(2);
    for (int it = 0; it < 400; ++it) {
        unsigned cb = 1 + rng() % 20;
        std::vector<std::uint32_t> s(rng() % 500);
        for (auto& c : s) c = std::uint32_t(rng() & ((1u << cb) - 1));
        auto p = packed_string::of(s, cb);
        CHECK(p.to_vector() == s);
        for (int q = 0; q < 50 && !s.empty(); ++q) {
            std::size_t i = rng() % s.size();
            CHECK(p.char_at(i) == s[i]);
            std::size_t len = rng() % (s.size() - i + 1);
            auto sl = p.slice(i, len);
            CHECK(sl.to_vector() == std::vector<std::uint32_t>(s.begin() + i, s.begin() + i + len));
        }
        auto q = packed_string::of(s, cb);
        q.append(p);
        auto both = s;
        both.insert(both.end(), s.begin(), s.end());
        CHECK(q.to_vector() == both);
    }
    try {
        ab.char_at(2);
        FAIL("out of range read accepted");
    } catch (const error& e) {
        CHECK(e.code() == errc::out_of_bounds);
    }
    CHECK_THROWS_AS(ab.slice(1, 2), error);
}

TEST_CASE("bucketed rank matches the naive count") {
    CHECK(bucketed_rank({}, 10, 3).rank(5) == 0);
    bucketed_rank r({3, 5, 9}, 12, 4);
    CHECK(r.rank(5) == 1);
    CHECK(r.rank(6) == 2);
    CHECK(r.rank(12) == 3);
    try {
        bucketed_rank({4, 2}, 10, 2);
        FAIL("unsorted accepted");
    } catch (const error& e) {
        CHECK(e.code() == errc::unsorted_input);
    }

    std::mt19937_64 rng(3);
    u64 queries = 0;
    for (int it = 0; it < 200; ++it) {
        u64 u = 1 + rng() % 5000;
        auto xs = random_set(rng, u, rng() % 200);
        u64 s = 1 + rng() % 64;
        bucketed_rank scan(xs, u, s, bucket_search::scan), bin(xs, u, s, bucket_search::binary);
        for (int q = 0; q < 600; ++q, ++queries) {
            u64 y = rng() % (u + 1);
            CHECK(scan.rank(y) == naive_rank(xs, y));
            CHECK(bin.rank(y) == naive_rank(xs, y));
        }
    }
    CHECK(queries >= 100000);
}

TEST_CASE("bitvector rank and select match scans") {
    std::mt19937_64 rng(4);
    u64 queries = 0;
    for (int it = 0; it < 60; ++it) {
        std::size_t n = rng() % 20000;
        unsigned density = 1 + rng() % 100;
        std::vector<bool> bits(n);
        std::vector<u64> ones;
        for (std::size_t i = 0; i < n; ++i) {
            bits[i] = rng() % 100 < density;
            if (bits[i]) ones.push_back(i);
        }
        bitvector_rs bv(bits);
        CHECK(bv.ones() == ones.size());
        for (int q = 0; q < 1000; ++q, ++queries) {
            u64 i = rng() % (n + 1);
            CHECK(bv.rank1(i) == naive_rank(ones, i));
            if (!ones.empty()) {
                u64 r = rng() % ones.size();
                CHECK(bv.select1(r) == ones[r]);
            }
        }
        try {
            bv.select1(ones.size());
            FAIL("select past the last one accepted");
        } catch (const error& e) {
            CHECK(e.code() == errc::rank_out_of_range);
        }
    }
    CHECK(queries >= 50000);
}

TEST_CASE("Elias-Fano select and space") {
    elias_fano small({1, 4, 9}, 10);
    CHECK(small.select(1) == 4);

    std::mt19937_64 rng(5);
    u64 queries = 0;
    for (int it = 0; it < 300; ++it) {
        u64 u = 1 + rng() % (it % 2 ? 1000 : 10000000);
        auto xs = random_set(rng, u, 1 + rng() % 2000);
        if (it % 5 == 0)
            for (std::size_t i = 1; i < xs.size(); i += 3) xs[i] = xs[i - 1];  // duplicates
        elias_fano ef(xs, u);
        for (std::size_t r = 0; r < xs.size(); ++r, ++queries) CHECK(ef.select(r) == xs[r]);
        double n = double(xs.size());
        CHECK(double(ef.bits()) <= 2 * n * (2 + std::log2(2 * double(u) / n)));
        byte_writer out;
        ef.save(out);
        byte_reader in(out.str());
        auto back = elias_fano::load(in);
        for (std::size_t r = 0; r < xs.size(); ++r) CHECK(back.select(r) == xs[r]);
    }
    CHECK(queries >= 100000);
    try {
        small.select(3);
        FAIL("select past the end accepted");
    } catch (const error& e) {
        CHECK(e.code() == errc::rank_out_of_range);
    }
}

TEST_CASE("level ancestors match parent chasing") {
    std::mt19937_64 rng(6);
    u64 queries = 0;
    for (int it = 0; it < 100; ++it) {
        std::uint32_t n = 1 + rng() % 3000;
        // random forest: parents are shuffled to earlier positions of a random order
        std::vector<std::uint32_t> perm(n);
        for (std::uint32_t i = 0; i < n; ++i) perm[i] = i;
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<std::uint32_t> parent(n, level_ancestor::none);
        bool path_like = it % 4 == 0;
        for (std::uint32_t i = 1; i < n; ++i) {
            if (rng() % 50 == 0) continue;
            std::uint32_t j = path_like ? i - 1 - std::uint32_t(rng() % std::min<std::uint32_t>(i, 3)) : std::uint32_t(rng() % i);
            parent[perm[i]] = perm[j];
        }
        level_ancestor la(parent);
        for (int q = 0; q < 1100; ++q, ++queries) {
            std::uint32_t v = std::uint32_t(rng() % n);
            std::vector<std::uint32_t> chain{v};
            while (parent[chain.back()] != level_ancestor::none) chain.push_back(parent[chain.back()]);
            std::uint32_t lvl = std::uint32_t(chain.size() - 1);
            REQUIRE(la.level(v) == lvl);
            std::uint32_t l = std::uint32_t(rng() % (lvl + 1));
            CHECK(la.query(v, l) == chain[lvl - l]);
            CHECK(la.query(v, lvl) == v);
            CHECK(la.query(v, 0) == chain.back());
        }
        std::uint32_t v = std::uint32_t(rng() % n);
        try {
            la.query(v, la.level(v) + 1);
            FAIL("level above node accepted");
        } catch (const error& e) {
            CHECK(e.code() == errc::level_out_of_range);
        }
    }
    CHECK(queries >= 100000);
}

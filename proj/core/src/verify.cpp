#include "grix/verify.hpp"

#include <algorithm>
#include <random>

#include "grix/aggregates.hpp"
#include "grix/contracting.hpp"
#include "grix/traversal.hpp"

namespace grix {

namespace {

struct mismatch {
    std::string what;
};

void expect(bool ok, verify_result& r, const std::string& what) {
    ++r.checks;
    if (!ok) throw mismatch{what};
}

std::vector<u64> probe_positions(u64 weight, const verify_options& o, std::mt19937_64& rng) {
    std::vector<u64> out;
    if (weight <= o.exhaustive_up_to) {
        for (u64 i = 0; i < weight; ++i) out.push_back(i);
        return out;
    }
    std::uniform_int_distribution<u64> d(0, weight - 1);
    for (u64 k = 0; k < o.samples; ++k) out.push_back(d(rng));
    return out;
}

bool buckets_ok(const engine_report& e) {
    return e.max_bucket <= std::max<u64>(1, 2 * u64(e.d) * ceil_log2(e.tau_var)) &&
           e.max_bucket_root <= std::max<u64>(1, 2 * u64(e.d) * ceil_log2(e.tau_root));
}

void check_index(const access_index& ix, const verify_options& o, verify_result& r) {
    const grammar& g = ix.source();
    std::mt19937_64 rng(o.seed);
    const auto text = expand(g);
    std::vector<u64> starts(text.size());
    for (std::size_t k = 1; k < text.size(); ++k) starts[k] = starts[k - 1] + g.weights[text[k - 1]];
    const auto where = [&](const char* op, u64 i) { return std::string(op) + " at " + std::to_string(i); };
    expect(ix.length() == text.size() && ix.weight() == starts.back() + g.weights[text.back()], r, "length");
    expect(buckets_ok(ix.report().primary), r, "bucket sparsity of the primary engine");
    if (ix.report().unrolled) expect(buckets_ok(*ix.report().unrolled), r, "bucket sparsity of the unrolled engine");

    const auto pos = probe_positions(ix.weight(), o, rng);
    const auto& rep = ix.answering_report();
    const u64 bound = step_bound(rep);
    for (u64 i : pos) {
        const auto a = ix.access(i);
        const std::size_t k = std::size_t(std::upper_bound(starts.begin(), starts.end(), i) - starts.begin()) - 1;
        expect(a.c == text[k] && a.pos == k && a.offset == starts[k], r, where("access", i));
        expect(a.steps <= bound, r, where("step bound", i));
    }

    prefix_sums offsets(ix.primary(), std::make_shared<capped_sum>(), g.weights);
    for (std::size_t j = 0; j < pos.size(); ++j) {
        const std::size_t k = std::size_t(std::upper_bound(starts.begin(), starts.end(), pos[j]) - starts.begin()) - 1;
        expect(offsets.query(pos[j]) == starts[k], r, where("prefix_sum", pos[j]));
    }

    if (g.unit_weights()) {
        traversal tr(ix);
        const u64 n = text.size();
        const bool every = n <= o.exhaustive_up_to;
        const u64 trials = every ? n : o.extract_trials;
        for (u64 t = 0; t < trials; ++t) {
            const u64 i = every ? t : rng() % n;
            const u64 m = std::min<u64>(n - i, 1 + rng() % 200);
            const auto got = tr.extract(i, m).to_vector();
            expect(std::equal(got.begin(), got.end(), text.begin() + i) && got.size() == m, r, where("extract", i));
            if (tr.fast()) {
                const auto mv = tr.fast_forward(tr.at(i), m);
                const u64 b = ix.report().primary.b;
                expect(mv.steps <= 2 + (m + b - 1) / b, r, where("fast_forward steps", i));
            }
        }
    }

    aggregate_index ai(ix);
    std::vector<sym_t> chars;
    for (sym_t c = 0; c < g.sigma; ++c) chars.push_back(c);
    if (chars.size() > o.max_chars) {
        std::shuffle(chars.begin(), chars.end(), rng);
        chars.resize(o.max_chars);
    }
    std::vector<std::uint32_t> before(text.size() + 1);
    std::vector<u64> occ;
    for (sym_t c : chars) {
        occ.clear();
        for (std::size_t k = 0; k < text.size(); ++k) {
            before[k + 1] = before[k] + (text[k] == c);
            if (text[k] == c) occ.push_back(k);
        }
        for (u64 i : pos) {
            const std::size_t k = std::size_t(std::upper_bound(starts.begin(), starts.end(), i) - starts.begin()) - 1;
            expect(ai.rank(c, i) == before[k], r, where("rank", i));
        }
        expect(ai.rank(c, ix.weight()) == occ.size(), r, "rank of the whole text");
        const u64 tries = occ.size() <= o.exhaustive_up_to ? occ.size() : std::min<u64>(o.samples, 20000);
        for (u64 t = 0; t < tries; ++t) {
            const u64 rk = occ.size() <= o.exhaustive_up_to ? t : rng() % occ.size();
            expect(ai.select(c, rk) == occ[rk], r, where("select", rk));
        }
        if (g.unit_weights() && !occ.empty())
            for (u64 t = 0; t < std::min<u64>(1000, text.size()); ++t) {
                const u64 i = rng() % text.size();
                const u64 rk = ai.rank(c, i);
                if (rk < occ.size()) expect(ai.select(c, rk) >= i, r, where("select after rank", i));
            }
    }
}

template <class F>
verify_result guarded(F&& f) {
    verify_result r;
    try {
        f(r);
    } catch (const mismatch& m) {
        r.ok = false;
        r.failure = m.what;
    } catch (const std::exception& e) {
        r.ok = false;
        r.failure = e.what();
    }
    return r;
}

}  // namespace

verify_result verify_index(const access_index& ix, const verify_options& o) {
    return guarded([&](verify_result& r) {
        expect(access_index::deserialize(ix.serialize()).serialize() == ix.serialize(), r, "index bytes do not round-trip");
        check_index(ix, o, r);
    });
}

verify_result verify_grammar(const grammar& g, const verify_options& o) {
    return guarded([&](verify_result& r) {
        expect(is_contracting(contract_rlslg(normalize(g).g).g), r, "contracted grammar is not contracting");
        for (bool leafy : {false, true}) {
            build_config cfg;
            cfg.leafy = leafy;
            cfg.tau = ratio::of(leafy ? 4 : 2);
            auto ix = access_index::build(g, cfg);
            expect(access_index::build(g, cfg).serialize() == ix.serialize(), r, "rebuild is not byte-identical");
            check_index(ix, o, r);
        }
    });
}

}  // namespace grix

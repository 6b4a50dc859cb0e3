#include "grix/planner.hpp"

#include <cmath>

namespace grix {

plan_choice plan(u64 n, u64 g, std::uint32_t sigma, u64 m, unsigned w) {
    if (n == 0 || g == 0 || w == 0) fail(errc::invalid_argument, "plan needs n, g and w positive");
    const double logn = std::max(1.0, std::log2(double(n)));
    const double logs = std::log2(double(std::max<std::uint32_t>(sigma, 2)));
    const double mw = double(m) * double(w);
    if (mw <= double(g) * logn)
        fail(errc::budget_out_of_range, "budget of " + std::to_string(m) + " words is at most g log n bits");
    plan_choice p;
    if (mw >= double(n) * logs) {
        p.tau = ratio::of(2);
        p.b = n;
        p.predicted_depth = 1;
        p.explicit_text = true;
        return p;
    }
    const double tau = std::max(2.0, mw / (double(g) * logn));
    p.tau = ratio::from_double(tau);
    p.b = default_block(n, sigma);
    const double depth = std::log(double(n) * logs / mw) / std::log(p.tau.value());
    p.predicted_depth = unsigned(std::ceil(std::max(1.0, depth) - 1e-9));
    return p;
}

access_index build_for_budget(const grammar& g, u64 m, unsigned w, build_config base) {
    auto ng = normalize(g).g;
    auto st = derive_stats(ng);
    const u64 n = st.length[ng.start];
    const u64 size = std::max<u64>(1, st.size);
    auto p = plan(n, size, ng.sigma, m, w);
    if (p.explicit_text && !ng.unit_weights()) {
        // weighted texts have no single-leaf form; fall back to the widest tau the budget allows
        const double logs = std::log2(double(std::max<std::uint32_t>(ng.sigma, 2)));
        const double logn = std::max(1.0, std::log2(double(n)));
        p.tau = ratio::from_double(std::max(2.0, double(n) * logs / (double(size) * logn)));
        p.b = default_block(n, ng.sigma);
        p.explicit_text = false;
    }
    base.tau = p.tau;
    if (p.explicit_text) {
        base.leafy = true;
        base.block = n;
        base.block_budget = std::max<u64>(base.block_budget, n * char_bits(ng.sigma));
    } else if (base.leafy) {
        base.block = p.b;
    }
    auto ix = access_index::build(ng, base);
    ix.report().budget_bits = m * w;
    ix.report().predicted_depth = p.predicted_depth;
    if (ix.bits() > planner_slack * m * w)
        fail(errc::planner_violation, "index takes " + std::to_string(ix.bits()) + " bits against a budget of " +
                                          std::to_string(m * w));
    return ix;
}

}  // namespace grix

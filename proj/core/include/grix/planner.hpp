#pragma once

#include "grix/access.hpp"

namespace grix {

// Parameters picked for a memory budget of M words of w bits.
struct plan_choice {
    ratio tau;
    u64 b = 1;
    unsigned predicted_depth = 1;
    bool explicit_text = false;  // budget covers the plain text: one leaf holds it all
};

// Measured bits may exceed M * w by at most this factor before the build is rejected.
inline constexpr u64 planner_slack = 256;

// n text length, g grammar size, sigma alphabet size.
plan_choice plan(u64 n, u64 g, std::uint32_t sigma, u64 m, unsigned w);

access_index build_for_budget(const grammar& g, u64 m, unsigned w, build_config base = {});

}  // namespace grix

#pragma once

#include <cstdint>
#include <string>

#include "grix/access.hpp"

namespace grix {

// Compares access, prefix sums, extraction, rank and select against the expanded
// text, plus the step and bucket bounds recorded in the index report.
struct verify_options {
    std::uint64_t seed = 1;
    u64 samples = 100000;           // positions per index when the weight exceeds exhaustive_up_to
    u64 exhaustive_up_to = 10000;
    u64 extract_trials = 2000;      // random ranges when the text is longer than exhaustive_up_to
    std::uint32_t max_chars = 8;    // characters checked for rank and select
};

struct verify_result {
    bool ok = true;
    u64 checks = 0;
    std::string failure;  // first mismatch
};

verify_result verify_index(const access_index& ix, const verify_options& o = {});

// Builds a plain and a leafy index, checks that rebuilding is byte-identical
// and verifies both.
verify_result verify_grammar(const grammar& g, const verify_options& o = {});

}  // namespace grix

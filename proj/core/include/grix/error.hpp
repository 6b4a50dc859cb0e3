#pragma once

#include <stdexcept>
#include <string>

namespace grix {

enum class errc {
    cyclic_grammar,
    non_canonical_run,
    exponent_in_slg,
    empty_start_expansion,
    overflow,
    too_large,
    empty_input,
    block_too_wide,
    unsorted_input,
    rank_out_of_range,
    level_out_of_range,
    out_of_bounds,
    index_out_of_node,
    index_out_of_range,
    planner_violation,
    budget_out_of_range,
    not_leafy_index,
    range_out_of_bounds,
    unknown_terminal,
    non_binary_alphabet,
    parameter_overflow,
    regime_violation,
    pop_at_root,
    child_on_leaf,
    invalid_argument,
};

const char* errc_name(errc e);

class error : public std::runtime_error {
public:
    error(errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
    errc code() const { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw error(code, what); }

}  // namespace grix

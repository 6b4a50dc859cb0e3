#pragma once

#include <string>
#include <vector>

#include "grix/grammar.hpp"
#include "grix/succinct.hpp"

namespace grix {

// Rule of A after exhaustively replacing every child heavier than weight(A)/tau by
// its own rule. g must be contracting.
rule make_nice_rhs(const grammar& g, const std::vector<u64>& w, sym_t a, ratio tau);

struct nice_grammar {
    grammar g;
    std::vector<sym_t> map;
    ratio tau_root, tau_var;
    unsigned d = 0;
};
// Start symbol with tau_root, every other variable with tau_var. Symbol ids are kept.
nice_grammar make_nice(const grammar& g, unsigned d, ratio tau_root, ratio tau_var);

// 0 when a is tau-nice, otherwise the number of the first violated condition:
// 1 heavy variable child, 2 too many runs, 3 a light window spans too many runs.
int nice_violation(const grammar& g, const std::vector<u64>& w, sym_t a, ratio tau, unsigned d);
bool is_nice(const grammar& g, ratio tau_root, ratio tau_var, unsigned d);

inline constexpr u64 default_block_budget = u64(1) << 16;

struct leafy_grammar {
    grammar g;                         // terminals, top variables and leaf variables
    u64 b = 1;
    std::vector<std::uint8_t> leaf;    // per variable of g
    std::vector<packed_string> block;  // per variable of g, empty for top variables
    std::vector<sym_t> map;            // input symbol -> symbol of g, no_sym when shorter than b
    unsigned d = 0;                    // rule bound of the top part after contraction (0 if not shaped)

    bool is_leaf(sym_t s) const { return s >= g.sigma && leaf[s - g.sigma]; }
    // Top part: leaves become terminals numbered by leaf order, weighted by their weight.
    struct top_part {
        grammar g;
        std::vector<sym_t> leaf_of;  // terminal of the top part -> leaf variable
        std::vector<sym_t> to_top;   // symbol of the leafy grammar -> symbol of the top part
    };
    top_part top() const;
};

unsigned char_bits(std::uint32_t sigma);

leafy_grammar make_leafy(const grammar& g, u64 b, u64 block_budget_bits = default_block_budget);
leafy_grammar make_leafy_nice(const grammar& g, u64 b, ratio tau_root, ratio tau_var,
                              u64 block_budget_bits = default_block_budget);

// Checks leaf/top separation and leaf lengths and, with rule_forms set, that every
// mapped variable's rule is leaf, leaf leaf, or leaf top leaf. Empty when all hold.
std::string leafy_shape_error(const leafy_grammar& h, bool rule_forms);

}  // namespace grix

#pragma once

#include <optional>
#include <vector>

#include "grix/grammar.hpp"

namespace grix {

// How path-label concatenations are turned into grammar fragments.
//   shared:   label sequences are cut into canonical pieces of static median trees
//             over heavy paths of the forest, so nodes on one path share variables
//   per_node: every node gets its own weighted-median tree over its full sequence
enum class prefix_strategy : std::uint8_t { shared, per_node };

struct contracted {
    grammar g;
    std::vector<sym_t> map;  // input symbol -> output symbol
    unsigned d = 0;          // largest rle rule length in g
};

contracted contract_slg(const grammar& g, prefix_strategy how = prefix_strategy::shared);
contracted contract_rlslg(const grammar& g, prefix_strategy how = prefix_strategy::shared);

struct heavy_edge {
    sym_t parent, child;
};
// A variable child weighing more than half of its parent, if any.
std::optional<heavy_edge> find_heavy_child(const grammar& g);
bool is_contracting(const grammar& g);
unsigned max_rule_runs(const grammar& g);

// For every node of a forest (parent[v] == level_none for roots), a symbol whose
// expansion is the concatenation of labels from the root down to the node.
struct prefix_fragment {
    grammar g;                    // base grammar plus fragment variables
    std::vector<sym_t> node_sym;  // no_sym when the concatenation is empty
};
inline constexpr std::uint32_t level_none = ~std::uint32_t(0);
prefix_fragment prefix_grammar(const grammar& base, const std::vector<std::uint32_t>& parent,
                               const std::vector<std::vector<sym_t>>& labels,
                               prefix_strategy how = prefix_strategy::shared);

}  // namespace grix

#pragma once

#include <memory>
#include <optional>
#include <string>

#include "grix/contracting.hpp"
#include "grix/engine.hpp"
#include "grix/shaping.hpp"

namespace grix {

struct build_config {
    ratio tau = ratio::of(2);
    bool leafy = false;
    u64 block = 0;  // leaf length; 0 picks ceil(log n / log sigma)
    bucket_search how = bucket_search::scan;
    u64 block_budget = default_block_budget;
    prefix_strategy prefix = prefix_strategy::shared;
};

struct engine_report {
    std::string role;  // "weighted", "leafy" or "unrolled"
    u64 bits = 0;
    u64 top_vars = 0, leaves = 0, runs = 0;
    unsigned height = 0;
    u64 b = 1;
    u64 total = 0;  // weight of the text the engine walks
    ratio tau_root, tau_var;
    unsigned d = 0;
    std::size_t max_bucket = 0, max_bucket_root = 0;
};

struct build_report {
    u64 length = 0, weight = 0, grammar_size = 0;
    std::uint32_t sigma = 0;
    ratio tau;
    bool leafy = false;
    engine_report primary;
    std::optional<engine_report> unrolled;
    bool answer_from_unrolled = false;
    u64 bits = 0;         // all engines
    u64 source_bits = 0;  // the kept copy of the input grammar
    u64 budget_bits = 0;  // M * w when built from a memory budget, else 0
    unsigned predicted_depth = 0;
};

struct access_result {
    sym_t c;
    u64 pos;     // unweighted position
    u64 offset;  // weighted offset of that position
    unsigned steps;
    bool operator==(const access_result&) const = default;
};

class access_index {
public:
    static access_index build(const grammar& g, const build_config& cfg = {});

    access_result access(u64 i) const;

    u64 length() const { return rep_.length; }
    u64 weight() const { return rep_.weight; }
    std::uint32_t sigma() const { return src_.sigma; }
    const grammar& source() const { return src_; }  // normalized input
    const build_config& config() const { return cfg_; }
    const build_report& report() const { return rep_; }
    build_report& report() { return rep_; }
    u64 bits() const { return rep_.bits; }

    const child_engine& primary() const { return primary_; }
    const child_engine* unrolled() const { return unrolled_ ? &*unrolled_ : nullptr; }
    const child_engine& answering() const { return rep_.answer_from_unrolled ? *unrolled_ : primary_; }
    const engine_report& answering_report() const { return rep_.answer_from_unrolled ? *rep_.unrolled : rep_.primary; }
    bool leafy() const { return primary_.num_leaves() > 0 && primary_.unit_weights(); }

    std::string serialize() const;
    static access_index deserialize(const std::string& bytes);

private:
    grammar src_;
    build_config cfg_;
    build_report rep_;
    child_engine primary_;
    std::optional<child_engine> unrolled_;
};

// Child calls a query may take on an engine: 3 + max(0, log_tau(total / (tau_root * b))).
unsigned step_bound(const engine_report& r);

// Leaf length ceil(log n / log sigma), at least 1 and at most n.
u64 default_block(u64 n, std::uint32_t sigma);

// Unweighted copy of g where terminal c of weight w becomes (c + sigma) c^(w-1).
grammar unroll_weights(const grammar& g);

void save_index_file(const std::string& path, const access_index& ix);
access_index load_index_file(const std::string& path);

}  // namespace grix

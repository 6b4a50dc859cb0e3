#pragma once

#include <vector>

#include "grix/grammar.hpp"
#include "grix/succinct.hpp"

namespace grix {

// Extra per-run bookkeeping carried along a descent.
//   counts:  unweighted lengths, so a weighted descent also yields the text position
//   markers: symbols >= marker_base start a character of an unrolled weighted text;
//            a descent yields how many starts precede it and where the last one is
enum class annotation : std::uint8_t { none, counts, markers };

struct engine_options {
    ratio tau_root = ratio::of(2);
    ratio tau_var = ratio::of(2);
    bucket_search how = bucket_search::scan;
    annotation notes = annotation::none;
    std::uint32_t marker_base = 0;
};

// Packed child-query structure over a grammar whose variables are either top
// variables (any rule) or leaves (terminal rule over unit-weight terminals).
// Symbols are renumbered: terminals, then top variables children-first, then leaves.
// Top variables with a single run of exponent one are dissolved into their child.
class child_engine {
public:
    struct node {
        sym_t sym;
        u64 off;
        bool operator==(const node&) const = default;
    };
    struct step {
        node to;
        std::size_t run;  // run index in the parent rule, or the character index in a leaf
        u64 copy;         // which copy of a repeated run
    };

    child_engine() = default;
    // leaf[v - g.sigma] flags leaf variables; empty means none
    static child_engine build(const grammar& g, const std::vector<std::uint8_t>& leaf, const engine_options& o);

    std::uint32_t sigma() const { return sigma_; }
    std::uint32_t num_top() const { return ntop_; }
    std::uint32_t num_leaves() const { return nleaf_; }
    std::size_t num_symbols() const { return sigma_ + ntop_ + nleaf_; }
    sym_t start() const { return start_; }
    u64 total() const { return weight(start_); }
    bool is_terminal(sym_t s) const { return s < sigma_; }
    bool is_top(sym_t s) const { return s >= sigma_ && s < sigma_ + ntop_; }
    bool is_leaf(sym_t s) const { return s >= sigma_ + ntop_; }
    u64 weight(sym_t s) const { return weight_[s]; }
    u64 length(sym_t s) const;  // unweighted expansion length (counts annotation, or unit weights)

    std::size_t run_offset(sym_t v) const { return run_begin_[v - sigma_]; }  // flat index of run 0 of v
    std::size_t num_runs(sym_t v) const { return run_begin_[v - sigma_ + 1] - run_begin_[v - sigma_]; }
    sym_t run_sym(sym_t v, std::size_t j) const { return sym_t(run_sym_[run_begin_[v - sigma_] + j]); }
    u64 run_exp(sym_t v, std::size_t j) const { return run_exp_[run_begin_[v - sigma_] + j]; }
    u64 run_start(sym_t v, std::size_t j) const { return j == 0 ? 0 : run_end_[run_begin_[v - sigma_] + j - 1]; }
    u64 run_end(sym_t v, std::size_t j) const { return run_end_[run_begin_[v - sigma_] + j]; }

    std::size_t leaf_size(sym_t v) const;
    std::size_t leaf_begin(sym_t v) const { return leaf_begin_[v - sigma_ - ntop_]; }
    std::uint32_t leaf_char(sym_t v, std::size_t k) const { return pool_.char_at(leaf_begin(v) + k); }
    const packed_string& pool() const { return pool_; }

    // index of the run of v whose weighted span contains y, for y in [0, weight(v))
    std::size_t find_run(sym_t v, u64 y) const;
    step child(node n, u64 i) const;

    struct probe {
        sym_t c;
        u64 pos;     // unweighted position of the character (needs an annotation or unit weights)
        u64 offset;  // weighted offset of the character
        unsigned steps;
    };
    probe access(u64 i) const;

    annotation notes() const { return notes_; }
    std::uint32_t marker_base() const { return marker_base_; }
    unsigned height() const { return height_; }
    // most run boundaries in one bucket, over non-start variables and for the start
    std::size_t max_bucket() const { return max_bucket_; }
    std::size_t max_bucket_root() const { return max_bucket_root_; }
    std::size_t runs() const { return run_sym_.size(); }
    u64 bits() const;
    bool unit_weights() const { return unit_; }

    void save(byte_writer& out) const;
    static child_engine load(byte_reader& in);

private:
    std::uint32_t sigma_ = 0, ntop_ = 0, nleaf_ = 0;
    sym_t start_ = 0;
    bool unit_ = true;
    annotation notes_ = annotation::none;
    std::uint32_t marker_base_ = 0;
    unsigned height_ = 0;
    std::size_t max_bucket_ = 0, max_bucket_root_ = 0;
    bucket_search how_ = bucket_search::scan;

    int_vector weight_;     // per symbol
    int_vector run_begin_;  // per top variable, plus one
    int_vector run_sym_, run_exp_, run_end_;
    int_vector width_;      // per top variable: bucket width, 0 for a direct table
    int_vector aux_begin_;  // per top variable, plus one
    int_vector aux_;        // bucket prefix counts or direct rank tables
    int_vector leaf_begin_; // per leaf, plus one
    packed_string pool_;

    // counts
    int_vector len_, run_len_;  // per symbol; per run: unweighted length through the run
    // markers
    int_vector mk_, tail_;          // per symbol: starts inside, characters after the last start
    int_vector run_mk_, run_tail_;  // per run: same for the rule prefix through the run
    bitvector_rs pool_marks_;
};

}  // namespace grix

#pragma once

#include <memory>
#include <mutex>

#include "grix/access.hpp"

namespace grix {

// Monoid over fixed-width elements stored in a u64.
class monoid {
public:
    virtual ~monoid() = default;
    virtual u64 identity() const = 0;
    virtual u64 combine(u64 x, u64 y) const = 0;
    // k-fold combine of x; the default doubles
    virtual u64 repeat(u64 k, u64 x) const;
    virtual unsigned element_bits() const = 0;
};

// Addition saturating at cap; the cap keeps elements within bits_for(cap) bits.
class capped_sum final : public monoid {
public:
    explicit capped_sum(u64 cap = ~u64(0)) : cap_(cap) {}
    u64 identity() const override { return 0; }
    u64 combine(u64 x, u64 y) const override { return x > cap_ - std::min(y, cap_) ? cap_ : x + y; }
    u64 repeat(u64 k, u64 x) const override;
    unsigned element_bits() const override { return bits_for(cap_); }
    u64 cap() const { return cap_; }

private:
    u64 cap_;
};

class max_monoid final : public monoid {
public:
    explicit max_monoid(unsigned bits = 64) : bits_(bits) {}
    u64 identity() const override { return 0; }
    u64 combine(u64 x, u64 y) const override { return std::max(x, y); }
    u64 repeat(u64 k, u64 x) const override { return k ? x : 0; }
    unsigned element_bits() const override { return bits_; }

private:
    unsigned bits_;
};

// How a prefix sum finishes inside a leaf block.
enum class leaf_sums : std::uint8_t {
    fold,  // combine the characters one by one
    ones,  // count one character with a rank bitvector over the leaf pool
    gaps,  // plain sums of character codes, by Elias-Fano select per leaf
};

// Prefix sums of a terminal mapping over the parse tree of an engine.
class prefix_sums {
public:
    prefix_sums() = default;
    // phi[t] for every terminal t of the engine; for leaf_sums::ones, phi marks the counted character.
    prefix_sums(const child_engine& e, std::shared_ptr<const monoid> m, std::vector<u64> phi,
                leaf_sums leaves = leaf_sums::fold);

    // phi of the characters strictly before the one covering weighted index i
    u64 query(u64 i) const;
    u64 total() const { return sym_sum_[e_->start()]; }
    u64 of_symbol(sym_t s) const { return sym_sum_[s]; }
    u64 bits() const;
    u64 leaf_bits() const;  // rank bitvector or Elias-Fano leaves
    const monoid& op() const { return *m_; }

private:
    u64 leaf_prefix(sym_t leaf, u64 y) const;

    const child_engine* e_ = nullptr;
    std::shared_ptr<const monoid> m_;
    leaf_sums mode_ = leaf_sums::fold;
    std::vector<u64> phi_;
    int_vector sym_sum_;  // per symbol
    int_vector run_sum_;  // per run: phi of the rule prefix through the run
    bitvector_rs pool_ones_;
    std::vector<elias_fano> leaf_gaps_;
};

// Expansion with terminal one as 1 and every other terminal as 0: df lists the
// lengths of the zero runs around the ones. Terminals of the result are the
// distinct run lengths, with the length as the terminal code.
struct df_grammar {
    grammar g;
    u64 ones = 0;
};
df_grammar df_transform(const grammar& g, sym_t one);
// df of a 0/1 sequence, as run lengths
std::vector<u64> df_of(const std::vector<sym_t>& text, sym_t one);

// Indicator image of g: terminal c becomes 1, all others 0, unit weights.
grammar indicator_image(const grammar& g, sym_t c);

// Select support for one character of an unweighted text.
class select_support {
public:
    select_support() = default;
    select_support(const grammar& g, sym_t c, ratio tau);
    u64 select(u64 r) const;
    u64 ones() const { return ones_; }
    u64 bits() const;
    bool plain() const { return !df_; }
    u64 block() const { return b_; }
    u64 gap_bits() const;  // Elias-Fano leaf structures only
    const child_engine* df_engine() const { return df_.get(); }
    const prefix_sums& gap_sums() const { return sums_; }

private:
    u64 ones_ = 0, b_ = 0;
    bitvector_rs plain_;
    std::unique_ptr<child_engine> df_;
    prefix_sums sums_;
};

// Rank and select for every character, built lazily per character and shared
// between threads once published.
class aggregate_index {
public:
    explicit aggregate_index(const access_index& ix, bool prebuild = false);

    const access_index& index() const { return *ix_; }
    // occurrences of c among the characters before the one covering weighted index i; i = weight counts all
    u64 rank(sym_t c, u64 i) const;
    u64 count(sym_t c) const;
    // unweighted position of the occurrence of c with rank r
    u64 select(sym_t c, u64 r) const;
    u64 bits() const;  // structures built so far

    const prefix_sums& ranks_of(sym_t c) const;
    const select_support& selects_of(sym_t c) const;

private:
    void check_char(sym_t c) const;

    const access_index* ix_;
    mutable std::mutex mu_;
    mutable std::vector<std::shared_ptr<const prefix_sums>> rank_;
    mutable std::vector<std::shared_ptr<const select_support>> select_;
};

}  // namespace grix

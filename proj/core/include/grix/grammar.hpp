#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "grix/error.hpp"

namespace grix {

using sym_t = std::uint32_t;
using u64 = std::uint64_t;

struct run {
    sym_t sym;
    u64 exp;
    bool operator==(const run&) const = default;
};

using rule = std::vector<run>;

enum class flavor : std::uint8_t { slg, rlslg };

// Exact positive rational. Fan-out parameters are given as reals but every
// comparison against them is done by cross-multiplication.
struct ratio {
    u64 num = 2;
    u64 den = 1;

    static ratio of(u64 n, u64 d = 1);
    static ratio from_double(double x);
    double value() const { return double(num) / double(den); }
    ratio times(u64 k) const;
    bool operator==(const ratio&) const = default;
};

// weight(b) > weight(a) / tau
bool heavier(u64 wb, u64 wa, ratio tau);
// smallest L >= 1 with 2^L >= tau (tau > 1)
unsigned ceil_log2(ratio tau);
// x <= tau, x >= tau
bool at_most(u64 x, ratio tau);

struct grammar {
    std::uint32_t sigma = 0;
    std::vector<u64> weights;  // per terminal, all >= 1
    std::vector<rule> rules;   // rules[v - sigma]
    sym_t start = 0;
    flavor kind = flavor::rlslg;

    // file-format layer: printable code of each terminal and whether it was quoted
    std::vector<u64> codes;
    std::vector<std::uint8_t> quoted;

    bool is_terminal(sym_t s) const { return s < sigma; }
    std::size_t num_vars() const { return rules.size(); }
    std::size_t num_symbols() const { return sigma + rules.size(); }
    const rule& rhs(sym_t v) const { return rules[v - sigma]; }
    rule& rhs(sym_t v) { return rules[v - sigma]; }
    sym_t add_var(rule r);
    bool unit_weights() const;
    u64 code_of(sym_t t) const { return codes.empty() ? t : codes[t]; }
};

// Appends (s, e) to r, merging with the last run when the symbols agree.
void append_run(rule& r, sym_t s, u64 e);
rule canonical(const rule& r);
u64 rule_length(const rule& r);

struct grammar_stats {
    std::vector<u64> weight;         // per symbol
    std::vector<u64> length;         // per symbol, unweighted expansion length
    std::vector<std::uint32_t> height;
    std::vector<sym_t> topo;         // variables, children before parents
    u64 size = 0;                    // total number of stored runs
};

void validate(const grammar& g);
grammar_stats derive_stats(const grammar& g, unsigned weight_bits = 64);
std::vector<sym_t> topo_order(const grammar& g);

inline constexpr u64 default_expand_cap = u64(1) << 28;
std::vector<sym_t> expand(const grammar& g, sym_t s, u64 cap = default_expand_cap);
std::vector<sym_t> expand(const grammar& g);

struct normalized {
    grammar g;
    std::vector<sym_t> map;  // old symbol -> new symbol
};
normalized normalize(const grammar& g);
bool is_normal_form(const grammar& g);

grammar trivial_builder(const std::vector<sym_t>& text, std::uint32_t sigma);
// Balanced grammar over the distinct bytes of a plain text, each quoted by its value.
grammar bytes_grammar(const std::string& bytes);

// Renumbers variables so that every rule only references smaller ids and
// drops variables unreachable from the start symbol.
struct compacted {
    grammar g;
    std::vector<sym_t> map;  // old symbol -> new symbol, or npos
};
inline constexpr sym_t no_sym = ~sym_t(0);
compacted compact(const grammar& g);

// Text format: "start: S", optional "weights: 'a'=3,#7=2", then "A -> B C^4 'x'".
grammar parse_text(std::istream& in);
grammar parse_text(const std::string& text);
void write_text(std::ostream& out, const grammar& g);
std::string to_text(const grammar& g);

// Binary format: magic, length-prefixed payload of LEB128 varints.
std::string to_binary(const grammar& g);
grammar from_binary(const std::string& bytes);

grammar load_grammar_file(const std::string& path);
void save_grammar_file(const std::string& path, const grammar& g);

}  // namespace grix

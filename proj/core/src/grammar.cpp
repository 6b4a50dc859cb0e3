#include "grix/grammar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace grix {

const char* errc_name(errc e) {
    switch (e) {
        case errc::cyclic_grammar: return "CyclicGrammar";
        case errc::non_canonical_run: return "NonCanonicalRun";
        case errc::exponent_in_slg: return "ExponentInSLG";
        case errc::empty_start_expansion: return "EmptyStartExpansion";
        case errc::overflow: return "Overflow";
        case errc::too_large: return "TooLarge";
        case errc::empty_input: return "EmptyInput";
        case errc::block_too_wide: return "BlockTooWide";
        case errc::unsorted_input: return "UnsortedInput";
        case errc::rank_out_of_range: return "RankOutOfRange";
        case errc::level_out_of_range: return "LevelOutOfRange";
        case errc::out_of_bounds: return "OutOfBounds";
        case errc::index_out_of_node: return "IndexOutOfNode";
        case errc::index_out_of_range: return "IndexOutOfRange";
        case errc::planner_violation: return "PlannerViolation";
        case errc::budget_out_of_range: return "BudgetOutOfRange";
        case errc::not_leafy_index: return "NotLeafyIndex";
        case errc::range_out_of_bounds: return "RangeOutOfBounds";
        case errc::unknown_terminal: return "UnknownTerminal";
        case errc::non_binary_alphabet: return "NonBinaryAlphabet";
        case errc::parameter_overflow: return "ParameterOverflow";
        case errc::regime_violation: return "RegimeViolation";
        case errc::pop_at_root: return "PopAtRoot";
        case errc::child_on_leaf: return "ChildOnLeaf";
        case errc::invalid_argument: return "InvalidArgument";
    }
    return "Unknown";
}

ratio ratio::of(u64 n, u64 d) {
    if (d == 0) fail(errc::invalid_argument, "ratio with zero denominator");
    u64 g = std::gcd(n, d);
    return ratio{n / g, d / g};
}

ratio ratio::from_double(double x) {
    if (!(x > 0) || !std::isfinite(x) || x > 1e15)
        fail(errc::invalid_argument, "tau must be a positive finite real");
    double r = std::round(x);
    if (std::fabs(x - r) < 1e-9) return of(u64(r), 1);
    const u64 den = u64(1) << 20;
    return of(u64(std::llround(x * double(den))), den);
}

ratio ratio::times(u64 k) const {
    u64 n;
    if (__builtin_mul_overflow(num, k, &n)) fail(errc::overflow, "tau product overflows");
    return of(n, den);
}

bool heavier(u64 wb, u64 wa, ratio tau) {
    return (unsigned __int128)wb * tau.num > (unsigned __int128)wa * tau.den;
}

bool at_most(u64 x, ratio tau) { return (unsigned __int128)x * tau.den <= tau.num; }

unsigned ceil_log2(ratio tau) {
    unsigned L = 1;
    while (L < 127 && ((unsigned __int128)1 << L) * tau.den < tau.num) ++L;
    return L;
}

sym_t grammar::add_var(rule r) {
    rules.push_back(std::move(r));
    return sym_t(sigma + rules.size() - 1);
}

bool grammar::unit_weights() const {
    return std::all_of(weights.begin(), weights.end(), [](u64 w) { return w == 1; });
}

void append_run(rule& r, sym_t s, u64 e) {
    if (e == 0) return;
    if (!r.empty() && r.back().sym == s)
        r.back().exp += e;
    else
        r.push_back({s, e});
}

rule canonical(const rule& r) {
    rule out;
    out.reserve(r.size());
    for (auto& x : r) append_run(out, x.sym, x.exp);
    return out;
}

u64 rule_length(const rule& r) {
    u64 n = 0;
    for (auto& x : r) n += x.exp;
    return n;
}

std::vector<sym_t> topo_order(const grammar& g) {
    const std::size_t nv = g.num_vars();
    std::vector<std::uint8_t> color(nv, 0);
    std::vector<sym_t> order;
    order.reserve(nv);
    std::vector<std::pair<sym_t, std::size_t>> st;
    for (std::size_t root = 0; root < nv; ++root) {
        if (color[root]) continue;
        st.push_back({sym_t(g.sigma + root), 0});
        color[root] = 1;
        while (!st.empty()) {
            auto& [v, i] = st.back();
            const rule& r = g.rhs(v);
            if (i == r.size()) {
                color[v - g.sigma] = 2;
                order.push_back(v);
                st.pop_back();
                continue;
            }
            sym_t c = r[i++].sym;
            if (g.is_terminal(c)) continue;
            auto& col = color[c - g.sigma];
            if (col == 1) fail(errc::cyclic_grammar, "variable " + std::to_string(c) + " lies on a cycle");
            if (col == 0) {
                col = 1;
                st.push_back({c, 0});
            }
        }
    }
    return order;
}

void validate(const grammar& g) {
    if (g.weights.size() != g.sigma) fail(errc::invalid_argument, "terminal weight table has wrong size");
    for (std::uint32_t t = 0; t < g.sigma; ++t)
        if (g.weights[t] == 0) fail(errc::invalid_argument, "terminal " + std::to_string(t) + " has zero weight");
    if (g.start >= g.num_symbols()) fail(errc::invalid_argument, "start symbol out of range");
    for (std::size_t v = 0; v < g.num_vars(); ++v) {
        const rule& r = g.rules[v];
        const std::string name = "variable " + std::to_string(g.sigma + v);
        if (r.empty()) fail(errc::empty_start_expansion, name + " has an empty right-hand side");
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (r[i].sym >= g.num_symbols()) fail(errc::invalid_argument, name + " references an unknown symbol");
            if (r[i].exp == 0) fail(errc::non_canonical_run, name + " has a run with exponent 0");
            if (g.kind == flavor::slg && r[i].exp != 1) fail(errc::exponent_in_slg, name + " has an exponent in an SLG");
            if (g.kind == flavor::rlslg && i > 0 && r[i - 1].sym == r[i].sym)
                fail(errc::non_canonical_run, name + " has adjacent runs of the same symbol");
        }
    }
    topo_order(g);
}

grammar_stats derive_stats(const grammar& g, unsigned weight_bits) {
    grammar_stats st;
    st.topo = topo_order(g);
    const std::size_t ns = g.num_symbols();
    const u64 limit = weight_bits >= 64 ? std::numeric_limits<u64>::max() : (u64(1) << weight_bits) - 1;
    st.weight.assign(ns, 0);
    st.length.assign(ns, 0);
    st.height.assign(ns, 0);
    for (sym_t t = 0; t < g.sigma; ++t) {
        st.weight[t] = g.weights[t];
        st.length[t] = 1;
    }
    for (sym_t v : st.topo) {
        u64 w = 0, n = 0;
        std::uint32_t h = 0;
        for (auto& x : g.rhs(v)) {
            u64 a, b;
            if (__builtin_mul_overflow(x.exp, st.weight[x.sym], &a) || __builtin_add_overflow(w, a, &w) || w > limit)
                fail(errc::overflow, "weight of variable " + std::to_string(v) + " exceeds the configured width");
            if (__builtin_mul_overflow(x.exp, st.length[x.sym], &b) || __builtin_add_overflow(n, b, &n))
                fail(errc::overflow, "length of variable " + std::to_string(v) + " overflows");
            h = std::max(h, st.height[x.sym] + 1);
        }
        st.weight[v] = w;
        st.length[v] = n;
        st.height[v] = h;
        st.size += g.rhs(v).size();
    }
    if (st.weight[g.start] > limit) fail(errc::overflow, "weight of the start symbol exceeds the configured width");
    return st;
}

std::vector<sym_t> expand(const grammar& g, sym_t s, u64 cap) {
    if (g.is_terminal(s)) return {s};
    auto st = derive_stats(g);
    if (st.length[s] > cap) fail(errc::too_large, "expansion of length " + std::to_string(st.length[s]) + " exceeds the cap");
    std::vector<sym_t> out;
    out.reserve(st.length[s]);
    struct frame {
        sym_t v;
        std::size_t i;
        std::size_t seg;
        bool open;
    };
    std::vector<frame> stack{{s, 0, 0, false}};
    while (!stack.empty()) {
        frame& f = stack.back();
        const rule& r = g.rhs(f.v);
        if (f.i == r.size()) {
            stack.pop_back();
            continue;
        }
        const run& x = r[f.i];
        if (!f.open) {
            f.seg = out.size();
            if (g.is_terminal(x.sym)) {
                out.insert(out.end(), x.exp, x.sym);
                ++f.i;
            } else {
                f.open = true;
                stack.push_back({x.sym, 0, 0, false});
            }
        } else {
            std::size_t seg = f.seg, len = out.size() - seg;
            for (u64 k = 1; k < x.exp; ++k)
                for (std::size_t j = 0; j < len; ++j) out.push_back(out[seg + j]);
            f.open = false;
            ++f.i;
        }
    }
    return out;
}

std::vector<sym_t> expand(const grammar& g) { return expand(g, g.start); }

namespace {

grammar empty_like(const grammar& g) {
    grammar h;
    h.sigma = g.sigma;
    h.weights = g.weights;
    h.codes = g.codes;
    h.quoted = g.quoted;
    h.kind = flavor::rlslg;
    return h;
}

sym_t build_pairs(grammar& h, const std::vector<sym_t>& items, std::size_t l, std::size_t r) {
    if (r - l == 1) return items[l];
    std::size_t mid = l + (r - l) / 2;
    sym_t a = build_pairs(h, items, l, mid);
    sym_t b = build_pairs(h, items, mid, r);
    rule x;
    append_run(x, a, 1);
    append_run(x, b, 1);
    return h.add_var(std::move(x));
}

}  // namespace

normalized normalize(const grammar& g) {
    validate(g);
    normalized out{empty_like(g), {}};
    grammar& h = out.g;
    auto& map = out.map;
    map.assign(g.num_symbols(), no_sym);
    for (sym_t t = 0; t < g.sigma; ++t) map[t] = t;
    for (sym_t v : topo_order(g)) {
        rule seq;
        for (auto& x : g.rhs(v)) append_run(seq, map[x.sym], x.exp);
        if (seq.size() == 1 && seq[0].exp == 1) {
            map[v] = seq[0].sym;
        } else if (seq.size() == 1) {
            map[v] = h.add_var(seq);
        } else {
            std::vector<sym_t> items;
            items.reserve(seq.size());
            for (auto& x : seq) items.push_back(x.exp == 1 ? x.sym : h.add_var(rule{x}));
            map[v] = build_pairs(h, items, 0, items.size());
        }
    }
    h.start = map[g.start];
    return out;
}

bool is_normal_form(const grammar& g) {
    for (auto& r : g.rules) {
        bool power = r.size() == 1 && r[0].exp >= 2;
        bool pair = r.size() == 2 && r[0].exp == 1 && r[1].exp == 1 && r[0].sym != r[1].sym;
        if (!power && !pair) return false;
    }
    return true;
}

grammar bytes_grammar(const std::string& bytes) {
    std::vector<sym_t> id(256, no_sym);
    for (unsigned char c : bytes) id[c] = 0;
    grammar g;
    std::uint32_t sigma = 0;
    std::vector<u64> codes;
    for (unsigned c = 0; c < 256; ++c)
        if (id[c] == 0) {
            id[c] = sigma++;
            codes.push_back(c);
        }
    std::vector<sym_t> text(bytes.size());
    for (std::size_t i = 0; i < bytes.size(); ++i) text[i] = id[(unsigned char)bytes[i]];
    g = trivial_builder(text, sigma);
    g.codes = std::move(codes);
    g.quoted.assign(sigma, 1);
    return g;
}

grammar trivial_builder(const std::vector<sym_t>& text, std::uint32_t sigma) {
    if (text.empty()) fail(errc::empty_input, "cannot build a grammar for the empty string");
    grammar g;
    g.sigma = sigma;
    g.weights.assign(sigma, 1);
    g.kind = flavor::slg;
    for (sym_t c : text)
        if (c >= sigma) fail(errc::unknown_terminal, "text character outside the alphabet");
    std::map<std::pair<sym_t, sym_t>, sym_t> seen;
    struct span {
        std::size_t l, r;
    };
    // explicit stack; identical pairs are shared
    std::vector<std::pair<span, int>> st{{{0, text.size()}, 0}};
    std::vector<sym_t> vals;
    while (!st.empty()) {
        auto [s, state] = st.back();
        st.pop_back();
        std::size_t len = s.r - s.l;
        if (len == 1) {
            vals.push_back(text[s.l]);
            continue;
        }
        std::size_t mid = s.l + len / 2;
        if (state == 0) {
            st.push_back({s, 1});
            st.push_back({{mid, s.r}, 0});
            st.push_back({{s.l, mid}, 0});
        } else {
            sym_t b = vals.back();
            vals.pop_back();
            sym_t a = vals.back();
            vals.pop_back();
            auto it = seen.find({a, b});
            if (it == seen.end()) it = seen.emplace(std::make_pair(a, b), g.add_var(rule{{a, 1}, {b, 1}})).first;
            vals.push_back(it->second);
        }
    }
    g.start = vals.back();
    return g;
}

compacted compact(const grammar& g) {
    compacted out;
    out.map.assign(g.num_symbols(), no_sym);
    grammar& h = out.g;
    h.sigma = g.sigma;
    h.weights = g.weights;
    h.codes = g.codes;
    h.quoted = g.quoted;
    h.kind = g.kind;
    for (sym_t t = 0; t < g.sigma; ++t) out.map[t] = t;
    if (g.is_terminal(g.start)) {
        h.start = g.start;
        return out;
    }
    std::vector<std::pair<sym_t, std::size_t>> st{{g.start, 0}};
    std::vector<std::uint8_t> seen(g.num_vars(), 0);
    seen[g.start - g.sigma] = 1;
    while (!st.empty()) {
        auto& [v, i] = st.back();
        const rule& r = g.rhs(v);
        if (i == r.size()) {
            rule nr;
            for (auto& x : r) nr.push_back({out.map[x.sym], x.exp});
            out.map[v] = h.add_var(std::move(nr));
            st.pop_back();
            continue;
        }
        sym_t c = r[i++].sym;
        if (!g.is_terminal(c) && !seen[c - g.sigma]) {
            seen[c - g.sigma] = 1;
            st.push_back({c, 0});
        }
    }
    h.start = out.map[g.start];
    return out;
}

}  // namespace grix

#include "grix/contracting.hpp"

#include "grix/succinct.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <map>
#include <numeric>

namespace grix {

namespace {

constexpr std::uint32_t none = level_none;

sym_t push_var(grammar& g, std::vector<u64>& w, const std::vector<sym_t>& seq) {
    rule r;
    r.reserve(seq.size());
    u64 total = 0;
    for (sym_t s : seq) {
        r.push_back({s, 1});
        total += w[s];
    }
    w.push_back(total);
    return g.add_var(std::move(r));
}

// Builds, for each node of a forest, a rule expanding to the concatenation of the
// labels on its root path. Rules are produced in sequence order; with mirror set
// every emitted rule is reversed, which is how left contexts are assembled from
// reversed labels.
class prefix_builder {
public:
    using fix_fn = std::function<const std::vector<sym_t>*(sym_t)>;

    prefix_builder(grammar& out, std::vector<u64>& w, const std::vector<std::uint32_t>& parent,
                   const std::vector<std::vector<sym_t>>& labels, prefix_strategy how, bool mirror, fix_fn fix)
        : out_(out), w_(w), parent_(parent), labels_(labels), how_(how), mirror_(mirror), fix_(std::move(fix)) {
        if (how_ == prefix_strategy::shared) build_paths();
    }

    // Top-level rule for node v, unfixed: only fragment variables may be heavy-checked
    // there, label symbols are left in place.
    std::vector<sym_t> top(std::uint32_t v) {
        std::vector<piece> pieces = collect(v);
        if (pieces.empty()) return {};
        u64 total = 0;
        for (auto& p : pieces) total += p.w;
        std::vector<sym_t> seq;
        build(pieces, 0, pieces.size(), total, true, seq);
        if (mirror_) std::reverse(seq.begin(), seq.end());
        return seq;
    }

private:
    struct piece {
        sym_t sym;
        u64 w;
        std::int32_t canon;  // index into canon_, or -1 for a label symbol
    };
    struct canon_node {
        piece self;
        std::vector<piece> parts;
    };
    struct path {
        std::vector<sym_t> arr;
        std::vector<u64> pw;
        std::uint32_t top;
    };

    piece elem(sym_t s) const { return {s, w_[s], -1}; }

    sym_t add_var(std::vector<sym_t> seq) {
        if (mirror_) std::reverse(seq.begin(), seq.end());
        return push_var(out_, w_, seq);
    }

    void emit(const piece& p, u64 total, bool top, std::vector<sym_t>& out) {
        if (!top && p.canon < 0 && 2 * p.w > total) {
            if (const auto* r = fix_(p.sym)) {
                if (mirror_) out.insert(out.end(), r->rbegin(), r->rend());
                else out.insert(out.end(), r->begin(), r->end());
                return;
            }
        }
        out.push_back(p.sym);
    }

    static std::size_t median(const std::vector<u64>& pref, std::size_t lo, std::size_t hi) {
        u64 total = pref[hi] - pref[lo];
        // smallest j with 2 * weight(lo..j] > total; ties go left
        std::size_t a = lo, b = hi;
        while (a < b) {
            std::size_t j = (a + b) / 2;
            if (2 * (pref[j + 1] - pref[lo]) > total) b = j;
            else a = j + 1;
        }
        return a;
    }

    void build(const std::vector<piece>& ps, std::size_t lo, std::size_t hi, u64 total, bool top,
               std::vector<sym_t>& out) {
        std::vector<u64> pref(hi - lo + 1, 0);
        for (std::size_t i = lo; i < hi; ++i) pref[i - lo + 1] = pref[i - lo] + ps[i].w;
        std::size_t j = lo + median(pref, 0, hi - lo);
        if (j > lo) out.push_back(group(ps, lo, j));
        const piece& p = ps[j];
        if (p.canon >= 0 && 2 * p.w > total) {
            for (const auto& q : canon_[p.canon].parts) emit(q, total, top, out);
        } else {
            emit(p, total, top, out);
        }
        if (j + 1 < hi) out.push_back(group(ps, j + 1, hi));
    }

    sym_t group(const std::vector<piece>& ps, std::size_t lo, std::size_t hi) {
        if (hi - lo == 1) return ps[lo].sym;
        u64 total = 0;
        for (std::size_t i = lo; i < hi; ++i) total += ps[i].w;
        std::vector<sym_t> seq;
        build(ps, lo, hi, total, false, seq);
        return add_var(std::move(seq));
    }

    std::vector<piece> collect(std::uint32_t v) {
        std::vector<piece> out;
        if (how_ == prefix_strategy::per_node) {
            std::vector<std::uint32_t> chain;
            for (std::uint32_t c = v; c != none; c = parent_[c]) chain.push_back(c);
            for (auto it = chain.rbegin(); it != chain.rend(); ++it)
                for (sym_t s : labels_[*it]) out.push_back(elem(s));
            return out;
        }
        std::vector<std::pair<std::uint32_t, std::uint32_t>> segs;
        for (std::uint32_t c = v; c != none; c = parent_[paths_[path_of_[c]].top])
            segs.push_back({path_of_[c], end_[c]});
        for (auto it = segs.rbegin(); it != segs.rend(); ++it) prefix_pieces(it->first, it->second, out);
        return out;
    }

    // Canonical decomposition of arr[0, e) of one path.
    void prefix_pieces(std::uint32_t p, std::uint32_t e, std::vector<piece>& out) {
        std::uint32_t l = 0, r = std::uint32_t(paths_[p].arr.size());
        while (e > l) {
            if (e == r) {
                out.push_back(canon(p, l, r));
                break;
            }
            std::uint32_t m = std::uint32_t(median(paths_[p].pw, l, r));
            if (e <= m) {
                r = m;
                continue;
            }
            if (m > l) out.push_back(canon(p, l, m));
            out.push_back(elem(paths_[p].arr[m]));
            l = m + 1;
        }
    }

    piece canon(std::uint32_t p, std::uint32_t l, std::uint32_t r) {
        if (r - l == 1) return elem(paths_[p].arr[l]);
        auto key = std::array<std::uint32_t, 3>{p, l, r};
        if (auto it = memo_.find(key); it != memo_.end()) return canon_[it->second].self;
        std::uint32_t m = std::uint32_t(median(paths_[p].pw, l, r));
        std::vector<piece> parts;
        if (m > l) parts.push_back(canon(p, l, m));
        parts.push_back(elem(paths_[p].arr[m]));
        if (m + 1 < r) parts.push_back(canon(p, m + 1, r));
        u64 total = paths_[p].pw[r] - paths_[p].pw[l];
        std::vector<sym_t> seq;
        for (const auto& q : parts) emit(q, total, false, seq);
        sym_t s = add_var(std::move(seq));
        std::int32_t idx = std::int32_t(canon_.size());
        canon_.push_back({{s, total, idx}, std::move(parts)});
        memo_[key] = idx;
        return canon_.back().self;
    }

    // Heavy-path decomposition of the forest by subtree size; each path stores the
    // concatenation of its nodes' labels.
    void build_paths() {
        std::size_t n = parent_.size();
        std::vector<std::vector<std::uint32_t>> kids(n);
        std::vector<std::uint32_t> order;
        for (std::uint32_t v = 0; v < n; ++v) {
            if (parent_[v] == none) order.push_back(v);
            else kids[parent_[v]].push_back(v);
        }
        for (std::size_t i = 0; i < order.size(); ++i)
            for (auto c : kids[order[i]]) order.push_back(c);
        std::vector<std::uint32_t> size(n, 1);
        for (auto it = order.rbegin(); it != order.rend(); ++it)
            if (parent_[*it] != none) size[parent_[*it]] += size[*it];
        std::vector<std::uint32_t> heavy(n, none);
        for (std::uint32_t v = 0; v < n; ++v)
            for (auto c : kids[v])
                if (heavy[v] == none || size[c] > size[heavy[v]]) heavy[v] = c;
        path_of_.assign(n, none);
        end_.assign(n, 0);
        for (auto v : order) {
            std::uint32_t p = parent_[v];
            if (p == none || heavy[p] != v) {
                path_of_[v] = std::uint32_t(paths_.size());
                paths_.push_back({{}, {}, v});
            } else {
                path_of_[v] = path_of_[p];
            }
            auto& arr = paths_[path_of_[v]].arr;
            arr.insert(arr.end(), labels_[v].begin(), labels_[v].end());
            end_[v] = std::uint32_t(arr.size());
        }
        for (auto& pt : paths_) {
            pt.pw.assign(pt.arr.size() + 1, 0);
            for (std::size_t i = 0; i < pt.arr.size(); ++i) pt.pw[i + 1] = pt.pw[i] + w_[pt.arr[i]];
        }
    }

    grammar& out_;
    std::vector<u64>& w_;
    const std::vector<std::uint32_t>& parent_;
    const std::vector<std::vector<sym_t>>& labels_;
    prefix_strategy how_;
    bool mirror_;
    fix_fn fix_;

    std::vector<path> paths_;
    std::vector<std::uint32_t> path_of_, end_;
    std::vector<canon_node> canon_;
    std::map<std::array<std::uint32_t, 3>, std::int32_t> memo_;
};

// Heavy-path unfolding over the non-atom variables of g, whose rules must all have
// unit exponents. Atoms (run variables) behave like terminals here.
grammar contract_core(const grammar& g0, const std::vector<std::uint8_t>& atom, prefix_strategy how) {
    auto st = derive_stats(g0);
    std::vector<u64> w = st.weight;
    std::size_t nv = g0.num_vars();
    const sym_t sigma = g0.sigma;
    auto inner = [&](sym_t s) { return s >= sigma && !atom[s - sigma]; };

    std::vector<std::vector<sym_t>> seq(nv);
    std::vector<std::uint32_t> parent(nv, none);
    std::vector<std::vector<sym_t>> left(nv), right(nv);
    for (std::size_t v = 0; v < nv; ++v) {
        if (atom[v]) continue;
        for (const auto& r : g0.rules[v]) seq[v].insert(seq[v].end(), r.exp, r.sym);
        sym_t A = sigma + sym_t(v);
        for (std::size_t i = 0; i < seq[v].size(); ++i) {
            sym_t b = seq[v][i];
            if (inner(b) && 2 * w[b] > w[A]) {
                parent[v] = b - sigma;
                left[v].assign(seq[v].rbegin() + (seq[v].size() - i), seq[v].rend());
                right[v].assign(seq[v].begin() + i + 1, seq[v].end());
                break;
            }
        }
    }

    grammar h = g0;
    std::vector<std::vector<sym_t>> rhs(nv);
    std::vector<std::uint8_t> done(nv, 0);
    auto fix = [&](sym_t x) -> const std::vector<sym_t>* {
        if (!inner(x)) return nullptr;
        if (!done[x - sigma]) fail(errc::invalid_argument, "heavy fix requested before its rule was built");
        return &rhs[x - sigma];
    };
    prefix_builder lb(h, w, parent, left, how, true, fix);
    prefix_builder rb(h, w, parent, right, how, false, fix);

    std::vector<std::uint32_t> order;
    for (std::uint32_t v = 0; v < nv; ++v)
        if (!atom[v]) order.push_back(v);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return w[sigma + a] < w[sigma + b]; });
    std::vector<std::uint32_t> root(nv, none);
    for (auto v : order) {
        root[v] = parent[v] == none ? v : root[parent[v]];
        if (parent[v] == none) {
            rhs[v] = seq[v];
        } else {
            rhs[v] = lb.top(v);
            rhs[v].insert(rhs[v].end(), seq[root[v]].begin(), seq[root[v]].end());
            auto r = rb.top(v);
            rhs[v].insert(rhs[v].end(), r.begin(), r.end());
        }
        done[v] = 1;
    }
    for (auto v : order) {
        rule r;
        for (sym_t s : rhs[v]) r.push_back({s, 1});
        h.rules[v] = std::move(r);
    }
    return h;
}

grammar empty_copy(const grammar& g) {
    grammar h;
    h.sigma = g.sigma;
    h.weights = g.weights;
    h.codes = g.codes;
    h.quoted = g.quoted;
    h.kind = g.kind;
    return h;
}

}  // namespace

contracted contract_slg(const grammar& g, prefix_strategy how) {
    validate(g);
    for (const auto& r : g.rules)
        for (const auto& x : r)
            if (x.exp != 1) fail(errc::exponent_in_slg, "contract_slg expects unit exponents");
    // binarize without merging equal neighbours so the result stays an SLG
    grammar b = empty_copy(g);
    b.kind = flavor::slg;
    std::vector<sym_t> map(g.num_symbols(), no_sym);
    for (sym_t t = 0; t < g.sigma; ++t) map[t] = t;
    for (sym_t v : topo_order(g)) {
        std::vector<sym_t> items;
        for (const auto& x : g.rhs(v)) items.push_back(map[x.sym]);
        std::function<sym_t(std::size_t, std::size_t)> pairs = [&](std::size_t l, std::size_t r) -> sym_t {
            if (r - l == 1) return items[l];
            std::size_t mid = l + (r - l) / 2;
            sym_t a = pairs(l, mid), c = pairs(mid, r);
            return b.add_var(rule{{a, 1}, {c, 1}});
        };
        map[v] = pairs(0, items.size());
    }
    b.start = map[g.start];
    contracted out;
    out.g = contract_core(b, std::vector<std::uint8_t>(b.num_vars(), 0), how);
    out.g.kind = flavor::slg;
    out.map = std::move(map);
    out.d = max_rule_runs(out.g);
    return out;
}

contracted contract_rlslg(const grammar& g, prefix_strategy how) {
    auto n = normalize(g);
    const grammar& g0 = n.g;
    std::vector<std::uint8_t> atom(g0.num_vars(), 0);
    for (std::size_t v = 0; v < g0.num_vars(); ++v) atom[v] = g0.rules[v].size() == 1 && g0.rules[v][0].exp >= 2;
    grammar h = contract_core(g0, atom, how);

    // heavy run-variable children are replaced by their run
    auto w = derive_stats(h).weight;
    for (std::size_t v = 0; v < h.num_vars(); ++v) {
        if (v < atom.size() && atom[v]) continue;
        sym_t A = h.sigma + sym_t(v);
        rule r;
        for (const auto& x : h.rules[v]) {
            sym_t s = x.sym;
            if (s >= h.sigma && s - h.sigma < atom.size() && atom[s - h.sigma] && 2 * w[s] > w[A]) {
                const run& inner = h.rhs(s)[0];
                append_run(r, inner.sym, inner.exp * x.exp);
            } else {
                append_run(r, s, x.exp);
            }
        }
        h.rules[v] = std::move(r);
    }
    h.kind = flavor::rlslg;
    contracted out;
    out.g = std::move(h);
    out.map = std::move(n.map);
    out.d = max_rule_runs(out.g);
    return out;
}

std::optional<heavy_edge> find_heavy_child(const grammar& g) {
    auto w = derive_stats(g).weight;
    for (sym_t v = g.sigma; v < g.num_symbols(); ++v)
        for (const auto& x : g.rhs(v))
            if (!g.is_terminal(x.sym) && 2 * w[x.sym] > w[v]) return heavy_edge{v, x.sym};
    return std::nullopt;
}

bool is_contracting(const grammar& g) { return !find_heavy_child(g); }

unsigned max_rule_runs(const grammar& g) {
    std::size_t d = 0;
    for (const auto& r : g.rules) d = std::max(d, r.size());
    return unsigned(d);
}

prefix_fragment prefix_grammar(const grammar& base, const std::vector<std::uint32_t>& parent,
                               const std::vector<std::vector<sym_t>>& labels, prefix_strategy how) {
    if (parent.size() != labels.size()) fail(errc::invalid_argument, "one label per forest node required");
    for (std::size_t v = 0; v < parent.size(); ++v)
        if (parent[v] != none && parent[v] >= parent.size()) fail(errc::invalid_argument, "parent id out of range");
    level_ancestor{parent};  // rejects cycles
    prefix_fragment out;
    out.g = base;
    out.g.kind = flavor::slg;
    std::vector<u64> w = derive_stats(base).weight;
    for (const auto& l : labels)
        for (sym_t s : l)
            if (s >= base.num_symbols()) fail(errc::invalid_argument, "label symbol out of range");
    prefix_builder pb(out.g, w, parent, labels, how, false, [](sym_t) { return nullptr; });
    out.node_sym.assign(parent.size(), no_sym);
    for (std::uint32_t v = 0; v < parent.size(); ++v) {
        auto seq = pb.top(v);
        if (seq.size() == 1) out.node_sym[v] = seq[0];
        else if (seq.size() > 1) out.node_sym[v] = push_var(out.g, w, seq);
    }
    return out;
}

}  // namespace grix

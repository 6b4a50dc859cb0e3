#include "grix/shaping.hpp"

#include <algorithm>
#include <functional>

#include "grix/contracting.hpp"

namespace grix {

namespace {

using u128 = unsigned __int128;

void check_taus(ratio tau_root, ratio tau_var) {
    if (tau_var.num <= tau_var.den) fail(errc::invalid_argument, "tau_var must exceed 1");
    if (u128(tau_root.num) * tau_var.den < u128(tau_var.num) * tau_root.den)
        fail(errc::invalid_argument, "tau_root must be at least tau_var");
}

grammar shell_of(const grammar& g) {
    grammar h;
    h.sigma = g.sigma;
    h.weights = g.weights;
    h.codes = g.codes;
    h.quoted = g.quoted;
    h.kind = flavor::rlslg;
    return h;
}

}  // namespace

rule make_nice_rhs(const grammar& g, const std::vector<u64>& w, sym_t a, ratio tau) {
    rule out;
    std::function<void(sym_t, u64)> emit = [&](sym_t s, u64 k) {
        if (g.is_terminal(s) || !heavier(w[s], w[a], tau)) {
            append_run(out, s, k);
            return;
        }
        const rule& r = g.rhs(s);
        if (r.size() == 1) {
            emit(r[0].sym, r[0].exp * k);
            return;
        }
        for (u64 i = 0; i < k; ++i)
            for (const auto& x : r) emit(x.sym, x.exp);
    };
    for (const auto& x : g.rhs(a)) emit(x.sym, x.exp);
    return out;
}

nice_grammar make_nice(const grammar& g, unsigned d, ratio tau_root, ratio tau_var) {
    check_taus(tau_root, tau_var);
    validate(g);
    auto w = derive_stats(g).weight;
    nice_grammar out;
    out.g = g;
    out.g.kind = flavor::rlslg;
    for (sym_t v = g.sigma; v < g.num_symbols(); ++v)
        out.g.rhs(v) = make_nice_rhs(g, w, v, v == g.start ? tau_root : tau_var);
    out.map.resize(g.num_symbols());
    for (sym_t s = 0; s < g.num_symbols(); ++s) out.map[s] = s;
    out.tau_root = tau_root;
    out.tau_var = tau_var;
    out.d = d;
    return out;
}

int nice_violation(const grammar& g, const std::vector<u64>& w, sym_t a, ratio tau, unsigned d) {
    const rule& r = g.rhs(a);
    const u64 wa = w[a];
    for (const auto& x : r)
        if (!g.is_terminal(x.sym) && heavier(w[x.sym], wa, tau)) return 1;
    if (u128(r.size()) * tau.den > u128(2) * d * tau.num) return 2;

    // a window touching runs i..j weighs at least one copy of each end run plus the
    // full runs in between
    const std::size_t n = r.size();
    const u64 limit = u64(2) * d * ceil_log2(tau);
    std::vector<u128> full(n + 1, 0);
    for (std::size_t t = 0; t < n; ++t) full[t + 1] = full[t] + u128(r[t].exp) * w[r[t].sym];
    auto light = [&](std::size_t i, std::size_t j) {
        u128 m = i == j ? u128(w[r[i].sym]) : u128(w[r[i].sym]) + (full[j] - full[i + 1]) + w[r[j].sym];
        return m * tau.num <= u128(wa) * tau.den;
    };
    std::size_t j = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!light(i, i)) continue;
        j = std::max(j, i);
        while (j + 1 < n && light(i, j + 1)) ++j;
        if (j - i + 1 > limit) return 3;
    }
    return 0;
}

bool is_nice(const grammar& g, ratio tau_root, ratio tau_var, unsigned d) {
    auto w = derive_stats(g).weight;
    for (sym_t v = g.sigma; v < g.num_symbols(); ++v)
        if (nice_violation(g, w, v, v == g.start ? tau_root : tau_var, d) != 0) return false;
    return true;
}

unsigned char_bits(std::uint32_t sigma) { return std::max(1u, bits_for(sigma > 0 ? sigma - 1 : 0)); }

leafy_grammar make_leafy(const grammar& g, u64 b, u64 block_budget_bits) {
    auto n = normalize(g);
    const grammar& G = n.g;
    auto st = derive_stats(G);
    const auto& len = st.length;
    if (b == 0 || b > len[G.start])
        fail(errc::invalid_argument, "block size must lie in [1, length of the string]");
    const unsigned cb = char_bits(G.sigma);
    if (u128(b) * cb > block_budget_bits)
        fail(errc::block_too_wide, "blocks of " + std::to_string(b) + " characters exceed the packed-block budget");

    leafy_grammar out;
    out.b = b;
    grammar& h = out.g;
    h = shell_of(G);
    std::vector<std::vector<sym_t>> text;

    auto new_leaf = [&](std::vector<sym_t> t) {
        rule r;
        for (sym_t c : t) append_run(r, c, 1);
        out.leaf.push_back(1);
        text.push_back(std::move(t));
        return h.add_var(std::move(r));
    };
    auto new_top_rule = [&](rule r) {
        out.leaf.push_back(0);
        text.emplace_back();
        return h.add_var(std::move(r));
    };
    auto new_top = [&](const std::vector<sym_t>& items) {
        rule r;
        for (sym_t s : items) append_run(r, s, 1);
        return new_top_rule(std::move(r));
    };
    auto cat = [](std::vector<sym_t> a, const std::vector<sym_t>& c) {
        a.insert(a.end(), c.begin(), c.end());
        return a;
    };
    auto sub = [](const std::vector<sym_t>& a, std::size_t i, std::size_t j) {
        return std::vector<sym_t>(a.begin() + i, a.begin() + j);
    };

    // explicit expansions of everything shorter than 3b, and the {L, LL, LTL} image
    // of everything at least b long
    std::vector<std::vector<sym_t>> ex(G.num_symbols()), rep(G.num_symbols());
    std::vector<sym_t> hsym(G.num_symbols(), no_sym);
    for (sym_t t = 0; t < G.sigma; ++t) {
        ex[t] = {t};
        if (b == 1) {
            hsym[t] = new_leaf({t});
            rep[t] = {hsym[t]};
        }
    }
    for (sym_t v : st.topo) {
        const u64 L = len[v];
        const rule& r = G.rhs(v);
        if (L < 3 * b) {
            if (r.size() == 1)
                for (u64 k = 0; k < r[0].exp; ++k) ex[v] = cat(std::move(ex[v]), ex[r[0].sym]);
            else
                ex[v] = cat(ex[r[0].sym], ex[r[1].sym]);
        }
        if (L < b) continue;
        std::vector<sym_t> R;
        if (L < 2 * b) {
            R = {new_leaf(ex[v])};  // case 1
        } else if (L < 3 * b) {
            R = {new_leaf(sub(ex[v], 0, b)), new_leaf(sub(ex[v], b, L))};  // case 2
        } else if (r.size() == 2) {
            sym_t B = r[0].sym, C = r[1].sym;
            const u64 lb = len[B], lc = len[C];
            if (lb >= b && lc >= b) {  // case 3.1
                const auto& rb = rep[B];
                const auto& rc = rep[C];
                std::vector<sym_t> mid(rb.begin() + 1, rb.end());
                mid.insert(mid.end(), rc.begin(), rc.end() - 1);
                if (mid.empty()) R = {rb.front(), rc.back()};
                else R = {rb.front(), new_top(mid), rc.back()};
            } else if (lb >= b) {  // case 3.2
                const auto& rb = rep[B];
                std::vector<sym_t> beta;
                if (rb.size() == 3) beta = {rb[1]};
                const auto tbr = text[rb.back() - h.sigma];
                if (tbr.size() + lc < 2 * b) {
                    sym_t la = new_leaf(cat(tbr, ex[C]));
                    R = {rb.front()};
                    R.insert(R.end(), beta.begin(), beta.end());
                    R.push_back(la);
                } else {
                    auto right = cat(sub(tbr, b, tbr.size()), ex[C]);
                    sym_t lal = new_leaf(sub(tbr, 0, b));
                    sym_t lar = new_leaf(std::move(right));
                    beta.push_back(lal);
                    R = {rb.front(), new_top(beta), lar};
                }
            } else {  // case 3.3
                const auto& rc = rep[C];
                std::vector<sym_t> gamma;
                if (rc.size() == 3) gamma = {rc[1]};
                const auto tcl = text[rc.front() - h.sigma];
                if (lb + tcl.size() < 2 * b) {
                    R = {new_leaf(cat(ex[B], tcl))};
                    R.insert(R.end(), gamma.begin(), gamma.end());
                    R.push_back(rc.back());
                } else {
                    std::size_t cut = tcl.size() - b;
                    auto left = cat(ex[B], sub(tcl, 0, cut));
                    sym_t lal = new_leaf(std::move(left));
                    sym_t lar = new_leaf(sub(tcl, cut, tcl.size()));
                    std::vector<sym_t> items{lar};
                    items.insert(items.end(), gamma.begin(), gamma.end());
                    R = {lal, new_top(items), rc.back()};
                }
            }
        } else {
            sym_t B = r[0].sym;
            const u64 k = r[0].exp, lB = len[B];
            if (lB >= 2 * b) {  // case 4.1
                const auto& rb = rep[B];
                rule tr;
                if (rb.size() == 3) append_run(tr, rb[1], 1);
                append_run(tr, rb.back(), 1);
                if (k > 2) append_run(tr, hsym[B], k - 2);
                append_run(tr, rb.front(), 1);
                if (rb.size() == 3) append_run(tr, rb[1], 1);
                R = {rb.front(), new_top_rule(std::move(tr)), rb.back()};
            } else {  // case 4.2
                const auto& eb = ex[B];
                auto piece = [&](u64 i, u64 j) {
                    std::vector<sym_t> t;
                    t.reserve(j - i);
                    for (u64 p = i; p < j; ++p) t.push_back(eb[p % lB]);
                    return t;
                };
                const u64 m = (b + lB - 1) / lB, bm = m * lB;
                const u64 q = (L - 2 * b) / bm;
                const u64 res = L - q * bm;
                const u64 al = std::min(res - b, 2 * b - 1), ar = res - al;
                sym_t lal = new_leaf(piece(0, al));
                if (q >= 1) {
                    sym_t lbm = new_leaf(piece(al, al + bm));
                    sym_t top = new_top_rule(rule{{lbm, q}});
                    R = {lal, top, new_leaf(piece(L - ar, L))};
                } else {
                    R = {lal, new_leaf(piece(L - ar, L))};
                }
            }
        }
        rep[v] = R;
        hsym[v] = new_top(R);
    }
    h.start = hsym[G.start];
    out.map.assign(g.num_symbols(), no_sym);
    for (sym_t s = 0; s < g.num_symbols(); ++s) out.map[s] = hsym[n.map[s]];
    out.block.resize(text.size(), packed_string(cb));
    for (std::size_t v = 0; v < text.size(); ++v)
        if (out.leaf[v]) out.block[v] = packed_string::of(text[v], cb);
    return out;
}

leafy_grammar::top_part leafy_grammar::top() const {
    top_part tp;
    tp.to_top.assign(g.num_symbols(), no_sym);
    std::uint32_t nl = 0;
    for (std::size_t v = 0; v < g.num_vars(); ++v)
        if (leaf[v]) {
            tp.to_top[g.sigma + v] = nl++;
            tp.leaf_of.push_back(g.sigma + sym_t(v));
        }
    tp.g.sigma = nl;
    tp.g.kind = flavor::rlslg;
    for (sym_t lv : tp.leaf_of) {
        u64 wt = 0;
        for (const auto& x : g.rhs(lv)) wt += x.exp * g.weights[x.sym];
        tp.g.weights.push_back(wt);
    }
    sym_t next = nl;
    for (std::size_t v = 0; v < g.num_vars(); ++v)
        if (!leaf[v]) tp.to_top[g.sigma + v] = next++;
    for (std::size_t v = 0; v < g.num_vars(); ++v) {
        if (leaf[v]) continue;
        rule r;
        for (const auto& x : g.rules[v]) {
            if (g.is_terminal(x.sym)) fail(errc::invalid_argument, "top variable references a terminal");
            r.push_back({tp.to_top[x.sym], x.exp});
        }
        tp.g.rules.push_back(std::move(r));
    }
    if (g.is_terminal(g.start)) fail(errc::invalid_argument, "leafy grammar starts at a terminal");
    tp.g.start = tp.to_top[g.start];
    return tp;
}

leafy_grammar make_leafy_nice(const grammar& g, u64 b, ratio tau_root, ratio tau_var, u64 block_budget_bits) {
    check_taus(tau_root, tau_var);
    leafy_grammar lf = make_leafy(g, b, block_budget_bits);
    auto tp = lf.top();
    auto c = contract_rlslg(tp.g);
    auto nice = make_nice(c.g, c.d, tau_root, tau_var);

    const std::uint32_t nl = tp.g.sigma;
    leafy_grammar out;
    out.b = b;
    out.d = c.d;
    out.g = shell_of(lf.g);
    const sym_t sigma = out.g.sigma;
    auto conv = [&](sym_t s) { return s < nl ? sigma + s : sigma + nl + (s - nl); };
    for (sym_t lv : tp.leaf_of) {
        out.g.add_var(lf.g.rhs(lv));
        out.leaf.push_back(1);
        out.block.push_back(lf.block[lv - sigma]);
    }
    const unsigned cb = char_bits(sigma);
    for (const auto& r : nice.g.rules) {
        rule nr;
        for (const auto& x : r) nr.push_back({conv(x.sym), x.exp});
        out.g.add_var(std::move(nr));
        out.leaf.push_back(0);
        out.block.push_back(packed_string(cb));
    }
    out.g.start = conv(nice.g.start);
    out.map.assign(lf.map.size(), no_sym);
    for (std::size_t s = 0; s < lf.map.size(); ++s)
        if (lf.map[s] != no_sym) out.map[s] = conv(c.map[tp.to_top[lf.map[s]]]);
    return out;
}

std::string leafy_shape_error(const leafy_grammar& h, bool rule_forms) {
    const grammar& g = h.g;
    if (h.leaf.size() != g.num_vars() || h.block.size() != g.num_vars()) return "per-variable tables have wrong size";
    for (std::size_t v = 0; v < g.num_vars(); ++v) {
        const rule& r = g.rules[v];
        const std::string name = "variable " + std::to_string(g.sigma + v);
        if (h.leaf[v]) {
            std::vector<std::uint32_t> t;
            for (const auto& x : r) {
                if (!g.is_terminal(x.sym)) return name + " is a leaf with a variable child";
                t.insert(t.end(), x.exp, x.sym);
            }
            if (t.size() < h.b || t.size() >= 2 * h.b) return name + " is a leaf of length " + std::to_string(t.size());
            if (h.block[v].to_vector() != t) return name + " has a packed block that differs from its rule";
        } else {
            for (const auto& x : r)
                if (g.is_terminal(x.sym)) return name + " is a top variable with a terminal child";
        }
    }
    if (!rule_forms) return {};
    for (sym_t s : h.map) {
        if (s == no_sym || g.is_terminal(s) || h.is_leaf(s)) continue;
        std::vector<sym_t> items;
        for (const auto& x : g.rhs(s)) items.insert(items.end(), x.exp, x.sym);
        bool ok = (items.size() == 1 && h.is_leaf(items[0])) ||
                  (items.size() == 2 && h.is_leaf(items[0]) && h.is_leaf(items[1])) ||
                  (items.size() == 3 && h.is_leaf(items[0]) && !h.is_leaf(items[1]) && h.is_leaf(items[2]));
        if (!ok) return "mapped variable " + std::to_string(s) + " does not have a leaf/top shape";
    }
    return {};
}

}  // namespace grix

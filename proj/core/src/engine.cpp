#include "grix/engine.hpp"

#include <algorithm>

namespace grix {

namespace {

using u128 = unsigned __int128;

}  // namespace

child_engine child_engine::build(const grammar& g, const std::vector<std::uint8_t>& leaf, const engine_options& o) {
    validate(g);
    if (!leaf.empty() && leaf.size() != g.num_vars()) fail(errc::invalid_argument, "leaf flags must cover every variable");
    auto st = derive_stats(g);
    auto is_leaf = [&](sym_t s) { return !g.is_terminal(s) && !leaf.empty() && leaf[s - g.sigma]; };

    // dissolve single-child top rules
    std::vector<sym_t> alias(g.num_symbols());
    for (sym_t t = 0; t < g.sigma; ++t) alias[t] = t;
    for (sym_t v : st.topo) {
        const rule& r = g.rhs(v);
        alias[v] = (!is_leaf(v) && r.size() == 1 && r[0].exp == 1) ? alias[r[0].sym] : v;
    }

    // children-first numbering of reachable top variables, then leaves by discovery
    const sym_t root = alias[g.start];
    std::vector<sym_t> id(g.num_symbols(), no_sym);
    std::vector<sym_t> tops, leaves;
    if (!g.is_terminal(root)) {
        std::vector<std::pair<sym_t, std::size_t>> stack{{root, 0}};
        std::vector<std::uint8_t> seen(g.num_symbols(), 0);
        seen[root] = 1;
        if (is_leaf(root)) {
            leaves.push_back(root);
            stack.clear();
        }
        while (!stack.empty()) {
            auto& [v, k] = stack.back();
            const rule& r = g.rhs(v);
            if (k < r.size()) {
                sym_t c = alias[r[k++].sym];
                if (g.is_terminal(c) || seen[c]) continue;
                seen[c] = 1;
                if (is_leaf(c)) leaves.push_back(c);
                else stack.push_back({c, 0});
            } else {
                tops.push_back(v);
                stack.pop_back();
            }
        }
    }
    child_engine e;
    e.sigma_ = g.sigma;
    e.ntop_ = std::uint32_t(tops.size());
    e.nleaf_ = std::uint32_t(leaves.size());
    e.how_ = o.how;
    e.notes_ = o.notes;
    e.marker_base_ = o.marker_base;
    for (sym_t t = 0; t < g.sigma; ++t) id[t] = t;
    for (std::size_t k = 0; k < tops.size(); ++k) id[tops[k]] = g.sigma + sym_t(k);
    for (std::size_t k = 0; k < leaves.size(); ++k) id[leaves[k]] = g.sigma + e.ntop_ + sym_t(k);
    e.start_ = id[root];

    const std::size_t ns = e.num_symbols();
    std::vector<sym_t> orig(ns);
    for (sym_t t = 0; t < g.sigma; ++t) orig[t] = t;
    for (std::size_t k = 0; k < tops.size(); ++k) orig[g.sigma + k] = tops[k];
    for (std::size_t k = 0; k < leaves.size(); ++k) orig[g.sigma + e.ntop_ + k] = leaves[k];

    std::vector<u64> weight(ns), len(ns);
    for (std::size_t s = 0; s < ns; ++s) {
        weight[s] = st.weight[orig[s]];
        len[s] = st.length[orig[s]];
    }
    e.unit_ = g.unit_weights();

    // rules of top variables
    std::vector<u64> rbeg{0}, rsym, rexp, rend, width, abeg{0}, aux;
    for (std::size_t k = 0; k < tops.size(); ++k) {
        const sym_t v = sym_t(g.sigma + k);
        rule r;
        for (const auto& x : g.rhs(tops[k])) append_run(r, id[alias[x.sym]], x.exp);
        u64 acc = 0;
        for (const auto& x : r) {
            rsym.push_back(x.sym);
            rexp.push_back(x.exp);
            acc += x.exp * weight[x.sym];
            rend.push_back(acc);
        }
        rbeg.push_back(rsym.size());
        const std::size_t m = r.size(), b0 = rsym.size() - m;
        const u64 w = weight[v];
        const ratio tau = v == e.start_ ? o.tau_root : o.tau_var;
        if (m == 1) {
            width.push_back(0);
        } else if (u128(w) * tau.den <= tau.num) {
            // direct table of run indices
            width.push_back(0);
            std::size_t j = 0;
            for (u64 y = 0; y < w; ++y) {
                while (rend[b0 + j] <= y) ++j;
                aux.push_back(j);
            }
            auto& mb = v == e.start_ ? e.max_bucket_root_ : e.max_bucket_;
            mb = std::max<std::size_t>(mb, 1);
        } else {
            u64 s = u64(u128(w) * tau.den / tau.num);
            const u64 nb = (w + s - 1) / s;
            width.push_back(s);
            std::size_t j = 0;
            for (u64 b = 0; b <= nb; ++b) {
                while (j + 1 < m && rend[b0 + j] < b * s) ++j;
                aux.push_back(j);
                auto& mb = v == e.start_ ? e.max_bucket_root_ : e.max_bucket_;
                if (b > 0) mb = std::max<std::size_t>(mb, j - std::size_t(aux[aux.size() - 2]));
            }
        }
        abeg.push_back(aux.size());
    }

    // leaves
    std::vector<u64> lbeg{0};
    std::vector<std::uint32_t> pool;
    for (sym_t lv : leaves) {
        for (const auto& x : g.rhs(lv)) {
            if (!g.is_terminal(x.sym)) fail(errc::invalid_argument, "leaf rule references a variable");
            if (g.weights[x.sym] != 1) fail(errc::invalid_argument, "leaf characters must have unit weight");
            pool.insert(pool.end(), x.exp, x.sym);
        }
        lbeg.push_back(pool.size());
    }
    unsigned cb = std::max(1u, bits_for(g.sigma > 0 ? g.sigma - 1 : 0));
    e.pool_ = packed_string::of(pool, cb);

    // heights
    std::vector<unsigned> h(ns, 0);
    for (std::size_t s = g.sigma + e.ntop_; s < ns; ++s) h[s] = 1;
    for (std::size_t k = 0; k < tops.size(); ++k) {
        unsigned best = 0;
        for (std::size_t t = rbeg[k]; t < rbeg[k + 1]; ++t) best = std::max(best, h[rsym[t]]);
        h[g.sigma + k] = best + 1;
    }
    e.height_ = h[e.start_];

    if (o.notes == annotation::counts) {
        std::vector<u64> rl;
        for (std::size_t k = 0; k < tops.size(); ++k) {
            u64 acc = 0;
            for (std::size_t t = rbeg[k]; t < rbeg[k + 1]; ++t) {
                acc += rexp[t] * len[rsym[t]];
                rl.push_back(acc);
            }
        }
        e.len_ = int_vector::of(len);
        e.run_len_ = int_vector::of(rl);
    } else if (o.notes == annotation::markers) {
        if (!e.unit_) fail(errc::invalid_argument, "start markers need unit weights");
        std::vector<u64> mk(ns, 0), tail(ns, 0), rmk, rtail;
        for (sym_t t = 0; t < g.sigma; ++t) {
            mk[t] = t >= o.marker_base;
            tail[t] = t >= o.marker_base ? 0 : 1;
        }
        auto add = [&](u64& m, u64& tl, sym_t s, u64 k) {
            if (mk[s] > 0) {
                m += k * mk[s];
                tl = tail[s];
            } else {
                tl += k * len[s];
            }
        };
        for (std::size_t k = 0; k < leaves.size(); ++k) {
            u64 m = 0, tl = 0;
            for (u64 p = lbeg[k]; p < lbeg[k + 1]; ++p) add(m, tl, pool[p], 1);
            mk[g.sigma + e.ntop_ + k] = m;
            tail[g.sigma + e.ntop_ + k] = tl;
        }
        for (std::size_t k = 0; k < tops.size(); ++k) {
            u64 m = 0, tl = 0;
            for (std::size_t t = rbeg[k]; t < rbeg[k + 1]; ++t) {
                add(m, tl, sym_t(rsym[t]), rexp[t]);
                rmk.push_back(m);
                rtail.push_back(tl);
            }
            mk[g.sigma + k] = m;
            tail[g.sigma + k] = tl;
        }
        std::vector<bool> marks(pool.size());
        for (std::size_t p = 0; p < pool.size(); ++p) marks[p] = pool[p] >= o.marker_base;
        e.mk_ = int_vector::of(mk);
        e.tail_ = int_vector::of(tail);
        e.run_mk_ = int_vector::of(rmk);
        e.run_tail_ = int_vector::of(rtail);
        e.pool_marks_ = bitvector_rs(marks);
    }

    e.weight_ = int_vector::of(weight);
    e.run_begin_ = int_vector::of(rbeg);
    e.run_sym_ = int_vector::of(rsym);
    e.run_exp_ = int_vector::of(rexp);
    e.run_end_ = int_vector::of(rend);
    e.width_ = int_vector::of(width);
    e.aux_begin_ = int_vector::of(abeg);
    e.aux_ = int_vector::of(aux);
    e.leaf_begin_ = int_vector::of(lbeg);
    return e;
}

u64 child_engine::length(sym_t s) const {
    if (notes_ == annotation::counts) return len_[s];
    if (unit_) return weight_[s];
    fail(errc::invalid_argument, "unweighted lengths need the counts annotation");
}

std::size_t child_engine::leaf_size(sym_t v) const {
    std::size_t k = v - sigma_ - ntop_;
    return leaf_begin_[k + 1] - leaf_begin_[k];
}

std::size_t child_engine::find_run(sym_t v, u64 y) const {
    const std::size_t vi = v - sigma_;
    const std::size_t b0 = run_begin_[vi], m = run_begin_[vi + 1] - b0;
    if (m == 1) return 0;
    const u64 s = width_[vi];
    const std::size_t ab = aux_begin_[vi];
    if (s == 0) return aux_[ab + y];
    const u64 e = y / s;
    std::size_t j = aux_[ab + e];
    if (how_ == bucket_search::scan) {
        while (j + 1 < m && run_end_[b0 + j] <= y) ++j;
        return j;
    }
    std::size_t hi = std::min<std::size_t>(aux_[ab + e + 1], m - 1);
    while (j < hi) {
        std::size_t mid = (j + hi) / 2;
        if (run_end_[b0 + mid] <= y) j = mid + 1;
        else hi = mid;
    }
    return j;
}

child_engine::step child_engine::child(node n, u64 i) const {
    if (is_terminal(n.sym)) fail(errc::child_on_leaf, "a terminal has no children");
    if (i < n.off || i - n.off >= weight_[n.sym])
        fail(errc::index_out_of_node, "index " + std::to_string(i) + " outside the node");
    const u64 y = i - n.off;
    if (is_leaf(n.sym)) return {{leaf_char(n.sym, y), i}, std::size_t(y), 0};
    const std::size_t j = find_run(n.sym, y);
    const sym_t b = run_sym(n.sym, j);
    const u64 base = run_start(n.sym, j), w = weight_[b];
    const u64 q = (y - base) / w;
    return {{b, n.off + base + q * w}, j, q};
}

child_engine::probe child_engine::access(u64 i) const {
    if (i >= total()) fail(errc::index_out_of_range, "index " + std::to_string(i) + " beyond the text");
    node n{start_, 0};
    unsigned steps = 0;
    u64 pos = 0, marks = 0, last = 0;
    while (!is_terminal(n.sym)) {
        step s = child(n, i);
        ++steps;
        if (is_leaf(n.sym)) {
            if (notes_ == annotation::markers) {
                const u64 p0 = leaf_begin(n.sym), r0 = pool_marks_.rank1(p0), r1 = pool_marks_.rank1(p0 + s.run + 1);
                if (r1 > r0) last = n.off + (pool_marks_.select1(r1 - 1) - p0);
                marks += r1 - r0;
            } else {
                pos += s.run;
            }
        } else {
            const std::size_t base = run_begin_[n.sym - sigma_] + s.run;
            const sym_t b = s.to.sym;
            if (notes_ == annotation::counts) {
                pos += (s.run > 0 ? run_len_[base - 1] : 0) + s.copy * len_[b];
            } else if (notes_ == annotation::markers) {
                const u64 mb = s.run > 0 ? run_mk_[base - 1] : 0;
                if (s.copy > 0 && mk_[b] > 0) last = s.to.off - tail_[b] - 1;
                else if (mb > 0) last = n.off + run_start(n.sym, s.run) - run_tail_[base - 1] - 1;
                marks += mb + s.copy * mk_[b];
                if (is_terminal(b) && b >= marker_base_) {
                    ++marks;
                    last = s.to.off;
                }
            }
        }
        n = s.to;
    }
    if (notes_ == annotation::markers) return {n.sym, marks - 1, last, steps};
    if (notes_ == annotation::counts) return {n.sym, pos, n.off, steps};
    return {n.sym, unit_ ? i : ~u64(0), n.off, steps};
}

u64 child_engine::bits() const {
    u64 b = weight_.bits() + run_begin_.bits() + run_sym_.bits() + run_exp_.bits() + run_end_.bits() + width_.bits() +
            aux_begin_.bits() + aux_.bits() + leaf_begin_.bits() + pool_.bits();
    if (notes_ == annotation::counts) b += len_.bits() + run_len_.bits();
    if (notes_ == annotation::markers)
        b += mk_.bits() + tail_.bits() + run_mk_.bits() + run_tail_.bits() + pool_marks_.bits();
    return b;
}

void child_engine::save(byte_writer& out) const {
    out.u32(sigma_);
    out.u32(ntop_);
    out.u32(nleaf_);
    out.u32(start_);
    out.u8(unit_);
    out.u8(std::uint8_t(notes_));
    out.u32(marker_base_);
    out.u32(height_);
    out.u64(max_bucket_);
    out.u64(max_bucket_root_);
    out.u8(std::uint8_t(how_));
    for (const int_vector* v : {&weight_, &run_begin_, &run_sym_, &run_exp_, &run_end_, &width_, &aux_begin_, &aux_,
                                &leaf_begin_, &len_, &run_len_, &mk_, &tail_, &run_mk_, &run_tail_})
        v->save(out);
    pool_.save(out);
    if (notes_ == annotation::markers) pool_marks_.save(out);
}

child_engine child_engine::load(byte_reader& in) {
    child_engine e;
    e.sigma_ = in.u32();
    e.ntop_ = in.u32();
    e.nleaf_ = in.u32();
    e.start_ = in.u32();
    e.unit_ = in.u8() != 0;
    std::uint8_t notes = in.u8();
    if (notes > 2) fail(errc::invalid_argument, "corrupt engine annotation");
    e.notes_ = annotation(notes);
    e.marker_base_ = in.u32();
    e.height_ = in.u32();
    e.max_bucket_ = in.u64();
    e.max_bucket_root_ = in.u64();
    std::uint8_t how = in.u8();
    if (how > 1) fail(errc::invalid_argument, "corrupt bucket search mode");
    e.how_ = bucket_search(how);
    for (int_vector* v : {&e.weight_, &e.run_begin_, &e.run_sym_, &e.run_exp_, &e.run_end_, &e.width_, &e.aux_begin_,
                          &e.aux_, &e.leaf_begin_, &e.len_, &e.run_len_, &e.mk_, &e.tail_, &e.run_mk_, &e.run_tail_})
        *v = int_vector::load(in);
    e.pool_ = packed_string::load(in);
    if (e.notes_ == annotation::markers) e.pool_marks_ = bitvector_rs::load(in);
    if (e.weight_.size() != e.num_symbols() || e.run_begin_.size() != std::size_t(e.ntop_) + 1 ||
        e.leaf_begin_.size() != std::size_t(e.nleaf_) + 1 || e.start_ >= e.num_symbols())
        fail(errc::invalid_argument, "corrupt engine tables");
    return e;
}

}  // namespace grix

#include "grix/traversal.hpp"

#include <algorithm>
#include <cmath>

namespace grix {

cursor_tree::cursor_tree(const child_engine& e) : e_(&e), top_(e.num_leaves() > 0) {
    const auto n = e.num_symbols();
    std::vector<std::uint32_t> pl(n, level_ancestor::none), pr(n, level_ancestor::none);
    for (sym_t v = e.sigma(); v < e.sigma() + e.num_top(); ++v) {
        pl[v] = e.run_sym(v, 0);
        pr[v] = e.run_sym(v, e.num_runs(v) - 1);
    }
    gl_ = level_ancestor(pl);
    gr_ = level_ancestor(pr);
}

node_cursor cursor_tree::root() const { return make(frame_kind::root, e_->start(), 0, node_cursor(nullptr)); }

node_cursor cursor_tree::push_child(const node_cursor& p, u64 i) const {
    const sym_t a = p.symb();
    if (is_tree_leaf(a)) fail(errc::child_on_leaf, "push_child on a leaf of the parse tree");
    const auto st = e_->child({a, p.offset()}, i);
    const sym_t b = st.to.sym;
    const u64 off = st.to.off;
    if (off == p.offset()) return make(frame_kind::left, b, off, p.kind() == frame_kind::left ? p.link() : p);
    if (off + e_->weight(b) == p.offset() + e_->weight(a))
        return make(frame_kind::right, b, off, p.kind() == frame_kind::right ? p.link() : p);
    return make(frame_kind::middle, b, off, p);
}

node_cursor cursor_tree::pop(const node_cursor& p) const {
    const sym_t a = p.symb();
    switch (p.kind()) {
    case frame_kind::root:
        fail(errc::pop_at_root, "the root has no parent");
    case frame_kind::middle:
        return p.link();
    case frame_kind::left: {
        node_cursor up = p.link();
        const auto want = gl_.level(a) + 1;
        if (gl_.level(up.symb()) == want) return up;
        return make(frame_kind::left, gl_.query(up.symb(), want), p.offset(), up);
    }
    case frame_kind::right: {
        node_cursor up = p.link();
        const auto want = gr_.level(a) + 1;
        if (gr_.level(up.symb()) == want) return up;
        const sym_t par = gr_.query(up.symb(), want);
        return make(frame_kind::right, par, p.offset() + e_->weight(a) - e_->weight(par), up);
    }
    }
    return p;
}

node_cursor cursor_tree::pop_left(const node_cursor& p) const {
    return p.kind() == frame_kind::left ? p.link() : p;
}

node_cursor cursor_tree::pop_right(const node_cursor& p) const {
    return p.kind() == frame_kind::right ? p.link() : p;
}

node_cursor cursor_tree::push_left(const node_cursor& p) const {
    const sym_t a = p.symb();
    if (gl_.level(a) == 0) return p;
    return make(frame_kind::left, gl_.query(a, 0), p.offset(), p.kind() == frame_kind::left ? p.link() : p);
}

node_cursor cursor_tree::push_right(const node_cursor& p) const {
    const sym_t a = p.symb();
    if (gr_.level(a) == 0) return p;
    const sym_t b = gr_.query(a, 0);
    return make(frame_kind::right, b, p.offset() + e_->weight(a) - e_->weight(b),
                p.kind() == frame_kind::right ? p.link() : p);
}

node_cursor cursor_tree::right_sibling(const node_cursor& p) const {
    if (p.is_root()) return p;
    return push_child(pop(p), p.offset() + e_->weight(p.symb()));
}

node_cursor cursor_tree::left_sibling(const node_cursor& p) const {
    if (p.is_root()) return p;
    return push_child(pop(p), p.offset() - 1);
}

node_cursor cursor_tree::forward(const node_cursor& p) const { return push_left(right_sibling(pop_right(p))); }

node_cursor cursor_tree::backward(const node_cursor& p) const { return push_right(left_sibling(pop_left(p))); }

node_cursor cursor_tree::descend(u64 i) const {
    if (i >= e_->total()) fail(errc::index_out_of_range, "index " + std::to_string(i) + " beyond the text");
    node_cursor p = root();
    while (!is_tree_leaf(p.symb())) p = push_child(p, i);
    return p;
}

traversal::traversal(const access_index& ix) : ix_(&ix), tree_(ix.primary()) {}

u64 traversal::block_len(sym_t s) const {
    const auto& e = tree_.engine();
    return e.is_leaf(s) ? e.leaf_size(s) : 1;
}

void traversal::append_block(packed_string& out, sym_t s, u64 from, u64 len) const {
    const auto& e = tree_.engine();
    if (e.is_leaf(s)) out.append(e.pool(), e.leaf_begin(s) + from, len);
    else out.push_back(s);
}

char_cursor traversal::at(u64 i) const {
    node_cursor q = tree_.descend(i);
    if (fast()) return {q, i, i - q.offset()};
    const auto& e = tree_.engine();
    u64 pos = e.unit_weights() ? q.offset() : e.access(i).pos;
    return {q, pos, 0};
}

char_cursor traversal::forward(const char_cursor& p) const {
    const u64 pos = p.pos + 1 == length() ? 0 : p.pos + 1;
    if (fast() && p.leaf_pos + 1 < block_len(p.q.symb())) return {p.q, pos, p.leaf_pos + 1};
    return {tree_.forward(p.q), pos, 0};
}

char_cursor traversal::backward(const char_cursor& p) const {
    const u64 pos = p.pos == 0 ? length() - 1 : p.pos - 1;
    if (p.leaf_pos > 0) return {p.q, pos, p.leaf_pos - 1};
    node_cursor q = tree_.backward(p.q);
    return {q, pos, fast() ? block_len(q.symb()) - 1 : 0};
}

sym_t traversal::symbol(const char_cursor& p) const {
    const auto& e = tree_.engine();
    const sym_t s = p.q.symb();
    return e.is_leaf(s) ? e.leaf_char(s, p.leaf_pos) : s;
}

u64 traversal::offset(const char_cursor& p) const { return p.q.offset() + p.leaf_pos; }

fast_move traversal::fast_forward(const char_cursor& p, u64 m) const {
    if (!fast()) fail(errc::not_leafy_index, "block traversal needs an unweighted leafy index");
    if (m == 0) fail(errc::invalid_argument, "block traversal needs m >= 1");
    fast_move out{p, packed_string(tree_.engine().pool().char_bits()), 0};
    node_cursor q = p.q;
    u64 len = block_len(q.symb());
    const u64 pos = (p.pos + m % length()) % length();
    if (p.leaf_pos + m < len) {
        append_block(out.block, q.symb(), p.leaf_pos, m);
        out.to = {q, pos, p.leaf_pos + m};
        return out;
    }
    append_block(out.block, q.symb(), p.leaf_pos, len - p.leaf_pos);
    q = tree_.forward(q);
    ++out.steps;
    len = block_len(q.symb());
    while (out.block.size() + len <= m) {
        append_block(out.block, q.symb(), 0, len);
        q = tree_.forward(q);
        ++out.steps;
        len = block_len(q.symb());
    }
    const u64 lp = m - out.block.size();
    append_block(out.block, q.symb(), 0, lp);
    out.to = {q, pos, lp};
    return out;
}

fast_move traversal::fast_backward(const char_cursor& p, u64 m) const {
    if (!fast()) fail(errc::not_leafy_index, "block traversal needs an unweighted leafy index");
    if (m == 0) fail(errc::invalid_argument, "block traversal needs m >= 1");
    const u64 n = length();
    const u64 pos = (p.pos + n - m % n) % n;
    fast_move out{p, packed_string(tree_.engine().pool().char_bits()), 0};
    if (m <= p.leaf_pos) {
        append_block(out.block, p.q.symb(), p.leaf_pos - m, m);
        out.to = {p.q, pos, p.leaf_pos - m};
        return out;
    }
    // pieces are collected right to left, then joined
    std::vector<std::pair<node_cursor, std::pair<u64, u64>>> pieces;
    node_cursor q = p.q;
    u64 got = p.leaf_pos;
    if (got > 0) pieces.push_back({q, {0, got}});
    while (true) {
        q = tree_.backward(q);
        ++out.steps;
        const u64 len = block_len(q.symb());
        if (got + len >= m) {
            const u64 lp = len - (m - got);
            pieces.push_back({q, {lp, m - got}});
            out.to = {q, pos, lp};
            break;
        }
        pieces.push_back({q, {0, len}});
        got += len;
    }
    for (auto it = pieces.rbegin(); it != pieces.rend(); ++it)
        append_block(out.block, it->first.symb(), it->second.first, it->second.second);
    return out;
}

packed_string traversal::extract(u64 i, u64 m) const {
    if (i > length() || m > length() - i)
        fail(errc::range_out_of_bounds, "range [" + std::to_string(i) + ", +" + std::to_string(m) + ") past the text");
    if (fast()) {
        if (m == 0) return packed_string(tree_.engine().pool().char_bits());
        return fast_forward(at(i), m).block;
    }
    if (!tree_.engine().unit_weights()) fail(errc::not_leafy_index, "extraction by position needs unit weights");
    packed_string out(char_bits(ix_->sigma()));
    if (m == 0) return out;
    char_cursor p = at(i);
    out.push_back(symbol(p));
    for (u64 k = 1; k < m; ++k) {
        p = forward(p);
        out.push_back(symbol(p));
    }
    return out;
}

u64 traversal_block(u64 n, std::uint32_t sigma, ratio tau, unsigned w) {
    if (n <= 1) return 1;
    const double logn = std::log2(double(n));
    const double logs = std::log2(double(std::max<std::uint32_t>(sigma, 2)));
    const double x = std::min(double(w), tau.value() * logn);
    return std::clamp<u64>(u64(std::ceil(x / logs - 1e-12)), 1, n);
}

}  // namespace grix

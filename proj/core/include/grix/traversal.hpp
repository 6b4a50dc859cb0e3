#pragma once

#include <memory>

#include "grix/access.hpp"

namespace grix {

// Position of a parse-tree node among its siblings.
enum class frame_kind : std::uint8_t { root, middle, left, right };

// Persistent pointer to a parse-tree node. A middle frame links to its parent; a
// left (right) frame links to the nearest ancestor that is not a leftmost
// (rightmost) child. Derived cursors share their chains.
class node_cursor {
public:
    sym_t symb() const { return f_->sym; }
    u64 offset() const { return f_->off; }
    frame_kind kind() const { return f_->kind; }
    bool is_root() const { return f_->kind == frame_kind::root; }
    node_cursor link() const { return f_->up ? node_cursor(f_->up) : *this; }  // the root links to itself
    bool operator==(const node_cursor& o) const { return f_ == o.f_; }
    bool same_node(const node_cursor& o) const { return symb() == o.symb() && offset() == o.offset(); }

private:
    friend class cursor_tree;
    struct frame {
        frame_kind kind;
        sym_t sym;
        u64 off;
        std::shared_ptr<const frame> up;
    };
    explicit node_cursor(std::shared_ptr<const frame> f) : f_(std::move(f)) {}
    std::shared_ptr<const frame> f_;
};

// Node-pointer operations over the parse tree of an engine. Engines with leaves
// are walked as their top part: leaf variables are the tree's leaves.
class cursor_tree {
public:
    explicit cursor_tree(const child_engine& e);

    const child_engine& engine() const { return *e_; }
    bool top_only() const { return top_; }
    bool is_tree_leaf(sym_t s) const { return e_->is_terminal(s) || (top_ && e_->is_leaf(s)); }

    node_cursor root() const;
    node_cursor push_child(const node_cursor& p, u64 i) const;
    node_cursor pop(const node_cursor& p) const;
    node_cursor pop_left(const node_cursor& p) const;
    node_cursor pop_right(const node_cursor& p) const;
    node_cursor push_left(const node_cursor& p) const;
    node_cursor push_right(const node_cursor& p) const;
    node_cursor right_sibling(const node_cursor& p) const;  // the root is its own sibling
    node_cursor left_sibling(const node_cursor& p) const;
    node_cursor forward(const node_cursor& p) const;   // next tree leaf, cyclic
    node_cursor backward(const node_cursor& p) const;  // previous tree leaf, cyclic
    node_cursor descend(u64 i) const;                  // the tree leaf covering i

    std::uint32_t level_left(sym_t s) const { return gl_.level(s); }
    std::uint32_t level_right(sym_t s) const { return gr_.level(s); }
    u64 bits() const { return gl_.bits() + gr_.bits(); }

private:
    static node_cursor make(frame_kind k, sym_t s, u64 off, const node_cursor& up) {
        return node_cursor(std::make_shared<const node_cursor::frame>(node_cursor::frame{k, s, off, up.f_}));
    }
    const child_engine* e_;
    bool top_;
    level_ancestor gl_, gr_;
};

// Character pointer: a tree leaf plus the position inside it when the tree
// leaves are leaf blocks.
struct char_cursor {
    node_cursor q;
    u64 pos;       // unweighted position
    u64 leaf_pos;  // position inside the leaf block, 0 otherwise
};

struct fast_move {
    char_cursor to;
    packed_string block;
    u64 steps;  // leaf-to-leaf moves taken
};

// Cursors and extraction for an access index. Keeps a pointer to the index.
class traversal {
public:
    explicit traversal(const access_index& ix);

    bool fast() const { return tree_.top_only(); }
    u64 length() const { return ix_->length(); }
    u64 weight() const { return ix_->weight(); }
    const cursor_tree& tree() const { return tree_; }

    char_cursor at(u64 i) const;  // i is a weighted position
    char_cursor forward(const char_cursor& p) const;
    char_cursor backward(const char_cursor& p) const;
    sym_t symbol(const char_cursor& p) const;
    u64 offset(const char_cursor& p) const;  // weighted offset of p.pos

    fast_move fast_forward(const char_cursor& p, u64 m) const;
    fast_move fast_backward(const char_cursor& p, u64 m) const;

    // T[i, i + m) over unweighted positions; leafy indexes use fast cursors,
    // other unweighted indexes step one character at a time.
    packed_string extract(u64 i, u64 m) const;
    u64 bits() const { return tree_.bits(); }

private:
    u64 block_len(sym_t s) const;
    void append_block(packed_string& out, sym_t s, u64 from, u64 len) const;

    const access_index* ix_;
    cursor_tree tree_;
};

// Leaf length for block traversal: ceil(min(w, tau log n) / log sigma), within [1, n].
u64 traversal_block(u64 n, std::uint32_t sigma, ratio tau, unsigned w = 64);

}  // namespace grix

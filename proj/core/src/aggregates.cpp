#include "grix/aggregates.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "grix/shaping.hpp"

namespace grix {

u64 monoid::repeat(u64 k, u64 x) const {
    u64 acc = identity();
    while (k > 0) {
        if (k & 1) acc = combine(acc, x);
        k >>= 1;
        if (k) x = combine(x, x);
    }
    return acc;
}

u64 capped_sum::repeat(u64 k, u64 x) const {
    if (k == 0 || x == 0) return 0;
    return k > cap_ / x ? cap_ : std::min(cap_, k * x);
}

prefix_sums::prefix_sums(const child_engine& e, std::shared_ptr<const monoid> m, std::vector<u64> phi, leaf_sums leaves)
    : e_(&e), m_(std::move(m)), mode_(leaves), phi_(std::move(phi)) {
    if (phi_.size() != e.sigma()) fail(errc::invalid_argument, "one monoid element per terminal expected");
    const monoid& op = *m_;
    std::vector<u64> sum(e.num_symbols(), op.identity()), runs;
    for (sym_t t = 0; t < e.sigma(); ++t) sum[t] = phi_[t];
    const sym_t first_leaf = e.sigma() + e.num_top();
    const auto& pool = e.pool();
    for (sym_t v = first_leaf; v < e.num_symbols(); ++v) {
        u64 acc = op.identity();
        for (std::size_t k = 0; k < e.leaf_size(v); ++k) acc = op.combine(acc, phi_[e.leaf_char(v, k)]);
        sum[v] = acc;
    }
    runs.reserve(e.runs());
    for (sym_t v = e.sigma(); v < first_leaf; ++v) {
        u64 acc = op.identity();
        for (std::size_t j = 0; j < e.num_runs(v); ++j) {
            acc = op.combine(acc, op.repeat(e.run_exp(v, j), sum[e.run_sym(v, j)]));
            runs.push_back(acc);
        }
        sum[v] = acc;
    }
    sym_sum_ = int_vector::of(sum);
    run_sum_ = int_vector::of(runs);

    if (mode_ == leaf_sums::ones) {
        std::vector<bool> marks(pool.size());
        for (std::size_t p = 0; p < pool.size(); ++p) marks[p] = phi_[pool.char_at(p)] != 0;
        pool_ones_ = bitvector_rs(marks);
    } else if (mode_ == leaf_sums::gaps) {
        leaf_gaps_.reserve(e.num_leaves());
        for (sym_t v = first_leaf; v < e.num_symbols(); ++v) {
            std::vector<u64> cum(e.leaf_size(v));
            u64 acc = 0;
            for (std::size_t k = 0; k < cum.size(); ++k) cum[k] = acc += phi_[e.leaf_char(v, k)];
            leaf_gaps_.emplace_back(cum, acc + 1);
        }
    }
}

u64 prefix_sums::leaf_prefix(sym_t leaf, u64 y) const {
    switch (mode_) {
    case leaf_sums::ones: {
        const u64 p0 = e_->leaf_begin(leaf);
        return pool_ones_.rank1(p0 + y) - pool_ones_.rank1(p0);
    }
    case leaf_sums::gaps:
        return y == 0 ? 0 : leaf_gaps_[leaf - e_->sigma() - e_->num_top()].select(y - 1);
    case leaf_sums::fold:
        break;
    }
    u64 acc = m_->identity();
    for (u64 k = 0; k < y; ++k) acc = m_->combine(acc, phi_[e_->leaf_char(leaf, k)]);
    return acc;
}

u64 prefix_sums::query(u64 i) const {
    if (i >= e_->total()) fail(errc::index_out_of_range, "index " + std::to_string(i) + " beyond the text");
    const monoid& op = *m_;
    child_engine::node n{e_->start(), 0};
    u64 acc = op.identity();
    while (!e_->is_terminal(n.sym)) {
        if (e_->is_leaf(n.sym)) return op.combine(acc, leaf_prefix(n.sym, i - n.off));
        const auto s = e_->child(n, i);
        const std::size_t base = e_->run_offset(n.sym) + s.run;
        const u64 before = s.run > 0 ? run_sum_[base - 1] : op.identity();
        acc = op.combine(acc, op.combine(before, op.repeat(s.copy, sym_sum_[s.to.sym])));
        n = s.to;
    }
    return acc;
}

u64 prefix_sums::leaf_bits() const {
    u64 b = mode_ == leaf_sums::ones ? pool_ones_.bits() : 0;
    for (const auto& ef : leaf_gaps_) b += ef.bits();
    return b;
}

u64 prefix_sums::bits() const { return sym_sum_.bits() + run_sum_.bits() + leaf_bits(); }

std::vector<u64> df_of(const std::vector<sym_t>& text, sym_t one) {
    std::vector<u64> out;
    u64 k = 0;
    for (sym_t c : text) {
        if (c == one) {
            out.push_back(k);
            k = 0;
        } else {
            ++k;
        }
    }
    out.push_back(k);
    return out;
}

grammar indicator_image(const grammar& g, sym_t c) {
    grammar h;
    h.sigma = 2;
    h.weights = {1, 1};
    h.codes = {'0', '1'};
    h.kind = flavor::rlslg;
    auto img = [&](sym_t s) { return s < g.sigma ? sym_t(s == c) : s - g.sigma + 2; };
    for (const auto& r : g.rules) {
        rule nr;
        for (const auto& x : r) append_run(nr, img(x.sym), x.exp);
        h.rules.push_back(std::move(nr));
    }
    h.start = img(g.start);
    return h;
}

df_grammar df_transform(const grammar& g, sym_t one) {
    if (g.sigma > 2) fail(errc::non_binary_alphabet, "df needs a 0/1 alphabet, got " + std::to_string(g.sigma) + " terminals");
    if (one >= g.sigma) fail(errc::invalid_argument, "the one terminal is not in the alphabet");
    const grammar h = normalize(g).g;

    // output symbols before renumbering: z_k by its k, or a variable by its index
    struct item {
        bool z;
        u64 v;
    };
    struct draft_run {
        item s;
        u64 exp;
    };
    std::vector<std::vector<draft_run>> rules;
    constexpr u64 none = ~u64(0);
    auto push = [](std::vector<draft_run>& r, item s, u64 e) {
        if (!r.empty() && r.back().s.z == s.z && r.back().s.v == s.v) r.back().exp += e;
        else r.push_back({s, e});
    };
    auto new_var = [&](std::vector<draft_run> r) {
        rules.push_back(std::move(r));
        return u64(rules.size() - 1);
    };
    // short symbols expand to one z_k; long ones to z_l M z_r with M given by mid (none when empty)
    struct info {
        bool is_long;
        u64 k, l, r, mid;
    };
    std::vector<info> at(h.num_symbols());
    df_grammar out;
    std::vector<u64> ones(h.num_symbols(), 0);
    for (sym_t t = 0; t < h.sigma; ++t) {
        at[t] = t == one ? info{true, 0, 0, 0, none} : info{false, 1, 0, 0, none};
        ones[t] = t == one;
    }
    for (sym_t v = h.sigma; v < h.num_symbols(); ++v) {
        const rule& rr = h.rhs(v);
        info a{};
        if (rr.size() == 1) {
            const info& b = at[rr[0].sym];
            const u64 k = rr[0].exp;
            ones[v] = k * ones[rr[0].sym];
            if (!b.is_long) {
                a = {false, k * b.k, 0, 0, none};
            } else {
                const item z{true, b.r + b.l};
                std::vector<draft_run> body;
                if (b.mid == none) {
                    push(body, z, k - 1);
                } else {
                    const u64 x = new_var({{z, 1}, {{false, b.mid}, 1}});
                    push(body, {false, b.mid}, 1);
                    push(body, {false, x}, k - 1);
                }
                a = {true, 0, b.l, b.r, new_var(std::move(body))};
            }
        } else {
            const info &b = at[rr[0].sym], &c = at[rr[1].sym];
            ones[v] = ones[rr[0].sym] + ones[rr[1].sym];
            if (!b.is_long && !c.is_long) {
                a = {false, b.k + c.k, 0, 0, none};
            } else if (!b.is_long) {
                a = {true, 0, b.k + c.l, c.r, c.mid};
            } else if (!c.is_long) {
                a = {true, 0, b.l, b.r + c.k, b.mid};
            } else {
                std::vector<draft_run> body;
                if (b.mid != none) push(body, {false, b.mid}, 1);
                push(body, {true, b.r + c.l}, 1);
                if (c.mid != none) push(body, {false, c.mid}, 1);
                a = {true, 0, b.l, c.r, new_var(std::move(body))};
            }
        }
        at[v] = a;
    }
    const info& s = at[h.start];
    out.ones = ones[h.start];
    std::vector<draft_run> top;
    if (!s.is_long) {
        push(top, {true, s.k}, 1);
    } else {
        push(top, {true, s.l}, 1);
        if (s.mid != none) push(top, {false, s.mid}, 1);
        push(top, {true, s.r}, 1);
    }
    const u64 start = new_var(std::move(top));

    // terminals are the distinct z_k, ordered by k
    std::map<u64, sym_t> code;
    for (const auto& r : rules)
        for (const auto& x : r)
            if (x.s.z) code.emplace(x.s.v, 0);
    grammar& o = out.g;
    o.sigma = std::uint32_t(code.size());
    for (auto& [k, id] : code) {
        id = sym_t(o.codes.size());
        o.codes.push_back(k);
    }
    o.weights.assign(o.sigma, 1);
    o.kind = flavor::rlslg;
    for (const auto& r : rules) {
        rule nr;
        for (const auto& x : r) append_run(nr, x.s.z ? code[x.s.v] : o.sigma + sym_t(x.s.v), x.exp);
        o.rules.push_back(std::move(nr));
    }
    o.start = o.sigma + sym_t(start);
    out.g = compact(o).g;
    return out;
}

select_support::select_support(const grammar& g, sym_t c, ratio tau) {
    const grammar img = normalize(indicator_image(g, c)).g;
    const auto st = derive_stats(img);
    const u64 n = st.length[img.start];
    const u64 size = std::max<u64>(1, st.size);
    const double logn = std::max(1.0, std::log2(double(n)));
    const double room = double(size) * tau.value() * logn;
    if (double(n) <= 2 * room) {
        // small enough to keep the indicator bits themselves
        auto text = expand(img);
        std::vector<bool> bits(text.size());
        for (std::size_t k = 0; k < text.size(); ++k) bits[k] = text[k] == 1;
        plain_ = bitvector_rs(bits);
        ones_ = plain_.ones();
        return;
    }
    auto df = df_transform(img, 1);
    ones_ = df.ones;
    if (ones_ == 0) return;
    const u64 len = ones_ + 1;
    b_ = std::clamp<u64>(u64(std::ceil(logn / std::log2(double(n) / room) - 1e-12)), 1, len);
    const u64 dsize = std::max<u64>(1, derive_stats(df.g).size);
    const ratio tr = tau.times(dsize);
    auto h = make_leafy_nice(df.g, b_, tr, tau);
    df_ = std::make_unique<child_engine>(child_engine::build(h.g, h.leaf, {tr, tau, bucket_search::scan, annotation::none, 0}));
    std::vector<u64> phi(h.g.sigma);
    for (sym_t t = 0; t < h.g.sigma; ++t) phi[t] = h.g.code_of(t);
    sums_ = prefix_sums(*df_, std::make_shared<capped_sum>(n), std::move(phi), leaf_sums::gaps);
}

u64 select_support::select(u64 r) const {
    if (r >= ones_) fail(errc::rank_out_of_range, "rank " + std::to_string(r) + " with " + std::to_string(ones_) + " occurrences");
    if (!df_) return plain_.select1(r);
    return sums_.query(r + 1) + r;
}

u64 select_support::bits() const { return df_ ? df_->bits() + sums_.bits() : plain_.bits(); }

u64 select_support::gap_bits() const { return df_ ? sums_.leaf_bits() : 0; }

aggregate_index::aggregate_index(const access_index& ix, bool prebuild)
    : ix_(&ix), rank_(ix.sigma()), select_(ix.sigma()) {
    if (prebuild)
        for (sym_t c = 0; c < ix.sigma(); ++c) {
            ranks_of(c);
            selects_of(c);
        }
}

void aggregate_index::check_char(sym_t c) const {
    if (c >= ix_->sigma()) fail(errc::unknown_terminal, "terminal " + std::to_string(c) + " is not in the alphabet");
}

const prefix_sums& aggregate_index::ranks_of(sym_t c) const {
    check_char(c);
    {
        std::lock_guard lock(mu_);
        if (rank_[c]) return *rank_[c];
    }
    const child_engine& e = ix_->primary();
    std::vector<u64> phi(e.sigma(), 0);
    phi[c] = 1;
    auto built = std::make_shared<const prefix_sums>(e, std::make_shared<capped_sum>(ix_->length()), std::move(phi),
                                                     e.num_leaves() > 0 ? leaf_sums::ones : leaf_sums::fold);
    std::lock_guard lock(mu_);
    if (!rank_[c]) rank_[c] = std::move(built);
    return *rank_[c];
}

const select_support& aggregate_index::selects_of(sym_t c) const {
    check_char(c);
    {
        std::lock_guard lock(mu_);
        if (select_[c]) return *select_[c];
    }
    auto built = std::make_shared<const select_support>(ix_->source(), c, ix_->config().tau);
    std::lock_guard lock(mu_);
    if (!select_[c]) select_[c] = std::move(built);
    return *select_[c];
}

u64 aggregate_index::rank(sym_t c, u64 i) const {
    const auto& ps = ranks_of(c);
    if (i > ix_->weight()) fail(errc::index_out_of_range, "index " + std::to_string(i) + " beyond the text");
    return i == ix_->weight() ? ps.total() : ps.query(i);
}

u64 aggregate_index::count(sym_t c) const { return ranks_of(c).total(); }

u64 aggregate_index::select(sym_t c, u64 r) const { return selects_of(c).select(r); }

u64 aggregate_index::bits() const {
    std::lock_guard lock(mu_);
    u64 b = 0;
    for (const auto& p : rank_)
        if (p) b += p->bits();
    for (const auto& p : select_)
        if (p) b += p->bits();
    return b;
}

}  // namespace grix

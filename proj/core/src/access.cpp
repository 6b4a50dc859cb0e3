#include "grix/access.hpp"

#include <cmath>

namespace grix {

namespace {

engine_report describe(const child_engine& e, std::string role, u64 b, ratio tr, ratio tv, unsigned d) {
    engine_report r;
    r.role = std::move(role);
    r.bits = e.bits();
    r.top_vars = e.num_top();
    r.leaves = e.num_leaves();
    r.runs = e.runs();
    r.height = e.height();
    r.b = b;
    r.total = e.total();
    r.tau_root = tr;
    r.tau_var = tv;
    r.d = d;
    r.max_bucket = e.max_bucket();
    r.max_bucket_root = e.max_bucket_root();
    return r;
}

struct built {
    child_engine e;
    engine_report r;
};

built nice_engine(const grammar& g, ratio tr, ratio tv, const build_config& cfg, annotation notes) {
    auto c = contract_rlslg(g, cfg.prefix);
    auto n = make_nice(c.g, c.d, tr, tv);
    engine_options o{tr, tv, cfg.how, notes, 0};
    auto e = child_engine::build(n.g, {}, o);
    auto r = describe(e, "weighted", 1, tr, tv, c.d);
    return {std::move(e), std::move(r)};
}

built leafy_engine(const grammar& g, u64 b, ratio tr, ratio tv, const build_config& cfg, annotation notes,
                   std::uint32_t marker_base, std::string role) {
    auto h = make_leafy_nice(g, b, tr, tv, cfg.block_budget);
    engine_options o{tr, tv, cfg.how, notes, marker_base};
    auto e = child_engine::build(h.g, h.leaf, o);
    auto r = describe(e, std::move(role), b, tr, tv, h.d);
    return {std::move(e), std::move(r)};
}

}  // namespace

u64 default_block(u64 n, std::uint32_t sigma) {
    if (n <= 1) return 1;
    double ls = std::log2(double(std::max<std::uint32_t>(sigma, 2)));
    u64 b = u64(std::ceil(std::log2(double(n)) / ls - 1e-12));
    return std::clamp<u64>(b, 1, n);
}

unsigned step_bound(const engine_report& r) {
    long double x = std::log((long double)r.total / ((long double)r.tau_root.num / r.tau_root.den * r.b)) /
                    std::log((long double)r.tau_var.num / r.tau_var.den);
    return 3 + unsigned(std::max<long double>(0, std::floor(x + 1e-9L)));
}

grammar unroll_weights(const grammar& g) {
    grammar h;
    h.sigma = 2 * g.sigma;
    h.weights.assign(h.sigma, 1);
    h.kind = flavor::rlslg;
    std::vector<sym_t> img(g.num_symbols());
    // variables keep their order after the per-terminal helpers
    std::vector<rule> helpers;
    for (sym_t t = 0; t < g.sigma; ++t) {
        if (g.weights[t] == 1) {
            img[t] = t + g.sigma;
        } else {
            img[t] = h.sigma + sym_t(helpers.size());
            helpers.push_back({{t + g.sigma, 1}, {t, g.weights[t] - 1}});
        }
    }
    const sym_t shift = h.sigma + sym_t(helpers.size()) - g.sigma;
    for (sym_t v = g.sigma; v < g.num_symbols(); ++v) img[v] = v + shift;
    h.rules = std::move(helpers);
    for (const auto& r : g.rules) {
        rule nr;
        for (const auto& x : r) append_run(nr, img[x.sym], x.exp);
        h.rules.push_back(std::move(nr));
    }
    h.start = img[g.start];
    return h;
}

access_index access_index::build(const grammar& g, const build_config& cfg) {
    if (cfg.tau.num <= cfg.tau.den) fail(errc::invalid_argument, "tau must exceed 1");
    access_index ix;
    ix.cfg_ = cfg;
    ix.src_ = normalize(g).g;
    auto st = derive_stats(ix.src_);
    build_report& rep = ix.rep_;
    rep.length = st.length[ix.src_.start];
    rep.weight = st.weight[ix.src_.start];
    rep.grammar_size = std::max<u64>(1, st.size);
    rep.sigma = ix.src_.sigma;
    rep.tau = cfg.tau;
    rep.leafy = cfg.leafy;
    rep.source_bits = 8 * to_binary(ix.src_).size();

    const bool unit = ix.src_.unit_weights();
    const ratio tr = cfg.tau.times(rep.grammar_size), tv = cfg.tau;
    if (!cfg.leafy) {
        auto b = nice_engine(ix.src_, tr, tv, cfg, unit ? annotation::none : annotation::counts);
        ix.primary_ = std::move(b.e);
        rep.primary = std::move(b.r);
    } else if (unit) {
        u64 blk = cfg.block ? cfg.block : default_block(rep.length, rep.sigma);
        auto b = leafy_engine(ix.src_, blk, tr, tv, cfg, annotation::none, 0, "leafy");
        ix.primary_ = std::move(b.e);
        rep.primary = std::move(b.r);
    } else {
        auto w = nice_engine(ix.src_, tr, tv, cfg, annotation::counts);
        ix.primary_ = std::move(w.e);
        rep.primary = std::move(w.r);
        grammar hat = normalize(unroll_weights(ix.src_)).g;
        u64 hsize = std::max<u64>(1, derive_stats(hat).size);
        u64 blk = cfg.block ? cfg.block : default_block(rep.weight, hat.sigma);
        const ratio htr = cfg.tau.times(hsize);
        auto u = leafy_engine(hat, std::min(blk, rep.weight), htr, tv, cfg, annotation::markers, ix.src_.sigma, "unrolled");
        ix.unrolled_ = std::move(u.e);
        rep.unrolled = std::move(u.r);
        rep.answer_from_unrolled = rep.unrolled->height < rep.primary.height;
    }
    rep.bits = rep.primary.bits + (rep.unrolled ? rep.unrolled->bits : 0);
    return ix;
}

access_result access_index::access(u64 i) const {
    if (i >= rep_.weight) fail(errc::index_out_of_range, "index " + std::to_string(i) + " beyond the text");
    auto p = answering().access(i);
    sym_t c = p.c;
    if (rep_.answer_from_unrolled && c >= src_.sigma) c -= src_.sigma;
    return {c, p.pos, p.offset, p.steps};
}

}  // namespace grix

#include <chrono>
#include <random>
#include <sstream>

#include "common.hpp"

namespace grix::cli {

verify_line verify_one(const std::string& path, const verify_options& o, bool as_text) {
    verify_line r;
    r.path = path;
    try {
        auto in = load_input(path, as_text);
        r.result = in.ix ? verify_index(*in.ix, o) : verify_grammar(in.g, o);
    } catch (const std::exception& e) {
        r.result.ok = false;
        r.result.failure = e.what();
    }
    return r;
}

std::string bench_header() { return "schema,file,n,g,sigma,tau,bits,mean_steps,ns_per_query"; }

std::string bench_line(const bench_row& r) {
    std::ostringstream out;
    out << bench_schema << ',' << r.file << ',' << r.n << ',' << r.g << ',' << r.sigma << ',' << r.tau << ','
        << r.bits << ',' << r.mean_steps << ',' << r.ns_per_query;
    return out.str();
}

std::vector<bench_row> bench_one(const std::string& path, const bench_options& o) {
    const auto in = load_input(path, o.as_text);
    const grammar g = normalize(in.g).g;
    const auto st = derive_stats(g);
    std::vector<bench_row> rows;
    for (double tau : o.taus) {
        build_config cfg;
        cfg.tau = ratio::from_double(tau);
        cfg.leafy = o.leafy;
        const auto ix = access_index::build(g, cfg);
        std::mt19937_64 rng(o.seed);
        std::vector<u64> qs(o.queries);
        for (auto& q : qs) q = rng() % ix.weight();
        u64 steps = 0;
        volatile u64 sink = 0;
        const auto t0 = std::chrono::steady_clock::now();
        for (u64 q : qs) {
            const auto a = ix.access(q);
            steps += a.steps;
            sink = sink + a.c;
        }
        const auto t1 = std::chrono::steady_clock::now();
        bench_row row;
        row.file = path;
        row.n = st.length[g.start];
        row.g = st.size;
        row.sigma = g.sigma;
        row.tau = tau;
        row.bits = ix.bits();
        row.mean_steps = qs.empty() ? 0 : double(steps) / double(qs.size());
        row.ns_per_query = qs.empty() ? 0 : std::chrono::duration<double, std::nano>(t1 - t0).count() / double(qs.size());
        rows.push_back(row);
    }
    return rows;
}

}  // namespace grix::cli

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <mutex>
#include <random>

#include "common.hpp"
#include "grix/aggregates.hpp"
#include "grix/hardgen.hpp"
#include "grix/planner.hpp"
#include "grix/traversal.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace grix;
using namespace grix::cli;

namespace {

json ratio_json(ratio r) { return {{"num", r.num}, {"den", r.den}, {"value", r.value()}}; }

json engine_json(const engine_report& e) {
    return {{"role", e.role},
            {"bits", e.bits},
            {"top_vars", e.top_vars},
            {"leaves", e.leaves},
            {"runs", e.runs},
            {"height", e.height},
            {"b", e.b},
            {"total", e.total},
            {"tau_root", ratio_json(e.tau_root)},
            {"tau_var", ratio_json(e.tau_var)},
            {"d", e.d},
            {"max_bucket", e.max_bucket},
            {"max_bucket_root", e.max_bucket_root},
            {"step_bound", step_bound(e)}};
}

json report_json(const build_report& r) {
    json j = {{"schema", 1},
              {"length", r.length},
              {"weight", r.weight},
              {"grammar_size", r.grammar_size},
              {"sigma", r.sigma},
              {"tau", ratio_json(r.tau)},
              {"leafy", r.leafy},
              {"bits", r.bits},
              {"source_bits", r.source_bits},
              {"primary", engine_json(r.primary)}};
    if (r.unrolled) j["unrolled"] = engine_json(*r.unrolled);
    j["answer_from_unrolled"] = r.answer_from_unrolled;
    if (r.budget_bits) {
        j["budget_bits"] = r.budget_bits;
        j["predicted_depth"] = r.predicted_depth;
    }
    return j;
}

u64 parse_u64(const std::string& s, const char* what) {
    try {
        std::size_t used = 0;
        const u64 v = std::stoull(s, &used);
        if (used == s.size() && s[0] != '-') return v;
    } catch (const std::exception&) {
    }
    fail(errc::invalid_argument, std::string("bad ") + what + ": " + s);
}

std::vector<std::string> expand_paths(const std::vector<std::string>& in) {
    std::vector<std::string> out;
    for (const auto& p : in) {
        if (fs::is_directory(p)) {
            std::vector<std::string> files;
            for (const auto& e : fs::directory_iterator(p))
                if (e.is_regular_file() && e.path().filename().string()[0] != '.' &&
                    e.path().extension() != ".json")
                    files.push_back(e.path().string());
            std::sort(files.begin(), files.end());
            out.insert(out.end(), files.begin(), files.end());
        } else {
            out.push_back(p);
        }
    }
    return out;
}

access_index open_index(const std::string& path, bool as_text) {
    auto in = load_input(path, as_text);
    if (in.ix) return std::move(*in.ix);
    return access_index::build(in.g);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"grix: random access, rank and select over grammar-compressed strings"};
    app.require_subcommand(1);

    // build
    auto* build = app.add_subcommand("build", "build an index from a grammar or plain text");
    std::string b_in, b_out, b_report;
    bool b_text = false, b_leafy = false;
    double b_tau = 0;
    u64 b_budget = 0, b_block = 0;
    unsigned b_word = 64;
    build->add_option("input", b_in, "grammar file, or plain text with --text")->required();
    build->add_option("-o,--out", b_out, "index file")->required();
    build->add_flag("--text", b_text, "read the input as plain text");
    auto* tau_opt = build->add_option("--tau", b_tau, "fan-out parameter, > 1");
    auto* budget_opt = build->add_option("--budget", b_budget, "memory budget in words");
    tau_opt->excludes(budget_opt);
    build->add_flag("--leafy", b_leafy, "store leaf blocks for traversal and extraction");
    build->add_option("--block", b_block, "leaf block length (0 picks one)");
    build->add_option("--word-bits", b_word, "word size w for --budget")->check(CLI::Range(1u, 1024u));
    build->add_option("--report", b_report, "write the JSON build report here instead of stdout");

    // queries
    std::string q_index;
    bool q_text = false;
    auto* access = app.add_subcommand("access", "character at each weighted index");
    std::vector<std::string> a_pos;
    access->add_option("index", q_index, "index or grammar file")->required();
    access->add_option("i", a_pos, "weighted indexes")->required();
    access->add_flag("--text", q_text, "read a grammar input as plain text");

    auto* extract = app.add_subcommand("extract", "substring T[i, i + m)");
    std::string e_i, e_m;
    extract->add_option("index", q_index)->required();
    extract->add_option("i", e_i)->required();
    extract->add_option("m", e_m)->required();
    extract->add_flag("--text", q_text);

    auto* rank = app.add_subcommand("rank", "occurrences of c before weighted index i");
    std::string r_c;
    std::vector<std::string> r_i;
    rank->add_option("index", q_index)->required();
    rank->add_option("c", r_c, "character, or #code")->required();
    rank->add_option("i", r_i)->required();
    rank->add_flag("--text", q_text);

    auto* select = app.add_subcommand("select", "position of the occurrence of c with rank r (from 0)");
    std::string s_c;
    std::vector<std::string> s_r;
    select->add_option("index", q_index)->required();
    select->add_option("c", s_c, "character, or #code")->required();
    select->add_option("r", s_r)->required();
    select->add_flag("--text", q_text);

    // verify
    auto* verify = app.add_subcommand("verify", "compare every query against the expanded text");
    std::vector<std::string> v_paths;
    verify_options vo;
    bool v_text = false;
    unsigned threads = 0;
    verify->add_option("paths", v_paths, "index or grammar files, or directories")->required();
    verify->add_option("--seed", vo.seed, "seed for sampled positions");
    verify->add_option("--samples", vo.samples, "sampled positions per long input");
    verify->add_option("--exhaustive-up-to", vo.exhaustive_up_to, "check every position up to this weight");
    verify->add_flag("--text", v_text);
    verify->add_option("-j,--threads", threads, "parallel inputs (default GRIX_THREADS)");

    // bench
    auto* bench = app.add_subcommand("bench", "CSV of size and query cost over a tau grid");
    std::vector<std::string> bn_paths;
    bench_options bo;
    bo.taus = {2, 4, 16, 64, 256};
    std::string bn_out;
    bench->add_option("paths", bn_paths, "grammar files or directories")->required();
    bench->add_option("--tau", bo.taus, "tau grid")->delimiter(',');
    bench->add_option("--queries", bo.queries, "access queries per (input, tau)");
    bench->add_option("--seed", bo.seed);
    bench->add_flag("--leafy", bo.leafy);
    bench->add_flag("--text", bo.as_text);
    bench->add_option("-o,--out", bn_out, "CSV file instead of stdout");
    bench->add_option("-j,--threads", threads, "parallel inputs (default 1)");

    // gen-hard
    auto* gen = app.add_subcommand("gen-hard", "grammar from a random set-disjointness instance, with ground truth");
    u64 g_n = 0, g_g = 0;
    unsigned g_w = 0;
    double g_eps = 0.5, g_density = -1;
    std::uint32_t g_p = 0, g_q = 1, g_b = 0;
    std::uint64_t g_seed = 1;
    u64 g_samples = 100;
    std::string g_out, g_truth, g_flavor = "rlslg";
    auto* n_opt = gen->add_option("--n", g_n, "target length");
    auto* gs_opt = gen->add_option("--g", g_g, "target grammar size");
    auto* w_opt = gen->add_option("--w", g_w, "word size");
    gen->add_option("--eps", g_eps, "epsilon");
    auto* p_opt = gen->add_option("--P,--N", g_p, "blocks per part");
    gen->add_option("--Q", g_q, "parts");
    auto* bb_opt = gen->add_option("--B", g_b, "block size");
    gen->add_option("--density", g_density, "chance an element is in a set (default: fair probe bits)");
    gen->add_option("--seed", g_seed);
    gen->add_option("--samples", g_samples, "sampled choices in the ground truth");
    gen->add_option("-o,--out", g_out, "grammar file (.bin for binary)")->required();
    gen->add_option("--truth", g_truth, "ground truth JSON (default <out>.truth.json)");
    gen->add_option("--flavor", g_flavor)->check(CLI::IsMember({"slg", "rlslg"}));
    n_opt->needs(gs_opt)->needs(w_opt)->excludes(p_opt);
    p_opt->needs(bb_opt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        if (*build) {
            if (!*tau_opt && !*budget_opt) {
                std::cerr << "build: give exactly one of --tau or --budget\n";
                return exit_usage;
            }
            auto in = load_input(b_in, b_text);
            build_config cfg;
            cfg.leafy = b_leafy;
            cfg.block = b_block;
            std::optional<access_index> ix;
            if (*tau_opt) {
                cfg.tau = ratio::from_double(b_tau);
                ix = access_index::build(in.g, cfg);
            } else {
                ix = build_for_budget(in.g, b_budget, b_word, cfg);
            }
            save_index_file(b_out, *ix);
            const std::string rep = report_json(ix->report()).dump(2) + "\n";
            if (b_report.empty()) std::cout << rep;
            else std::ofstream(b_report) << rep;
            return exit_ok;
        }
        if (*access) {
            auto ix = open_index(q_index, q_text);
            for (const auto& s : a_pos) std::cout << show(ix.source(), ix.access(parse_u64(s, "index")).c) << '\n';
            return exit_ok;
        }
        if (*extract) {
            auto ix = open_index(q_index, q_text);
            traversal tr(ix);
            auto s = tr.extract(parse_u64(e_i, "index"), parse_u64(e_m, "length")).to_vector();
            std::cout << show_string(ix.source(), s) << '\n';
            return exit_ok;
        }
        if (*rank || *select) {
            auto ix = open_index(q_index, q_text);
            aggregate_index ai(ix);
            const sym_t c = parse_char(ix.source(), *rank ? r_c : s_c);
            for (const auto& s : *rank ? r_i : s_r) {
                const u64 v = parse_u64(s, *rank ? "index" : "rank");
                std::cout << (*rank ? ai.rank(c, v) : ai.select(c, v)) << '\n';
            }
            return exit_ok;
        }
        if (*verify) {
            const auto paths = expand_paths(v_paths);
            std::cerr << "verify: seed " << vo.seed << ", " << paths.size() << " inputs\n";
            std::vector<verify_line> res(paths.size());
            fan_out(paths.size(), threads ? threads : default_threads(),
                    [&](std::size_t k) { res[k] = verify_one(paths[k], vo, v_text); });
            bool ok = true;
            for (const auto& [path, r] : res) {
                if (r.ok) std::cout << "ok   " << path << " (" << r.checks << " checks)\n";
                else std::cout << "FAIL " << path << ": " << r.failure << '\n';
                ok = ok && r.ok;
            }
            return ok ? exit_ok : exit_mismatch;
        }
        if (*bench) {
            const auto paths = expand_paths(bn_paths);
            std::vector<std::vector<bench_row>> rows(paths.size());
            std::vector<std::string> errors(paths.size());
            fan_out(paths.size(), threads ? threads : 1, [&](std::size_t k) {
                try {
                    rows[k] = bench_one(paths[k], bo);
                } catch (const std::exception& e) {
                    errors[k] = e.what();
                }
            });
            std::ofstream file;
            if (!bn_out.empty()) file.open(bn_out);
            std::ostream& out = bn_out.empty() ? std::cout : file;
            out << bench_header() << '\n';
            for (const auto& rs : rows)
                for (const auto& r : rs) out << bench_line(r) << '\n';
            bool ok = true;
            for (std::size_t k = 0; k < paths.size(); ++k)
                if (!errors[k].empty()) {
                    std::cerr << paths[k] << ": " << errors[k] << '\n';
                    ok = false;
                }
            return ok ? exit_ok : exit_usage;
        }
        if (*gen) {
            const flavor kind = g_flavor == "slg" ? flavor::slg : flavor::rlslg;
            hard_instance h;
            if (*n_opt) {
                h = generate_hard(g_n, g_g, g_w, g_eps, g_seed, kind);
            } else if (*p_opt) {
                std::mt19937_64 rng(g_seed);
                auto t = random_blocks(std::size_t(g_p) * g_q, g_b, rng, g_density, g_p);
                h = blsd_grammar(t, g_p, g_q, kind);
            } else {
                std::cerr << "gen-hard: give --n/--g/--w or --P/--B\n";
                return exit_usage;
            }
            save_grammar_file(g_out, h.g);
            json truth = {{"schema", 1},  {"P", h.p},          {"Q", h.q},
                          {"B", h.b},     {"part_length", h.part_length},
                          {"length", derive_stats(h.g).length[h.g.start]},
                          {"size", derive_stats(h.g).size}, {"seed", g_seed}};
            json samples = json::array();
            std::mt19937_64 rng(g_seed ^ 0x9e3779b97f4a7c15ULL);
            std::vector<std::uint32_t> s(std::size_t(h.p) * h.q);
            for (u64 k = 0; k < g_samples; ++k) {
                for (auto& x : s) x = std::uint32_t(rng() % h.b);
                auto bits = blsd_eval(h.t, s, h.p, h.q);
                samples.push_back({{"S", s}, {"positions", h.probes(s)}, {"bits", std::vector<int>(bits.begin(), bits.end())}});
            }
            truth["samples"] = std::move(samples);
            std::ofstream(g_truth.empty() ? g_out + ".truth.json" : g_truth) << truth.dump() << '\n';
            return exit_ok;
        }
    } catch (const grix::error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    }
    return exit_usage;
}

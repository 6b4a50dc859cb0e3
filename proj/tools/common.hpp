#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "grix/verify.hpp"

namespace grix::cli {

// Exit codes.
inline constexpr int exit_ok = 0;
inline constexpr int exit_mismatch = 1;
inline constexpr int exit_usage = 2;

// A grammar file, a plain text (as_text) or a serialized index.
struct loaded {
    grammar g;
    std::optional<access_index> ix;
};
loaded load_input(const std::string& path, bool as_text);
bool is_index_file(const std::string& path);

// Characters print as themselves when quoted and printable, as #code otherwise.
std::string show(const grammar& g, sym_t t);
std::string show_string(const grammar& g, const std::vector<sym_t>& s);
sym_t parse_char(const grammar& g, const std::string& arg);

// GRIX_THREADS, else the hardware concurrency.
unsigned default_threads();
// Runs f(k) for k in [0, count) on up to `threads` workers.
template <class F>
void fan_out(std::size_t count, unsigned threads, F&& f);

struct verify_line {
    std::string path;
    verify_result result;
};
verify_line verify_one(const std::string& path, const verify_options& o, bool as_text);

struct bench_options {
    std::vector<double> taus;
    u64 queries = 100000;
    std::uint64_t seed = 1;
    bool leafy = false;
    bool as_text = false;
};
struct bench_row {
    std::string file;
    u64 n = 0, g = 0;
    std::uint32_t sigma = 0;
    double tau = 0;
    u64 bits = 0;
    double mean_steps = 0;
    double ns_per_query = 0;
};
inline constexpr int bench_schema = 1;
std::string bench_header();
std::string bench_line(const bench_row& r);
std::vector<bench_row> bench_one(const std::string& path, const bench_options& o);

}  // namespace grix::cli

#include "fan_out.hpp"

#include "common.hpp"

#include <cstdlib>
#include <fstream>
#include <iterator>

namespace grix::cli {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(errc::invalid_argument, "cannot open " + path);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

bool printable(u64 c) { return c >= 0x21 && c < 0x7f && c != '#'; }

}  // namespace

bool is_index_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    char magic[4] = {};
    return in.read(magic, 4) && std::string(magic, 4) == "GRXI";
}

loaded load_input(const std::string& path, bool as_text) {
    if (is_index_file(path)) {
        auto ix = load_index_file(path);
        grammar g = ix.source();
        return {std::move(g), std::move(ix)};
    }
    if (as_text) return {bytes_grammar(read_file(path)), std::nullopt};
    return {load_grammar_file(path), std::nullopt};
}

std::string show(const grammar& g, sym_t t) {
    const u64 c = g.code_of(t);
    const bool quoted = !g.quoted.empty() && g.quoted[t];
    if (quoted && printable(c)) return std::string(1, char(c));
    return "#" + std::to_string(c);
}

std::string show_string(const grammar& g, const std::vector<sym_t>& s) {
    bool plain = true;
    for (sym_t t = 0; t < g.sigma && plain; ++t) plain = show(g, t).size() == 1;
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!plain && i > 0) out += ' ';
        out += show(g, s[i]);
    }
    return out;
}

sym_t parse_char(const grammar& g, const std::string& arg) {
    u64 code;
    if (arg.size() > 1 && arg[0] == '#') {
        try {
            code = std::stoull(arg.substr(1));
        } catch (const std::exception&) {
            fail(errc::invalid_argument, "bad character code " + arg);
        }
    } else if (arg.size() == 1) {
        code = (unsigned char)arg[0];
    } else {
        fail(errc::invalid_argument, "a character is one byte or #code, got " + arg);
    }
    for (sym_t t = 0; t < g.sigma; ++t)
        if (g.code_of(t) == code) return t;
    fail(errc::unknown_terminal, "character " + arg + " is not in the alphabet");
}

unsigned default_threads() {
    if (const char* s = std::getenv("GRIX_THREADS")) {
        const long v = std::strtol(s, nullptr, 10);
        if (v > 0) return unsigned(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace grix::cli

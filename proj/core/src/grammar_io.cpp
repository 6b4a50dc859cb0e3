#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "grix/grammar.hpp"

namespace grix {

namespace {

struct token {
    enum kind_t { name, terminal } kind;
    std::string text;
    u64 code = 0;
    bool quoted = false;
    u64 exp = 1;
    bool has_exp = false;
};

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

[[noreturn]] void parse_error(std::size_t line, const std::string& msg) {
    fail(errc::invalid_argument, "line " + std::to_string(line) + ": " + msg);
}

u64 parse_uint(const std::string& s, std::size_t& i, std::size_t line) {
    if (i >= s.size() || !std::isdigit((unsigned char)s[i])) parse_error(line, "expected a number");
    u64 v = 0;
    while (i < s.size() && std::isdigit((unsigned char)s[i])) {
        if (__builtin_mul_overflow(v, 10, &v) || __builtin_add_overflow(v, u64(s[i] - '0'), &v))
            parse_error(line, "number too large");
        ++i;
    }
    return v;
}

// reads a terminal or variable name starting at s[i]
token read_symbol(const std::string& s, std::size_t& i, std::size_t line) {
    token t;
    if (s[i] == '\'') {
        ++i;
        if (i >= s.size()) parse_error(line, "unterminated character literal");
        unsigned char c = s[i++];
        if (c == '\\') {
            if (i >= s.size()) parse_error(line, "bad escape");
            char e = s[i++];
            switch (e) {
                case 'n': c = '\n'; break;
                case 't': c = '\t'; break;
                case 'r': c = '\r'; break;
                case '0': c = 0; break;
                case '\\': c = '\\'; break;
                case '\'': c = '\''; break;
                case 'x': {
                    if (i + 2 > s.size()) parse_error(line, "bad hex escape");
                    c = (unsigned char)std::stoi(s.substr(i, 2), nullptr, 16);
                    i += 2;
                    break;
                }
                default: parse_error(line, "unknown escape");
            }
        }
        if (i >= s.size() || s[i] != '\'') parse_error(line, "unterminated character literal");
        ++i;
        t.kind = token::terminal;
        t.code = c;
        t.quoted = true;
    } else if (s[i] == '#') {
        ++i;
        t.kind = token::terminal;
        t.code = parse_uint(s, i, line);
    } else if (std::isalpha((unsigned char)s[i]) || s[i] == '_') {
        std::size_t b = i;
        while (i < s.size() && (std::isalnum((unsigned char)s[i]) || s[i] == '_' || s[i] == '.')) ++i;
        t.kind = token::name;
        t.text = s.substr(b, i - b);
    } else {
        parse_error(line, std::string("unexpected character '") + s[i] + "'");
    }
    return t;
}

void skip_ws(const std::string& s, std::size_t& i) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
}

void put_varint(std::string& out, u64 v) {
    while (v >= 0x80) {
        out.push_back(char((v & 0x7f) | 0x80));
        v >>= 7;
    }
    out.push_back(char(v));
}

u64 get_varint(const std::string& in, std::size_t& i) {
    u64 v = 0;
    for (unsigned shift = 0;; shift += 7) {
        if (i >= in.size() || shift > 63) fail(errc::invalid_argument, "truncated varint");
        unsigned char b = in[i++];
        v |= u64(b & 0x7f) << shift;
        if (!(b & 0x80)) break;
    }
    return v;
}

const char binary_magic[4] = {'G', 'R', 'X', 'G'};

}  // namespace

grammar parse_text(std::istream& in) {
    std::string raw;
    std::size_t lineno = 0;
    std::string start_name;
    std::optional<flavor> declared;
    std::vector<std::pair<token, u64>> weight_decl;
    std::vector<std::pair<std::string, std::vector<token>>> defs;
    bool any_exp = false;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string s = trim(raw);
        if (s.empty() || (s[0] == '#' && (s.size() == 1 || s[1] == ' '))) continue;
        if (s.rfind("start:", 0) == 0) {
            start_name = trim(s.substr(6));
            continue;
        }
        if (s.rfind("flavor:", 0) == 0) {
            std::string f = trim(s.substr(7));
            if (f == "slg") declared = flavor::slg;
            else if (f == "rlslg") declared = flavor::rlslg;
            else parse_error(lineno, "unknown flavor " + f);
            continue;
        }
        if (s.rfind("weights:", 0) == 0) {
            std::size_t i = 8;
            while (true) {
                skip_ws(s, i);
                if (i >= s.size()) break;
                token t = read_symbol(s, i, lineno);
                if (t.kind != token::terminal) parse_error(lineno, "weights apply to terminals only");
                skip_ws(s, i);
                if (i >= s.size() || s[i] != '=') parse_error(lineno, "expected '='");
                ++i;
                skip_ws(s, i);
                weight_decl.push_back({t, parse_uint(s, i, lineno)});
                skip_ws(s, i);
                if (i < s.size() && s[i] == ',') ++i;
            }
            continue;
        }
        std::size_t arrow = s.find("->");
        if (arrow == std::string::npos) parse_error(lineno, "expected 'A -> ...'");
        std::string lhs = trim(s.substr(0, arrow));
        if (lhs.empty()) parse_error(lineno, "missing variable name");
        std::vector<token> body;
        std::size_t i = arrow + 2;
        while (true) {
            skip_ws(s, i);
            if (i >= s.size()) break;
            token t = read_symbol(s, i, lineno);
            if (i < s.size() && s[i] == '^') {
                ++i;
                t.exp = parse_uint(s, i, lineno);
                t.has_exp = true;
                if (t.exp != 1) any_exp = true;
            }
            body.push_back(t);
        }
        defs.push_back({lhs, std::move(body)});
    }
    if (start_name.empty()) fail(errc::invalid_argument, "missing 'start:' line");

    std::map<u64, bool> codes;  // code -> quoted
    auto note = [&](const token& t) {
        auto it = codes.find(t.code);
        if (it == codes.end()) codes[t.code] = t.quoted;
        else it->second = it->second || t.quoted;
    };
    for (auto& [name, body] : defs)
        for (auto& t : body)
            if (t.kind == token::terminal) note(t);
    for (auto& [t, w] : weight_decl) note(t);
    if (start_name[0] == '\'' || start_name[0] == '#') {
        std::size_t i = 0;
        note(read_symbol(start_name, i, 0));
    }

    grammar g;
    g.kind = declared ? *declared : (any_exp ? flavor::rlslg : flavor::slg);
    std::map<u64, sym_t> term_id;
    for (auto& [code, q] : codes) {
        term_id[code] = sym_t(g.codes.size());
        g.codes.push_back(code);
        g.quoted.push_back(q ? 1 : 0);
    }
    g.sigma = std::uint32_t(g.codes.size());
    g.weights.assign(g.sigma, 1);
    for (auto& [t, w] : weight_decl) {
        if (w == 0) fail(errc::invalid_argument, "terminal weights must be positive");
        g.weights[term_id[t.code]] = w;
    }
    std::map<std::string, sym_t> var_id;
    for (auto& [name, body] : defs) {
        if (var_id.count(name)) fail(errc::invalid_argument, "variable " + name + " defined twice");
        var_id[name] = sym_t(g.sigma + var_id.size());
    }
    for (auto& [name, body] : defs) {
        rule r;
        for (auto& t : body) {
            sym_t s;
            if (t.kind == token::terminal) {
                s = term_id[t.code];
            } else {
                auto it = var_id.find(t.text);
                if (it == var_id.end()) fail(errc::invalid_argument, "undefined variable " + t.text);
                s = it->second;
            }
            r.push_back({s, t.exp});
        }
        g.rules.push_back(std::move(r));
    }
    auto it = var_id.find(start_name);
    if (it != var_id.end()) {
        g.start = it->second;
    } else {
        std::size_t i = 0;
        token t = read_symbol(start_name, i, 0);
        if (t.kind != token::terminal || !term_id.count(t.code))
            fail(errc::invalid_argument, "unknown start symbol " + start_name);
        g.start = term_id[t.code];
    }
    validate(g);
    return g;
}

grammar parse_text(const std::string& text) {
    std::istringstream in(text);
    return parse_text(in);
}

namespace {

std::string terminal_text(const grammar& g, sym_t t) {
    u64 c = g.code_of(t);
    bool q = !g.quoted.empty() && g.quoted[t];
    if (q && c < 256) {
        if (c == '\'') return "'\\''";
        if (c == '\\') return "'\\\\'";
        if (c == '\n') return "'\\n'";
        if (c == '\t') return "'\\t'";
        if (c == '\r') return "'\\r'";
        if (c >= 32 && c < 127) return std::string("'") + char(c) + "'";
        static const char* hex = "0123456789abcdef";
        return std::string("'\\x") + hex[c >> 4] + hex[c & 15] + "'";
    }
    return "#" + std::to_string(c);
}

std::string symbol_text(const grammar& g, sym_t s) {
    if (g.is_terminal(s)) return terminal_text(g, s);
    return "X" + std::to_string(s - g.sigma);
}

}  // namespace

void write_text(std::ostream& out, const grammar& g) {
    out << "start: " << symbol_text(g, g.start) << "\n";
    out << "flavor: " << (g.kind == flavor::slg ? "slg" : "rlslg") << "\n";
    // unused terminals are declared through the weights line so that sigma round-trips
    std::vector<std::uint8_t> used(g.sigma, 0);
    if (g.is_terminal(g.start)) used[g.start] = 1;
    for (auto& r : g.rules)
        for (auto& x : r)
            if (g.is_terminal(x.sym)) used[x.sym] = 1;
    bool first = true;
    for (sym_t t = 0; t < g.sigma; ++t) {
        if (used[t] && g.weights[t] == 1) continue;
        out << (first ? "weights: " : ",") << terminal_text(g, t) << "=" << g.weights[t];
        first = false;
    }
    if (!first) out << "\n";
    for (std::size_t v = 0; v < g.num_vars(); ++v) {
        out << "X" << v << " ->";
        for (auto& x : g.rules[v]) {
            out << " " << symbol_text(g, x.sym);
            if (x.exp != 1) out << "^" << x.exp;
        }
        out << "\n";
    }
}

std::string to_text(const grammar& g) {
    std::ostringstream out;
    write_text(out, g);
    return out.str();
}

std::string to_binary(const grammar& g) {
    std::string body;
    put_varint(body, 1);
    body.push_back(char(g.kind));
    put_varint(body, g.sigma);
    for (sym_t t = 0; t < g.sigma; ++t) {
        put_varint(body, g.code_of(t));
        put_varint(body, g.weights[t]);
        body.push_back(char(!g.quoted.empty() && g.quoted[t]));
    }
    put_varint(body, g.num_vars());
    put_varint(body, g.start);
    for (auto& r : g.rules) {
        put_varint(body, r.size());
        for (auto& x : r) {
            put_varint(body, x.sym);
            put_varint(body, x.exp);
        }
    }
    std::string out(binary_magic, 4);
    put_varint(out, body.size());
    return out + body;
}

grammar from_binary(const std::string& bytes) {
    if (bytes.size() < 4 || bytes.compare(0, 4, binary_magic, 4) != 0)
        fail(errc::invalid_argument, "not a binary grammar");
    std::size_t i = 4;
    u64 len = get_varint(bytes, i);
    if (bytes.size() - i < len) fail(errc::invalid_argument, "truncated binary grammar");
    if (get_varint(bytes, i) != 1) fail(errc::invalid_argument, "unsupported binary grammar version");
    grammar g;
    g.kind = flavor(bytes[i++]);
    g.sigma = std::uint32_t(get_varint(bytes, i));
    for (sym_t t = 0; t < g.sigma; ++t) {
        g.codes.push_back(get_varint(bytes, i));
        g.weights.push_back(get_varint(bytes, i));
        g.quoted.push_back(std::uint8_t(bytes.at(i++)));
    }
    u64 nv = get_varint(bytes, i);
    g.start = sym_t(get_varint(bytes, i));
    g.rules.resize(nv);
    for (auto& r : g.rules) {
        u64 m = get_varint(bytes, i);
        r.resize(m);
        for (auto& x : r) {
            x.sym = sym_t(get_varint(bytes, i));
            x.exp = get_varint(bytes, i);
        }
    }
    validate(g);
    return g;
}

grammar load_grammar_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(errc::invalid_argument, "cannot open " + path);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (bytes.size() >= 4 && bytes.compare(0, 4, binary_magic, 4) == 0) return from_binary(bytes);
    return parse_text(bytes);
}

void save_grammar_file(const std::string& path, const grammar& g) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(errc::invalid_argument, "cannot write " + path);
    bool binary = path.size() >= 4 && path.compare(path.size() - 4, 4, ".bin") == 0;
    if (binary) out << to_binary(g);
    else write_text(out, g);
}

}  // namespace grix

#include <fstream>
#include <iterator>

#include "grix/access.hpp"

namespace grix {

namespace {

constexpr char index_magic[4] = {'G', 'R', 'X', 'I'};
constexpr std::uint32_t index_version = 1;

void put_ratio(byte_writer& out, ratio r) {
    out.u64(r.num);
    out.u64(r.den);
}

ratio get_ratio(byte_reader& in) {
    ratio r;
    r.num = in.u64();
    r.den = in.u64();
    if (r.den == 0) fail(errc::invalid_argument, "corrupt ratio");
    return r;
}

void put_engine_report(byte_writer& out, const engine_report& r) {
    out.raw(r.role);
    for (u64 x : {r.bits, r.top_vars, r.leaves, r.runs, u64(r.height), r.b, r.total, u64(r.d), u64(r.max_bucket),
                  u64(r.max_bucket_root)})
        out.u64(x);
    put_ratio(out, r.tau_root);
    put_ratio(out, r.tau_var);
}

engine_report get_engine_report(byte_reader& in) {
    engine_report r;
    r.role = in.raw();
    r.bits = in.u64();
    r.top_vars = in.u64();
    r.leaves = in.u64();
    r.runs = in.u64();
    r.height = unsigned(in.u64());
    r.b = in.u64();
    r.total = in.u64();
    r.d = unsigned(in.u64());
    r.max_bucket = in.u64();
    r.max_bucket_root = in.u64();
    r.tau_root = get_ratio(in);
    r.tau_var = get_ratio(in);
    return r;
}

}  // namespace

std::string access_index::serialize() const {
    byte_writer out;
    for (char c : index_magic) out.u8(std::uint8_t(c));
    out.u32(index_version);

    put_ratio(out, cfg_.tau);
    out.u8(cfg_.leafy);
    out.u64(cfg_.block);
    out.u8(std::uint8_t(cfg_.how));
    out.u64(cfg_.block_budget);
    out.u8(std::uint8_t(cfg_.prefix));

    for (u64 x : {rep_.length, rep_.weight, rep_.grammar_size, u64(rep_.sigma), rep_.bits, rep_.source_bits,
                  rep_.budget_bits, u64(rep_.predicted_depth)})
        out.u64(x);
    put_ratio(out, rep_.tau);
    out.u8(rep_.leafy);
    out.u8(rep_.answer_from_unrolled);
    put_engine_report(out, rep_.primary);
    out.u8(rep_.unrolled.has_value());
    if (rep_.unrolled) put_engine_report(out, *rep_.unrolled);

    out.raw(to_binary(src_));
    primary_.save(out);
    out.u8(unrolled_.has_value());
    if (unrolled_) unrolled_->save(out);
    return out.take();
}

access_index access_index::deserialize(const std::string& bytes) {
    if (bytes.size() < 8 || bytes.compare(0, 4, index_magic, 4) != 0)
        fail(errc::invalid_argument, "not an index file");
    byte_reader in(bytes);
    for (int i = 0; i < 4; ++i) in.u8();
    if (std::uint32_t v = in.u32(); v != index_version)
        fail(errc::invalid_argument, "unsupported index version " + std::to_string(v));

    access_index ix;
    ix.cfg_.tau = get_ratio(in);
    ix.cfg_.leafy = in.u8() != 0;
    ix.cfg_.block = in.u64();
    std::uint8_t how = in.u8();
    if (how > 1) fail(errc::invalid_argument, "corrupt bucket search mode");
    ix.cfg_.how = bucket_search(how);
    ix.cfg_.block_budget = in.u64();
    std::uint8_t prefix = in.u8();
    if (prefix > 1) fail(errc::invalid_argument, "corrupt prefix strategy");
    ix.cfg_.prefix = prefix_strategy(prefix);

    build_report& r = ix.rep_;
    r.length = in.u64();
    r.weight = in.u64();
    r.grammar_size = in.u64();
    r.sigma = std::uint32_t(in.u64());
    r.bits = in.u64();
    r.source_bits = in.u64();
    r.budget_bits = in.u64();
    r.predicted_depth = unsigned(in.u64());
    r.tau = get_ratio(in);
    r.leafy = in.u8() != 0;
    r.answer_from_unrolled = in.u8() != 0;
    r.primary = get_engine_report(in);
    if (in.u8()) r.unrolled = get_engine_report(in);

    ix.src_ = from_binary(in.raw());
    ix.primary_ = child_engine::load(in);
    if (in.u8()) ix.unrolled_ = child_engine::load(in);
    if (!in.done()) fail(errc::invalid_argument, "trailing bytes after index");
    if (r.answer_from_unrolled && !ix.unrolled_) fail(errc::invalid_argument, "index lacks its answering engine");
    if (ix.primary_.total() != r.weight || r.sigma != ix.src_.sigma)
        fail(errc::invalid_argument, "index header disagrees with its engines");
    return ix;
}

void save_index_file(const std::string& path, const access_index& ix) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(errc::invalid_argument, "cannot write " + path);
    out << ix.serialize();
    if (!out) fail(errc::invalid_argument, "write failed for " + path);
}

access_index load_index_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(errc::invalid_argument, "cannot open " + path);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return access_index::deserialize(bytes);
}

}  // namespace grix

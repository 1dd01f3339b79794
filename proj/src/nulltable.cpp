#include "awfisher/nulltable.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "awfisher/combine.hpp"
#include "awfisher/error.hpp"
#include "awfisher/rng.hpp"

namespace awfisher {

namespace {

constexpr std::array<char, 8> kMagic = {'A', 'W', 'N', 'U', 'L', 'L', '0', '1'};
constexpr std::uint64_t kNullStream = 0x4e554c4cULL;  // "NULL"

void put_u64(std::ostream& out, std::uint64_t v) {
    std::array<char, 8> bytes;
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
    out.write(bytes.data(), bytes.size());
}

std::uint64_t get_u64(std::istream& in) {
    std::array<unsigned char, 8> bytes{};
    in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
    if (!in) throw ValidationError("null table: truncated header");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
    return v;
}

}  // namespace

NullTable build_null_table(std::uint32_t k, std::uint64_t draws, std::uint64_t seed, unsigned threads) {
    if (k < 1) throw DomainError("null table: k must be >= 1");
    if (draws < 1) throw DomainError("null table: draws must be >= 1");

    NullTable table{k, draws, seed, std::vector<double>(draws)};
    const std::uint64_t blocks = (draws + kNullBlockSize - 1) / kNullBlockSize;

    parallel_for(blocks, threads, [&](std::size_t block) {
        SplitMix64 rng(substream_seed(seed, kNullStream + k, block));
        std::vector<double> neg_log(k);
        std::vector<double> scratch(k);
        const std::uint64_t begin = block * kNullBlockSize;
        const std::uint64_t end = std::min(draws, begin + kNullBlockSize);
        for (std::uint64_t d = begin; d < end; ++d) {
            for (auto& v : neg_log) v = -std::log(rng.uniform_open0());
            table.samples[d] = aw_statistic_value(neg_log, scratch);
        }
    });
    // -log(1) = -0.0 can appear; normalise so the sort and the file are canonical.
    for (auto& s : table.samples) s = s + 0.0;
    std::sort(table.samples.begin(), table.samples.end());
    return table;
}

std::uint64_t count_at_least(double s_obs, const NullTable& table) noexcept {
    const auto it = std::lower_bound(table.samples.begin(), table.samples.end(), s_obs);
    return static_cast<std::uint64_t>(table.samples.end() - it);
}

double p_value(double s_obs, const NullTable& table) noexcept {
    const double r = static_cast<double>(count_at_least(s_obs, table));
    return (r + 1.0) / (static_cast<double>(table.samples.size()) + 1.0);
}

BoundPair bonferroni_bounds(double log_level_obs, std::uint32_t k) {
    if (k < 1) throw DomainError("bonferroni_bounds: k must be >= 1");
    if (!(log_level_obs <= 0.0)) throw DomainError("bonferroni_bounds: log level must be <= 0");
    // log(2^k - 1) without overflow for large k.
    const double log_candidates = static_cast<double>(k) * std::log(2.0) + std::log1p(-std::ldexp(1.0, -static_cast<int>(k)));
    BoundPair out;
    out.log_lower = log_level_obs;
    out.log_upper = std::min(0.0, log_level_obs + log_candidates);
    out.lower = std::exp(out.log_lower);
    out.upper = std::exp(out.log_upper);
    return out;
}

void write_null_table(std::ostream& out, const NullTable& table) {
    if (table.samples.size() != table.draws) throw ValidationError("null table: sample count != draws");
    out.write(kMagic.data(), kMagic.size());
    put_u64(out, table.k);
    put_u64(out, table.draws);
    put_u64(out, table.seed);
    for (double s : table.samples) put_u64(out, std::bit_cast<std::uint64_t>(s));
    if (!out) throw ValidationError("null table: write failed");
}

NullTable read_null_table(std::istream& in) {
    std::array<char, 8> magic{};
    in.read(magic.data(), magic.size());
    if (!in || magic != kMagic) throw ValidationError("null table: bad magic (expected AWNULL01)");
    NullTable table;
    const std::uint64_t k = get_u64(in);
    if (k < 1 || k > 64) throw ValidationError("null table: k out of range: " + std::to_string(k));
    table.k = static_cast<std::uint32_t>(k);
    table.draws = get_u64(in);
    table.seed = get_u64(in);
    if (table.draws < 1) throw ValidationError("null table: zero draws");

    std::vector<unsigned char> raw(table.draws * 8);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::uint64_t>(in.gcount()) != raw.size()) throw ValidationError("null table: truncated body");
    table.samples.resize(table.draws);
    for (std::uint64_t i = 0; i < table.draws; ++i) {
        std::uint64_t bits = 0;
        for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(raw[i * 8 + b]) << (8 * b);
        table.samples[i] = std::bit_cast<double>(bits);
    }
    if (!std::is_sorted(table.samples.begin(), table.samples.end()) || !(table.samples.front() >= 0.0)) {
        throw ValidationError("null table: samples must be ascending and nonnegative");
    }
    return table;
}

void save_null_table(const std::filesystem::path& path, const NullTable& table) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot open '" + path.string() + "' for writing");
    write_null_table(out, table);
}

NullTable load_null_table(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open null table '" + path.string() + "'");
    return read_null_table(in);
}

}  // namespace awfisher

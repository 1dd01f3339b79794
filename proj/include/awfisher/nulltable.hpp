#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

namespace awfisher {

/// Sorted Monte Carlo sample of the AW statistic under the complete null
/// (all study p-values iid Uniform(0,1)) for a fixed number of studies.
struct NullTable {
    std::uint32_t k = 0;
    std::uint64_t draws = 0;
    std::uint64_t seed = 0;
    std::vector<double> samples;  ///< ascending, all >= 0, size == draws

    friend bool operator==(const NullTable&, const NullTable&) = default;
};

/// Conservative and anti-conservative ends of the Bonferroni sandwich
///   L_obs <= P(S >= s_obs) <= (2^K - 1) L_obs.
/// Log fields stay finite when the linear ones underflow.
struct BoundPair {
    double lower = 1.0;
    double upper = 1.0;
    double log_lower = 0.0;
    double log_upper = 0.0;
};

/// Draws per independently seeded block. Fixed so the table does not depend on
/// the worker count.
inline constexpr std::uint64_t kNullBlockSize = 65536;

/// Builds the table using up to `threads` workers (0 = machine parallelism).
/// Identical (k, draws, seed) give identical tables for any thread count.
NullTable build_null_table(std::uint32_t k, std::uint64_t draws, std::uint64_t seed, unsigned threads = 1);

/// Number of table samples >= s_obs.
std::uint64_t count_at_least(double s_obs, const NullTable& table) noexcept;

/// Add-one Monte Carlo estimate (r + 1) / (N + 1) of P(S >= s_obs).
double p_value(double s_obs, const NullTable& table) noexcept;

/// Bounds for an observed minimized level L_obs = exp(log_level_obs).
BoundPair bonferroni_bounds(double log_level_obs, std::uint32_t k);

/// Binary persistence: 32-byte little-endian header ("AWNULL01", k as u64,
/// draws, seed) followed by `draws` little-endian IEEE-754 doubles.
void write_null_table(std::ostream& out, const NullTable& table);
NullTable read_null_table(std::istream& in);
void save_null_table(const std::filesystem::path& path, const NullTable& table);
NullTable load_null_table(const std::filesystem::path& path);

}  // namespace awfisher

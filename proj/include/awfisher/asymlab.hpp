#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "awfisher/nulltable.hpp"
#include "awfisher/rng.hpp"

namespace awfisher {

/// One synthetic two-sample study: standardized mean difference and its share
/// of the average per-study sample size.
struct StudyConfig {
    double effect = 0.0;
    double lambda = 1.0;
};

enum class ErrorKind {
    miss,             ///< P(w_hat = 0 | true weight 1)
    false_inclusion,  ///< P(w_hat = 1 | true weight 0)
};

std::string_view to_string(ErrorKind k) noexcept;

struct RatePoint {
    std::uint64_t n = 0;
    std::size_t study = 0;  ///< zero-based study index
    ErrorKind kind = ErrorKind::miss;
    double estimate = 0.0;
    std::uint64_t reps = 0;
    std::uint64_t errors = 0;

    double standard_error() const noexcept;
};

enum class SlopeMethod { single_study, fisher, aw_fisher };

std::string_view to_string(SlopeMethod m) noexcept;
SlopeMethod slope_method_from_string(std::string_view name);

struct SlopeEstimate {
    SlopeMethod method = SlopeMethod::fisher;
    std::uint64_t n = 0;
    double estimate = 0.0;        ///< mean of -(2/n) log p over replicates
    double standard_error = 0.0;
    std::uint64_t reps = 0;
    std::uint64_t bound_fallbacks = 0;  ///< aw_fisher replicates that used the Bonferroni upper bound
};

/// Table counts below this are treated as outside the table's resolvable range.
inline constexpr std::uint64_t kMinResolvableCount = 10;

/// Per-study sample size round(lambda * n), raised to the next even value
/// (and at least 2) so the study splits into equal arms.
std::uint64_t study_sample_size(std::uint64_t n, double lambda);

/// log of a two-sided two-sample z-test p-value: the mean difference of two
/// n/2-sized unit-variance arms is drawn as Normal(mu, 4/n) and
/// p = 2 Phi(-|Delta| sqrt(n) / 2). Throws DomainError for odd n or n < 2.
double simulate_study_log_pvalue(std::uint64_t n, double mu, SplitMix64& rng);

/// exp of simulate_study_log_pvalue; may underflow to 0 for very strong
/// signals, prefer the log form there.
double simulate_study_pvalue(std::uint64_t n, double mu, SplitMix64& rng);

/// Empirical miss and false-inclusion rates of the AW weights over a grid of
/// average sample sizes. Output is ordered by grid position, then study.
/// Studies with nonzero effect report miss rates, the others false-inclusion.
std::vector<RatePoint> estimate_weight_error_rates(std::span<const StudyConfig> configs,
                                                   std::span<const std::uint64_t> n_grid, std::uint64_t reps,
                                                   std::uint64_t seed, unsigned threads = 1);

/// Mean of -(2/n) log p over replicates for the given method. single_study
/// uses configs[0]. aw_fisher needs a null table with k == configs.size().
SlopeEstimate estimate_exact_slope(SlopeMethod method, std::span<const StudyConfig> configs, std::uint64_t n,
                                   std::uint64_t reps, std::uint64_t seed, const NullTable* table = nullptr,
                                   unsigned threads = 1);

}  // namespace awfisher

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "awfisher/pvalues.hpp"

namespace awfisher {

/// Outcome of the adaptively weighted Fisher search for one feature.
struct AWResult {
    double statistic = 0.0;  ///< S = -log L, >= 0
    WeightVector weights;
    double log_level = 0.0;  ///< log of the minimized level L; equals -statistic
};

enum class Method { fisher, aw_fisher, stouffer, logit, min_p, max_p };

std::string_view to_string(Method m) noexcept;
/// Throws DomainError for an unknown name.
Method method_from_string(std::string_view name);

struct CombinedResult {
    Method method = Method::fisher;
    double statistic = 0.0;
    /// Natural log of the combined p-value under the complete null. Absent for
    /// aw_fisher, whose null needs a Monte Carlo table.
    std::optional<double> log_p;
};

/// Largest K accepted by the exhaustive 2^K - 1 search.
inline constexpr std::size_t kMaxExhaustiveStudies = 25;

/// -2 * sum(log p_k).
double fisher_statistic(const PValueVector& p);

/// Exhaustive search over all 2^K - 1 nonzero weight vectors.
/// Ties: fewest selected studies first, then the lexicographically smallest
/// bit vector.
AWResult aw_statistic_exhaustive(const PValueVector& p);

/// Linear search over prefixes of the ascending-sorted p-values. Returns the
/// same result as aw_statistic_exhaustive, including tie-breaking.
AWResult aw_statistic_sorted(const PValueVector& p);

/// Same search on -log(p) values. Lets callers keep p-values in log-space
/// when they would underflow as doubles. Entries must be >= 0 (not NaN).
AWResult aw_statistic_sorted_neg_log(std::span<const double> neg_log_p);

/// Statistic only; allocation-free hot path for null-table construction.
/// `scratch` must have room for neg_log_p.size() values.
double aw_statistic_value(std::span<const double> neg_log_p, std::span<double> scratch);

CombinedResult comparator_combine(const PValueVector& p, Method method);

}  // namespace awfisher

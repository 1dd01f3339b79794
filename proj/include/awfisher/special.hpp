#pragma once

#include <span>

namespace awfisher {

/// log(sum(exp(x_i))); -inf for an empty or all -inf input.
double log_sum_exp(std::span<const double> x) noexcept;

/// Log of the upper tail of a chi-square with 2*half_df degrees of freedom:
///   log( exp(-t/2) * sum_{j<half_df} (t/2)^j / j! )
/// Exact in log-space; does not underflow for large t.
double chi2_even_log_sf(double t, int half_df);

/// log(1 - Phi(z)) for a standard normal, accurate far into the upper tail.
double log_normal_sf(double z) noexcept;

/// log of the two-sided z-test p-value 2*Phi(-|z|).
double log_two_sided_p(double z) noexcept;

/// Phi^{-1}(1 - p), accurate for tiny p. Returns -inf at p == 1.
double normal_upper_quantile(double p);

/// log of the upper tail of a Student t with `df` degrees of freedom.
double log_student_t_sf(double t, double df);

}  // namespace awfisher

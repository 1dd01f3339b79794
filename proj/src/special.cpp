#include "awfisher/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "awfisher/error.hpp"

namespace awfisher {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Beyond this point erfc loses relative accuracy to subnormals; switch to
// the Mills-ratio continued fraction.
constexpr double kMillsCutover = 30.0;

double log_mills_ratio(double z) {
    // R(z) = 1/(z+ 1/(z+ 2/(z+ 3/(z+ ...)))), evaluated bottom-up.
    double tail = z;
    for (int k = 60; k >= 1; --k) tail = z + k / tail;
    return -std::log(tail);
}

}  // namespace

double log_sum_exp(std::span<const double> x) noexcept {
    if (x.empty()) return kNegInf;
    const double top = *std::max_element(x.begin(), x.end());
    if (top == kNegInf) return kNegInf;
    if (std::isinf(top)) return top;
    double sum = 0.0;
    for (double v : x) sum += std::exp(v - top);
    return top + std::log(sum);
}

double chi2_even_log_sf(double t, int half_df) {
    if (half_df < 1) throw DomainError("chi2_even_log_sf: half_df must be >= 1");
    if (!(t >= 0.0)) throw DomainError("chi2_even_log_sf: t must be >= 0");
    if (t == 0.0) return 0.0;
    if (std::isinf(t)) return kNegInf;

    const double x = 0.5 * t;
    const double log_x = std::log(x);

    // Log-terms j*log(x) - log(j!) built by recurrence; the terms peak near
    // j = x so every term is kept and summed with a max shift.
    double terms_small[64];
    std::vector<double> terms_large;
    double* terms = terms_small;
    if (half_df > 64) {
        terms_large.resize(static_cast<std::size_t>(half_df));
        terms = terms_large.data();
    }
    terms[0] = 0.0;
    for (int j = 1; j < half_df; ++j) terms[j] = terms[j - 1] + log_x - std::log(static_cast<double>(j));

    return -x + log_sum_exp(std::span<const double>(terms, static_cast<std::size_t>(half_df)));
}

double log_normal_sf(double z) noexcept {
    if (std::isnan(z)) return z;
    if (z == std::numeric_limits<double>::infinity()) return kNegInf;
    if (z < 0.0) return std::log1p(-0.5 * std::erfc(-z / std::numbers::sqrt2));
    if (z < kMillsCutover) return std::log(0.5 * std::erfc(z / std::numbers::sqrt2));
    const double log_pdf = -0.5 * z * z - 0.5 * std::log(2.0 * std::numbers::pi);
    return log_pdf + log_mills_ratio(z);
}

double log_two_sided_p(double z) noexcept {
    const double a = std::fabs(z);
    if (a < kMillsCutover) return std::log(std::erfc(a / std::numbers::sqrt2));
    return std::numbers::ln2 + log_normal_sf(a);
}

double normal_upper_quantile(double p) {
    if (!(p > 0.0 && p <= 1.0)) throw DomainError("normal_upper_quantile: p must lie in (0, 1]");
    if (p == 1.0) return kNegInf;
    const boost::math::normal_distribution<double> standard;
    return boost::math::quantile(boost::math::complement(standard, p));
}

double log_student_t_sf(double t, double df) {
    if (!(df > 0.0)) throw DomainError("log_student_t_sf: df must be positive");
    if (t == std::numeric_limits<double>::infinity()) return kNegInf;
    if (t == -std::numeric_limits<double>::infinity()) return 0.0;
    const boost::math::students_t_distribution<double> dist(df);
    if (t < 0.0) return std::log1p(-boost::math::cdf(boost::math::complement(dist, -t)));
    return std::log(boost::math::cdf(boost::math::complement(dist, t)));
}

}  // namespace awfisher

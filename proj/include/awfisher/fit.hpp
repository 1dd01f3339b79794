#pragma once

#include <cstddef>
#include <span>
#include <string_view>

namespace awfisher {

enum class FitForm {
    n_exp_decay,        ///< rate = a * n * exp(-b n)
    reciprocal_linear,  ///< rate = 1 / (a + b n)
};

std::string_view to_string(FitForm f) noexcept;

struct RateObservation {
    double n = 0.0;
    double rate = 0.0;
};

struct FitResult {
    FitForm form = FitForm::n_exp_decay;
    double a = 0.0;
    double b = 0.0;
    double r_squared = 0.0;    ///< on the linearized scale, clamped to [0, 1]
    bool decaying = false;     ///< b > 0
    std::size_t used = 0;      ///< points entering the regression
    std::size_t dropped = 0;   ///< zero-rate points excluded

    double predict(double n) const noexcept;
};

/// Fits log(rate) = log a + log n - b n by least squares (offset log n).
/// R^2 is measured on log(rate). Zero rates are dropped and counted.
/// Throws NumericError with fewer than 3 usable points.
FitResult fit_n_exp_decay(std::span<const RateObservation> points);

/// Fits 1/rate = a + b n by least squares; R^2 on the reciprocal scale.
/// Throws NumericError with fewer than 2 usable points.
FitResult fit_reciprocal_linear(std::span<const RateObservation> points);

}  // namespace awfisher

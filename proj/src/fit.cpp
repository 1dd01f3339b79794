#include "awfisher/fit.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "awfisher/error.hpp"

namespace awfisher {

namespace {

struct LineFit {
    double intercept = 0.0;
    double slope = 0.0;
    double r_squared = 0.0;
};

// Ordinary least squares y = intercept + slope * x. R^2 is reported for
// y + offset, which is the caller's natural scale.
LineFit least_squares(std::span<const double> x, std::span<const double> y, std::span<const double> offset) {
    const double m = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= m;
    my /= m;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw NumericError("fit: all n values are identical");

    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;

    double mean_obs = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) mean_obs += y[i] + offset[i];
    mean_obs /= m;
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double obs = y[i] + offset[i];
        const double pred = fit.intercept + fit.slope * x[i] + offset[i];
        ss_res += (obs - pred) * (obs - pred);
        ss_tot += (obs - mean_obs) * (obs - mean_obs);
    }
    fit.r_squared = ss_tot > 0.0 ? std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0) : 0.0;
    return fit;
}

}  // namespace

std::string_view to_string(FitForm f) noexcept {
    return f == FitForm::n_exp_decay ? "n_exp_decay" : "reciprocal_linear";
}

double FitResult::predict(double n) const noexcept {
    if (form == FitForm::n_exp_decay) return a * n * std::exp(-b * n);
    return 1.0 / (a + b * n);
}

FitResult fit_n_exp_decay(std::span<const RateObservation> points) {
    std::vector<double> x, y, offset;
    std::size_t dropped = 0;
    for (const auto& pt : points) {
        if (!(pt.n > 0.0)) throw DomainError("fit_n_exp_decay: n must be positive");
        if (pt.rate > 0.0) {
            x.push_back(pt.n);
            offset.push_back(std::log(pt.n));
            y.push_back(std::log(pt.rate) - offset.back());
        } else {
            ++dropped;
        }
    }
    if (x.size() < 3) {
        throw NumericError("fit_n_exp_decay: need at least 3 points with positive rate, got " + std::to_string(x.size()));
    }
    const LineFit line = least_squares(x, y, offset);
    FitResult out;
    out.form = FitForm::n_exp_decay;
    out.a = std::exp(line.intercept);
    out.b = -line.slope;
    out.r_squared = line.r_squared;
    out.decaying = out.b > 0.0;
    out.used = x.size();
    out.dropped = dropped;
    return out;
}

FitResult fit_reciprocal_linear(std::span<const RateObservation> points) {
    std::vector<double> x, y;
    std::size_t dropped = 0;
    for (const auto& pt : points) {
        if (!(pt.n > 0.0)) throw DomainError("fit_reciprocal_linear: n must be positive");
        if (pt.rate > 0.0) {
            x.push_back(pt.n);
            y.push_back(1.0 / pt.rate);
        } else {
            ++dropped;
        }
    }
    if (x.size() < 2) {
        throw NumericError("fit_reciprocal_linear: need at least 2 points with positive rate, got " +
                           std::to_string(x.size()));
    }
    const std::vector<double> no_offset(x.size(), 0.0);
    const LineFit line = least_squares(x, y, no_offset);
    FitResult out;
    out.form = FitForm::reciprocal_linear;
    out.a = line.intercept;
    out.b = line.slope;
    out.r_squared = line.r_squared;
    // Relative threshold: a flat series leaves only rounding noise in b.
    out.decaying = out.b * *std::max_element(x.begin(), x.end()) > 1e-9 * std::fabs(out.a);
    out.used = x.size();
    out.dropped = dropped;
    return out;
}

}  // namespace awfisher

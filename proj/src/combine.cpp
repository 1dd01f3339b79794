#include "awfisher/combine.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "awfisher/error.hpp"
#include "awfisher/special.hpp"

namespace awfisher {

namespace {

// Order study indices by ascending p (descending -log p). Among equal p the
// higher index comes first, so a prefix of length j is the lexicographically
// smallest weight vector among the equal-level candidates with j ones.
std::vector<std::size_t> ascending_p_order(std::span<const double> neg_log_p) {
    std::vector<std::size_t> order(neg_log_p.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (neg_log_p[a] != neg_log_p[b]) return neg_log_p[a] > neg_log_p[b];
        return a > b;
    });
    return order;
}

void check_neg_log(std::span<const double> neg_log_p) {
    if (neg_log_p.empty()) throw DomainError("p-value vector must have at least one study");
    for (std::size_t i = 0; i < neg_log_p.size(); ++i) {
        if (!(neg_log_p[i] >= 0.0)) {
            throw DomainError("-log p at index " + std::to_string(i) + " must be >= 0");
        }
    }
}

}  // namespace

std::string_view to_string(Method m) noexcept {
    switch (m) {
        case Method::fisher: return "fisher";
        case Method::aw_fisher: return "aw_fisher";
        case Method::stouffer: return "stouffer";
        case Method::logit: return "logit";
        case Method::min_p: return "min_p";
        case Method::max_p: return "max_p";
    }
    return "unknown";
}

Method method_from_string(std::string_view name) {
    for (Method m : {Method::fisher, Method::aw_fisher, Method::stouffer, Method::logit, Method::min_p,
                     Method::max_p}) {
        if (to_string(m) == name) return m;
    }
    throw DomainError("unknown combination method '" + std::string(name) + "'");
}

double fisher_statistic(const PValueVector& p) {
    double sum = 0.0;
    for (double v : p.values()) sum += std::log(v);
    return -2.0 * sum;
}

AWResult aw_statistic_exhaustive(const PValueVector& p) {
    const std::size_t k = p.size();
    if (k > kMaxExhaustiveStudies) {
        throw DomainError("exhaustive AW search supports at most " + std::to_string(kMaxExhaustiveStudies) +
                          " studies; use the sorted search");
    }
    const std::vector<double> neg_log = p.neg_log();

    // Lexicographic rank of a mask: study 0 is the most significant bit.
    auto lex_key = [k](std::uint32_t mask) {
        std::uint32_t key = 0;
        for (std::size_t i = 0; i < k; ++i)
            if ((mask >> i) & 1u) key |= 1u << (k - 1 - i);
        return key;
    };

    std::uint32_t best_mask = 0;
    double best_level = 0.0;
    int best_count = 0;
    const std::uint32_t last = (std::uint32_t{1} << k) - 1;
    for (std::uint32_t mask = 1; mask <= last; ++mask) {
        double half_t = 0.0;
        for (std::size_t i = 0; i < k; ++i)
            if ((mask >> i) & 1u) half_t += neg_log[i];
        const int count = std::popcount(mask);
        const double level = chi2_even_log_sf(2.0 * half_t, count);
        bool better = best_mask == 0 || level < best_level;
        if (!better && level == best_level) {
            better = count < best_count || (count == best_count && lex_key(mask) < lex_key(best_mask));
        }
        if (better) {
            best_mask = mask;
            best_level = level;
            best_count = count;
        }
    }
    return AWResult{-best_level, WeightVector::from_mask(best_mask, k), best_level};
}

AWResult aw_statistic_sorted_neg_log(std::span<const double> neg_log_p) {
    check_neg_log(neg_log_p);
    const std::vector<std::size_t> order = ascending_p_order(neg_log_p);

    double half_t = 0.0;
    double best_level = 0.0;
    std::size_t best_count = 0;
    for (std::size_t j = 0; j < order.size(); ++j) {
        half_t += neg_log_p[order[j]];
        const double level = chi2_even_log_sf(2.0 * half_t, static_cast<int>(j + 1));
        if (j == 0 || level < best_level) {
            best_level = level;
            best_count = j + 1;
        }
    }

    std::vector<std::uint8_t> bits(neg_log_p.size(), 0);
    for (std::size_t j = 0; j < best_count; ++j) bits[order[j]] = 1;
    return AWResult{-best_level, WeightVector(std::move(bits)), best_level};
}

AWResult aw_statistic_sorted(const PValueVector& p) {
    const std::vector<double> neg_log = p.neg_log();
    return aw_statistic_sorted_neg_log(neg_log);
}

double aw_statistic_value(std::span<const double> neg_log_p, std::span<double> scratch) {
    const std::size_t k = neg_log_p.size();
    std::copy(neg_log_p.begin(), neg_log_p.end(), scratch.begin());
    const auto sorted = scratch.first(k);
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double half_t = 0.0;
    double best_level = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        half_t += sorted[j];
        const double level = chi2_even_log_sf(2.0 * half_t, static_cast<int>(j + 1));
        if (j == 0 || level < best_level) best_level = level;
    }
    return -best_level;
}

CombinedResult comparator_combine(const PValueVector& p, Method method) {
    const auto values = p.values();
    const double k = static_cast<double>(values.size());
    CombinedResult out;
    out.method = method;
    switch (method) {
        case Method::fisher: {
            out.statistic = fisher_statistic(p);
            out.log_p = chi2_even_log_sf(out.statistic, static_cast<int>(values.size()));
            break;
        }
        case Method::aw_fisher: {
            out.statistic = aw_statistic_sorted(p).statistic;
            break;
        }
        case Method::stouffer: {
            double z_sum = 0.0;
            for (double v : values) z_sum += normal_upper_quantile(v);
            out.statistic = z_sum / std::sqrt(k);
            out.log_p = log_normal_sf(out.statistic);
            break;
        }
        case Method::logit: {
            // G = -sum log(p/(1-p)), scaled to a t with 5K+4 df.
            double g = 0.0;
            for (double v : values) g -= std::log(v) - std::log1p(-v);
            out.statistic = g;
            const double scale = std::sqrt(3.0 * (5.0 * k + 4.0) / (std::numbers::pi * std::numbers::pi * k * (5.0 * k + 2.0)));
            out.log_p = log_student_t_sf(g * scale, 5.0 * k + 4.0);
            break;
        }
        case Method::min_p: {
            const double smallest = *std::min_element(values.begin(), values.end());
            out.statistic = smallest;
            // 1 - (1 - p_min)^K
            out.log_p = std::log(-std::expm1(k * std::log1p(-smallest)));
            break;
        }
        case Method::max_p: {
            const double largest = *std::max_element(values.begin(), values.end());
            out.statistic = largest;
            out.log_p = k * std::log(largest);
            break;
        }
    }
    if (out.log_p && *out.log_p > 0.0) out.log_p = 0.0;
    return out;
}

}  // namespace awfisher

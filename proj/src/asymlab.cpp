#include "awfisher/asymlab.hpp"

#include <cmath>
#include <random>
#include <string>

#include "awfisher/combine.hpp"
#include "awfisher/error.hpp"
#include "awfisher/special.hpp"

namespace awfisher {

namespace {

constexpr std::uint64_t kRateStream = 0x5241544500000000ULL;   // "RATE"
constexpr std::uint64_t kSlopeStream = 0x534c4f5000000000ULL;  // "SLOP"

// Replicates per parallel work item. Seeding is per replicate, so this only
// affects scheduling granularity.
constexpr std::uint64_t kRepBlock = 2048;

void check_configs(std::span<const StudyConfig> configs) {
    if (configs.empty()) throw DomainError("at least one study config is required");
    for (std::size_t i = 0; i < configs.size(); ++i) {
        if (!(configs[i].lambda > 0.0) || !std::isfinite(configs[i].lambda)) {
            throw DomainError("study " + std::to_string(i + 1) + ": lambda must be positive");
        }
        if (!std::isfinite(configs[i].effect)) throw DomainError("study " + std::to_string(i + 1) + ": effect must be finite");
    }
}

}  // namespace

std::string_view to_string(ErrorKind k) noexcept {
    return k == ErrorKind::miss ? "miss" : "false_inclusion";
}

double RatePoint::standard_error() const noexcept {
    if (reps == 0) return 0.0;
    return std::sqrt(estimate * (1.0 - estimate) / static_cast<double>(reps));
}

std::string_view to_string(SlopeMethod m) noexcept {
    switch (m) {
        case SlopeMethod::single_study: return "single_study";
        case SlopeMethod::fisher: return "fisher";
        case SlopeMethod::aw_fisher: return "aw_fisher";
    }
    return "unknown";
}

SlopeMethod slope_method_from_string(std::string_view name) {
    for (SlopeMethod m : {SlopeMethod::single_study, SlopeMethod::fisher, SlopeMethod::aw_fisher})
        if (to_string(m) == name) return m;
    throw DomainError("unknown slope method '" + std::string(name) + "'");
}

std::uint64_t study_sample_size(std::uint64_t n, double lambda) {
    if (!(lambda > 0.0)) throw DomainError("lambda must be positive");
    auto size = static_cast<std::uint64_t>(std::llround(lambda * static_cast<double>(n)));
    if (size % 2 == 1) ++size;
    return std::max<std::uint64_t>(size, 2);
}

double simulate_study_log_pvalue(std::uint64_t n, double mu, SplitMix64& rng) {
    if (n < 2 || n % 2 != 0) throw DomainError("study sample size must be even and >= 2, got " + std::to_string(n));
    const double sd = 2.0 / std::sqrt(static_cast<double>(n));
    std::normal_distribution<double> noise(0.0, 1.0);
    const double delta = mu + sd * noise(rng);
    return log_two_sided_p(delta / sd);
}

double simulate_study_pvalue(std::uint64_t n, double mu, SplitMix64& rng) {
    return std::exp(simulate_study_log_pvalue(n, mu, rng));
}

std::vector<RatePoint> estimate_weight_error_rates(std::span<const StudyConfig> configs,
                                                   std::span<const std::uint64_t> n_grid, std::uint64_t reps,
                                                   std::uint64_t seed, unsigned threads) {
    check_configs(configs);
    if (n_grid.empty()) throw DomainError("sample-size grid is empty");
    if (reps < 1) throw DomainError("reps must be >= 1");
    const std::size_t k = configs.size();

    std::vector<RatePoint> out;
    out.reserve(n_grid.size() * k);
    for (const std::uint64_t n : n_grid) {
        if (n < 1) throw DomainError("grid sample sizes must be positive");
        std::vector<std::uint64_t> sizes(k);
        for (std::size_t s = 0; s < k; ++s) sizes[s] = study_sample_size(n, configs[s].lambda);

        const std::uint64_t blocks = (reps + kRepBlock - 1) / kRepBlock;
        // Per-block integer tallies; the final sum is order-independent.
        std::vector<std::vector<std::uint64_t>> weight_one(blocks, std::vector<std::uint64_t>(k, 0));
        parallel_for(blocks, threads, [&](std::size_t block) {
            std::vector<double> neg_log(k);
            auto& tally = weight_one[block];
            const std::uint64_t begin = block * kRepBlock;
            const std::uint64_t end = std::min(reps, begin + kRepBlock);
            for (std::uint64_t r = begin; r < end; ++r) {
                SplitMix64 rng(substream_seed(seed, kRateStream + n, r));
                for (std::size_t s = 0; s < k; ++s)
                    neg_log[s] = -simulate_study_log_pvalue(sizes[s], configs[s].effect, rng);
                const AWResult aw = aw_statistic_sorted_neg_log(neg_log);
                for (std::size_t s = 0; s < k; ++s)
                    if (aw.weights[s]) ++tally[s];
            }
        });

        for (std::size_t s = 0; s < k; ++s) {
            std::uint64_t ones = 0;
            for (const auto& tally : weight_one) ones += tally[s];
            RatePoint pt;
            pt.n = n;
            pt.study = s;
            pt.reps = reps;
            if (configs[s].effect != 0.0) {
                pt.kind = ErrorKind::miss;
                pt.errors = reps - ones;
            } else {
                pt.kind = ErrorKind::false_inclusion;
                pt.errors = ones;
            }
            pt.estimate = static_cast<double>(pt.errors) / static_cast<double>(reps);
            out.push_back(pt);
        }
    }
    return out;
}

SlopeEstimate estimate_exact_slope(SlopeMethod method, std::span<const StudyConfig> configs, std::uint64_t n,
                                   std::uint64_t reps, std::uint64_t seed, const NullTable* table, unsigned threads) {
    check_configs(configs);
    if (n < 2 || n % 2 != 0) throw DomainError("slope sample size must be even and >= 2");
    if (reps < 1) throw DomainError("reps must be >= 1");
    const std::span<const StudyConfig> studies = method == SlopeMethod::single_study ? configs.first(1) : configs;
    const std::size_t k = studies.size();
    if (method == SlopeMethod::aw_fisher) {
        if (table == nullptr) throw DomainError("aw_fisher slope estimation requires a null table");
        if (table->k != k) {
            throw DomainError("null table has k=" + std::to_string(table->k) + " but " + std::to_string(k) +
                              " studies were configured");
        }
    }

    std::vector<std::uint64_t> sizes(k);
    for (std::size_t s = 0; s < k; ++s) sizes[s] = study_sample_size(n, studies[s].lambda);

    const double scale = 2.0 / static_cast<double>(n);
    std::vector<double> values(reps);
    std::vector<std::uint8_t> fallback(reps, 0);
    const std::uint64_t blocks = (reps + kRepBlock - 1) / kRepBlock;
    parallel_for(blocks, threads, [&](std::size_t block) {
        std::vector<double> neg_log(k);
        const std::uint64_t begin = block * kRepBlock;
        const std::uint64_t end = std::min(reps, begin + kRepBlock);
        for (std::uint64_t r = begin; r < end; ++r) {
            // The stream ignores the method so all methods see the same data.
            SplitMix64 rng(substream_seed(seed, kSlopeStream + n, r));
            for (std::size_t s = 0; s < k; ++s) neg_log[s] = -simulate_study_log_pvalue(sizes[s], studies[s].effect, rng);

            double log_p = 0.0;
            switch (method) {
                case SlopeMethod::single_study: log_p = -neg_log[0]; break;
                case SlopeMethod::fisher: {
                    double half_t = 0.0;
                    for (double v : neg_log) half_t += v;
                    log_p = chi2_even_log_sf(2.0 * half_t, static_cast<int>(k));
                    break;
                }
                case SlopeMethod::aw_fisher: {
                    const AWResult aw = aw_statistic_sorted_neg_log(neg_log);
                    const std::uint64_t hits = count_at_least(aw.statistic, *table);
                    if (hits >= kMinResolvableCount) {
                        log_p = std::log(p_value(aw.statistic, *table));
                    } else {
                        log_p = bonferroni_bounds(aw.log_level, static_cast<std::uint32_t>(k)).log_upper;
                        fallback[r] = 1;
                    }
                    break;
                }
            }
            values[r] = -scale * log_p;
        }
    });

    // Sequential reduction keeps the result independent of the worker count.
    double sum = 0.0;
    std::uint64_t fallbacks = 0;
    for (std::uint64_t r = 0; r < reps; ++r) {
        sum += values[r];
        fallbacks += fallback[r];
    }
    const double mean = sum / static_cast<double>(reps);
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);

    SlopeEstimate out;
    out.method = method;
    out.n = n;
    out.reps = reps;
    out.estimate = mean;
    out.standard_error = reps > 1 ? std::sqrt(ss / static_cast<double>(reps - 1) / static_cast<double>(reps)) : 0.0;
    out.bound_fallbacks = fallbacks;
    return out;
}

}  // namespace awfisher

#include "awfisher/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>

#include "awfisher/error.hpp"
#include "awfisher/rng.hpp"

namespace awfisher {

namespace {

constexpr const char* kResultHeader =
    "feature_id,statistic,weights,p_mc,p_lower,p_upper,q_value,significant,category,bounds";

// Three Monte Carlo standard errors around a bound, with the standard error
// floored at the add-one estimator's resolution.
bool within_bounds(double p_mc, double lower, double upper, double draws) {
    auto slack = [draws](double b) {
        const double q = std::max(b, 1.0 / (draws + 1.0));
        return 3.0 * std::sqrt(q * (1.0 - std::min(q, 1.0)) / draws);
    };
    return p_mc >= lower - slack(lower) && p_mc <= upper + slack(upper);
}

}  // namespace

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::vector<double> bh_adjust(std::span<const double> p) {
    const std::size_t m = p.size();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });

    std::vector<double> q(m);
    double running = 1.0;
    for (std::size_t rank = m; rank >= 1; --rank) {
        const std::size_t i = order[rank - 1];
        running = std::min(running, p[i] * (static_cast<double>(m) / static_cast<double>(rank)));
        q[i] = running;
    }
    return q;
}

std::vector<FeatureResult> analyze(const FeatureMatrix& matrix, const AnalyzeOptions& options,
                                   const NullTable* table) {
    const std::size_t k = matrix.studies();
    const bool adaptive = options.method == Method::aw_fisher;
    if (adaptive) {
        if (table == nullptr) throw DomainError("aw_fisher analysis requires a null table");
        if (table->k != k) {
            throw ValidationError("null table was built for k=" + std::to_string(table->k) + " but the matrix has " +
                                  std::to_string(k) + " studies");
        }
    }
    if (!(options.fdr > 0.0 && options.fdr <= 1.0)) throw DomainError("fdr level must lie in (0, 1]");

    std::vector<FeatureResult> results(matrix.features());
    constexpr std::size_t kChunk = 1024;
    const std::size_t chunks = (matrix.features() + kChunk - 1) / kChunk;
    parallel_for(chunks, options.threads, [&](std::size_t chunk) {
        const std::size_t end = std::min(matrix.features(), (chunk + 1) * kChunk);
        for (std::size_t i = chunk * kChunk; i < end; ++i) {
            const PValueVector p(std::vector<double>(matrix.row(i), matrix.row(i) + k));
            FeatureResult& r = results[i];
            r.feature_id = matrix.feature_ids[i];
            if (adaptive) {
                const AWResult aw = aw_statistic_sorted(p);
                const BoundPair bounds = bonferroni_bounds(aw.log_level, static_cast<std::uint32_t>(k));
                r.statistic = aw.statistic;
                r.weights = aw.weights.to_string();
                r.p_mc = p_value(aw.statistic, *table);
                r.p_lower = bounds.lower;
                r.p_upper = bounds.upper;
                r.bounds_ok = within_bounds(r.p_mc, r.p_lower, r.p_upper, static_cast<double>(table->draws));
            } else {
                const CombinedResult c = comparator_combine(p, options.method);
                r.statistic = c.statistic;
                r.p_mc = std::exp(*c.log_p);
                r.p_lower = r.p_mc;
                r.p_upper = r.p_mc;
            }
        }
    });

    std::vector<double> p_column(results.size());
    std::transform(results.begin(), results.end(), p_column.begin(), [](const FeatureResult& r) { return r.p_mc; });
    const std::vector<double> q = bh_adjust(p_column);
    for (std::size_t i = 0; i < results.size(); ++i) {
        results[i].q_value = q[i];
        results[i].significant = q[i] <= options.fdr;
        if (results[i].significant) results[i].category = results[i].weights;
    }

    std::sort(results.begin(), results.end(), [](const FeatureResult& a, const FeatureResult& b) {
        if (a.p_mc != b.p_mc) return a.p_mc < b.p_mc;
        return a.feature_id < b.feature_id;
    });
    return results;
}

std::vector<CategoryCount> categorize(std::span<const FeatureResult> results) {
    std::map<std::string, std::size_t> counts;
    for (const auto& r : results)
        if (r.significant && !r.category.empty()) ++counts[r.category];
    std::vector<CategoryCount> out;
    out.reserve(counts.size());
    for (const auto& [category, count] : counts) out.push_back({category, count});
    std::stable_sort(out.begin(), out.end(), [](const CategoryCount& a, const CategoryCount& b) { return a.count > b.count; });
    return out;
}

void write_results(std::ostream& out, std::span<const FeatureResult> results) {
    out << kResultHeader << '\n';
    for (const auto& r : results) {
        out << csv_field(r.feature_id) << ',' << format_double(r.statistic) << ',' << r.weights << ','
            << format_double(r.p_mc) << ',' << format_double(r.p_lower) << ',' << format_double(r.p_upper) << ','
            << format_double(r.q_value) << ',' << (r.significant ? 1 : 0) << ',' << r.category << ','
            << (r.bounds_ok ? "ok" : "violated") << '\n';
    }
}

std::vector<FeatureResult> read_results(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kResultHeader) throw ValidationError("result CSV: unexpected header");
    std::vector<FeatureResult> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 10) throw ValidationError("result CSV: expected 10 fields");
        FeatureResult r;
        r.feature_id = f[0];
        r.statistic = parse_double(f[1]);
        r.weights = f[2];
        r.p_mc = parse_double(f[3]);
        r.p_lower = parse_double(f[4]);
        r.p_upper = parse_double(f[5]);
        r.q_value = parse_double(f[6]);
        r.significant = f[7] == "1";
        r.category = f[8];
        r.bounds_ok = f[9] == "ok";
        out.push_back(std::move(r));
    }
    return out;
}

void write_categories(std::ostream& out, std::span<const CategoryCount> categories) {
    out << "category,count\n";
    for (const auto& c : categories) out << c.category << ',' << c.count << '\n';
}

}  // namespace awfisher

#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "awfisher/combine.hpp"
#include "awfisher/matrix_io.hpp"
#include "awfisher/nulltable.hpp"

namespace awfisher {

struct FeatureResult {
    std::string feature_id;
    double statistic = 0.0;
    std::string weights;  ///< bit-string, empty for non-AW methods
    double p_mc = 1.0;    ///< Monte Carlo p for aw_fisher, analytic p otherwise
    double p_lower = 1.0;
    double p_upper = 1.0;
    double q_value = 1.0;
    bool significant = false;
    std::string category;  ///< weight bit-string of a significant feature
    bool bounds_ok = true; ///< p_mc within 3 Monte Carlo SEs of [p_lower, p_upper]

    friend bool operator==(const FeatureResult&, const FeatureResult&) = default;
};

struct AnalyzeOptions {
    Method method = Method::aw_fisher;
    double fdr = 0.01;
    unsigned threads = 1;
};

/// Benjamini-Hochberg step-up adjusted p-values, in input order.
std::vector<double> bh_adjust(std::span<const double> p);

/// Per-feature combination, Monte Carlo p and bounds (aw_fisher), BH
/// q-values and significance at options.fdr. The returned rows are sorted by
/// p then feature id. `table` is required for aw_fisher and must match K.
std::vector<FeatureResult> analyze(const FeatureMatrix& matrix, const AnalyzeOptions& options,
                                   const NullTable* table);

struct CategoryCount {
    std::string category;
    std::size_t count = 0;
};

/// Significant features grouped by weight bit-string, by descending count
/// (ties by category string).
std::vector<CategoryCount> categorize(std::span<const FeatureResult> results);

void write_results(std::ostream& out, std::span<const FeatureResult> results);
std::vector<FeatureResult> read_results(std::istream& in);
void write_categories(std::ostream& out, std::span<const CategoryCount> categories);

/// Quotes a CSV field when it contains a comma, quote or newline.
std::string csv_field(const std::string& s);

}  // namespace awfisher

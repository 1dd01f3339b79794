#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace awfisher {

/// Feature x study p-value grid, row-major.
struct FeatureMatrix {
    std::vector<std::string> feature_ids;
    std::vector<std::string> study_names;
    std::vector<double> values;

    std::size_t features() const noexcept { return feature_ids.size(); }
    std::size_t studies() const noexcept { return study_names.size(); }
    const double* row(std::size_t i) const noexcept { return values.data() + i * studies(); }
};

enum class InvalidPolicy { error, drop };

struct LoadOptions {
    InvalidPolicy on_invalid = InvalidPolicy::error;
};

struct LoadReport {
    std::size_t dropped_rows = 0;
};

/// Parses `feature_id,<study>...` CSV. Under InvalidPolicy::error any bad cell
/// throws ValidationError naming its row and column; under drop, rows with
/// bad p-values are removed and counted. Structural errors (ragged rows,
/// duplicate ids, bad header) always throw.
FeatureMatrix read_matrix(std::istream& in, const LoadOptions& options = {}, LoadReport* report = nullptr);
FeatureMatrix load_matrix(const std::filesystem::path& path, const LoadOptions& options = {},
                          LoadReport* report = nullptr);

/// Splits one CSV record. Supports double-quoted fields with "" escapes.
std::vector<std::string> split_csv_line(const std::string& line);

/// Shortest round-trip decimal representation.
std::string format_double(double v);
/// Parses a full string as a double; throws ValidationError otherwise.
double parse_double(const std::string& text);

}  // namespace awfisher

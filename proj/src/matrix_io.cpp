#include "awfisher/matrix_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <unordered_set>

#include "awfisher/error.hpp"

namespace awfisher {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

}  // namespace

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(trim(field));
            field.clear();
        } else {
            field.push_back(c);
        }
    }
    if (quoted) throw ValidationError("unterminated quoted field");
    fields.push_back(trim(field));
    return fields;
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& text) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    if (first != last && *first == '+') ++first;
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last || first == last) {
        throw ValidationError("'" + text + "' is not a number");
    }
    return v;
}

FeatureMatrix read_matrix(std::istream& in, const LoadOptions& options, LoadReport* report) {
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("input matrix is empty");
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);

    FeatureMatrix m;
    const auto header = split_csv_line(line);
    if (header.empty() || header[0] != "feature_id") {
        throw ValidationError("header must start with 'feature_id'");
    }
    if (header.size() < 2) throw ValidationError("header names no studies");
    m.study_names.assign(header.begin() + 1, header.end());
    const std::size_t k = m.study_names.size();

    std::unordered_set<std::string> seen;
    std::size_t line_no = 1;
    std::size_t dropped = 0;
    std::vector<double> row(k);
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != k + 1) {
            throw ValidationError("line " + std::to_string(line_no) + ": expected " + std::to_string(k + 1) +
                                  " fields, got " + std::to_string(fields.size()));
        }
        const std::string& id = fields[0];
        if (id.empty()) throw ValidationError("line " + std::to_string(line_no) + ": empty feature_id");

        bool valid = true;
        for (std::size_t j = 0; j < k && valid; ++j) {
            const std::string where = "line " + std::to_string(line_no) + ", column '" + m.study_names[j] + "'";
            double p = 0.0;
            try {
                p = parse_double(fields[j + 1]);
            } catch (const ValidationError&) {
                if (options.on_invalid == InvalidPolicy::error) {
                    throw ValidationError(where + ": '" + fields[j + 1] + "' is not a p-value");
                }
                valid = false;
                break;
            }
            if (!(p > 0.0 && p <= 1.0)) {
                if (options.on_invalid == InvalidPolicy::error) {
                    throw ValidationError(where + ": p-value " + fields[j + 1] + " must lie in (0, 1]");
                }
                valid = false;
                break;
            }
            row[j] = p;
        }
        if (!valid) {
            ++dropped;
            continue;
        }
        if (!seen.insert(id).second) {
            throw ValidationError("line " + std::to_string(line_no) + ": duplicate feature_id '" + id + "'");
        }
        m.feature_ids.push_back(id);
        m.values.insert(m.values.end(), row.begin(), row.end());
    }
    if (report) report->dropped_rows = dropped;
    return m;
}

FeatureMatrix load_matrix(const std::filesystem::path& path, const LoadOptions& options, LoadReport* report) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open input matrix '" + path.string() + "'");
    return read_matrix(in, options, report);
}

}  // namespace awfisher

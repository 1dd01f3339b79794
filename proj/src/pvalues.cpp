#include "awfisher/pvalues.hpp"

#include <algorithm>
#include <cmath>

#include "awfisher/error.hpp"

namespace awfisher {

PValueVector::PValueVector(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw DomainError("p-value vector must have at least one study");
    for (std::size_t i = 0; i < values_.size(); ++i) {
        const double p = values_[i];
        if (!(p > 0.0 && p <= 1.0)) {
            throw DomainError("p-value at index " + std::to_string(i) + " is " + std::to_string(p) +
                              "; must lie in (0, 1]");
        }
    }
}

std::vector<double> PValueVector::neg_log() const {
    std::vector<double> out(values_.size());
    std::transform(values_.begin(), values_.end(), out.begin(), [](double p) { return -std::log(p); });
    return out;
}

WeightVector::WeightVector(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
    for (auto& b : bits_) b = b ? 1 : 0;
}

WeightVector WeightVector::from_mask(std::uint32_t mask, std::size_t k) {
    std::vector<std::uint8_t> bits(k);
    for (std::size_t i = 0; i < k; ++i) bits[i] = (mask >> i) & 1u;
    return WeightVector(std::move(bits));
}

WeightVector WeightVector::from_string(const std::string& text) {
    std::vector<std::uint8_t> bits;
    bits.reserve(text.size());
    for (char c : text) {
        if (c != '0' && c != '1') throw ValidationError("weight string '" + text + "' must contain only 0/1");
        bits.push_back(c == '1');
    }
    return WeightVector(std::move(bits));
}

std::size_t WeightVector::count() const noexcept {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

std::string WeightVector::to_string() const {
    std::string s(bits_.size(), '0');
    for (std::size_t i = 0; i < bits_.size(); ++i)
        if (bits_[i]) s[i] = '1';
    return s;
}

}  // namespace awfisher

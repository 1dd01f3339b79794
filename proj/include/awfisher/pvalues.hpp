#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace awfisher {

/// Per-feature p-values across K studies. Every entry lies in (0, 1].
class PValueVector {
public:
    /// Throws DomainError naming the first offending index.
    explicit PValueVector(std::vector<double> values);

    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const noexcept { return values_[i]; }
    std::span<const double> values() const noexcept { return values_; }

    /// -log(p_k) for every study, each >= 0.
    std::vector<double> neg_log() const;

private:
    std::vector<double> values_;
};

/// Binary study weights. Never all-zero when produced by the AW search.
class WeightVector {
public:
    WeightVector() = default;
    explicit WeightVector(std::vector<std::uint8_t> bits);

    static WeightVector from_mask(std::uint32_t mask, std::size_t k);
    static WeightVector from_string(const std::string& bits);

    std::size_t size() const noexcept { return bits_.size(); }
    bool operator[](std::size_t i) const noexcept { return bits_[i] != 0; }
    std::size_t count() const noexcept;
    std::span<const std::uint8_t> bits() const noexcept { return bits_; }

    /// "101" style rendering, study 1 first.
    std::string to_string() const;

    friend bool operator==(const WeightVector&, const WeightVector&) = default;
    /// Lexicographic order over the bit sequence, 0 < 1.
    friend auto operator<=>(const WeightVector&, const WeightVector&) = default;

private:
    std::vector<std::uint8_t> bits_;
};

}  // namespace awfisher

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "awfisher/asymlab.hpp"
#include "awfisher/error.hpp"
#include "awfisher/special.hpp"
#include "ks.hpp"

using namespace awfisher;

TEST(StudySampleSize, RoundsToEven) {
    EXPECT_EQ(study_sample_size(200, 1.0), 200u);
    EXPECT_EQ(study_sample_size(200, 0.5), 100u);
    EXPECT_EQ(study_sample_size(201, 1.0), 202u);
    EXPECT_EQ(study_sample_size(10, 0.01), 2u);
    EXPECT_THROW(study_sample_size(10, 0.0), DomainError);
}

TEST(SimulateStudy, NullPValuesAreUniform) {
    const std::size_t reps = 100000;
    std::vector<double> p(reps);
    for (std::size_t r = 0; r < reps; ++r) {
        SplitMix64 rng(substream_seed(5, 0, r));
        p[r] = simulate_study_pvalue(200, 0.0, rng);
    }
    EXPECT_LT(ks_uniform_distance(p), 1.63 / std::sqrt(static_cast<double>(reps)));
}

TEST(SimulateStudy, ZeroDifferenceGivesOne) {
    EXPECT_EQ(std::exp(log_two_sided_p(0.0)), 1.0);
}

TEST(SimulateStudy, RejectsOddOrTinyN) {
    SplitMix64 rng(1);
    EXPECT_THROW(simulate_study_pvalue(201, 0.1, rng), DomainError);
    EXPECT_THROW(simulate_study_pvalue(0, 0.1, rng), DomainError);
    EXPECT_NO_THROW(simulate_study_pvalue(2, 0.1, rng));
}

TEST(SimulateStudy, LogFormSurvivesStrongSignals) {
    SplitMix64 rng(2);
    const double lp = simulate_study_log_pvalue(1000000, 0.5, rng);
    EXPECT_TRUE(std::isfinite(lp));
    EXPECT_LT(lp, -30000.0);
}

TEST(ExactSlope, SingleStudyMatchesZTestSlope) {
    const std::vector<StudyConfig> one{{0.5, 1.0}};
    const SlopeEstimate est = estimate_exact_slope(SlopeMethod::single_study, one, 10000, 10000, 3);
    EXPECT_NEAR(est.estimate, 0.0625, 0.05 * 0.0625);
    const std::vector<StudyConfig> null{{0.0, 1.0}};
    EXPECT_LT(estimate_exact_slope(SlopeMethod::single_study, null, 10000, 10000, 3).estimate, 0.005);
}

TEST(ExactSlope, FisherSlopeIsSumOfStudySlopes) {
    const std::vector<StudyConfig> three(3, StudyConfig{0.5, 1.0});
    const SlopeEstimate est = estimate_exact_slope(SlopeMethod::fisher, three, 10000, 5000, 4);
    EXPECT_NEAR(est.estimate, 0.1875, 0.05 * 0.1875);
}

TEST(ExactSlope, AdditivityTightensWithN) {
    // Fisher slope minus the sum of single-study slopes carries an O(log n / n)
    // bias; at n = 10^6 it is under 1% of the slope.
    const std::vector<StudyConfig> studies{{0.3, 1.0}, {0.5, 1.0}, {0.4, 0.5}};
    const std::uint64_t n = 1000000;
    const double fisher = estimate_exact_slope(SlopeMethod::fisher, studies, n, 2000, 10).estimate;
    double singles = 0.0;
    for (std::size_t s = 0; s < studies.size(); ++s)
        singles += estimate_exact_slope(SlopeMethod::single_study, std::span(studies).subspan(s, 1), n, 2000, 20 + s).estimate;
    EXPECT_NEAR(fisher, singles, 0.01 * singles);
    EXPECT_NEAR(singles, 0.3 * 0.3 / 4 + 0.5 * 0.5 / 4 + 0.5 * 0.4 * 0.4 / 4, 0.01 * singles);
}

TEST(ExactSlope, AwMatchesFisher) {
    const std::vector<StudyConfig> three(3, StudyConfig{0.5, 1.0});
    const NullTable table = build_null_table(3, 100000, 1);
    const SlopeEstimate aw = estimate_exact_slope(SlopeMethod::aw_fisher, three, 10000, 2000, 4, &table);
    const SlopeEstimate fisher = estimate_exact_slope(SlopeMethod::fisher, three, 10000, 2000, 4);
    EXPECT_NEAR(aw.estimate, fisher.estimate, 0.05 * fisher.estimate);
    EXPECT_EQ(aw.bound_fallbacks, 2000u);
}

TEST(ExactSlope, AwUsesTableForWeakSignals) {
    const std::vector<StudyConfig> weak(2, StudyConfig{0.0, 1.0});
    const NullTable table = build_null_table(2, 100000, 1);
    const SlopeEstimate aw = estimate_exact_slope(SlopeMethod::aw_fisher, weak, 100, 2000, 4, &table);
    EXPECT_LT(aw.bound_fallbacks, 10u);
    EXPECT_GT(aw.estimate, 0.0);
}

TEST(ExactSlope, AwRequiresMatchingTable) {
    const std::vector<StudyConfig> three(3, StudyConfig{0.5, 1.0});
    EXPECT_THROW(estimate_exact_slope(SlopeMethod::aw_fisher, three, 100, 10, 1, nullptr), DomainError);
    const NullTable wrong = build_null_table(2, 100, 1);
    EXPECT_THROW(estimate_exact_slope(SlopeMethod::aw_fisher, three, 100, 10, 1, &wrong), DomainError);
    EXPECT_THROW(estimate_exact_slope(SlopeMethod::fisher, three, 101, 10, 1), DomainError);
}

TEST(ExactSlope, IndependentOfThreadCount) {
    const std::vector<StudyConfig> two{{0.2, 1.0}, {0.4, 2.0}};
    const auto a = estimate_exact_slope(SlopeMethod::fisher, two, 1000, 5000, 8, nullptr, 1);
    const auto b = estimate_exact_slope(SlopeMethod::fisher, two, 1000, 5000, 8, nullptr, 3);
    EXPECT_EQ(a.estimate, b.estimate);
    EXPECT_EQ(a.standard_error, b.standard_error);
}

TEST(WeightErrorRates, SingleNullStudyAlwaysIncluded) {
    const std::vector<StudyConfig> one{{0.0, 1.0}};
    const std::vector<std::uint64_t> grid{100, 200};
    const auto pts = estimate_weight_error_rates(one, grid, 500, 1);
    ASSERT_EQ(pts.size(), 2u);
    for (const auto& p : pts) {
        EXPECT_EQ(p.kind, ErrorKind::false_inclusion);
        EXPECT_EQ(p.estimate, 1.0);
    }
}

TEST(WeightErrorRates, AllNullReportsOnlyFalseInclusion) {
    const std::vector<StudyConfig> null(3, StudyConfig{0.0, 1.0});
    const std::vector<std::uint64_t> grid{200};
    const auto pts = estimate_weight_error_rates(null, grid, 5000, 2);
    ASSERT_EQ(pts.size(), 3u);
    for (const auto& p : pts) {
        EXPECT_EQ(p.kind, ErrorKind::false_inclusion);
        EXPECT_GT(p.estimate, 0.0);
        EXPECT_LT(p.estimate, 1.0);
    }
}

TEST(WeightErrorRates, RejectsEmptyInputs) {
    const std::vector<StudyConfig> one{{0.1, 1.0}};
    EXPECT_THROW(estimate_weight_error_rates(one, {}, 10, 1), DomainError);
    const std::vector<std::uint64_t> grid{100};
    EXPECT_THROW(estimate_weight_error_rates({}, grid, 10, 1), DomainError);
    EXPECT_THROW(estimate_weight_error_rates(one, grid, 0, 1), DomainError);
}

TEST(WeightErrorRates, MissRatesDecreaseWithN) {
    const std::vector<StudyConfig> studies{{0.2, 1.0}, {0.3, 1.0}, {0.4, 1.0}, {0.5, 1.0}};
    const std::vector<std::uint64_t> grid{200, 400, 600};
    const auto pts = estimate_weight_error_rates(studies, grid, 20000, 9, 2);
    ASSERT_EQ(pts.size(), 12u);
    for (std::size_t s = 0; s < 4; ++s) {
        for (std::size_t g = 1; g < grid.size(); ++g) {
            const auto& prev = pts[(g - 1) * 4 + s];
            const auto& cur = pts[g * 4 + s];
            EXPECT_EQ(cur.kind, ErrorKind::miss);
            EXPECT_LE(cur.estimate, prev.estimate + 3 * std::hypot(cur.standard_error(), prev.standard_error()));
        }
    }
}

TEST(WeightErrorRates, MissesVanishFasterThanFalseInclusions) {
    const std::vector<StudyConfig> studies{{0.4, 1.0}, {0.4, 1.0}, {0.4, 1.0}, {0.0, 1.0}};
    const std::vector<std::uint64_t> grid{1000};
    const auto pts = estimate_weight_error_rates(studies, grid, 20000, 12, 2);
    EXPECT_LT(pts[0].estimate, pts[3].estimate);
    EXPECT_EQ(pts[3].kind, ErrorKind::false_inclusion);
}

TEST(WeightErrorRates, IndependentOfThreadCount) {
    const std::vector<StudyConfig> studies{{0.2, 1.0}, {0.0, 1.0}, {0.3, 0.5}};
    const std::vector<std::uint64_t> grid{100, 300};
    const auto a = estimate_weight_error_rates(studies, grid, 7000, 5, 1);
    const auto b = estimate_weight_error_rates(studies, grid, 7000, 5, 4);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].errors, b[i].errors);
}

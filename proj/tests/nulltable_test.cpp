#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <sstream>

#include "awfisher/combine.hpp"
#include "awfisher/error.hpp"
#include "awfisher/nulltable.hpp"

using namespace awfisher;

TEST(NullTable, SortedNonnegativeAndSized) {
    const NullTable t = build_null_table(3, 10000, 42);
    EXPECT_EQ(t.k, 3u);
    EXPECT_EQ(t.draws, 10000u);
    ASSERT_EQ(t.samples.size(), 10000u);
    EXPECT_TRUE(std::is_sorted(t.samples.begin(), t.samples.end()));
    EXPECT_GE(t.samples.front(), 0.0);
}

TEST(NullTable, DeterministicAcrossThreadCounts) {
    // Spans several blocks so the worker split matters.
    const NullTable one = build_null_table(3, 200000, 7, 1);
    const NullTable again = build_null_table(3, 200000, 7, 1);
    const NullTable four = build_null_table(3, 200000, 7, 4);
    EXPECT_EQ(one, again);
    EXPECT_EQ(one, four);
    EXPECT_NE(one.samples, build_null_table(3, 200000, 8, 1).samples);
}

TEST(NullTable, SingleStudyIsExponential) {
    // S = -log U for K = 1, so P(S >= s) = e^{-s}.
    const std::uint64_t n = 400000;
    const NullTable t = build_null_table(1, n, 3, 2);
    for (double s = 0.5; s <= 6.0; s += 0.5) {
        const double expected = std::exp(-s);
        const double observed = static_cast<double>(count_at_least(s, t)) / static_cast<double>(n);
        const double se = std::sqrt(expected * (1 - expected) / static_cast<double>(n));
        EXPECT_NEAR(observed, expected, 3.0 * se + 1e-12) << "s=" << s;
    }
}

TEST(NullTable, RejectsBadShape) {
    EXPECT_THROW(build_null_table(0, 10, 1), DomainError);
    EXPECT_THROW(build_null_table(2, 0, 1), DomainError);
}

TEST(PValue, EstimatorEnds) {
    const NullTable t = build_null_table(2, 5000, 1);
    EXPECT_DOUBLE_EQ(p_value(0.0, t), 1.0);
    EXPECT_DOUBLE_EQ(p_value(t.samples.back() + 1.0, t), 1.0 / 5001.0);
    EXPECT_DOUBLE_EQ(p_value(t.samples.back(), t), 2.0 / 5001.0);
}

TEST(PValue, NonincreasingInStatistic) {
    const NullTable t = build_null_table(4, 20000, 9);
    double prev = 1.0;
    for (double s = 0.0; s < 20.0; s += 0.05) {
        const double p = p_value(s, t);
        EXPECT_LE(p, prev);
        prev = p;
    }
}

TEST(PValue, SingleStudyAtThree) {
    const std::uint64_t n = 1000000;
    const NullTable t = build_null_table(1, n, 2024, 2);
    const double expected = std::exp(-3.0);
    const double se = std::sqrt(expected * (1 - expected) / static_cast<double>(n));
    EXPECT_NEAR(p_value(3.0, t), expected, 3.0 * se);
}

TEST(PValue, SandwichForTwoStudyExample) {
    const NullTable t = build_null_table(2, 1000000, 11, 2);
    const AWResult aw = aw_statistic_sorted(PValueVector({0.01, 0.5}));
    const BoundPair b = bonferroni_bounds(aw.log_level, 2);
    EXPECT_NEAR(b.lower, 0.01, 1e-15);
    EXPECT_NEAR(b.upper, 0.03, 1e-15);
    const double p = p_value(aw.statistic, t);
    const double se = std::sqrt(p * (1 - p) / 1e6);
    EXPECT_GE(p, b.lower - 3 * se);
    EXPECT_LE(p, b.upper + 3 * se);
}

TEST(Bonferroni, Examples) {
    const BoundPair a = bonferroni_bounds(std::log(0.01), 2);
    EXPECT_NEAR(a.lower, 0.01, 1e-16);
    EXPECT_NEAR(a.upper, 0.03, 1e-16);

    const BoundPair one = bonferroni_bounds(0.0, 7);
    EXPECT_EQ(one.lower, 1.0);
    EXPECT_EQ(one.upper, 1.0);

    const BoundPair tiny = bonferroni_bounds(std::log(1e-300), 10);
    EXPECT_NEAR(tiny.lower / 1e-300, 1.0, 1e-12);
    EXPECT_NEAR(tiny.upper / 1.023e-297, 1.0, 1e-12);
    EXPECT_NEAR(tiny.log_upper, -683.84503313226207872, 1e-10);
}

TEST(Bonferroni, LogFieldsSurviveUnderflow) {
    const BoundPair b = bonferroni_bounds(-5000.0, 3);
    EXPECT_EQ(b.lower, 0.0);
    EXPECT_NEAR(b.log_upper, -5000.0 + std::log(7.0), 1e-9);
    EXPECT_LE(b.lower, b.upper);
    EXPECT_THROW(bonferroni_bounds(0.1, 2), DomainError);
}

TEST(Persistence, RoundTripIsBitExact) {
    const NullTable t = build_null_table(3, 1234, 99);
    std::stringstream buf;
    write_null_table(buf, t);
    const std::string bytes = buf.str();
    ASSERT_EQ(bytes.size(), 32u + 8u * 1234u);
    EXPECT_EQ(bytes.substr(0, 8), "AWNULL01");
    EXPECT_EQ(static_cast<unsigned char>(bytes[8]), 3);
    EXPECT_EQ(static_cast<unsigned char>(bytes[16]), 1234 & 0xff);
    EXPECT_EQ(static_cast<unsigned char>(bytes[17]), 1234 >> 8);
    EXPECT_EQ(static_cast<unsigned char>(bytes[24]), 99);

    std::stringstream in(bytes);
    EXPECT_EQ(read_null_table(in), t);
}

TEST(Persistence, RejectsCorruptFiles) {
    const NullTable t = build_null_table(2, 100, 1);
    std::stringstream buf;
    write_null_table(buf, t);
    std::string bytes = buf.str();

    std::string bad_magic = bytes;
    bad_magic[0] = 'X';
    std::stringstream a(bad_magic);
    EXPECT_THROW(read_null_table(a), ValidationError);

    std::stringstream b(bytes.substr(0, bytes.size() - 4));
    EXPECT_THROW(read_null_table(b), ValidationError);

    std::stringstream c(bytes.substr(0, 20));
    EXPECT_THROW(read_null_table(c), ValidationError);

    EXPECT_THROW(load_null_table("/nonexistent/table.awnull"), ValidationError);
}

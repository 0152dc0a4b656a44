#include <gtest/gtest.h>

#include <cmath>

#include "gbid/decision.hpp"
#include "gbid/error.hpp"

using namespace gbid;

namespace {

ParetoArchive archive_of(const std::vector<std::array<double, 3>>& points) {
    ParetoArchive a;
    for (std::size_t i = 0; i < points.size(); ++i) {
        Genome g(8);
        for (std::size_t j = 0; j < 8; ++j) g.set(j, (i >> j) & 1U);
        a.entries.push_back({g, {points[i][0], points[i][1], points[i][2]}, 0});
    }
    return a;
}

void expect_weights(std::vector<int> rankings, std::array<double, 3> expected) {
    const auto w = priority_weights({rankings, 5.0});
    ASSERT_EQ(w.w.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(w.w[i], expected[i], 1e-4) << i;
}

}  // namespace

TEST(PriorityWeights, TableRows) {
    expect_weights({3, 1, 2}, {0.1214, 0.6071, 0.2715});
    expect_weights({1, 3, 2}, {0.6071, 0.1214, 0.2715});
    expect_weights({1, 2, 3}, {0.6071, 0.2715, 0.1214});
}

TEST(PriorityWeights, UnitIntensityIsUniform) {
    const auto w = priority_weights({{2, 3, 1}, 1.0});
    for (double x : w.w) EXPECT_NEAR(x, 1.0 / 3.0, 1e-15);
}

TEST(PriorityWeights, SumToOneAndReciprocal) {
    const auto a = priority_weights({{3, 1, 2}, 7.0});
    double sum = 0;
    for (double x : a.w) sum += x;
    EXPECT_NEAR(sum, 1.0, 1e-15);
    const auto tau = preference_relations({{3, 1, 2}, 7.0});
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(tau[i][j] * tau[j][i], 1.0, 1e-12);
}

TEST(PreferenceRelations, WorkedExampleEntries) {
    const auto tau = preference_relations({{3, 1, 2}, 5.0});
    EXPECT_NEAR(tau[0][0], 1.0, 1e-12);
    EXPECT_NEAR(tau[0][1], 1.0 / 5.0, 1e-12);
    EXPECT_NEAR(tau[0][2], 1.0 / std::sqrt(5.0), 1e-12);
    EXPECT_NEAR(tau[1][0], 5.0, 1e-12);
    EXPECT_NEAR(tau[1][2], std::sqrt(5.0), 1e-12);
    EXPECT_NEAR(tau[2][0], std::sqrt(5.0), 1e-12);
}

TEST(PreferenceSpec, Validation) {
    EXPECT_THROW(PreferenceSpec({1, 1, 2}, 5.0).validate(), Error);
    EXPECT_THROW(PreferenceSpec({1, 2, 4}, 5.0).validate(), Error);
    EXPECT_THROW(PreferenceSpec({1, 2, 3}, 0.5).validate(), Error);
    EXPECT_THROW(PreferenceSpec({1}, 5.0).validate(), Error);
    EXPECT_NO_THROW(PreferenceSpec({2, 1}, 9.0).validate());
}

TEST(Mmd, HandExample) {
    const auto a = archive_of({{1, 0, 0}, {0, 1, 0}, {0.4, 0.4, 0}});
    const auto s = mmd_select(a);
    EXPECT_EQ(s.selected, 2u);
    EXPECT_NEAR(s.ranking[0].score, 0.8, 1e-12);
    EXPECT_NEAR(s.ranking[1].score, 1.0, 1e-12);
    EXPECT_EQ(s.ranking.size(), 3u);
}

TEST(Mmd, SingletonAndEmpty) {
    const auto s = mmd_select(archive_of({{3, 0.1, 0.2}}));
    EXPECT_EQ(s.selected, 0u);
    EXPECT_DOUBLE_EQ(s.ranking[0].score, 0.0);
    try {
        (void)mmd_select(ParetoArchive{});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::ArchiveTooSmall);
    }
}

TEST(Mmd, AffineRescalingInvariance) {
    const std::vector<std::array<double, 3>> pts = {{3, 0.2, 5}, {5, 0.1, 2}, {8, 0.05, 1}, {2, 0.4, 9}};
    auto scaled = pts;
    for (auto& p : scaled) p[1] = 1000.0 * p[1] + 7.0;
    EXPECT_EQ(mmd_select(archive_of(pts)).selected, mmd_select(archive_of(scaled)).selected);
}

TEST(Mtd, DominantPairExample) {
    const auto s = mtd_select(archive_of({{5, 0.5, 0.5}, {3, 0.1, 0.2}}), priority_weights({{1, 2, 3}, 5.0}));
    EXPECT_EQ(s.selected, 1u);
    EXPECT_DOUBLE_EQ(s.ranking[0].score, 1.0);
    EXPECT_DOUBLE_EQ(s.ranking[1].score, 0.0);
}

TEST(Mtd, SymmetricFrontEqualWeights) {
    const auto a = archive_of({{1, 3, 2}, {2, 1, 3}, {3, 2, 1}});
    const auto s = mtd_select(a, priority_weights({{1, 2, 3}, 1.0}));
    // Each entry is worst on one objective, so every R is zero and the tie-break decides.
    for (const auto& r : s.ranking) EXPECT_DOUBLE_EQ(r.score, 0.0);
    EXPECT_EQ(s.selected, 0u);
}

TEST(Mtd, HandComputedRanks) {
    const auto a = archive_of({{1, 4, 4}, {2, 2, 2}, {4, 1, 3}, {5, 3, 1}});
    const WeightVector w{{0.2, 0.5, 0.3}};
    const auto s = mtd_select(a, w);
    auto rank = [&](std::array<double, 3> t) {
        return std::pow(std::pow(t[0], 0.2) * std::pow(t[1], 0.5) * std::pow(t[2], 0.3), 1.0 / 3.0);
    };
    std::vector<double> expected = {rank({1.0, 0.0, 0.0}), rank({2.0 / 3, 2.0 / 3, 2.0 / 3}),
                                    rank({1.0 / 3, 1.0, 1.0 / 3}), rank({0.0, 1.0 / 3, 1.0})};
    for (const auto& r : s.ranking) EXPECT_NEAR(r.score, expected[r.index], 1e-12);
    EXPECT_EQ(s.selected, 1u);
}

TEST(Mtd, ParsimonyWeightPicksSmallestModel) {
    const auto a = archive_of(
        {{2, 0.0028, 1.2}, {6, 0.0025, 1.0}, {9, 0.0024, 1.3}, {12, 0.0030, 0.9}, {4, 0.0031, 1.4}});
    EXPECT_EQ(mtd_select(a, priority_weights({{1, 3, 2}, 5.0})).selected, 0u);
    EXPECT_EQ(mtd_select(a, priority_weights({{3, 1, 2}, 5.0})).selected, 1u);
}

TEST(Mtd, DominatedNeverOutranksDominator) {
    const auto a = archive_of({{2, 0.1, 0.1}, {3, 0.2, 0.1}, {1, 0.5, 0.3}, {4, 0.05, 0.2}});
    const auto s = mtd_select(a, priority_weights({{3, 1, 2}, 5.0}));
    std::vector<double> score(4);
    for (const auto& r : s.ranking) score[r.index] = r.score;
    EXPECT_GE(score[0], score[1]);
}

TEST(Mtd, MonotoneTransformInvariance) {
    const std::vector<std::array<double, 3>> pts = {{3, 0.2, 5}, {5, 0.1, 2}, {8, 0.05, 1}, {2, 0.4, 9}, {4, 0.15, 3}};
    auto warped = pts;
    for (auto& p : warped) p[2] = std::exp(p[2]) - 3.0;
    const auto w = priority_weights({{3, 1, 2}, 5.0});
    EXPECT_EQ(mtd_select(archive_of(pts), w).selected, mtd_select(archive_of(warped), w).selected);
}

TEST(Mtd, Errors) {
    const auto one = archive_of({{1, 1, 1}});
    EXPECT_THROW(mtd_select(one, WeightVector{{0.3, 0.3, 0.4}}), Error);
    const auto two = archive_of({{1, 1, 1}, {2, 0, 1}});
    EXPECT_THROW(mtd_select(two, WeightVector{{0.5, 0.5}}), Error);
}

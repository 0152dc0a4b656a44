#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <cmath>
#include <random>

#include "gbid/dataio.hpp"
#include "gbid/error.hpp"
#include "gbid/estimation.hpp"

using namespace gbid;

namespace {

std::shared_ptr<const TermPool> pool_of(PoolConfig config, std::vector<TermSpec> terms) {
    return std::make_shared<const TermPool>(config, std::move(terms));
}

Series linear_plant(std::size_t n, double noise, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    Series s;
    s.u.resize(n);
    s.y.assign(n, 0.0);
    for (auto& u : s.u) u = g(rng);
    for (std::size_t k = 1; k < n; ++k) s.y[k] = 0.5 * s.y[k - 1] + s.u[k - 1];
    for (auto& y : s.y) y += noise * g(rng);
    return s;
}

DatasetBundle bundle_from(const Series& s, std::size_t n_est, int lag) {
    StaticGridSpec grid;
    return split(s, n_est, lag, static_grid(grid));
}

}  // namespace

TEST(BuildRegression, HandExample) {
    auto pool = pool_of({1, 1, 1}, {TermSpec::constant(), TermSpec({1}, {})});
    const ModelStructure m(pool, {0, 1});
    const Series s{{0.0, 0.0, 0.0}, {1.0, 2.0, 3.0}};
    const auto r = build_regression(m, s);
    ASSERT_EQ(r.phi.rows(), 2);
    EXPECT_DOUBLE_EQ(r.phi(0, 0), 1.0);
    EXPECT_DOUBLE_EQ(r.phi(0, 1), 1.0);
    EXPECT_DOUBLE_EQ(r.phi(1, 1), 2.0);
    EXPECT_DOUBLE_EQ(r.target(0), 2.0);
    EXPECT_DOUBLE_EQ(r.target(1), 3.0);
}

TEST(BuildRegression, ConstantColumnAndProducts) {
    auto pool = pool_of({2, 1, 2}, {TermSpec::constant(), TermSpec({}, {1, 2})});
    const Series s{{1.0, 2.0, 3.0, 4.0, 5.0, 6.0}, {0, 0, 0, 0, 0, 0}};
    const auto r = build_regression(ModelStructure(pool, {0, 1}), s);
    ASSERT_EQ(r.phi.rows(), 4);
    for (Eigen::Index t = 0; t < 4; ++t) {
        EXPECT_DOUBLE_EQ(r.phi(t, 0), 1.0);
        const auto k = static_cast<std::size_t>(t) + 2;
        EXPECT_DOUBLE_EQ(r.phi(t, 1), s.u[k - 1] * s.u[k - 2]);
    }
    EXPECT_THROW(build_regression(ModelStructure(pool, {0}), Series{{1.0, 2.0}, {1.0, 2.0}}), Error);
}

TEST(Estimate, NoiselessExactRecovery) {
    auto pool = pool_of({1, 1, 1}, {TermSpec({1}, {}), TermSpec({}, {1})});
    const auto fitted = estimate(ModelStructure(pool, {0, 1}), linear_plant(50, 0.0, 3));
    EXPECT_NEAR(fitted.coefficients()[0], 0.5, 1e-10);
    EXPECT_NEAR(fitted.coefficients()[1], 1.0, 1e-10);
}

TEST(Estimate, CollinearColumnsAreRankDeficient) {
    auto pool = pool_of({2, 1, 1}, {TermSpec({}, {1}), TermSpec({}, {2})});
    Series s;
    s.u.assign(30, 2.2);
    s.y.assign(30, 1.0);
    try {
        (void)estimate(ModelStructure(pool, {0, 1}), s);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::RankDeficient);
    }
}

TEST(Estimate, MatchesNormalEquations) {
    auto pool = pool_of({2, 1, 1}, {TermSpec::constant(), TermSpec({1}, {}), TermSpec({}, {1}), TermSpec({}, {2})});
    const auto s = linear_plant(20, 0.1, 11);
    const ModelStructure m(pool, {0, 1, 2, 3});
    const auto fitted = estimate(m, s);
    const auto r = build_regression(m, s);
    const Eigen::VectorXd oracle = (r.phi.transpose() * r.phi).inverse() * (r.phi.transpose() * r.target);
    for (Eigen::Index j = 0; j < oracle.size(); ++j) EXPECT_NEAR(fitted.coefficients()[static_cast<std::size_t>(j)], oracle(j), 1e-8);
}

TEST(FreeRun, NoiselessModelReproducesData) {
    auto pool = pool_of({1, 1, 1}, {TermSpec({1}, {}), TermSpec({}, {1})});
    const auto s = linear_plant(60, 0.0, 5);
    const ModelStructure m(pool, {0, 1}, {0.5, 1.0});
    const auto y_hat = free_run(m, s, s.size());
    for (std::size_t k = 0; k < s.size(); ++k) EXPECT_NEAR(y_hat[k], s.y[k], 1e-8);
}

TEST(FreeRun, UnstablePoleDiverges) {
    auto pool = pool_of({1, 1, 1}, {TermSpec({1}, {})});
    const ModelStructure m(pool, {0}, {2.0});
    Series s;
    s.u.assign(60, 0.0);
    s.y.assign(60, 1.0);
    try {
        (void)free_run(m, s, 40);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::Diverged);
    }
    EXPECT_EQ(dynamic_error(m, s), kPenalty);
}

TEST(DynamicError, Examples) {
    EXPECT_DOUBLE_EQ(mean_squared_error(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 3}), 0.0);
    EXPECT_DOUBLE_EQ(mean_squared_error(std::vector<double>{1, 2, 3}, std::vector<double>{2, 3, 4}), 1.0);
    EXPECT_DOUBLE_EQ(mean_squared_error(std::vector<double>{9, 2, 3}, std::vector<double>{0, 3, 4}, 1), 1.0);
    EXPECT_NEAR(normalized_error_percent(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 3}), 0.0, 1e-12);
}

TEST(DynamicError, TrueModelNearNoiseVariance) {
    const auto m3 = reference_model("M3");
    const double sigma = 0.05;
    const PlantSpec plant(m3, sigma);
    double acc = 0.0;
    const int trials = 50;
    for (int s = 0; s < trials; ++s) {
        PrbsConfig prbs;
        prbs.seed = static_cast<std::uint32_t>(s + 1);
        const auto series = simulate_plant(plant, gen_prbs(prbs), 100 + static_cast<std::uint64_t>(s));
        const auto val = series.slice(100, 68);
        acc += dynamic_error(m3, val);
    }
    EXPECT_NEAR(acc / trials, sigma * sigma, 0.3 * sigma * sigma);
}

TEST(StaticError, Examples) {
    const auto grid = static_grid({});
    auto pool = pool_of({1, 1, 1}, {TermSpec::constant(), TermSpec({}, {1})});
    const ModelStructure exact(pool, {0, 1}, {32.0, -8.0});
    EXPECT_NEAR(static_error(exact, grid), 0.0, 1e-20);

    const auto m2 = reference_model("M2");
    const double e = static_error(m2, grid);
    EXPECT_GT(e, 0.0);
    const auto poly = static_polynomial(m2);
    for (const auto& s : grid) EXPECT_LE(std::abs(eval_static(poly, s.u_bar) - s.y_bar), 0.5);

    auto cross = pool_of({1, 1, 2}, {TermSpec({1}, {1})});
    EXPECT_EQ(static_error(ModelStructure(cross, {0}, {0.1}), grid), kPenalty);
}

TEST(Evaluate, EmptyGenomeIsPenalized) {
    const auto bundle = bundle_from(linear_plant(120, 0.01, 2), 80, 5);
    const Evaluator ev(std::make_shared<const TermPool>(prune_pool(generate_term_pool({5, 5, 3}))), bundle);
    const auto o = ev.evaluate({});
    EXPECT_EQ(o.xi, 0.0);
    EXPECT_EQ(o.e_dyn, kPenalty);
    EXPECT_EQ(o.e_static, kPenalty);
    EXPECT_TRUE(o.penalized());
}

TEST(Evaluate, MatchesStandaloneFunctions) {
    const auto m3 = reference_model("M3");
    const PlantSpec plant(m3, 0.05);
    const auto series = simulate_plant(plant, gen_prbs({}), 9);
    const auto bundle = bundle_from(series, 100, 5);
    auto pool = std::make_shared<const TermPool>(prune_pool(generate_term_pool({5, 5, 3})));
    std::vector<std::size_t> sel;
    for (std::size_t i = 0; i < m3.xi(); ++i) sel.push_back(pool->find(m3.term(i)));
    std::sort(sel.begin(), sel.end());
    const Evaluator ev(pool, bundle);
    const auto detail = ev.evaluate_detail(sel);
    ASSERT_TRUE(detail.fitted);
    const auto fitted = estimate(ModelStructure(pool, sel), bundle.estimation);
    for (std::size_t i = 0; i < sel.size(); ++i)
        EXPECT_NEAR(detail.model.coefficients()[i], fitted.coefficients()[i], 1e-8 * (1 + std::abs(fitted.coefficients()[i])));
    EXPECT_NEAR(detail.objectives.e_dyn, dynamic_error(fitted, bundle.validation), 1e-9);
    EXPECT_NEAR(detail.objectives.e_static, static_error(fitted, bundle.static_curve), 1e-6);
    EXPECT_EQ(detail.objectives.xi, 9.0);
    EXPECT_LT(detail.objectives.e_dyn, 3 * 0.05 * 0.05);
}

TEST(Evaluate, LinearModelBeatsCubicOnStaticError) {
    const PlantSpec plant(reference_model("M3"), 0.05);
    const auto bundle = bundle_from(simulate_plant(plant, gen_prbs({}), 4), 100, 5);
    auto pool = std::make_shared<const TermPool>(generate_term_pool({5, 5, 3}));
    const auto m4 = reference_model("M4");
    std::vector<std::size_t> linear;
    for (std::size_t i = 0; i < m4.xi(); ++i) linear.push_back(pool->find(m4.term(i)));
    std::vector<std::size_t> cubic = {pool->find(TermSpec::constant()), pool->find(TermSpec({3}, {})),
                                      pool->find(TermSpec({}, {2, 2, 2})), pool->find(TermSpec({}, {3, 3, 3})),
                                      pool->find(TermSpec({}, {4, 4, 4}))};
    std::sort(linear.begin(), linear.end());
    std::sort(cubic.begin(), cubic.end());
    const Evaluator ev(pool, bundle);
    EXPECT_LT(ev.evaluate(linear).e_static, ev.evaluate(cubic).e_static);
}

TEST(DatasetBundle, Validation) {
    const auto s = linear_plant(20, 0.0, 1);
    DatasetBundle b{s.slice(0, 10), s.slice(10, 10), static_grid({})};
    EXPECT_NO_THROW(b.validate(5));
    b.validation = s.slice(10, 5);
    EXPECT_THROW(b.validate(5), Error);
}

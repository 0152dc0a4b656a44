#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "gbid/estimation.hpp"

namespace gbid {

/// One-step-ahead residuals y(k) - y_hat(k|k-1) using measured regressors.
/// Samples before the pool's largest lag are dropped.
std::vector<double> residuals(const ModelStructure& structure, const Series& series);

/// Free-run residuals y(k) - y_sim(k) after the seed samples. Throws Diverged.
std::vector<double> free_run_residuals(const ModelStructure& structure, const Series& series);

enum class ValidityTest { EpsEps, UEps, U2Eps, U2Eps2, Eps2U };

inline constexpr std::array<ValidityTest, 5> kValidityTests = {
    ValidityTest::EpsEps, ValidityTest::UEps, ValidityTest::U2Eps, ValidityTest::U2Eps2, ValidityTest::Eps2U};

/// ASCII test name, e.g. "phi_u2_e2".
std::string to_string(ValidityTest test);

struct ValidityOptions {
    int max_lag = 20;
    /// Family-wise false-alarm level of the whole battery.
    double alpha = 0.05;
    /// When false, every lag uses the per-lag two-sided band at alpha.
    bool simultaneous = true;
};

struct CorrelationTest {
    ValidityTest test = ValidityTest::EpsEps;
    std::vector<int> lags;
    std::vector<double> values;
    double band = 0.0;
    bool pass = false;
};

struct CorrelationReport {
    std::size_t n = 0;
    double z = 0.0;
    std::vector<CorrelationTest> tests;

    [[nodiscard]] bool all_pass() const noexcept;
    [[nodiscard]] const CorrelationTest& at(ValidityTest test) const;
};

/// Normalized cross-correlation r_ab(tau) = sum a(k - tau) b(k) / sqrt(sum a^2 sum b^2) of the
/// mean-removed signals, for tau in [-max_lag, max_lag]. Zero when either signal is constant.
std::vector<double> cross_correlation(std::span<const double> a, std::span<const double> b, int max_lag);

/// Band quantile: per-lag 1 - alpha/2, or Sidak-corrected over every tested lag of the battery.
double band_quantile(const ValidityOptions& options);

/// The five correlation tests. Phi_ee is exempt at tau = 0, where it is 1 by definition.
/// Throws SeriesTooShort when |e| < 40, InvalidArgument when lengths differ.
CorrelationReport validity_tests(std::span<const double> e, std::span<const double> u,
                                 const ValidityOptions& options = {});

}  // namespace gbid

#include "gbid/validation.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gbid/error.hpp"

namespace gbid {

namespace {

constexpr std::size_t kMinimumLength = 40;

std::vector<double> centered(std::span<const double> x) {
    std::vector<double> out(x.begin(), x.end());
    if (out.empty()) return out;
    const double mean = std::accumulate(out.begin(), out.end(), 0.0) / static_cast<double>(out.size());
    for (auto& v : out) v -= mean;
    return out;
}

std::vector<double> squared(std::span<const double> x) {
    std::vector<double> out(x.size());
    std::transform(x.begin(), x.end(), out.begin(), [](double v) { return v * v; });
    return out;
}

std::size_t tested_lags(int max_lag) {
    const auto per_test = static_cast<std::size_t>(2 * max_lag + 1);
    return kValidityTests.size() * per_test - 1;
}

}  // namespace

std::vector<double> residuals(const ModelStructure& structure, const Series& series) {
    if (!structure.estimated()) throw Error(Errc::InvalidArgument, "residuals need an estimated structure");
    const std::size_t first = free_run_seed_length(structure);
    if (series.size() <= first) throw Error(Errc::SeriesTooShort, "series shorter than the model lag");
    std::vector<double> e;
    e.reserve(series.size() - first);
    for (std::size_t k = first; k < series.size(); ++k) e.push_back(series.y[k] - structure.predict(series.y, series.u, k));
    return e;
}

std::vector<double> free_run_residuals(const ModelStructure& structure, const Series& series) {
    const std::size_t first = free_run_seed_length(structure);
    if (series.size() <= first) throw Error(Errc::SeriesTooShort, "series shorter than the model lag");
    const auto y_hat = free_run(structure, series, series.size());
    std::vector<double> e;
    e.reserve(series.size() - first);
    for (std::size_t k = first; k < series.size(); ++k) e.push_back(series.y[k] - y_hat[k]);
    return e;
}

std::string to_string(ValidityTest test) {
    switch (test) {
        case ValidityTest::EpsEps: return "phi_ee";
        case ValidityTest::UEps: return "phi_ue";
        case ValidityTest::U2Eps: return "phi_u2e";
        case ValidityTest::U2Eps2: return "phi_u2e2";
        case ValidityTest::Eps2U: return "phi_e2u";
    }
    return "unknown";
}

bool CorrelationReport::all_pass() const noexcept {
    return std::all_of(tests.begin(), tests.end(), [](const CorrelationTest& t) { return t.pass; });
}

const CorrelationTest& CorrelationReport::at(ValidityTest test) const {
    for (const auto& t : tests)
        if (t.test == test) return t;
    throw Error(Errc::InvalidArgument, "test not in report");
}

std::vector<double> cross_correlation(std::span<const double> a, std::span<const double> b, int max_lag) {
    if (a.size() != b.size()) throw Error(Errc::InvalidArgument, "correlated series differ in length");
    if (max_lag < 0) throw Error(Errc::InvalidArgument, "negative lag window");
    const auto ca = centered(a);
    const auto cb = centered(b);
    const double saa = std::inner_product(ca.begin(), ca.end(), ca.begin(), 0.0);
    const double sbb = std::inner_product(cb.begin(), cb.end(), cb.begin(), 0.0);
    std::vector<double> out(static_cast<std::size_t>(2 * max_lag + 1), 0.0);
    if (saa <= 0.0 || sbb <= 0.0) return out;
    const double norm = std::sqrt(saa * sbb);
    const auto n = static_cast<std::ptrdiff_t>(a.size());
    for (int tau = -max_lag; tau <= max_lag; ++tau) {
        double acc = 0.0;
        for (std::ptrdiff_t k = std::max<std::ptrdiff_t>(0, tau); k < n && k - tau < n; ++k)
            acc += ca[static_cast<std::size_t>(k - tau)] * cb[static_cast<std::size_t>(k)];
        out[static_cast<std::size_t>(tau + max_lag)] = std::clamp(acc / norm, -1.0, 1.0);
    }
    return out;
}

double band_quantile(const ValidityOptions& options) {
    if (!(options.alpha > 0.0 && options.alpha < 1.0)) throw Error(Errc::InvalidArgument, "alpha must lie in (0, 1)");
    double per_lag = options.alpha;
    if (options.simultaneous) {
        const auto m = static_cast<double>(tested_lags(options.max_lag));
        per_lag = -std::expm1(std::log1p(-options.alpha) / m);
    }
    const boost::math::normal_distribution<double> normal;
    return boost::math::quantile(boost::math::complement(normal, per_lag / 2.0));
}

CorrelationReport validity_tests(std::span<const double> e, std::span<const double> u, const ValidityOptions& options) {
    if (e.size() != u.size()) throw Error(Errc::InvalidArgument, "residual and input lengths differ");
    if (e.size() < kMinimumLength) throw Error(Errc::SeriesTooShort, "validity tests need at least 40 samples");
    if (options.max_lag < 0 || static_cast<std::size_t>(options.max_lag) >= e.size())
        throw Error(Errc::InvalidArgument, "lag window exceeds the series");

    CorrelationReport report;
    report.n = e.size();
    report.z = band_quantile(options);
    const double band = report.z / std::sqrt(static_cast<double>(e.size()));

    const auto u2 = squared(u);
    const auto e2 = squared(e);
    std::vector<int> lags;
    for (int tau = -options.max_lag; tau <= options.max_lag; ++tau) lags.push_back(tau);

    for (auto test : kValidityTests) {
        CorrelationTest t;
        t.test = test;
        t.lags = lags;
        t.band = band;
        switch (test) {
            case ValidityTest::EpsEps: t.values = cross_correlation(e, e, options.max_lag); break;
            case ValidityTest::UEps: t.values = cross_correlation(u, e, options.max_lag); break;
            case ValidityTest::U2Eps: t.values = cross_correlation(u2, e, options.max_lag); break;
            case ValidityTest::U2Eps2: t.values = cross_correlation(u2, e2, options.max_lag); break;
            case ValidityTest::Eps2U: t.values = cross_correlation(e2, u, options.max_lag); break;
        }
        if (test == ValidityTest::EpsEps) t.values[static_cast<std::size_t>(options.max_lag)] = 1.0;
        t.pass = true;
        for (std::size_t i = 0; i < lags.size(); ++i) {
            if (test == ValidityTest::EpsEps && lags[i] == 0) continue;
            if (std::abs(t.values[i]) > band) t.pass = false;
        }
        report.tests.push_back(std::move(t));
    }
    return report;
}

}  // namespace gbid

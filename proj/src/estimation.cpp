#include "gbid/estimation.hpp"

#include <algorithm>
#include <cmath>

#include "gbid/error.hpp"

namespace gbid {

namespace {

// Relative pivot threshold for the rank decision on unit-norm columns.
constexpr double kRankThreshold = 1e-10;
constexpr double kDivergenceFactor = 100.0;

bool all_finite(const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

std::size_t pool_lag(const TermPool& pool) { return static_cast<std::size_t>(pool.config().max_lag()); }

// Least squares on column-normalized phi. Returns false when rank deficient.
bool solve_least_squares(const Eigen::MatrixXd& phi, const Eigen::VectorXd& target, Eigen::VectorXd& theta) {
    const auto cols = phi.cols();
    if (phi.rows() < cols) return false;
    Eigen::VectorXd scale(cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        const double n = phi.col(j).norm();
        if (!(n > 0.0) || !std::isfinite(n)) return false;
        scale(j) = n;
    }
    const Eigen::MatrixXd scaled = phi * scale.cwiseInverse().asDiagonal();
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(scaled);
    qr.setThreshold(kRankThreshold);
    if (qr.rank() < cols) return false;
    theta = qr.solve(target).cwiseQuotient(scale);
    return theta.allFinite();
}

// Free run into y_hat; returns false on divergence.
bool simulate(const ModelStructure& model, std::span<const double> u, std::span<const double> y,
              std::size_t seeds, double bound, std::vector<double>& y_hat) {
    const std::size_t n = y_hat.size();
    seeds = std::min(seeds, n);
    std::copy_n(y.begin(), seeds, y_hat.begin());
    for (std::size_t k = seeds; k < n; ++k) {
        const double v = model.predict(y_hat, u, k);
        if (!std::isfinite(v) || std::abs(v) > bound) return false;
        y_hat[k] = v;
    }
    return true;
}

double clamp_objective(double v) { return std::isfinite(v) && v < kPenalty ? v : kPenalty; }

}  // namespace

Series Series::slice(std::size_t first, std::size_t count) const {
    if (first + count > size() || u.size() != y.size())
        throw Error(Errc::InvalidArgument, "series slice out of range");
    Series out;
    out.u.assign(u.begin() + static_cast<std::ptrdiff_t>(first), u.begin() + static_cast<std::ptrdiff_t>(first + count));
    out.y.assign(y.begin() + static_cast<std::ptrdiff_t>(first), y.begin() + static_cast<std::ptrdiff_t>(first + count));
    return out;
}

void DatasetBundle::validate(int max_lag) const {
    const auto lag = static_cast<std::size_t>(std::max(max_lag, 0));
    for (const Series* s : {&estimation, &validation}) {
        if (s->u.size() != s->y.size()) throw Error(Errc::InvalidArgument, "u and y lengths differ");
        if (!all_finite(s->u) || !all_finite(s->y)) throw Error(Errc::InvalidArgument, "non-finite sample");
    }
    if (estimation.size() <= lag + 1)
        throw Error(Errc::SplitTooSmall, "estimation segment shorter than the largest lag");
    if (validation.size() <= lag) throw Error(Errc::SplitTooSmall, "validation segment too short");
    if (static_curve.size() < 2) throw Error(Errc::InvalidArgument, "static curve needs at least 2 samples");
    for (const auto& s : static_curve)
        if (!std::isfinite(s.u_bar) || !std::isfinite(s.y_bar))
            throw Error(Errc::InvalidArgument, "non-finite static sample");
}

Regression build_regression(const ModelStructure& structure, const Series& series) {
    const std::size_t first = pool_lag(*structure.pool());
    if (series.u.size() != series.y.size()) throw Error(Errc::InvalidArgument, "u and y lengths differ");
    if (series.size() <= first) throw Error(Errc::SeriesTooShort, "series not longer than the largest lag");
    const auto rows = static_cast<Eigen::Index>(series.size() - first);
    Regression r;
    r.phi.resize(rows, static_cast<Eigen::Index>(structure.xi()));
    r.target.resize(rows);
    for (Eigen::Index t = 0; t < rows; ++t) {
        const std::size_t k = first + static_cast<std::size_t>(t);
        for (std::size_t j = 0; j < structure.xi(); ++j)
            r.phi(t, static_cast<Eigen::Index>(j)) = structure.term(j).evaluate(series.y, series.u, k);
        r.target(t) = series.y[k];
    }
    return r;
}

ModelStructure estimate(const ModelStructure& structure, const Series& series) {
    if (structure.empty()) throw Error(Errc::InvalidArgument, "cannot estimate an empty structure");
    const auto reg = build_regression(structure, series);
    Eigen::VectorXd theta;
    if (!solve_least_squares(reg.phi, reg.target, theta))
        throw Error(Errc::RankDeficient, "regression matrix is rank deficient");
    return structure.with_coefficients({theta.data(), theta.data() + theta.size()});
}

std::size_t free_run_seed_length(const ModelStructure& structure) noexcept {
    return structure.pool() ? pool_lag(*structure.pool()) : 0;
}

std::vector<double> free_run(const ModelStructure& structure, const Series& series, std::size_t horizon) {
    if (!structure.estimated()) throw Error(Errc::InvalidArgument, "free run needs an estimated structure");
    if (horizon > series.size() || series.u.size() != series.y.size())
        throw Error(Errc::SeriesTooShort, "horizon exceeds series length");
    std::vector<double> y_hat(horizon, 0.0);
    const double bound = kDivergenceFactor * max_abs(series.y);
    if (!simulate(structure, series.u, series.y, free_run_seed_length(structure), bound, y_hat))
        throw Error(Errc::Diverged, "free-run prediction diverged");
    return y_hat;
}

double mean_squared_error(std::span<const double> y, std::span<const double> y_hat, std::size_t first) {
    const std::size_t n = std::min(y.size(), y_hat.size());
    if (first >= n) return 0.0;
    double acc = 0.0;
    for (std::size_t k = first; k < n; ++k) acc += (y[k] - y_hat[k]) * (y[k] - y_hat[k]);
    return acc / static_cast<double>(n - first);
}

double normalized_error_percent(std::span<const double> y, std::span<const double> y_hat, std::size_t first) {
    const std::size_t n = std::min(y.size(), y_hat.size());
    if (first >= n) return 0.0;
    double mean = 0.0;
    for (std::size_t k = first; k < n; ++k) mean += y[k];
    mean /= static_cast<double>(n - first);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t k = first; k < n; ++k) {
        num += (y[k] - y_hat[k]) * (y[k] - y_hat[k]);
        den += (y[k] - mean) * (y[k] - mean);
    }
    if (den == 0.0) return num == 0.0 ? 0.0 : kPenalty;
    return 100.0 * std::sqrt(num / den);
}

double dynamic_error(const ModelStructure& structure, const Series& validation) {
    try {
        const auto y_hat = free_run(structure, validation, validation.size());
        return clamp_objective(mean_squared_error(validation.y, y_hat, free_run_seed_length(structure)));
    } catch (const Error& e) {
        if (e.code() == Errc::Diverged) return kPenalty;
        throw;
    }
}

double static_error(const ModelStructure& structure, std::span<const StaticSample> curve) {
    if (!has_polynomial_static(structure)) return kPenalty;
    StaticPolynomial poly;
    try {
        poly = static_polynomial(structure);
    } catch (const Error& e) {
        if (e.code() == Errc::DegenerateStaticGain) return kPenalty;
        throw;
    }
    double acc = 0.0;
    for (const auto& s : curve) {
        const double d = s.y_bar - eval_static(poly, s.u_bar);
        acc += d * d;
    }
    return clamp_objective(acc);
}

ObjectiveVector evaluate(const ModelStructure& structure, const DatasetBundle& bundle) {
    const Evaluator evaluator(structure.pool(), bundle);
    return evaluator.evaluate(structure.selected());
}

Evaluator::Evaluator(std::shared_ptr<const TermPool> pool, DatasetBundle bundle)
    : pool_(std::move(pool)), bundle_(std::move(bundle)) {
    if (!pool_) throw Error(Errc::InvalidArgument, "evaluator requires a term pool");
    bundle_.validate(pool_->config().max_lag());
    const std::size_t first = pool_lag(*pool_);
    const auto& est = bundle_.estimation;
    const auto rows = static_cast<Eigen::Index>(est.size() - first);
    candidates_.resize(rows, static_cast<Eigen::Index>(pool_->size()));
    target_.resize(rows);
    for (Eigen::Index t = 0; t < rows; ++t) {
        const std::size_t k = first + static_cast<std::size_t>(t);
        for (std::size_t j = 0; j < pool_->size(); ++j)
            candidates_(t, static_cast<Eigen::Index>(j)) = (*pool_)[j].evaluate(est.y, est.u, k);
        target_(t) = est.y[k];
    }
    diverge_bound_ = kDivergenceFactor * max_abs(bundle_.validation.y);
}

ObjectiveVector Evaluator::evaluate(std::span<const std::size_t> selected) const {
    return evaluate_detail(selected).objectives;
}

Evaluation Evaluator::evaluate_detail(std::span<const std::size_t> selected) const {
    Evaluation out;
    out.objectives = {static_cast<double>(selected.size()), kPenalty, kPenalty};
    out.model = ModelStructure(pool_, {selected.begin(), selected.end()});
    if (selected.empty()) return out;

    Eigen::MatrixXd phi(candidates_.rows(), static_cast<Eigen::Index>(selected.size()));
    for (std::size_t j = 0; j < selected.size(); ++j)
        phi.col(static_cast<Eigen::Index>(j)) = candidates_.col(static_cast<Eigen::Index>(selected[j]));
    Eigen::VectorXd theta;
    if (!solve_least_squares(phi, target_, theta)) return out;
    out.model = out.model.with_coefficients({theta.data(), theta.data() + theta.size()});
    out.fitted = true;

    const auto& val = bundle_.validation;
    std::vector<double> y_hat(val.size(), 0.0);
    const std::size_t seeds = pool_lag(*pool_);
    if (simulate(out.model, val.u, val.y, seeds, diverge_bound_, y_hat))
        out.objectives.e_dyn = clamp_objective(mean_squared_error(val.y, y_hat, seeds));
    out.objectives.e_static = static_error(out.model, bundle_.static_curve);
    return out;
}

}  // namespace gbid

#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "gbid/narx_model.hpp"

namespace gbid {

/// Paired input/output record, one entry per sample.
struct Series {
    std::vector<double> u;
    std::vector<double> y;

    [[nodiscard]] std::size_t size() const noexcept { return y.size(); }
    [[nodiscard]] bool empty() const noexcept { return y.empty(); }
    [[nodiscard]] Series slice(std::size_t first, std::size_t count) const;
};

struct StaticSample {
    double u_bar = 0.0;
    double y_bar = 0.0;
};

struct DatasetBundle {
    Series estimation;
    Series validation;
    std::vector<StaticSample> static_curve;

    /// Checks lengths against the largest lag and that every sample is finite.
    void validate(int max_lag) const;
};

/// Reserved objective value for structures that cannot be scored.
inline constexpr double kPenalty = 1e12;

struct ObjectiveVector {
    double xi = 0.0;
    double e_dyn = kPenalty;
    double e_static = kPenalty;

    [[nodiscard]] std::array<double, 3> values() const noexcept { return {xi, e_dyn, e_static}; }
    [[nodiscard]] bool penalized() const noexcept { return e_dyn >= kPenalty || e_static >= kPenalty; }
    bool operator==(const ObjectiveVector&) const = default;
};

struct Regression {
    Eigen::MatrixXd phi;
    Eigen::VectorXd target;
};

/// One-step-ahead regression: row t holds every selected term at k = first_row + t using
/// measured signals. Rows start at the pool's largest lag. Throws SeriesTooShort.
Regression build_regression(const ModelStructure& structure, const Series& series);

/// Least squares via column-pivoted Householder QR on norm-scaled columns.
/// Throws RankDeficient when the numerical rank is below the number of terms.
ModelStructure estimate(const ModelStructure& structure, const Series& series);

/// Free-run simulation. The first max-lag outputs are copied from the measured series,
/// later outputs feed back predictions while the measured input drives the model.
/// Throws Diverged once |y_hat| exceeds 100 x max|y| of the series.
std::vector<double> free_run(const ModelStructure& structure, const Series& series, std::size_t horizon);

/// Samples before this index are free-run seeds and carry no error.
std::size_t free_run_seed_length(const ModelStructure& structure) noexcept;

/// Mean of squared differences over [first, n).
double mean_squared_error(std::span<const double> y, std::span<const double> y_hat, std::size_t first = 0);

/// 100 * sqrt(sum (y - y_hat)^2 / sum (y - mean y)^2) over [first, n).
double normalized_error_percent(std::span<const double> y, std::span<const double> y_hat,
                                std::size_t first = 0);

/// Mean squared free-run error over the validation series, PENALTY on divergence.
double dynamic_error(const ModelStructure& structure, const Series& validation);

/// Summed squared deviation of the model's static curve from the reference samples.
/// PENALTY when the static gain is degenerate or the structure has no polynomial static map.
double static_error(const ModelStructure& structure, std::span<const StaticSample> curve);

/// (xi, E, E_static) after re-estimating the structure on the estimation series.
ObjectiveVector evaluate(const ModelStructure& structure, const DatasetBundle& bundle);

/// Evaluation outcome with the estimated model kept for reporting.
struct Evaluation {
    ObjectiveVector objectives;
    ModelStructure model;  // estimated when the fit succeeded
    bool fitted = false;
};

/// Scores subsets of a fixed pool against a fixed bundle. Candidate regressors over the
/// estimation series are computed once, so each call only slices columns and solves.
/// Immutable after construction and safe to share between threads.
class Evaluator {
public:
    Evaluator(std::shared_ptr<const TermPool> pool, DatasetBundle bundle);

    [[nodiscard]] const std::shared_ptr<const TermPool>& pool() const noexcept { return pool_; }
    [[nodiscard]] const DatasetBundle& bundle() const noexcept { return bundle_; }

    [[nodiscard]] ObjectiveVector evaluate(std::span<const std::size_t> selected) const;
    [[nodiscard]] Evaluation evaluate_detail(std::span<const std::size_t> selected) const;

private:
    std::shared_ptr<const TermPool> pool_;
    DatasetBundle bundle_;
    Eigen::MatrixXd candidates_;
    Eigen::VectorXd target_;
    double diverge_bound_ = 0.0;
};

}  // namespace gbid

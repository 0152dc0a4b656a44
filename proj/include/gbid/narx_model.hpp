#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace gbid {

/// Term cluster label: p output factors and m input factors. (0,0) is the constant cluster.
struct ClusterLabel {
    int p = 0;
    int m = 0;

    auto operator<=>(const ClusterLabel&) const = default;
};

/// One candidate regressor: a product of lagged outputs y(k-i) and lagged inputs u(k-j).
///
/// Lags are stored sorted ascending, one entry per factor, so y(k-2)^2 has y_lags = {2, 2}.
/// Two terms are equal iff their canonical forms are equal.
class TermSpec {
public:
    TermSpec() = default;
    TermSpec(std::vector<int> y_lags, std::vector<int> u_lags);

    static TermSpec constant() { return {}; }

    [[nodiscard]] const std::vector<int>& y_lags() const noexcept { return y_lags_; }
    [[nodiscard]] const std::vector<int>& u_lags() const noexcept { return u_lags_; }
    [[nodiscard]] bool is_constant() const noexcept { return y_lags_.empty() && u_lags_.empty(); }
    [[nodiscard]] int degree() const noexcept {
        return static_cast<int>(y_lags_.size() + u_lags_.size());
    }
    [[nodiscard]] ClusterLabel label() const noexcept {
        return {static_cast<int>(y_lags_.size()), static_cast<int>(u_lags_.size())};
    }
    [[nodiscard]] int max_lag() const noexcept;

    /// Evaluates the term at time k; y and u must cover indices k - max_lag() .. k - 1.
    [[nodiscard]] double evaluate(std::span<const double> y, std::span<const double> u,
                                  std::size_t k) const noexcept {
        double v = 1.0;
        for (int lag : y_lags_) v *= y[k - static_cast<std::size_t>(lag)];
        for (int lag : u_lags_) v *= u[k - static_cast<std::size_t>(lag)];
        return v;
    }

    /// Human readable form, e.g. "y(k-1)*u(k-2)^2".
    [[nodiscard]] std::string to_string() const;

    bool operator==(const TermSpec&) const = default;

private:
    std::vector<int> y_lags_;
    std::vector<int> u_lags_;
};

/// Term ordering used for pools: degree, then cluster label, then lag lists.
bool term_order_less(const TermSpec& a, const TermSpec& b) noexcept;

ClusterLabel classify(const TermSpec& term) noexcept;

struct PoolConfig {
    int n_u = 1;
    int n_y = 1;
    int n_l = 1;

    void validate() const;
    [[nodiscard]] int max_lag() const noexcept { return n_u > n_y ? n_u : n_y; }
    bool operator==(const PoolConfig&) const = default;
};

/// Closed-form count of candidate terms (constant included).
std::size_t term_count(const PoolConfig& config);

/// Ordered, duplicate-free candidate term list. Genome bit i always maps to terms()[i].
class TermPool {
public:
    TermPool(PoolConfig config, std::vector<TermSpec> terms);

    [[nodiscard]] const PoolConfig& config() const noexcept { return config_; }
    [[nodiscard]] const std::vector<TermSpec>& terms() const noexcept { return terms_; }
    [[nodiscard]] std::size_t size() const noexcept { return terms_.size(); }
    [[nodiscard]] const TermSpec& operator[](std::size_t i) const { return terms_.at(i); }
    /// Index of a term in this pool, or size() when absent.
    [[nodiscard]] std::size_t find(const TermSpec& term) const noexcept;

    bool operator==(const TermPool&) const = default;

private:
    PoolConfig config_;
    std::vector<TermSpec> terms_;
};

TermPool generate_term_pool(const PoolConfig& config);

enum class PruneMode { Clusters, LinearOnly, None };

PruneMode prune_mode_from_string(const std::string& name);
std::string to_string(PruneMode mode);

/// Keeps the clusters whose static function is a polynomial in u:
/// constant, linear y, and all pure-input clusters. Order preserved.
TermPool prune_pool(const TermPool& pool);

/// Keeps only the constant, linear-y and linear-u clusters.
TermPool prune_to_linear(const TermPool& pool);

TermPool apply_prune(const TermPool& pool, PruneMode mode);

/// A selected subset of a pool's terms with (possibly not yet estimated) coefficients.
class ModelStructure {
public:
    ModelStructure() = default;
    ModelStructure(std::shared_ptr<const TermPool> pool, std::vector<std::size_t> selected,
                   std::vector<double> coefficients = {});

    [[nodiscard]] const std::shared_ptr<const TermPool>& pool() const noexcept { return pool_; }
    [[nodiscard]] const std::vector<std::size_t>& selected() const noexcept { return selected_; }
    [[nodiscard]] const std::vector<double>& coefficients() const noexcept { return theta_; }
    [[nodiscard]] std::size_t xi() const noexcept { return selected_.size(); }
    [[nodiscard]] bool empty() const noexcept { return selected_.empty(); }
    [[nodiscard]] bool estimated() const noexcept {
        return !selected_.empty() && theta_.size() == selected_.size();
    }
    [[nodiscard]] const TermSpec& term(std::size_t i) const { return (*pool_)[selected_.at(i)]; }
    /// Largest lag used by any selected term.
    [[nodiscard]] int max_lag() const noexcept;

    [[nodiscard]] ModelStructure with_coefficients(std::vector<double> theta) const;

    /// One-step evaluation of the model equation at time k.
    [[nodiscard]] double predict(std::span<const double> y, std::span<const double> u,
                                 std::size_t k) const noexcept;

    [[nodiscard]] std::string to_string() const;

private:
    std::shared_ptr<const TermPool> pool_;
    std::vector<std::size_t> selected_;
    std::vector<double> theta_;
};

/// Builds a structure from explicit terms, locating (or adding) each in the given pool config.
ModelStructure make_structure(const PoolConfig& config, const std::vector<TermSpec>& terms,
                              std::vector<double> coefficients);

using ClusterCoefficients = std::map<ClusterLabel, double>;

/// Sum of coefficients per cluster label. Absent clusters read as 0 via cluster_sum().
ClusterCoefficients cluster_coefficients(const ModelStructure& structure);
double cluster_sum(const ClusterCoefficients& sums, ClusterLabel label) noexcept;

/// y_bar = a_0 + a_1 u_bar + ... + a_{n_l} u_bar^{n_l}.
struct StaticPolynomial {
    std::vector<double> coefficients;

    [[nodiscard]] double operator()(double u_bar) const noexcept;
    bool operator==(const StaticPolynomial&) const = default;
};

inline constexpr double kDegenerateGainTolerance = 1e-9;

/// True when every selected term lies in a cluster whose static map is polynomial in u.
bool has_polynomial_static(const ModelStructure& structure) noexcept;

/// a_i = Sigma_{u^i} / (1 - Sigma_y). Throws DegenerateStaticGain when |1 - Sigma_y| < 1e-9,
/// InvalidArgument when the structure has nonlinear-output or cross-term clusters.
StaticPolynomial static_polynomial(const ModelStructure& structure);

double eval_static(const StaticPolynomial& poly, double u_bar) noexcept;

/// Buck converter steady state: 4 V_d / 3 - (V_d / 3) u_bar.
double buck_static_reference(double u_bar, double v_d) noexcept;

}  // namespace gbid

#include "gbid/narx_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gbid/error.hpp"

namespace gbid {

namespace {

void append_factor(std::ostringstream& os, bool& first, char signal, int lag, int power) {
    if (!first) os << '*';
    first = false;
    os << signal << "(k-" << lag << ')';
    if (power > 1) os << '^' << power;
}

void append_factors(std::ostringstream& os, bool& first, char signal, const std::vector<int>& lags) {
    // lags are sorted, but print highest lag first as is customary
    for (std::size_t i = lags.size(); i > 0;) {
        std::size_t j = i;
        while (j > 0 && lags[j - 1] == lags[i - 1]) --j;
        append_factor(os, first, signal, lags[i - 1], static_cast<int>(i - j));
        i = j;
    }
}

// All non-decreasing sequences of `count` values in [1, max_lag], lexicographic order.
void multisets(int count, int max_lag, std::vector<std::vector<int>>& out) {
    std::vector<int> current(static_cast<std::size_t>(count), 1);
    if (count == 0) {
        out.emplace_back();
        return;
    }
    for (;;) {
        out.push_back(current);
        int pos = count - 1;
        while (pos >= 0 && current[static_cast<std::size_t>(pos)] == max_lag) --pos;
        if (pos < 0) return;
        const int next = current[static_cast<std::size_t>(pos)] + 1;
        for (int i = pos; i < count; ++i) current[static_cast<std::size_t>(i)] = next;
    }
}

TermPool filter_pool(const TermPool& pool, bool (*keep)(ClusterLabel)) {
    std::vector<TermSpec> kept;
    for (const auto& t : pool.terms())
        if (keep(t.label())) kept.push_back(t);
    return {pool.config(), std::move(kept)};
}

bool polynomial_static_cluster(ClusterLabel c) {
    if (c.p == 0) return true;             // constant and pure-input clusters
    return c.p == 1 && c.m == 0;           // linear output
}

bool linear_cluster(ClusterLabel c) { return c.p + c.m <= 1; }

}  // namespace

TermSpec::TermSpec(std::vector<int> y_lags, std::vector<int> u_lags)
    : y_lags_(std::move(y_lags)), u_lags_(std::move(u_lags)) {
    for (int lag : y_lags_)
        if (lag < 1) throw Error(Errc::InvalidArgument, "output lag must be >= 1");
    for (int lag : u_lags_)
        if (lag < 1) throw Error(Errc::InvalidArgument, "input lag must be >= 1");
    std::sort(y_lags_.begin(), y_lags_.end());
    std::sort(u_lags_.begin(), u_lags_.end());
}

int TermSpec::max_lag() const noexcept {
    int lag = 0;
    if (!y_lags_.empty()) lag = y_lags_.back();
    if (!u_lags_.empty()) lag = std::max(lag, u_lags_.back());
    return lag;
}

std::string TermSpec::to_string() const {
    if (is_constant()) return "1";
    std::ostringstream os;
    bool first = true;
    append_factors(os, first, 'y', y_lags_);
    append_factors(os, first, 'u', u_lags_);
    return os.str();
}

bool term_order_less(const TermSpec& a, const TermSpec& b) noexcept {
    if (a.degree() != b.degree()) return a.degree() < b.degree();
    if (a.label() != b.label()) return a.label() < b.label();
    if (a.y_lags() != b.y_lags()) return a.y_lags() < b.y_lags();
    return a.u_lags() < b.u_lags();
}

ClusterLabel classify(const TermSpec& term) noexcept { return term.label(); }

void PoolConfig::validate() const {
    if (n_u < 1 || n_y < 1 || n_l < 1)
        throw Error(Errc::InvalidConfig, "pool config requires n_u, n_y, n_l >= 1");
}

std::size_t term_count(const PoolConfig& config) {
    config.validate();
    // n_i = n_{i-1} (n_y + n_u + i - 1) / i, n = sum n_i, n_0 = 1
    std::size_t n_prev = 1;
    std::size_t total = 1;
    const auto vars = static_cast<std::size_t>(config.n_y + config.n_u);
    for (std::size_t i = 1; i <= static_cast<std::size_t>(config.n_l); ++i) {
        n_prev = n_prev * (vars + i - 1) / i;
        total += n_prev;
    }
    return total;
}

TermPool::TermPool(PoolConfig config, std::vector<TermSpec> terms)
    : config_(config), terms_(std::move(terms)) {
    config_.validate();
    for (const auto& t : terms_) {
        for (int lag : t.y_lags())
            if (lag > config_.n_y) throw Error(Errc::InvalidArgument, "output lag exceeds n_y");
        for (int lag : t.u_lags())
            if (lag > config_.n_u) throw Error(Errc::InvalidArgument, "input lag exceeds n_u");
        if (t.degree() > config_.n_l) throw Error(Errc::InvalidArgument, "term degree exceeds n_l");
    }
    auto sorted = terms_;
    std::sort(sorted.begin(), sorted.end(), term_order_less);
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw Error(Errc::InvalidArgument, "term pool contains duplicate terms");
}

std::size_t TermPool::find(const TermSpec& term) const noexcept {
    const auto it = std::find(terms_.begin(), terms_.end(), term);
    return static_cast<std::size_t>(it - terms_.begin());
}

TermPool generate_term_pool(const PoolConfig& config) {
    config.validate();
    std::vector<TermSpec> terms;
    terms.reserve(term_count(config));
    for (int degree = 0; degree <= config.n_l; ++degree) {
        for (int p = 0; p <= degree; ++p) {
            const int m = degree - p;
            std::vector<std::vector<int>> ys;
            std::vector<std::vector<int>> us;
            multisets(p, config.n_y, ys);
            multisets(m, config.n_u, us);
            for (const auto& yl : ys)
                for (const auto& ul : us) terms.emplace_back(yl, ul);
        }
    }
    return {config, std::move(terms)};
}

PruneMode prune_mode_from_string(const std::string& name) {
    if (name == "clusters") return PruneMode::Clusters;
    if (name == "linear-only") return PruneMode::LinearOnly;
    if (name == "none") return PruneMode::None;
    throw Error(Errc::InvalidConfig, "unknown pruning mode '" + name + "'");
}

std::string to_string(PruneMode mode) {
    switch (mode) {
        case PruneMode::Clusters: return "clusters";
        case PruneMode::LinearOnly: return "linear-only";
        case PruneMode::None: return "none";
    }
    return "none";
}

TermPool prune_pool(const TermPool& pool) { return filter_pool(pool, polynomial_static_cluster); }

TermPool prune_to_linear(const TermPool& pool) { return filter_pool(pool, linear_cluster); }

TermPool apply_prune(const TermPool& pool, PruneMode mode) {
    switch (mode) {
        case PruneMode::Clusters: return prune_pool(pool);
        case PruneMode::LinearOnly: return prune_to_linear(pool);
        case PruneMode::None: return pool;
    }
    return pool;
}

ModelStructure::ModelStructure(std::shared_ptr<const TermPool> pool, std::vector<std::size_t> selected,
                               std::vector<double> coefficients)
    : pool_(std::move(pool)), selected_(std::move(selected)), theta_(std::move(coefficients)) {
    if (!pool_) throw Error(Errc::InvalidArgument, "structure requires a term pool");
    for (std::size_t i = 0; i < selected_.size(); ++i) {
        if (selected_[i] >= pool_->size())
            throw Error(Errc::InvalidArgument, "selected index outside the pool");
        if (i > 0 && selected_[i] <= selected_[i - 1])
            throw Error(Errc::InvalidArgument, "selected indices must be strictly increasing");
    }
    if (!theta_.empty() && theta_.size() != selected_.size())
        throw Error(Errc::InvalidArgument, "coefficient count does not match selected terms");
}

int ModelStructure::max_lag() const noexcept {
    int lag = 0;
    for (auto idx : selected_) lag = std::max(lag, (*pool_)[idx].max_lag());
    return lag;
}

ModelStructure ModelStructure::with_coefficients(std::vector<double> theta) const {
    return {pool_, selected_, std::move(theta)};
}

double ModelStructure::predict(std::span<const double> y, std::span<const double> u,
                               std::size_t k) const noexcept {
    const auto& terms = pool_->terms();
    double acc = 0.0;
    for (std::size_t i = 0; i < selected_.size(); ++i) acc += theta_[i] * terms[selected_[i]].evaluate(y, u, k);
    return acc;
}

std::string ModelStructure::to_string() const {
    std::ostringstream os;
    os.precision(6);
    os << "y(k) =";
    for (std::size_t i = 0; i < selected_.size(); ++i) {
        const double c = theta_.empty() ? 1.0 : theta_[i];
        os << (c < 0 ? " - " : (i == 0 ? " " : " + ")) << std::abs(c);
        const auto& t = term(i);
        if (!t.is_constant()) os << ' ' << t.to_string();
    }
    return os.str();
}

ModelStructure make_structure(const PoolConfig& config, const std::vector<TermSpec>& terms,
                              std::vector<double> coefficients) {
    if (coefficients.size() != terms.size())
        throw Error(Errc::InvalidArgument, "one coefficient per term required");
    auto pool = std::make_shared<const TermPool>(generate_term_pool(config));
    std::vector<std::pair<std::size_t, double>> entries;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const auto idx = pool->find(terms[i]);
        if (idx == pool->size())
            throw Error(Errc::InvalidArgument, "term " + terms[i].to_string() + " outside pool config");
        entries.emplace_back(idx, coefficients[i]);
    }
    std::sort(entries.begin(), entries.end());
    std::vector<std::size_t> selected;
    std::vector<double> theta;
    for (const auto& [idx, c] : entries) {
        selected.push_back(idx);
        theta.push_back(c);
    }
    return {std::move(pool), std::move(selected), std::move(theta)};
}

ClusterCoefficients cluster_coefficients(const ModelStructure& structure) {
    ClusterCoefficients sums;
    const auto& theta = structure.coefficients();
    for (std::size_t i = 0; i < structure.xi(); ++i)
        sums[structure.term(i).label()] += theta.empty() ? 0.0 : theta[i];
    return sums;
}

double cluster_sum(const ClusterCoefficients& sums, ClusterLabel label) noexcept {
    const auto it = sums.find(label);
    return it == sums.end() ? 0.0 : it->second;
}

double StaticPolynomial::operator()(double u_bar) const noexcept { return eval_static(*this, u_bar); }

bool has_polynomial_static(const ModelStructure& structure) noexcept {
    for (std::size_t i = 0; i < structure.xi(); ++i)
        if (!polynomial_static_cluster(structure.term(i).label())) return false;
    return true;
}

StaticPolynomial static_polynomial(const ModelStructure& structure) {
    if (!has_polynomial_static(structure))
        throw Error(Errc::InvalidArgument,
                    "static polynomial requires a structure without nonlinear-output or cross-term clusters");
    const auto sums = cluster_coefficients(structure);
    const double denom = 1.0 - cluster_sum(sums, {1, 0});
    if (std::abs(denom) < kDegenerateGainTolerance)
        throw Error(Errc::DegenerateStaticGain, "|1 - Sigma_y| below tolerance");
    const int degree = structure.pool() ? structure.pool()->config().n_l : 0;
    StaticPolynomial poly;
    poly.coefficients.resize(static_cast<std::size_t>(degree) + 1, 0.0);
    for (int m = 0; m <= degree; ++m)
        poly.coefficients[static_cast<std::size_t>(m)] = cluster_sum(sums, {0, m}) / denom;
    return poly;
}

double eval_static(const StaticPolynomial& poly, double u_bar) noexcept {
    double acc = 0.0;
    for (auto it = poly.coefficients.rbegin(); it != poly.coefficients.rend(); ++it) acc = acc * u_bar + *it;
    return acc;
}

double buck_static_reference(double u_bar, double v_d) noexcept {
    return 4.0 * v_d / 3.0 - v_d / 3.0 * u_bar;
}

}  // namespace gbid

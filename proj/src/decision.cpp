#include "gbid/decision.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gbid/error.hpp"

namespace gbid {

namespace {

constexpr std::size_t kObjectives = 3;

// Orders entries by score (ascending or descending), then xi, then E, then genome.
Selection rank_entries(const ParetoArchive& archive, const std::vector<double>& score, bool higher_is_better) {
    std::vector<std::size_t> order(archive.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (score[a] != score[b]) return higher_is_better ? score[a] > score[b] : score[a] < score[b];
        const auto& oa = archive.entries[a].objectives;
        const auto& ob = archive.entries[b].objectives;
        if (oa.xi != ob.xi) return oa.xi < ob.xi;
        if (oa.e_dyn != ob.e_dyn) return oa.e_dyn < ob.e_dyn;
        if (archive.entries[a].genome != archive.entries[b].genome)
            return archive.entries[a].genome < archive.entries[b].genome;
        return a < b;
    });
    Selection s;
    s.selected = order.front();
    for (auto i : order) s.ranking.push_back({i, score[i]});
    return s;
}

}  // namespace

void PreferenceSpec::validate() const {
    if (rankings.size() < 2) throw Error(Errc::InvalidConfig, "preference needs at least two objective rankings");
    auto sorted = rankings;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i)
        if (sorted[i] != static_cast<int>(i) + 1)
            throw Error(Errc::InvalidConfig, "objective rankings must be a permutation of 1..n");
    if (!(intensity >= 1.0) || !std::isfinite(intensity))
        throw Error(Errc::InvalidConfig, "preference intensity must be finite and >= 1");
}

std::vector<std::vector<double>> preference_relations(const PreferenceSpec& pref) {
    pref.validate();
    const std::size_t n = pref.rankings.size();
    std::vector<std::vector<double>> tau(n, std::vector<double>(n, 1.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double delta = static_cast<double>(pref.rankings[j] - pref.rankings[i]) / static_cast<double>(n - 1);
            tau[i][j] = std::pow(pref.intensity, delta);
        }
    return tau;
}

WeightVector priority_weights(const PreferenceSpec& pref) {
    const auto tau = preference_relations(pref);
    const std::size_t n = tau.size();
    WeightVector out;
    out.w.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double product = 1.0;
        for (double t : tau[i]) product *= t;
        out.w[i] = std::pow(product, 1.0 / static_cast<double>(n));
    }
    const double total = std::accumulate(out.w.begin(), out.w.end(), 0.0);
    for (auto& w : out.w) w /= total;
    return out;
}

Selection mmd_select(const ParetoArchive& archive) {
    if (archive.empty()) throw Error(Errc::ArchiveTooSmall, "MMD needs a non-empty archive");
    const auto objs = archive.objectives();
    std::array<double, kObjectives> lo{};
    std::array<double, kObjectives> hi{};
    lo = hi = objs.front().values();
    for (const auto& o : objs) {
        const auto v = o.values();
        for (std::size_t p = 0; p < kObjectives; ++p) {
            lo[p] = std::min(lo[p], v[p]);
            hi[p] = std::max(hi[p], v[p]);
        }
    }
    std::vector<double> distance(objs.size(), 0.0);
    for (std::size_t j = 0; j < objs.size(); ++j) {
        const auto v = objs[j].values();
        for (std::size_t p = 0; p < kObjectives; ++p)
            if (hi[p] > lo[p]) distance[j] += std::abs((v[p] - lo[p]) / (hi[p] - lo[p]));
    }
    return rank_entries(archive, distance, false);
}

Selection mtd_select(const ParetoArchive& archive, const WeightVector& weights) {
    if (archive.size() < 2) throw Error(Errc::ArchiveTooSmall, "MTD needs at least two archive entries");
    if (weights.w.size() != kObjectives) throw Error(Errc::InvalidArgument, "MTD needs one weight per objective");
    const auto objs = archive.objectives();
    const double others = static_cast<double>(objs.size() - 1);
    std::vector<double> rank(objs.size(), 0.0);
    for (std::size_t i = 0; i < objs.size(); ++i) {
        const auto vi = objs[i].values();
        double product = 1.0;
        for (std::size_t p = 0; p < kObjectives; ++p) {
            std::size_t wins = 0;
            for (const auto& oj : objs)
                if (oj.values()[p] - vi[p] > 0.0) ++wins;
            product *= std::pow(static_cast<double>(wins) / others, weights.w[p]);
        }
        rank[i] = std::pow(product, 1.0 / static_cast<double>(kObjectives));
    }
    return rank_entries(archive, rank, true);
}

}  // namespace gbid

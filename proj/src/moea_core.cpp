#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "gbid/error.hpp"
#include "gbid/moea.hpp"

namespace gbid {

namespace {

// Objectives mapped to [0, 1] per component using the range of non-penalty values;
// penalty values are clipped to the top of that range.
std::vector<std::array<double, 3>> normalized(std::span<const ObjectiveVector> objectives) {
    std::array<double, 3> lo{};
    std::array<double, 3> hi{};
    lo.fill(std::numeric_limits<double>::infinity());
    hi.fill(-std::numeric_limits<double>::infinity());
    for (const auto& o : objectives) {
        const auto v = o.values();
        for (std::size_t p = 0; p < 3; ++p) {
            if (v[p] >= kPenalty) continue;
            lo[p] = std::min(lo[p], v[p]);
            hi[p] = std::max(hi[p], v[p]);
        }
    }
    std::vector<std::array<double, 3>> out(objectives.size());
    for (std::size_t i = 0; i < objectives.size(); ++i) {
        const auto v = objectives[i].values();
        for (std::size_t p = 0; p < 3; ++p) {
            if (!(hi[p] > lo[p])) {
                out[i][p] = (std::isfinite(lo[p]) && v[p] < kPenalty) ? 0.0 : 1.0;
                continue;
            }
            out[i][p] = (std::min(v[p], hi[p]) - lo[p]) / (hi[p] - lo[p]);
        }
    }
    return out;
}

double distance(const std::array<double, 3>& a, const std::array<double, 3>& b) noexcept {
    double acc = 0.0;
    for (std::size_t p = 0; p < 3; ++p) acc += (a[p] - b[p]) * (a[p] - b[p]);
    return std::sqrt(acc);
}

std::size_t crowded_tournament(const Population& pop, Rng& rng) {
    const std::size_t a = rng.index(pop.size());
    const std::size_t b = rng.index(pop.size());
    const auto& ia = pop[a];
    const auto& ib = pop[b];
    if (ia.rank != ib.rank) return ia.rank < ib.rank ? a : b;
    if (ia.crowding != ib.crowding) return ia.crowding > ib.crowding ? a : b;
    return rng.uniform() < 0.5 ? a : b;
}

std::size_t binary_tournament(const Population& archive, Rng& rng) {
    const std::size_t a = rng.index(archive.size());
    const std::size_t b = rng.index(archive.size());
    if (archive[a].fitness != archive[b].fitness) return archive[a].fitness < archive[b].fitness ? a : b;
    return rng.uniform() < 0.5 ? a : b;
}

}  // namespace

Genome::Genome(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
    for (auto& b : bits_)
        if (b > 1) throw Error(Errc::InvalidArgument, "genome bits must be 0 or 1");
}

Genome Genome::from_string(const std::string& bits) {
    std::vector<std::uint8_t> out;
    out.reserve(bits.size());
    for (char c : bits) {
        if (c != '0' && c != '1') throw Error(Errc::Parse, "genome string must contain only 0 and 1");
        out.push_back(c == '1' ? 1 : 0);
    }
    return Genome(std::move(out));
}

Genome Genome::from_indices(std::size_t n, std::span<const std::size_t> selected) {
    Genome g(n);
    for (auto i : selected) g.set(i, true);
    return g;
}

std::size_t Genome::count() const noexcept {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

std::vector<std::size_t> Genome::selected() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < bits_.size(); ++i)
        if (bits_[i]) out.push_back(i);
    return out;
}

std::string Genome::to_string() const {
    std::string s(bits_.size(), '0');
    for (std::size_t i = 0; i < bits_.size(); ++i)
        if (bits_[i]) s[i] = '1';
    return s;
}

std::size_t GenomeHash::operator()(const Genome& g) const noexcept {
    std::uint64_t h = 1469598103934665603ULL;
    for (auto b : g.bits()) {
        h ^= b;
        h *= 1099511628211ULL;
    }
    return static_cast<std::size_t>(h ^ g.size());
}

ModelStructure decode(const Genome& genome, std::shared_ptr<const TermPool> pool) {
    if (!pool || genome.size() != pool->size())
        throw Error(Errc::InvalidArgument, "genome length must equal pool size");
    return {std::move(pool), genome.selected()};
}

bool dominates(std::span<const double> a, std::span<const double> b) noexcept {
    bool strict = false;
    for (std::size_t p = 0; p < a.size(); ++p) {
        if (a[p] > b[p]) return false;
        if (a[p] < b[p]) strict = true;
    }
    return strict;
}

bool dominates(const ObjectiveVector& a, const ObjectiveVector& b) noexcept {
    const auto va = a.values();
    const auto vb = b.values();
    return dominates(std::span<const double>(va), std::span<const double>(vb));
}

bool weakly_dominates(std::span<const double> a, std::span<const double> b) noexcept {
    for (std::size_t p = 0; p < a.size(); ++p)
        if (a[p] > b[p]) return false;
    return true;
}

bool weakly_dominates(const ObjectiveVector& a, const ObjectiveVector& b) noexcept {
    const auto va = a.values();
    const auto vb = b.values();
    return weakly_dominates(std::span<const double>(va), std::span<const double>(vb));
}

Algorithm algorithm_from_string(const std::string& name) {
    if (name == "nsga2" || name == "NSGA2" || name == "NSGA-II") return Algorithm::Nsga2;
    if (name == "spea2" || name == "SPEA2" || name == "SPEA-II") return Algorithm::Spea2;
    throw Error(Errc::InvalidConfig, "unknown algorithm '" + name + "'");
}

std::string to_string(Algorithm algorithm) { return algorithm == Algorithm::Nsga2 ? "nsga2" : "spea2"; }

MoeaConfig MoeaConfig::defaults(Algorithm algorithm) {
    MoeaConfig c;
    c.algorithm = algorithm;
    if (algorithm == Algorithm::Spea2) {
        c.p_c = 0.7;
        c.p_m = 0.008;
    }
    return c;
}

void MoeaConfig::validate() const {
    if (population < 2 || population % 2 != 0) throw Error(Errc::InvalidConfig, "population must be even and >= 2");
    if (algorithm == Algorithm::Spea2 && archive_size < 1) throw Error(Errc::InvalidConfig, "archive size must be >= 1");
    if (!(p_c >= 0.0 && p_c <= 1.0) || !(p_m >= 0.0 && p_m <= 1.0))
        throw Error(Errc::InvalidConfig, "crossover and mutation probabilities must lie in [0, 1]");
    if (budget < population) throw Error(Errc::InvalidConfig, "budget must be at least the population size");
    if (runs < 1) throw Error(Errc::InvalidConfig, "at least one run is required");
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    engine_.seed(seq);
}

std::vector<Genome> reproduce(const Population& parents, std::size_t offspring, Algorithm algorithm,
                              double p_c, double p_m, Rng& rng) {
    if (parents.empty()) throw Error(Errc::InvalidArgument, "reproduction needs parents");
    const std::size_t n = parents.front().genome.size();
    std::vector<Genome> children;
    children.reserve(offspring);
    auto select = [&]() {
        return algorithm == Algorithm::Nsga2 ? crowded_tournament(parents, rng) : binary_tournament(parents, rng);
    };
    for (std::size_t i = 0; i < offspring / 2; ++i) {
        const auto& bp = parents[select()].genome;
        const auto& bq = parents[select()].genome;
        Genome cp = bp;
        Genome cq = bq;
        if (p_c > rng.uniform()) {
            for (std::size_t j = 0; j < n; ++j) {
                if (0.5 > rng.uniform()) {
                    cp.set(j, bq.test(j));
                    cq.set(j, bp.test(j));
                }
            }
        }
        children.push_back(std::move(cp));
        children.push_back(std::move(cq));
    }
    for (auto& child : children)
        for (std::size_t j = 0; j < n; ++j)
            if (p_m > rng.uniform()) child.flip(j);
    return children;
}

std::vector<std::vector<std::size_t>> fast_non_dominated_sort(std::span<const ObjectiveVector> objectives) {
    const std::size_t n = objectives.size();
    std::vector<std::vector<std::size_t>> dominated_by(n);
    std::vector<std::size_t> domination_count(n, 0);
    std::vector<std::vector<std::size_t>> fronts(1);
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = 0; q < n; ++q) {
            if (p == q) continue;
            if (dominates(objectives[p], objectives[q]))
                dominated_by[p].push_back(q);
            else if (dominates(objectives[q], objectives[p]))
                ++domination_count[p];
        }
        if (domination_count[p] == 0) fronts[0].push_back(p);
    }
    for (std::size_t i = 0; !fronts[i].empty(); ++i) {
        std::vector<std::size_t> next;
        for (auto p : fronts[i])
            for (auto q : dominated_by[p])
                if (--domination_count[q] == 0) next.push_back(q);
        std::sort(next.begin(), next.end());
        fronts.push_back(std::move(next));
    }
    fronts.pop_back();
    return fronts;
}

std::vector<double> crowding_distance(std::span<const ObjectiveVector> objectives,
                                      std::span<const std::size_t> front) {
    const std::size_t m = front.size();
    std::vector<double> dist(m, 0.0);
    if (m == 0) return dist;
    std::vector<ObjectiveVector> members;
    members.reserve(m);
    for (auto i : front) members.push_back(objectives[i]);
    const auto norm = normalized(members);
    std::vector<std::size_t> order(m);
    for (std::size_t p = 0; p < 3; ++p) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return norm[a][p] < norm[b][p]; });
        dist[order.front()] = std::numeric_limits<double>::infinity();
        dist[order.back()] = std::numeric_limits<double>::infinity();
        const double range = norm[order.back()][p] - norm[order.front()][p];
        if (!(range > 0.0)) continue;
        for (std::size_t i = 1; i + 1 < m; ++i)
            dist[order[i]] += (norm[order[i + 1]][p] - norm[order[i - 1]][p]) / range;
    }
    return dist;
}

std::vector<double> spea2_fitness(std::span<const ObjectiveVector> objectives) {
    const std::size_t n = objectives.size();
    std::vector<std::size_t> strength(n, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j && dominates(objectives[i], objectives[j])) ++strength[i];
    std::vector<double> fitness(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j && dominates(objectives[j], objectives[i])) fitness[i] += static_cast<double>(strength[j]);

    const auto norm = normalized(objectives);
    const auto k = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
    std::vector<double> d;
    for (std::size_t i = 0; i < n; ++i) {
        d.clear();
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) d.push_back(distance(norm[i], norm[j]));
        double sigma = 0.0;
        if (!d.empty()) {
            const std::size_t kk = std::min(k == 0 ? std::size_t{0} : k - 1, d.size() - 1);
            std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(kk), d.end());
            sigma = d[kk];
        }
        fitness[i] += 1.0 / (sigma + 2.0);
    }
    return fitness;
}

std::vector<std::size_t> spea2_environmental_selection(std::span<const ObjectiveVector> objectives,
                                                       std::span<const double> fitness,
                                                       std::size_t archive_size) {
    const std::size_t n = objectives.size();
    std::vector<std::size_t> chosen;
    for (std::size_t i = 0; i < n; ++i)
        if (fitness[i] < 1.0) chosen.push_back(i);

    if (chosen.size() < archive_size) {
        std::vector<std::size_t> rest;
        for (std::size_t i = 0; i < n; ++i)
            if (!(fitness[i] < 1.0)) rest.push_back(i);
        std::stable_sort(rest.begin(), rest.end(), [&](std::size_t a, std::size_t b) { return fitness[a] < fitness[b]; });
        for (std::size_t i = 0; i < rest.size() && chosen.size() < archive_size; ++i) chosen.push_back(rest[i]);
        std::sort(chosen.begin(), chosen.end());
        return chosen;
    }
    if (chosen.size() == archive_size) return chosen;

    // Truncation: repeatedly drop the member whose sorted neighbour-distance list is
    // lexicographically smallest.
    std::vector<ObjectiveVector> members;
    for (auto i : chosen) members.push_back(objectives[i]);
    const auto norm = normalized(members);
    const std::size_t m = chosen.size();
    std::vector<std::vector<std::pair<double, std::size_t>>> neighbours(m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j)
            if (j != i) neighbours[i].emplace_back(distance(norm[i], norm[j]), j);
        std::sort(neighbours[i].begin(), neighbours[i].end());
    }
    std::vector<bool> alive(m, true);
    std::size_t remaining = m;
    while (remaining > archive_size) {
        std::size_t victim = m;
        for (std::size_t i = 0; i < m; ++i) {
            if (!alive[i]) continue;
            if (victim == m) {
                victim = i;
                continue;
            }
            const auto& a = neighbours[i];
            const auto& b = neighbours[victim];
            bool smaller = false;
            for (std::size_t t = 0; t < a.size() && t < b.size(); ++t) {
                if (a[t].first != b[t].first) {
                    smaller = a[t].first < b[t].first;
                    break;
                }
            }
            if (smaller) victim = i;
        }
        alive[victim] = false;
        --remaining;
        for (std::size_t i = 0; i < m; ++i) {
            if (!alive[i]) continue;
            auto& list = neighbours[i];
            list.erase(std::remove_if(list.begin(), list.end(), [&](const auto& e) { return e.second == victim; }),
                       list.end());
        }
    }
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < m; ++i)
        if (alive[i]) out.push_back(chosen[i]);
    return out;
}

std::vector<std::size_t> non_dominated_indices(std::span<const ObjectiveVector> objectives) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < objectives.size(); ++i) {
        bool dominated = false;
        for (std::size_t j = 0; j < objectives.size() && !dominated; ++j)
            dominated = j != i && dominates(objectives[j], objectives[i]);
        if (!dominated) out.push_back(i);
    }
    return out;
}

}  // namespace gbid

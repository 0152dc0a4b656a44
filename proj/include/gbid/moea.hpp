#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "gbid/estimation.hpp"
#include "gbid/narx_model.hpp"

namespace gbid {

/// Fixed-length binary vector; bit m set means pool term m is selected.
class Genome {
public:
    Genome() = default;
    explicit Genome(std::size_t n) : bits_(n, 0) {}
    explicit Genome(std::vector<std::uint8_t> bits);

    static Genome from_string(const std::string& bits);
    static Genome from_indices(std::size_t n, std::span<const std::size_t> selected);

    [[nodiscard]] std::size_t size() const noexcept { return bits_.size(); }
    [[nodiscard]] bool test(std::size_t i) const { return bits_.at(i) != 0; }
    void set(std::size_t i, bool value) { bits_.at(i) = value ? 1 : 0; }
    void flip(std::size_t i) { bits_.at(i) ^= 1; }
    [[nodiscard]] std::size_t count() const noexcept;
    [[nodiscard]] std::vector<std::size_t> selected() const;
    [[nodiscard]] std::string to_string() const;
    [[nodiscard]] const std::vector<std::uint8_t>& bits() const noexcept { return bits_; }

    auto operator<=>(const Genome&) const = default;

private:
    std::vector<std::uint8_t> bits_;
};

struct GenomeHash {
    std::size_t operator()(const Genome& g) const noexcept;
};

ModelStructure decode(const Genome& genome, std::shared_ptr<const TermPool> pool);

/// Pareto dominance for minimization: a <= b everywhere and a < b somewhere.
bool dominates(std::span<const double> a, std::span<const double> b) noexcept;
bool dominates(const ObjectiveVector& a, const ObjectiveVector& b) noexcept;
/// a <= b in every component.
bool weakly_dominates(std::span<const double> a, std::span<const double> b) noexcept;
bool weakly_dominates(const ObjectiveVector& a, const ObjectiveVector& b) noexcept;

enum class Algorithm { Nsga2, Spea2 };

Algorithm algorithm_from_string(const std::string& name);
std::string to_string(Algorithm algorithm);

struct MoeaConfig {
    Algorithm algorithm = Algorithm::Nsga2;
    std::size_t population = 50;
    std::size_t archive_size = 50;  // SPEA-II only
    double p_c = 0.9;
    double p_m = 0.006;
    std::size_t budget = 25000;     // unique genome evaluations per run
    std::size_t runs = 100;
    std::uint64_t seed = 1;

    /// Control parameters used for each algorithm on the buck problem.
    static MoeaConfig defaults(Algorithm algorithm);
    void validate() const;
};

/// Uniform draws with a fixed, platform-independent mapping from the engine output.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

    double uniform() noexcept { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    std::size_t index(std::size_t n) noexcept { return static_cast<std::size_t>(uniform() * static_cast<double>(n)); }
    std::mt19937_64& engine() noexcept { return engine_; }

private:
    std::mt19937_64 engine_;
};

struct Individual {
    Genome genome;
    ObjectiveVector objectives;
    std::size_t rank = 0;       // NSGA-II front index
    double crowding = 0.0;      // NSGA-II crowding distance
    double fitness = 0.0;       // SPEA-II raw fitness + density
};

using Population = std::vector<Individual>;

/// Selection, parameterized uniform crossover and flip-bit mutation for one generation.
/// NSGA-II parents need rank/crowding set; SPEA-II parents are the archive with fitness set.
std::vector<Genome> reproduce(const Population& parents, std::size_t offspring, Algorithm algorithm,
                              double p_c, double p_m, Rng& rng);

/// Fronts as index lists into `objectives`, best first.
std::vector<std::vector<std::size_t>> fast_non_dominated_sort(std::span<const ObjectiveVector> objectives);

/// Crowding distance of each member of one front (same order as `front`).
std::vector<double> crowding_distance(std::span<const ObjectiveVector> objectives,
                                      std::span<const std::size_t> front);

/// SPEA-II fitness (raw + density) of every member of a combined population.
std::vector<double> spea2_fitness(std::span<const ObjectiveVector> objectives);

/// SPEA-II environmental selection; returns indices of the next archive.
std::vector<std::size_t> spea2_environmental_selection(std::span<const ObjectiveVector> objectives,
                                                       std::span<const double> fitness,
                                                       std::size_t archive_size);

/// Non-dominated subset (indices) by exhaustive pairwise comparison.
std::vector<std::size_t> non_dominated_indices(std::span<const ObjectiveVector> objectives);

struct FrontEntry {
    Genome genome;
    ObjectiveVector objectives;
};

/// Binary search problem: genome length plus objective function.
struct Problem {
    std::size_t n_bits = 0;
    std::function<ObjectiveVector(const Genome&)> evaluate;
};

Problem make_problem(const Evaluator& evaluator);

/// Thread-safe genome -> objectives memo shared between runs on the same problem.
class EvaluationCache {
public:
    std::optional<ObjectiveVector> find(const Genome& genome) const;
    void insert(const Genome& genome, const ObjectiveVector& objectives);
    [[nodiscard]] std::size_t size() const;

private:
    mutable std::mutex mutex_;
    std::unordered_map<Genome, ObjectiveVector, GenomeHash> map_;
};

struct RunResult {
    std::vector<FrontEntry> front;       // non-dominated set of every genome evaluated in the run
    std::vector<FrontEntry> population;  // final population (NSGA-II) or archive (SPEA-II)
    std::size_t unique_evaluations = 0;
    std::size_t requests = 0;
    std::size_t generations = 0;
};

/// Called after every generation with the best-so-far non-dominated set.
using GenerationObserver = std::function<void(std::size_t generation, std::span<const FrontEntry> front)>;

/// The run ends when the unique-evaluation budget is spent, every genome has been seen,
/// or evaluation requests (memo hits included) reach kRequestFactor x budget.
inline constexpr std::size_t kRequestFactor = 4;

RunResult run_nsga2(const Problem& problem, const MoeaConfig& config, std::uint64_t run_index,
                    EvaluationCache* cache = nullptr, const GenerationObserver& observer = {});
RunResult run_spea2(const Problem& problem, const MoeaConfig& config, std::uint64_t run_index,
                    EvaluationCache* cache = nullptr, const GenerationObserver& observer = {});
RunResult run_moea(const Problem& problem, const MoeaConfig& config, std::uint64_t run_index,
                   EvaluationCache* cache = nullptr, const GenerationObserver& observer = {});

/// config.runs independent runs on `jobs` worker threads; result i belongs to run i.
std::vector<RunResult> run_many(const Problem& problem, const MoeaConfig& config, std::size_t jobs,
                                EvaluationCache* cache = nullptr);

struct ArchiveEntry {
    Genome genome;
    ObjectiveVector objectives;
    std::size_t run_id = 0;
};

struct ParetoArchive {
    std::vector<ArchiveEntry> entries;

    [[nodiscard]] std::size_t size() const noexcept { return entries.size(); }
    [[nodiscard]] bool empty() const noexcept { return entries.empty(); }
    [[nodiscard]] std::vector<ObjectiveVector> objectives() const;
};

/// Union of run fronts, duplicate genomes collapsed (first run wins), dominance filtered.
/// Penalty-bearing entries are dropped whenever a fully finite entry exists.
ParetoArchive accumulate(std::span<const RunResult> runs);
ParetoArchive accumulate(std::span<const std::vector<FrontEntry>> fronts);

/// Fraction of B's entries weakly dominated by at least one entry of A.
double set_coverage(std::span<const ObjectiveVector> a, std::span<const ObjectiveVector> b);
double set_coverage(const ParetoArchive& a, const ParetoArchive& b);

/// Exact hypervolume of a three-objective point set w.r.t. a reference point (minimization).
double hypervolume3(std::span<const std::array<double, 3>> points, const std::array<double, 3>& reference);

}  // namespace gbid

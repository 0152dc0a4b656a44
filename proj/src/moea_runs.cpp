#include <algorithm>
#include <atomic>
#include <thread>

#include "gbid/error.hpp"
#include "gbid/moea.hpp"

namespace gbid {

namespace {

// Per-run bookkeeping: exact-genome memo (drives the unique-evaluation budget) and the
// best-so-far non-dominated set.
class RunState {
public:
    RunState(const Problem& problem, const MoeaConfig& config, EvaluationCache* cache)
        : problem_(problem), config_(config), cache_(cache) {
        if (problem.n_bits < 63) space_ = std::size_t{1} << problem.n_bits;
    }

    ObjectiveVector evaluate(const Genome& genome) {
        ++requests_;
        if (const auto it = memo_.find(genome); it != memo_.end()) return it->second;
        std::optional<ObjectiveVector> value;
        if (cache_) value = cache_->find(genome);
        if (!value) {
            value = problem_.evaluate(genome);
            if (cache_) cache_->insert(genome, *value);
        }
        memo_.emplace(genome, *value);
        insert_front(genome, *value);
        return *value;
    }

    [[nodiscard]] bool exhausted() const noexcept {
        return memo_.size() >= config_.budget || requests_ >= kRequestFactor * config_.budget ||
               (space_ != 0 && memo_.size() >= space_);
    }

    [[nodiscard]] const std::vector<FrontEntry>& front() const noexcept { return front_; }

    RunResult finish(std::size_t generations, std::vector<FrontEntry> population) {
        RunResult r;
        r.front = front_;
        std::sort(r.front.begin(), r.front.end(),
                  [](const FrontEntry& a, const FrontEntry& b) { return a.genome < b.genome; });
        r.population = std::move(population);
        r.unique_evaluations = memo_.size();
        r.requests = requests_;
        r.generations = generations;
        return r;
    }

private:
    void insert_front(const Genome& genome, const ObjectiveVector& v) {
        for (const auto& e : front_)
            if (dominates(e.objectives, v)) return;
        front_.erase(std::remove_if(front_.begin(), front_.end(),
                                    [&](const FrontEntry& e) { return dominates(v, e.objectives); }),
                     front_.end());
        front_.push_back({genome, v});
    }

    const Problem& problem_;
    const MoeaConfig& config_;
    EvaluationCache* cache_;
    std::unordered_map<Genome, ObjectiveVector, GenomeHash> memo_;
    std::vector<FrontEntry> front_;
    std::size_t requests_ = 0;
    std::size_t space_ = 0;
};

Genome random_genome(std::size_t n, Rng& rng) {
    Genome g(n);
    for (std::size_t j = 0; j < n; ++j) g.set(j, rng.uniform() < 0.5);
    return g;
}

Population initial_population(const Problem& problem, const MoeaConfig& config, Rng& rng, RunState& state) {
    Population pop(config.population);
    for (auto& ind : pop) ind.genome = random_genome(problem.n_bits, rng);
    for (auto& ind : pop) ind.objectives = state.evaluate(ind.genome);
    return pop;
}

std::vector<ObjectiveVector> objectives_of(const Population& pop) {
    std::vector<ObjectiveVector> out;
    out.reserve(pop.size());
    for (const auto& ind : pop) out.push_back(ind.objectives);
    return out;
}

// Survival for NSGA-II: whole fronts while they fit, then the most crowded-apart of the
// next front. Rank and crowding are kept for the next crowded tournament.
Population nsga2_survivors(Population combined, std::size_t size) {
    const auto objs = objectives_of(combined);
    const auto fronts = fast_non_dominated_sort(objs);
    Population next;
    next.reserve(size);
    for (std::size_t r = 0; r < fronts.size() && next.size() < size; ++r) {
        const auto& front = fronts[r];
        const auto crowd = crowding_distance(objs, front);
        std::vector<std::size_t> order(front.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        if (next.size() + front.size() > size)
            std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return crowd[a] > crowd[b]; });
        for (std::size_t i = 0; i < order.size() && next.size() < size; ++i) {
            auto ind = combined[front[order[i]]];
            ind.rank = r;
            ind.crowding = crowd[order[i]];
            next.push_back(std::move(ind));
        }
    }
    return next;
}

std::vector<FrontEntry> as_entries(const Population& pop) {
    std::vector<FrontEntry> out;
    out.reserve(pop.size());
    for (const auto& ind : pop) out.push_back({ind.genome, ind.objectives});
    return out;
}

}  // namespace

std::optional<ObjectiveVector> EvaluationCache::find(const Genome& genome) const {
    std::lock_guard lock(mutex_);
    if (const auto it = map_.find(genome); it != map_.end()) return it->second;
    return std::nullopt;
}

void EvaluationCache::insert(const Genome& genome, const ObjectiveVector& objectives) {
    std::lock_guard lock(mutex_);
    map_.emplace(genome, objectives);
}

std::size_t EvaluationCache::size() const {
    std::lock_guard lock(mutex_);
    return map_.size();
}

Problem make_problem(const Evaluator& evaluator) {
    return {evaluator.pool()->size(), [&evaluator](const Genome& g) { return evaluator.evaluate(g.selected()); }};
}

RunResult run_nsga2(const Problem& problem, const MoeaConfig& config, std::uint64_t run_index,
                    EvaluationCache* cache, const GenerationObserver& observer) {
    config.validate();
    if (config.algorithm != Algorithm::Nsga2) throw Error(Errc::InvalidConfig, "run_nsga2 needs algorithm nsga2");
    Rng rng(config.seed, run_index);
    RunState state(problem, config, cache);
    auto pop = nsga2_survivors(initial_population(problem, config, rng, state), config.population);
    std::size_t generation = 0;
    if (observer) observer(generation, state.front());
    while (!state.exhausted()) {
        auto children = reproduce(pop, config.population, Algorithm::Nsga2, config.p_c, config.p_m, rng);
        Population combined = pop;
        for (auto& g : children) {
            Individual ind;
            ind.objectives = state.evaluate(g);
            ind.genome = std::move(g);
            combined.push_back(std::move(ind));
        }
        pop = nsga2_survivors(std::move(combined), config.population);
        ++generation;
        if (observer) observer(generation, state.front());
    }
    return state.finish(generation, as_entries(pop));
}

RunResult run_spea2(const Problem& problem, const MoeaConfig& config, std::uint64_t run_index,
                    EvaluationCache* cache, const GenerationObserver& observer) {
    config.validate();
    if (config.algorithm != Algorithm::Spea2) throw Error(Errc::InvalidConfig, "run_spea2 needs algorithm spea2");
    Rng rng(config.seed, run_index);
    RunState state(problem, config, cache);
    Population pop = initial_population(problem, config, rng, state);
    Population archive;
    std::size_t generation = 0;
    for (;;) {
        Population combined = pop;
        combined.insert(combined.end(), archive.begin(), archive.end());
        const auto objs = objectives_of(combined);
        const auto fitness = spea2_fitness(objs);
        const auto keep = spea2_environmental_selection(objs, fitness, config.archive_size);
        archive.clear();
        for (auto i : keep) {
            archive.push_back(combined[i]);
            archive.back().fitness = fitness[i];
        }
        if (observer) observer(generation, state.front());
        if (state.exhausted()) break;
        auto children = reproduce(archive, config.population, Algorithm::Spea2, config.p_c, config.p_m, rng);
        pop.clear();
        for (auto& g : children) {
            Individual ind;
            ind.objectives = state.evaluate(g);
            ind.genome = std::move(g);
            pop.push_back(std::move(ind));
        }
        ++generation;
    }
    return state.finish(generation, as_entries(archive));
}

RunResult run_moea(const Problem& problem, const MoeaConfig& config, std::uint64_t run_index,
                   EvaluationCache* cache, const GenerationObserver& observer) {
    return config.algorithm == Algorithm::Nsga2 ? run_nsga2(problem, config, run_index, cache, observer)
                                                : run_spea2(problem, config, run_index, cache, observer);
}

std::vector<RunResult> run_many(const Problem& problem, const MoeaConfig& config, std::size_t jobs,
                                EvaluationCache* cache) {
    config.validate();
    std::vector<RunResult> results(config.runs);
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;
    auto worker = [&]() {
        for (std::size_t i = next++; i < config.runs; i = next++) {
            try {
                results[i] = run_moea(problem, config, i, cache);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
    };
    jobs = std::clamp<std::size_t>(jobs, 1, config.runs);
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < jobs; ++t) pool.emplace_back(worker);
    }
    if (error) std::rethrow_exception(error);
    return results;
}

}  // namespace gbid

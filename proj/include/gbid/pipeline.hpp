#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gbid/dataio.hpp"
#include "gbid/decision.hpp"
#include "gbid/moea.hpp"
#include "gbid/serialization.hpp"

namespace gbid {

enum class DataKind { Synthetic, Csv };

struct DataSource {
    DataKind kind = DataKind::Synthetic;
    // synthetic
    std::string plant = "M3";
    std::optional<Json> plant_model;  // inline model JSON overrides `plant`
    double noise_sigma = 0.05;
    PrbsConfig prbs;
    std::size_t decimation = 1;
    // csv
    std::filesystem::path series_csv;
    std::filesystem::path static_csv;
};

struct PipelineConfig {
    PoolConfig pool{5, 5, 3};
    PruneMode pruning = PruneMode::Clusters;
    DataSource data;
    std::size_t n_est = 100;
    StaticGridSpec grid;
    MoeaConfig moea;
    bool mmd = true;
    std::vector<PreferenceSpec> mtd;
    std::uint64_t seed = 1;  // MOEA seed and output-noise seed

    void validate() const;
};

/// Command-line overrides; unset fields keep the config file's values.
struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> runs;
    std::optional<std::size_t> budget;
};

/// Relative CSV paths resolve against base_dir. Errors are InvalidConfig.
PipelineConfig parse_config(const Json& j, const std::filesystem::path& base_dir = {});
PipelineConfig load_config(const std::filesystem::path& path);
PipelineConfig apply_overrides(PipelineConfig config, const Overrides& overrides);

/// Canonical form with every default filled in; the provenance hash is taken over it.
Json config_to_json(const PipelineConfig& config);
std::string config_hash(const PipelineConfig& config);

/// "# config_hash=<hex> seed=<n>"
std::string provenance(const PipelineConfig& config);

/// `runs/<UTC timestamp>-<hash prefix>` under `root`.
std::filesystem::path default_run_dir(const PipelineConfig& config, const std::filesystem::path& root = "runs");

Series load_series(const PipelineConfig& config);
std::vector<StaticSample> load_static_curve(const PipelineConfig& config);
DatasetBundle load_bundle(const PipelineConfig& config);
std::shared_ptr<const TermPool> build_pool(const PipelineConfig& config);

/// Archive CSV `genome_bits,xi,e_dyn,e_static,run_id`.
void write_archive_csv(const std::filesystem::path& path, const ParetoArchive& archive, const std::string& comment);
ParetoArchive read_archive_csv(const std::filesystem::path& path);

struct IdentifyResult {
    std::shared_ptr<const TermPool> pool;
    DatasetBundle bundle;
    std::vector<RunResult> runs;
    ParetoArchive archive;
    double wall_seconds = 0.0;
};

/// Pool generation, pruning, config.moea.runs MOEA runs and accumulation, in memory.
IdentifyResult identify(const PipelineConfig& config, std::size_t jobs);

/// Estimated model for an archive genome, refit on the estimation segment.
ModelStructure fit_genome(const Genome& genome, const std::shared_ptr<const TermPool>& pool,
                          const DatasetBundle& bundle);

/// Each returns a JSON summary and writes its outputs into out_dir (created if needed).
Json cmd_generate_data(const PipelineConfig& config, const std::filesystem::path& out_dir);
Json cmd_identify(const PipelineConfig& config, const std::filesystem::path& out_dir, std::size_t jobs);
/// Reads an identify output directory. Non-empty `preferences` replace the config's MTD list.
Json cmd_select(const std::filesystem::path& archive_dir, const std::vector<PreferenceSpec>& preferences,
                const std::filesystem::path& out_dir);
/// Validates a model JSON on the held-out segment of the dataset (the CSV when given).
Json cmd_validate(const PipelineConfig& config, const std::filesystem::path& model_path,
                  const std::filesystem::path& data_path, const std::filesystem::path& out_dir);
Json cmd_coverage(const std::filesystem::path& archive_a, const std::filesystem::path& archive_b,
                  const std::filesystem::path& out_dir);

}  // namespace gbid

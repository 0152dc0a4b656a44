#include <CLI11.hpp>

#include <cstdio>
#include <string>

#include "gbid/gbid.h"

namespace {

struct Common {
    std::string config;
    std::string out_dir;
    int64_t seed = -1;
    int64_t runs = -1;
    int64_t budget = -1;
    int64_t jobs = 1;

    gbid_options options() const {
        gbid_options o;
        gbid_options_init(&o);
        o.config_path = config.empty() ? nullptr : config.c_str();
        o.out_dir = out_dir.empty() ? nullptr : out_dir.c_str();
        o.seed = seed;
        o.runs = runs;
        o.budget = budget;
        o.jobs = jobs;
        return o;
    }
};

void add_common(CLI::App* cmd, Common& c, bool search_flags) {
    cmd->add_option("-c,--config", c.config, "pipeline config JSON")->check(CLI::ExistingFile);
    cmd->add_option("-o,--out-dir", c.out_dir, "output directory (default runs/<timestamp>-<hash>)");
    cmd->add_option("--seed", c.seed, "master seed (MOEA and output noise)")->check(CLI::NonNegativeNumber);
    if (search_flags) {
        cmd->add_option("--runs", c.runs, "independent MOEA runs")->check(CLI::PositiveNumber);
        cmd->add_option("--budget", c.budget, "unique function evaluations per run")->check(CLI::PositiveNumber);
        cmd->add_option("--jobs", c.jobs, "worker threads")->check(CLI::PositiveNumber);
    }
}

int finish(gbid_status status, char*& summary) {
    if (status != GBID_OK) {
        std::fprintf(stderr, "gbid: %s\n", gbid_last_error());
        return static_cast<int>(status);
    }
    std::printf("%s\n", summary);
    gbid_string_free(summary);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Grey-box NARX structure selection by multi-objective search"};
    app.require_subcommand(1);
    app.set_version_flag("--version", gbid_version());

    Common common;
    auto* gen = app.add_subcommand("generate-data", "simulate the synthetic plant and write dataset CSVs");
    add_common(gen, common, false);

    auto* ident = app.add_subcommand("identify", "search non-dominated structures and write the archive");
    add_common(ident, common, true);

    std::string archive_dir;
    std::string rankings;
    double intensity = 1.0;
    auto* sel = app.add_subcommand("select", "a posteriori selection (MMD and MTD) from an identify directory");
    sel->add_option("archive", archive_dir, "identify output directory")->required()->check(CLI::ExistingDirectory);
    sel->add_option("-o,--out-dir", common.out_dir, "output directory (default <archive>/selection)");
    sel->add_option("--rankings", rankings, "objective rankings for MTD, e.g. 3,1,2");
    sel->add_option("--intensity", intensity, "preference intensity in [1, 9]")->check(CLI::Range(1.0, 9.0));

    std::string model_path;
    std::string data_path;
    auto* val = app.add_subcommand("validate", "free-run, static and correlation checks on held-out data");
    add_common(val, common, false);
    val->add_option("model", model_path, "model JSON")->required()->check(CLI::ExistingFile);
    val->add_option("--data", data_path, "dataset CSV (k,u,y); default regenerates from the config")
        ->check(CLI::ExistingFile);

    std::string archive_a;
    std::string archive_b;
    auto* cov = app.add_subcommand("coverage", "set coverage between two archive CSVs");
    add_common(cov, common, false);
    cov->add_option("archive_a", archive_a, "archive CSV A")->required()->check(CLI::ExistingFile);
    cov->add_option("archive_b", archive_b, "archive CSV B")->required()->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : GBID_ERR_CONFIG;
    }

    const auto options = common.options();
    char* summary = nullptr;
    if (*gen) return finish(gbid_cmd_generate_data(&options, &summary), summary);
    if (*ident) return finish(gbid_cmd_identify(&options, &summary), summary);
    if (*sel)
        return finish(gbid_cmd_select(&options, archive_dir.c_str(), rankings.empty() ? nullptr : rankings.c_str(),
                                      intensity, &summary),
                      summary);
    if (*val)
        return finish(gbid_cmd_validate(&options, model_path.c_str(), data_path.empty() ? nullptr : data_path.c_str(),
                                        &summary),
                      summary);
    return finish(gbid_cmd_coverage(&options, archive_a.c_str(), archive_b.c_str(), &summary), summary);
}

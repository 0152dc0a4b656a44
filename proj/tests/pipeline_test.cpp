#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "gbid/error.hpp"
#include "gbid/pipeline.hpp"

using namespace gbid;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("gbid_pipeline_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Errc parse_error(const Json& j) {
    try {
        (void)parse_config(j);
    } catch (const Error& e) {
        return e.code();
    }
    return Errc::InvalidArgument;
}

PipelineConfig tiny_config() {
    auto c = parse_config(Json::parse(R"({"seed": 3, "moea": {"algorithm": "nsga2", "budget": 400, "runs": 2},
                                           "decision": {"mtd": [{"rankings": [3, 1, 2], "intensity": 5}]}})"));
    return c;
}

}  // namespace

TEST(Config, DefaultsAndOverrides) {
    const auto c = parse_config(Json::object());
    EXPECT_EQ(c.pool.n_u, 5);
    EXPECT_EQ(c.pruning, PruneMode::Clusters);
    EXPECT_EQ(c.n_est, 100u);
    EXPECT_EQ(c.data.plant, "M3");
    EXPECT_EQ(c.moea.population, 50u);
    const auto o = apply_overrides(c, {9, 4, 777});
    EXPECT_EQ(o.seed, 9u);
    EXPECT_EQ(o.moea.seed, 9u);
    EXPECT_EQ(o.moea.runs, 4u);
    EXPECT_EQ(o.moea.budget, 777u);
}

TEST(Config, SpeaDefaultsFollowAlgorithm) {
    const auto c = parse_config(Json::parse(R"({"moea": {"algorithm": "spea2"}})"));
    EXPECT_DOUBLE_EQ(c.moea.p_c, 0.7);
    EXPECT_DOUBLE_EQ(c.moea.p_m, 0.008);
}

TEST(Config, ErrorsAreConfigErrors) {
    EXPECT_EQ(parse_error(Json::parse(R"({"pruning": "some"})")), Errc::InvalidConfig);
    EXPECT_EQ(parse_error(Json::parse(R"({"pool": {"n_u": 0}})")), Errc::InvalidConfig);
    EXPECT_EQ(parse_error(Json::parse(R"({"pool": 3})")), Errc::InvalidConfig);
    EXPECT_EQ(parse_error(Json::parse(R"({"seed": "x"})")), Errc::InvalidConfig);
    EXPECT_EQ(parse_error(Json::parse(R"({"data": {"source": "ftp"}})")), Errc::InvalidConfig);
    EXPECT_EQ(parse_error(Json::parse(R"({"data": {"source": "csv"}})")), Errc::InvalidConfig);
    EXPECT_EQ(parse_error(Json::parse(R"({"decision": {"mtd": [{"rankings": [1, 1, 2]}]}})")), Errc::InvalidConfig);
    EXPECT_EQ(parse_error(Json::parse(R"({"moea": {"p_m": 2}})")), Errc::InvalidConfig);
    EXPECT_EQ(parse_error(Json::array()), Errc::InvalidConfig);
    try {
        (void)load_config("/nonexistent/config.json");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Config);
    }
}

TEST(Config, HashIsStableAndSensitive) {
    const auto a = parse_config(Json::object());
    const auto b = parse_config(config_to_json(a));
    EXPECT_EQ(config_hash(a), config_hash(b));
    EXPECT_EQ(config_hash(a).size(), 16u);
    auto c = a;
    c.seed = 2;
    EXPECT_NE(config_hash(a), config_hash(c));
    EXPECT_EQ(provenance(a), "config_hash=" + config_hash(a) + " seed=1");
    const auto dir = default_run_dir(a, "runs");
    EXPECT_EQ(dir.parent_path(), fs::path("runs"));
    EXPECT_EQ(dir.filename().string().substr(17), config_hash(a).substr(0, 8));
}

TEST(Config, ShippedConfigsLoad) {
    for (const char* name : {"default.json", "smoke.json"}) {
        const auto c = load_config(fs::path(GBID_FIXTURE_DIR) / ".." / "configs" / name);
        EXPECT_NO_THROW(c.validate()) << name;
    }
}

TEST(Serialization, ModelJsonRoundTripIsBitExact) {
    for (const auto& name : reference_model_names()) {
        const auto m = reference_model(name);
        const auto text = to_json(m).dump();
        const auto back = model_from_json(Json::parse(text));
        EXPECT_EQ(back.selected(), m.selected()) << name;
        EXPECT_EQ(back.coefficients(), m.coefficients()) << name;
        EXPECT_EQ(to_json(back).dump(), text) << name;
    }
    EXPECT_THROW(model_from_json(Json::parse(R"({"terms": []})")), Error);
}

TEST(Serialization, PoolRoundTrip) {
    const auto pool = prune_pool(generate_term_pool({5, 5, 3}));
    const auto back = pool_from_json(to_json(pool));
    EXPECT_EQ(back.terms(), pool.terms());
}

TEST(Serialization, Fnv1aKnownValues) {
    EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ULL);
    EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cULL);
}

TEST(ArchiveCsv, RoundTrip) {
    const auto dir = temp_dir("archive");
    ParetoArchive a;
    a.entries.push_back({Genome::from_string("0101"), {2, 0.0123456789012345678, 1.0 / 3.0}, 4});
    a.entries.push_back({Genome::from_string("1111"), {4, 1e-9, 2.5}, 0});
    write_archive_csv(dir / "a.csv", a, "config_hash=x seed=1");
    const auto b = read_archive_csv(dir / "a.csv");
    ASSERT_EQ(b.size(), 2u);
    for (std::size_t i = 0; i < 2; ++i) {
        EXPECT_EQ(b.entries[i].genome, a.entries[i].genome);
        EXPECT_EQ(b.entries[i].objectives, a.entries[i].objectives);
        EXPECT_EQ(b.entries[i].run_id, a.entries[i].run_id);
    }
    std::ofstream(dir / "bad.csv") << "genome_bits,xi,e_dyn,e_static,run_id\n01,1,x,2,0\n";
    EXPECT_THROW(read_archive_csv(dir / "bad.csv"), Error);
}

TEST(Pipeline, IdentifySelectValidate) {
    const auto dir = temp_dir("e2e");
    const auto config = tiny_config();
    const auto summary = cmd_identify(config, dir / "id", 1);
    EXPECT_GT(summary.at("archive_size").get<std::size_t>(), 0u);
    for (const char* f : {"config.json", "pool.json", "dataset.csv", "static_curve.csv", "archive.csv", "run_fronts.csv",
                          "archive_models.json", "manifest.json"})
        EXPECT_TRUE(fs::exists(dir / "id" / f)) << f;

    const auto again = cmd_identify(config, dir / "id2", 2);
    EXPECT_EQ(slurp(dir / "id" / "archive.csv"), slurp(dir / "id2" / "archive.csv"));

    const auto sel = cmd_select(dir / "id", {}, dir / "sel");
    ASSERT_EQ(sel.at("mtd").size(), 1u);
    const auto w = sel.at("mtd")[0].at("weights").get<std::vector<double>>();
    EXPECT_NEAR(w[1], 0.6071, 1e-4);
    EXPECT_TRUE(fs::exists(dir / "sel" / "ranking_mmd.csv"));
    EXPECT_TRUE(fs::exists(dir / "sel" / "selection_mtd_1.json"));

    const auto chosen = read_json(dir / "sel" / "selection_mmd.json");
    write_json(dir / "model.json", chosen.at("model"));
    const auto val = cmd_validate(config, dir / "model.json", {}, dir / "val");
    EXPECT_GT(val.at("e_dyn").get<double>(), 0.0);
    EXPECT_EQ(val.at("validity").size(), 5u);
    EXPECT_TRUE(fs::exists(dir / "val" / "correlation_phi_ee.csv"));

    const auto cov = cmd_coverage(dir / "id" / "archive.csv", dir / "id2" / "archive.csv", dir / "cov");
    EXPECT_DOUBLE_EQ(cov.at("C_AB").get<double>(), 1.0);
    EXPECT_DOUBLE_EQ(cov.at("C_BA").get<double>(), 1.0);
}

TEST(Pipeline, CsvSourceMatchesSynthetic) {
    const auto dir = temp_dir("csv");
    const auto synthetic = parse_config(Json::object());
    cmd_generate_data(synthetic, dir);
    const auto csv = parse_config(Json::parse(R"({"data": {"source": "csv", "series": "dataset.csv",
                                                           "static_curve": "static_curve.csv"}})"),
                                  dir);
    const auto a = load_bundle(synthetic);
    const auto b = load_bundle(csv);
    EXPECT_EQ(a.estimation.y, b.estimation.y);
    EXPECT_EQ(a.validation.u, b.validation.u);
    ASSERT_EQ(a.static_curve.size(), b.static_curve.size());
    EXPECT_EQ(a.static_curve.back().y_bar, b.static_curve.back().y_bar);
}

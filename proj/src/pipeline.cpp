#include "gbid/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <numeric>
#include <sstream>

#include "gbid/error.hpp"
#include "gbid/validation.hpp"

namespace gbid {

namespace fs = std::filesystem;

namespace {

// Config parsing helpers report every problem as InvalidConfig.
template <typename T>
T get_or(const Json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const Json::exception& e) {
        throw Error(Errc::InvalidConfig, std::string("config field '") + key + "': " + e.what());
    }
}

const Json& section(const Json& j, const char* key) {
    static const Json empty = Json::object();
    if (!j.contains(key)) return empty;
    if (!j.at(key).is_object()) throw Error(Errc::InvalidConfig, std::string("config section '") + key + "' must be an object");
    return j.at(key);
}

Json preference_json(const PreferenceSpec& p) { return {{"rankings", p.rankings}, {"intensity", p.intensity}}; }

PreferenceSpec preference_from_json(const Json& j) {
    PreferenceSpec p;
    p.rankings = get_or<std::vector<int>>(j, "rankings", {});
    p.intensity = get_or<double>(j, "intensity", 1.0);
    p.validate();
    return p;
}

std::string archive_comment(const Json& config_json) {
    return "config_hash=" + config_json.value("config_hash", std::string{}) +
           " seed=" + std::to_string(config_json.value("seed", std::uint64_t{0}));
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::Io, "cannot write " + path.string());
    out << text;
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::Io, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_ranking_csv(const fs::path& path, const ParetoArchive& archive, const Selection& selection,
                       const std::string& comment) {
    std::ostringstream out;
    out << "# " << comment << "\nrank,genome_bits,xi,e_dyn,e_static,score\n";
    for (std::size_t r = 0; r < selection.ranking.size(); ++r) {
        const auto& item = selection.ranking[r];
        const auto& e = archive.entries[item.index];
        out << r + 1 << ',' << e.genome.to_string() << ',' << format_double(e.objectives.xi) << ','
            << format_double(e.objectives.e_dyn) << ',' << format_double(e.objectives.e_static) << ','
            << format_double(item.score) << '\n';
    }
    write_text(path, out.str());
}

Json objectives_json(const ObjectiveVector& o) { return {{"xi", o.xi}, {"e_dyn", o.e_dyn}, {"e_static", o.e_static}}; }

double mean_of(std::span<const double> x) {
    return x.empty() ? 0.0 : std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

Json describe(std::span<const double> x) {
    const double m = mean_of(x);
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    return {{"mean", m},
            {"std", x.size() > 1 ? std::sqrt(ss / static_cast<double>(x.size() - 1)) : 0.0},
            {"min", x.empty() ? 0.0 : *lo},
            {"max", x.empty() ? 0.0 : *hi}};
}

}  // namespace

void PipelineConfig::validate() const {
    pool.validate();
    grid.validate();
    moea.validate();
    for (const auto& p : mtd) p.validate();
    if (data.kind == DataKind::Synthetic) {
        data.prbs.validate();
        if (data.decimation < 1) throw Error(Errc::InvalidConfig, "decimation must be >= 1");
        if (!(data.noise_sigma >= 0.0)) throw Error(Errc::InvalidConfig, "noise_sigma must be >= 0");
    } else {
        if (!fs::exists(data.series_csv)) throw Error(Errc::InvalidConfig, "dataset file not found: " + data.series_csv.string());
        if (!data.static_csv.empty() && !fs::exists(data.static_csv))
            throw Error(Errc::InvalidConfig, "static curve file not found: " + data.static_csv.string());
    }
    if (n_est < 1) throw Error(Errc::InvalidConfig, "split n_est must be >= 1");
}

PipelineConfig parse_config(const Json& j, const fs::path& base_dir) {
    if (!j.is_object()) throw Error(Errc::InvalidConfig, "config must be a JSON object");
    PipelineConfig c;
    try {
        const auto& pool = section(j, "pool");
        c.pool = {get_or(pool, "n_u", 5), get_or(pool, "n_y", 5), get_or(pool, "n_l", 3)};
        c.pruning = prune_mode_from_string(get_or<std::string>(j, "pruning", "clusters"));
        c.seed = get_or<std::uint64_t>(j, "seed", 1);

        const auto& data = section(j, "data");
        const auto source = get_or<std::string>(data, "source", "synthetic");
        if (source == "synthetic") {
            c.data.kind = DataKind::Synthetic;
            if (data.contains("plant") && data.at("plant").is_object())
                c.data.plant_model = data.at("plant");
            else
                c.data.plant = get_or<std::string>(data, "plant", "M3");
            c.data.noise_sigma = get_or(data, "noise_sigma", 0.05);
            c.data.decimation = get_or<std::size_t>(data, "decimation", 1);
            const auto& prbs = section(data, "prbs");
            c.data.prbs.register_length = get_or(prbs, "register_length", c.data.prbs.register_length);
            c.data.prbs.low = get_or(prbs, "low", c.data.prbs.low);
            c.data.prbs.high = get_or(prbs, "high", c.data.prbs.high);
            c.data.prbs.hold = get_or(prbs, "hold", c.data.prbs.hold);
            c.data.prbs.length = get_or(prbs, "length", c.data.prbs.length);
            c.data.prbs.seed = get_or(prbs, "seed", c.data.prbs.seed);
        } else if (source == "csv") {
            c.data.kind = DataKind::Csv;
            const auto resolve = [&](const std::string& p) { return p.empty() || fs::path(p).is_absolute() ? fs::path(p) : base_dir / p; };
            c.data.series_csv = resolve(get_or<std::string>(data, "series", ""));
            c.data.static_csv = resolve(get_or<std::string>(data, "static_curve", ""));
            c.data.decimation = get_or<std::size_t>(data, "decimation", 1);
            if (c.data.series_csv.empty()) throw Error(Errc::InvalidConfig, "csv source needs 'series'");
        } else {
            throw Error(Errc::InvalidConfig, "unknown data source '" + source + "'");
        }

        c.n_est = get_or<std::size_t>(section(j, "split"), "n_est", 100);
        const auto& grid = section(j, "static_grid");
        c.grid.u_min = get_or(grid, "u_min", c.grid.u_min);
        c.grid.u_max = get_or(grid, "u_max", c.grid.u_max);
        c.grid.count = get_or(grid, "count", c.grid.count);
        c.grid.v_d = get_or(grid, "v_d", c.grid.v_d);

        Json moea = section(j, "moea");
        moea.erase("seed");
        c.moea = moea_config_from_json(moea);

        const auto& decision = section(j, "decision");
        c.mmd = get_or(decision, "mmd", true);
        if (decision.contains("mtd"))
            for (const auto& p : decision.at("mtd")) c.mtd.push_back(preference_from_json(p));
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::Config) throw;
        throw Error(Errc::InvalidConfig, e.what());
    } catch (const Json::exception& e) {
        throw Error(Errc::InvalidConfig, e.what());
    }
    c.moea.seed = c.seed;
    c.validate();
    return c;
}

PipelineConfig load_config(const fs::path& path) {
    Json j;
    try {
        j = read_json(path);
    } catch (const Error& e) {
        throw Error(Errc::InvalidConfig, e.what());
    }
    return parse_config(j, path.parent_path());
}

PipelineConfig apply_overrides(PipelineConfig config, const Overrides& overrides) {
    if (overrides.seed) config.seed = *overrides.seed;
    if (overrides.runs) config.moea.runs = *overrides.runs;
    if (overrides.budget) config.moea.budget = *overrides.budget;
    config.moea.seed = config.seed;
    config.validate();
    return config;
}

Json config_to_json(const PipelineConfig& c) {
    Json data;
    if (c.data.kind == DataKind::Synthetic) {
        data = {{"source", "synthetic"},
                {"noise_sigma", c.data.noise_sigma},
                {"decimation", c.data.decimation},
                {"prbs",
                 {{"register_length", c.data.prbs.register_length},
                  {"low", c.data.prbs.low},
                  {"high", c.data.prbs.high},
                  {"hold", c.data.prbs.hold},
                  {"length", c.data.prbs.length},
                  {"seed", c.data.prbs.seed}}}};
        data["plant"] = c.data.plant_model ? *c.data.plant_model : Json(c.data.plant);
    } else {
        data = {{"source", "csv"},
                {"series", c.data.series_csv.string()},
                {"static_curve", c.data.static_csv.string()},
                {"decimation", c.data.decimation}};
    }
    Json moea = to_json(c.moea);
    moea.erase("seed");
    Json mtd = Json::array();
    for (const auto& p : c.mtd) mtd.push_back(preference_json(p));
    return {{"pool", to_json(c.pool)},
            {"pruning", to_string(c.pruning)},
            {"seed", c.seed},
            {"data", data},
            {"split", {{"n_est", c.n_est}}},
            {"static_grid", {{"u_min", c.grid.u_min}, {"u_max", c.grid.u_max}, {"count", c.grid.count}, {"v_d", c.grid.v_d}}},
            {"moea", moea},
            {"decision", {{"mmd", c.mmd}, {"mtd", mtd}}}};
}

std::string config_hash(const PipelineConfig& config) { return config_hash(config_to_json(config)); }

std::string provenance(const PipelineConfig& config) {
    return "config_hash=" + config_hash(config) + " seed=" + std::to_string(config.seed);
}

fs::path default_run_dir(const PipelineConfig& config, const fs::path& root) {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y%m%dT%H%M%SZ", &tm);
    return root / (std::string(stamp) + "-" + config_hash(config).substr(0, 8));
}

Series load_series(const PipelineConfig& config) {
    Series raw;
    if (config.data.kind == DataKind::Csv) {
        raw = read_series_csv(config.data.series_csv);
    } else {
        const auto model = config.data.plant_model ? model_from_json(*config.data.plant_model)
                                                   : reference_model(config.data.plant);
        const PlantSpec plant(model, config.data.noise_sigma, config.grid.v_d, config.data.prbs.low, config.data.prbs.high);
        raw = simulate_plant(plant, gen_prbs(config.data.prbs), config.seed);
    }
    return decimate(raw, config.data.decimation);
}

std::vector<StaticSample> load_static_curve(const PipelineConfig& config) {
    if (config.data.kind == DataKind::Csv && !config.data.static_csv.empty()) return read_static_csv(config.data.static_csv);
    return static_grid(config.grid);
}

DatasetBundle load_bundle(const PipelineConfig& config) {
    return split(load_series(config), config.n_est, config.pool.max_lag(), load_static_curve(config));
}

std::shared_ptr<const TermPool> build_pool(const PipelineConfig& config) {
    return std::make_shared<const TermPool>(apply_prune(generate_term_pool(config.pool), config.pruning));
}

void write_archive_csv(const fs::path& path, const ParetoArchive& archive, const std::string& comment) {
    std::ostringstream out;
    out << "# " << comment << "\ngenome_bits,xi,e_dyn,e_static,run_id\n";
    for (const auto& e : archive.entries)
        out << e.genome.to_string() << ',' << format_double(e.objectives.xi) << ',' << format_double(e.objectives.e_dyn)
            << ',' << format_double(e.objectives.e_static) << ',' << e.run_id << '\n';
    write_text(path, out.str());
}

ParetoArchive read_archive_csv(const fs::path& path) {
    std::istringstream in(read_text(path));
    ParetoArchive archive;
    std::string line;
    bool header = false;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (!header) {
            if (line != "genome_bits,xi,e_dyn,e_static,run_id") throw Error(Errc::Parse, path.string() + ": unexpected archive header");
            header = true;
            continue;
        }
        std::istringstream fields(line);
        std::string bits, xi, e, s, run;
        if (!std::getline(fields, bits, ',') || !std::getline(fields, xi, ',') || !std::getline(fields, e, ',') ||
            !std::getline(fields, s, ',') || !std::getline(fields, run))
            throw Error(Errc::Parse, path.string() + ":" + std::to_string(line_no) + ": wrong field count");
        try {
            ArchiveEntry entry;
            entry.genome = Genome::from_string(bits);
            entry.objectives = {std::stod(xi), std::stod(e), std::stod(s)};
            entry.run_id = std::stoul(run);
            archive.entries.push_back(std::move(entry));
        } catch (const std::invalid_argument&) {
            throw Error(Errc::Parse, path.string() + ":" + std::to_string(line_no) + ": bad value");
        } catch (const std::out_of_range&) {
            throw Error(Errc::Parse, path.string() + ":" + std::to_string(line_no) + ": value out of range");
        }
    }
    if (!header) throw Error(Errc::Parse, path.string() + ": missing archive header");
    return archive;
}

IdentifyResult identify(const PipelineConfig& config, std::size_t jobs) {
    const auto start = std::chrono::steady_clock::now();
    IdentifyResult r;
    r.pool = build_pool(config);
    r.bundle = load_bundle(config);
    const Evaluator evaluator(r.pool, r.bundle);
    EvaluationCache cache;
    r.runs = run_many(make_problem(evaluator), config.moea, jobs, &cache);
    r.archive = accumulate(std::span<const RunResult>(r.runs));
    r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

ModelStructure fit_genome(const Genome& genome, const std::shared_ptr<const TermPool>& pool, const DatasetBundle& bundle) {
    if (genome.size() != pool->size()) throw Error(Errc::InvalidArgument, "genome length does not match the pool");
    const Evaluator evaluator(pool, bundle);
    auto detail = evaluator.evaluate_detail(genome.selected());
    if (!detail.fitted) throw Error(Errc::RankDeficient, "structure cannot be estimated");
    return detail.model;
}

Json cmd_generate_data(const PipelineConfig& config, const fs::path& out_dir) {
    fs::create_directories(out_dir);
    const auto series = load_series(config);
    const auto curve = load_static_curve(config);
    const auto tag = provenance(config);
    write_series_csv(out_dir / "dataset.csv", series, tag);
    write_static_csv(out_dir / "static_curve.csv", curve, tag);
    Json cfg = config_to_json(config);
    write_json(out_dir / "config.json", cfg);
    return {{"config_hash", config_hash(config)},
            {"seed", config.seed},
            {"samples", series.size()},
            {"u", describe(series.u)},
            {"y", describe(series.y)},
            {"static_points", curve.size()},
            {"out_dir", out_dir.string()}};
}

Json cmd_identify(const PipelineConfig& config, const fs::path& out_dir, std::size_t jobs) {
    fs::create_directories(out_dir);
    const auto result = identify(config, jobs);
    const auto tag = provenance(config);
    const auto hash = config_hash(config);

    Json cfg = config_to_json(config);
    cfg["config_hash"] = hash;
    write_json(out_dir / "config.json", cfg);
    write_json(out_dir / "pool.json", to_json(*result.pool));
    write_series_csv(out_dir / "dataset.csv", load_series(config), tag);
    write_static_csv(out_dir / "static_curve.csv", result.bundle.static_curve, tag);
    write_archive_csv(out_dir / "archive.csv", result.archive, tag);

    std::ostringstream fronts;
    fronts << "# " << tag << "\nrun_id,genome_bits,xi,e_dyn,e_static\n";
    for (std::size_t run = 0; run < result.runs.size(); ++run)
        for (const auto& e : result.runs[run].front)
            fronts << run << ',' << e.genome.to_string() << ',' << format_double(e.objectives.xi) << ','
                   << format_double(e.objectives.e_dyn) << ',' << format_double(e.objectives.e_static) << '\n';
    write_text(out_dir / "run_fronts.csv", fronts.str());

    const Evaluator evaluator(result.pool, result.bundle);
    Json models = Json::array();
    for (const auto& e : result.archive.entries) {
        const auto detail = evaluator.evaluate_detail(e.genome.selected());
        Json m = detail.fitted ? to_json(detail.model) : Json::object();
        m["genome_bits"] = e.genome.to_string();
        m["objectives"] = objectives_json(e.objectives);
        models.push_back(std::move(m));
    }
    write_json(out_dir / "archive_models.json", {{"config_hash", hash}, {"seed", config.seed}, {"models", models}});

    std::size_t unique = 0;
    std::size_t requests = 0;
    Json per_run = Json::array();
    for (const auto& r : result.runs) {
        unique += r.unique_evaluations;
        requests += r.requests;
        per_run.push_back({{"unique_evaluations", r.unique_evaluations},
                           {"requests", r.requests},
                           {"generations", r.generations},
                           {"front_size", r.front.size()}});
    }
    const Json manifest = {{"config_hash", hash},
                           {"seed", config.seed},
                           {"pool_size", result.pool->size()},
                           {"runs", result.runs.size()},
                           {"budget", config.moea.budget},
                           {"jobs", jobs},
                           {"function_evaluations", unique},
                           {"evaluation_requests", requests},
                           {"archive_size", result.archive.size()},
                           {"wall_time_s", result.wall_seconds},
                           {"per_run", per_run}};
    write_json(out_dir / "manifest.json", manifest);

    Json summary = manifest;
    summary.erase("per_run");
    summary["out_dir"] = out_dir.string();
    return summary;
}

Json cmd_select(const fs::path& archive_dir, const std::vector<PreferenceSpec>& preferences, const fs::path& out_dir) {
    const Json cfg = read_json(archive_dir / "config.json");
    const auto config = parse_config(cfg, archive_dir);
    const auto archive = read_archive_csv(archive_dir / "archive.csv");
    const Json models = read_json(archive_dir / "archive_models.json").at("models");
    if (models.size() != archive.size()) throw Error(Errc::Parse, "archive_models.json does not match archive.csv");
    if (archive.empty()) throw Error(Errc::ArchiveTooSmall, "archive is empty");
    fs::create_directories(out_dir);
    const auto tag = archive_comment(cfg);

    const auto emit = [&](const std::string& name, const Selection& sel, Json extra) {
        write_ranking_csv(out_dir / ("ranking_" + name + ".csv"), archive, sel, tag);
        const auto& entry = archive.entries[sel.selected];
        Json out = {{"method", name},
                    {"config_hash", cfg.value("config_hash", std::string{})},
                    {"seed", config.seed},
                    {"genome_bits", entry.genome.to_string()},
                    {"objectives", objectives_json(entry.objectives)},
                    {"score", sel.ranking.front().score},
                    {"model", models.at(sel.selected)}};
        for (auto& [k, v] : extra.items()) out[k] = v;
        write_json(out_dir / ("selection_" + name + ".json"), out);
        Json brief = {{"genome_bits", entry.genome.to_string()},
                      {"objectives", objectives_json(entry.objectives)},
                      {"score", sel.ranking.front().score}};
        for (auto& [k, v] : extra.items()) brief[k] = v;
        if (models.at(sel.selected).contains("static_coefficients"))
            brief["static_coefficients"] = models.at(sel.selected).at("static_coefficients");
        return brief;
    };

    Json report = {{"config_hash", cfg.value("config_hash", std::string{})}, {"seed", config.seed}, {"archive_size", archive.size()}};
    if (config.mmd) report["mmd"] = emit("mmd", mmd_select(archive), Json::object());
    const auto& prefs = preferences.empty() ? config.mtd : preferences;
    Json mtd = Json::array();
    for (std::size_t i = 0; i < prefs.size(); ++i) {
        const auto w = priority_weights(prefs[i]);
        mtd.push_back(emit("mtd_" + std::to_string(i + 1), mtd_select(archive, w),
                           {{"rankings", prefs[i].rankings}, {"intensity", prefs[i].intensity}, {"weights", w.w}}));
    }
    report["mtd"] = mtd;
    write_json(out_dir / "select_report.json", report);
    report["out_dir"] = out_dir.string();
    return report;
}

Json cmd_validate(const PipelineConfig& config, const fs::path& model_path, const fs::path& data_path, const fs::path& out_dir) {
    const auto model = model_from_json(read_json(model_path));
    if (!model.estimated()) throw Error(Errc::InvalidArgument, "model file carries no coefficients");
    const Series series = data_path.empty() ? load_series(config) : read_series_csv(data_path);
    const auto bundle = split(series, config.n_est, model.pool()->config().max_lag(), load_static_curve(config));
    const auto& val = bundle.validation;
    fs::create_directories(out_dir);
    const auto tag = provenance(config);

    const auto y_hat = free_run(model, val, val.size());
    const std::size_t seeds = free_run_seed_length(model);
    CsvTable fr;
    fr.columns = {"k", "y", "y_hat"};
    for (std::size_t k = 0; k < val.size(); ++k) fr.rows.push_back({static_cast<double>(k), val.y[k], y_hat[k]});
    write_csv(out_dir / "free_run.csv", fr, tag);

    const double e_static = static_error(model, bundle.static_curve);
    CsvTable st;
    st.columns = {"u_bar", "y_ref", "y_model"};
    const bool has_static = e_static < kPenalty;
    const auto poly = has_static ? static_polynomial(model) : StaticPolynomial{};
    for (const auto& s : bundle.static_curve)
        st.rows.push_back({s.u_bar, s.y_bar, has_static ? eval_static(poly, s.u_bar) : std::nan("")});
    write_csv(out_dir / "static_comparison.csv", st, tag);

    std::vector<double> eps(val.y.begin() + static_cast<std::ptrdiff_t>(seeds), val.y.end());
    for (std::size_t i = 0; i < eps.size(); ++i) eps[i] -= y_hat[seeds + i];
    const std::vector<double> u(val.u.begin() + static_cast<std::ptrdiff_t>(seeds), val.u.end());
    const auto report = validity_tests(eps, u);
    Json verdicts = Json::object();
    for (const auto& t : report.tests) {
        CsvTable c;
        c.columns = {"tau", "value", "band"};
        for (std::size_t i = 0; i < t.lags.size(); ++i) c.rows.push_back({static_cast<double>(t.lags[i]), t.values[i], t.band});
        write_csv(out_dir / ("correlation_" + to_string(t.test) + ".csv"), c, tag);
        verdicts[to_string(t.test)] = t.pass ? "pass" : "fail";
    }
    Json validity = verdicts;
    validity["config_hash"] = config_hash(config);
    validity["seed"] = config.seed;
    write_json(out_dir / "validity.json", validity);

    const Json metrics = {{"config_hash", config_hash(config)},
                          {"seed", config.seed},
                          {"samples", val.size()},
                          {"e_dyn", mean_squared_error(val.y, y_hat, seeds)},
                          {"e_dyn_percent", normalized_error_percent(val.y, y_hat, seeds)},
                          {"e_static", e_static},
                          {"band", report.tests.front().band}};
    write_json(out_dir / "metrics.json", metrics);
    Json summary = metrics;
    summary["validity"] = verdicts;
    summary["out_dir"] = out_dir.string();
    return summary;
}

Json cmd_coverage(const fs::path& archive_a, const fs::path& archive_b, const fs::path& out_dir) {
    const auto a = read_archive_csv(archive_a);
    const auto b = read_archive_csv(archive_b);
    if (a.empty() || b.empty()) throw Error(Errc::ArchiveTooSmall, "coverage needs two non-empty archives");
    const auto hash = config_hash(Json{{"a", read_text(archive_a)}, {"b", read_text(archive_b)}});
    const Json out = {{"C_AB", set_coverage(a, b)}, {"C_BA", set_coverage(b, a)}, {"inputs_hash", hash},
                      {"size_A", a.size()}, {"size_B", b.size()}};
    fs::create_directories(out_dir);
    write_json(out_dir / "coverage.json", out);
    Json summary = out;
    summary["out_dir"] = out_dir.string();
    return summary;
}

}  // namespace gbid

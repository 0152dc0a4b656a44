#include "gbid/gbid.h"

#include <cstring>
#include <exception>
#include <sstream>
#include <string>

#include "gbid/error.hpp"
#include "gbid/pipeline.hpp"

struct gbid_pool {
    std::shared_ptr<const gbid::TermPool> pool;
};

struct gbid_model {
    gbid::ModelStructure model;
};

namespace {

thread_local std::string last_error;

gbid_status fail(gbid_status status, const char* message) {
    last_error = message;
    return status;
}

template <typename F>
gbid_status guarded(F&& body) {
    try {
        last_error.clear();
        body();
        return GBID_OK;
    } catch (const gbid::Error& e) {
        return fail(static_cast<gbid_status>(e.kind()), e.what());
    } catch (const std::filesystem::filesystem_error& e) {
        return fail(GBID_ERR_DATA, e.what());
    } catch (const std::bad_alloc&) {
        return fail(GBID_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(GBID_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(GBID_ERR_INTERNAL, "unknown error");
    }
}

char* dup_string(const std::string& s) {
    auto* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

void require(const void* p, const char* what) {
    if (!p) throw gbid::Error(gbid::Errc::InvalidArgument, std::string(what) + " must not be null");
}

std::vector<gbid::ObjectiveVector> objective_rows(const double* values, std::size_t n) {
    if (n > 0) require(values, "objectives");
    std::vector<gbid::ObjectiveVector> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back({values[3 * i], values[3 * i + 1], values[3 * i + 2]});
    return out;
}

gbid::ParetoArchive archive_of(const double* values, std::size_t n) {
    gbid::ParetoArchive archive;
    for (auto& o : objective_rows(values, n)) archive.entries.push_back({gbid::Genome{}, o, 0});
    return archive;
}

gbid::PipelineConfig options_config(const gbid_options* o) {
    auto config = o && o->config_path && *o->config_path ? gbid::load_config(o->config_path)
                                                         : gbid::parse_config(gbid::Json::object());
    gbid::Overrides ov;
    if (o && o->seed >= 0) ov.seed = static_cast<std::uint64_t>(o->seed);
    if (o && o->runs >= 0) ov.runs = static_cast<std::size_t>(o->runs);
    if (o && o->budget >= 0) ov.budget = static_cast<std::size_t>(o->budget);
    return gbid::apply_overrides(std::move(config), ov);
}

std::filesystem::path out_dir_or(const gbid_options* o, const std::filesystem::path& fallback) {
    if (o && o->out_dir && *o->out_dir) return o->out_dir;
    return fallback;
}

std::size_t jobs_of(const gbid_options* o) { return o && o->jobs > 0 ? static_cast<std::size_t>(o->jobs) : 1; }

std::vector<int> parse_rankings(const char* text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stoi(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw gbid::Error(gbid::Errc::InvalidConfig, "bad ranking list '" + std::string(text) + "'");
        }
    }
    return out;
}

}  // namespace

extern "C" {

const char* gbid_version(void) { return "1.0.0"; }

const char* gbid_last_error(void) { return last_error.c_str(); }

void gbid_string_free(char* s) { std::free(s); }

size_t gbid_term_count(int n_u, int n_y, int n_l) {
    try {
        return gbid::term_count({n_u, n_y, n_l});
    } catch (...) {
        return 0;
    }
}

gbid_status gbid_pool_create(int n_u, int n_y, int n_l, const char* prune, gbid_pool** out) {
    return guarded([&] {
        require(out, "out");
        const auto mode = gbid::prune_mode_from_string(prune ? prune : "none");
        auto pool = gbid::apply_prune(gbid::generate_term_pool({n_u, n_y, n_l}), mode);
        *out = new gbid_pool{std::make_shared<const gbid::TermPool>(std::move(pool))};
    });
}

size_t gbid_pool_size(const gbid_pool* pool) { return pool ? pool->pool->size() : 0; }

gbid_status gbid_pool_term(const gbid_pool* pool, size_t index, char** out) {
    return guarded([&] {
        require(pool, "pool");
        require(out, "out");
        if (index >= pool->pool->size()) throw gbid::Error(gbid::Errc::InvalidArgument, "term index out of range");
        *out = dup_string((*pool->pool)[index].to_string());
    });
}

gbid_status gbid_pool_to_json(const gbid_pool* pool, char** out) {
    return guarded([&] {
        require(pool, "pool");
        require(out, "out");
        *out = dup_string(gbid::to_json(*pool->pool).dump());
    });
}

void gbid_pool_free(gbid_pool* pool) { delete pool; }

gbid_status gbid_model_reference(const char* name, gbid_model** out) {
    return guarded([&] {
        require(name, "name");
        require(out, "out");
        *out = new gbid_model{gbid::reference_model(name)};
    });
}

gbid_status gbid_model_from_json(const char* json, gbid_model** out) {
    return guarded([&] {
        require(json, "json");
        require(out, "out");
        gbid::Json j;
        try {
            j = gbid::Json::parse(json);
        } catch (const gbid::Json::parse_error& e) {
            throw gbid::Error(gbid::Errc::Parse, e.what());
        }
        *out = new gbid_model{gbid::model_from_json(j)};
    });
}

gbid_status gbid_model_to_json(const gbid_model* model, char** out) {
    return guarded([&] {
        require(model, "model");
        require(out, "out");
        *out = dup_string(gbid::to_json(model->model).dump());
    });
}

size_t gbid_model_term_count(const gbid_model* model) { return model ? model->model.xi() : 0; }

gbid_status gbid_model_static_coefficients(const gbid_model* model, double* out, size_t capacity, size_t* count) {
    return guarded([&] {
        require(model, "model");
        const auto poly = gbid::static_polynomial(model->model);
        if (count) *count = poly.coefficients.size();
        if (capacity > 0) require(out, "out");
        for (std::size_t i = 0; i < std::min(capacity, poly.coefficients.size()); ++i) out[i] = poly.coefficients[i];
    });
}

gbid_status gbid_model_free_run(const gbid_model* model, const double* u, const double* y, size_t n, double* y_hat) {
    return guarded([&] {
        require(model, "model");
        require(u, "u");
        require(y, "y");
        require(y_hat, "y_hat");
        gbid::Series s{{u, u + n}, {y, y + n}};
        const auto sim = gbid::free_run(model->model, s, n);
        std::copy(sim.begin(), sim.end(), y_hat);
    });
}

void gbid_model_free(gbid_model* model) { delete model; }

gbid_status gbid_priority_weights(const int* rankings, size_t n, double intensity, double* weights) {
    return guarded([&] {
        require(rankings, "rankings");
        require(weights, "weights");
        gbid::PreferenceSpec pref{{rankings, rankings + n}, intensity};
        const auto w = gbid::priority_weights(pref);
        std::copy(w.w.begin(), w.w.end(), weights);
    });
}

gbid_status gbid_mmd_select(const double* objectives, size_t n, size_t* selected) {
    return guarded([&] {
        require(selected, "selected");
        *selected = gbid::mmd_select(archive_of(objectives, n)).selected;
    });
}

gbid_status gbid_mtd_select(const double* objectives, size_t n, const double* weights, size_t* selected) {
    return guarded([&] {
        require(weights, "weights");
        require(selected, "selected");
        *selected = gbid::mtd_select(archive_of(objectives, n), {{weights, weights + 3}}).selected;
    });
}

gbid_status gbid_set_coverage(const double* a, size_t n_a, const double* b, size_t n_b, double* coverage) {
    return guarded([&] {
        require(coverage, "coverage");
        const auto oa = objective_rows(a, n_a);
        const auto ob = objective_rows(b, n_b);
        *coverage = gbid::set_coverage(oa, ob);
    });
}

void gbid_options_init(gbid_options* options) {
    if (!options) return;
    options->config_path = nullptr;
    options->out_dir = nullptr;
    options->seed = -1;
    options->runs = -1;
    options->budget = -1;
    options->jobs = -1;
}

gbid_status gbid_cmd_generate_data(const gbid_options* options, char** summary) {
    return guarded([&] {
        require(summary, "summary");
        const auto config = options_config(options);
        *summary = dup_string(gbid::cmd_generate_data(config, out_dir_or(options, gbid::default_run_dir(config))).dump(2));
    });
}

gbid_status gbid_cmd_identify(const gbid_options* options, char** summary) {
    return guarded([&] {
        require(summary, "summary");
        const auto config = options_config(options);
        const auto out = out_dir_or(options, gbid::default_run_dir(config));
        *summary = dup_string(gbid::cmd_identify(config, out, jobs_of(options)).dump(2));
    });
}

gbid_status gbid_cmd_select(const gbid_options* options, const char* archive_dir, const char* rankings,
                            double intensity, char** summary) {
    return guarded([&] {
        require(archive_dir, "archive_dir");
        require(summary, "summary");
        std::vector<gbid::PreferenceSpec> prefs;
        if (rankings && *rankings) {
            gbid::PreferenceSpec p{parse_rankings(rankings), intensity};
            p.validate();
            prefs.push_back(std::move(p));
        }
        const auto out = out_dir_or(options, std::filesystem::path(archive_dir) / "selection");
        *summary = dup_string(gbid::cmd_select(archive_dir, prefs, out).dump(2));
    });
}

gbid_status gbid_cmd_validate(const gbid_options* options, const char* model_path, const char* data_path,
                              char** summary) {
    return guarded([&] {
        require(model_path, "model_path");
        require(summary, "summary");
        const auto config = options_config(options);
        const auto out = out_dir_or(options, gbid::default_run_dir(config));
        *summary = dup_string(gbid::cmd_validate(config, model_path, data_path ? data_path : "", out).dump(2));
    });
}

gbid_status gbid_cmd_coverage(const gbid_options* options, const char* archive_a, const char* archive_b,
                              char** summary) {
    return guarded([&] {
        require(archive_a, "archive_a");
        require(archive_b, "archive_b");
        require(summary, "summary");
        const auto config = options_config(options);
        const auto out = out_dir_or(options, gbid::default_run_dir(config));
        *summary = dup_string(gbid::cmd_coverage(archive_a, archive_b, out).dump(2));
    });
}

}  // extern "C"

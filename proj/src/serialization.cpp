#include "gbid/serialization.hpp"

#include <cstdio>
#include <fstream>

#include "gbid/error.hpp"

namespace gbid {

namespace {

template <typename T>
T field(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw Error(Errc::Parse, std::string("missing field '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const Json::exception& e) {
        throw Error(Errc::Parse, std::string("bad field '") + key + "': " + e.what());
    }
}

template <typename T>
T field_or(const Json& j, const char* key, T fallback) {
    return j.contains(key) ? field<T>(j, key) : fallback;
}

}  // namespace

Json to_json(const TermSpec& term) { return {{"y_lags", term.y_lags()}, {"u_lags", term.u_lags()}}; }

TermSpec term_from_json(const Json& j) {
    return {field<std::vector<int>>(j, "y_lags"), field<std::vector<int>>(j, "u_lags")};
}

Json to_json(const PoolConfig& config) { return {{"n_u", config.n_u}, {"n_y", config.n_y}, {"n_l", config.n_l}}; }

PoolConfig pool_config_from_json(const Json& j) {
    PoolConfig c{field<int>(j, "n_u"), field<int>(j, "n_y"), field<int>(j, "n_l")};
    c.validate();
    return c;
}

Json to_json(const TermPool& pool) {
    Json terms = Json::array();
    for (const auto& t : pool.terms()) terms.push_back(to_json(t));
    return {{"config", to_json(pool.config())}, {"terms", terms}};
}

TermPool pool_from_json(const Json& j) {
    std::vector<TermSpec> terms;
    for (const auto& t : field<Json>(j, "terms")) terms.push_back(term_from_json(t));
    return {pool_config_from_json(field<Json>(j, "config")), std::move(terms)};
}

Json to_json(const ModelStructure& model) {
    Json terms = Json::array();
    for (std::size_t i = 0; i < model.xi(); ++i) terms.push_back(to_json(model.term(i)));
    Json out = {{"pool", to_json(model.pool()->config())}, {"terms", terms}, {"coefficients", model.coefficients()}};
    if (model.estimated() && has_polynomial_static(model)) {
        try {
            out["static_coefficients"] = static_polynomial(model).coefficients;
        } catch (const Error& e) {
            if (e.code() != Errc::DegenerateStaticGain) throw;
        }
    }
    return out;
}

ModelStructure model_from_json(const Json& j) {
    std::vector<TermSpec> terms;
    for (const auto& t : field<Json>(j, "terms")) terms.push_back(term_from_json(t));
    return make_structure(pool_config_from_json(field<Json>(j, "pool")), terms,
                          field<std::vector<double>>(j, "coefficients"));
}

Json to_json(const MoeaConfig& config) {
    return {{"algorithm", to_string(config.algorithm)},
            {"population", config.population},
            {"archive_size", config.archive_size},
            {"p_c", config.p_c},
            {"p_m", config.p_m},
            {"budget", config.budget},
            {"runs", config.runs},
            {"seed", config.seed}};
}

MoeaConfig moea_config_from_json(const Json& j) {
    const auto algorithm = algorithm_from_string(field_or<std::string>(j, "algorithm", "nsga2"));
    auto c = MoeaConfig::defaults(algorithm);
    c.population = field_or(j, "population", c.population);
    c.archive_size = field_or(j, "archive_size", c.archive_size);
    c.p_c = field_or(j, "p_c", c.p_c);
    c.p_m = field_or(j, "p_m", c.p_m);
    c.budget = field_or(j, "budget", c.budget);
    c.runs = field_or(j, "runs", c.runs);
    c.seed = field_or(j, "seed", c.seed);
    c.validate();
    return c;
}

Json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::Io, "cannot open " + path.string());
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw Error(Errc::Parse, path.string() + ": " + e.what());
    }
}

void write_json(const std::filesystem::path& path, const Json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::Io, "cannot write " + path.string());
    out << j.dump(2) << '\n';
    if (!out) throw Error(Errc::Io, "write failed for " + path.string());
}

std::uint64_t fnv1a(std::string_view bytes) noexcept {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string config_hash(const Json& j) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(j.dump())));
    return buf;
}

}  // namespace gbid

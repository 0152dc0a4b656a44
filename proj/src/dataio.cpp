#include "gbid/dataio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "gbid/error.hpp"

namespace gbid {

namespace {

constexpr std::size_t kProbeSteps = 2000;
constexpr double kPlantBound = 1e6;

TermSpec t(std::vector<int> y, std::vector<int> u) { return {std::move(y), std::move(u)}; }

struct Published {
    std::vector<TermSpec> terms;
    std::vector<double> theta;
    std::vector<double> static_coefficients;
};

const std::map<std::string, Published>& published() {
    static const std::map<std::string, Published> models = [] {
        std::map<std::string, Published> m;
        m["M1"] = {{t({}, {}), t({1}, {}), t({3}, {}), t({}, {2}), t({}, {3, 3}), t({}, {1, 1, 1}), t({}, {1, 3, 3}),
                    t({}, {1, 3, 4}), t({}, {2, 2, 3}), t({}, {2, 2, 4}), t({}, {2, 3, 4}), t({}, {2, 5, 5}),
                    t({}, {1, 1, 5}), t({}, {1, 5, 5}), t({}, {5, 5, 5})},
                   {12.047, 0.9268, -0.26037, -4.9214, 1.0603, 12.289, 12.777, -19.02, -12.831, 13.662, 5.366,
                    -6.1856, -36.094, 40.953, -11.064},
                   {36.1141, -14.7537, 3.1786, -0.4453}};
        m["M2"] = {{t({}, {}), t({2}, {}), t({4}, {}), t({}, {2}), t({}, {1, 1}), t({}, {1, 2}), t({}, {1, 1, 5}),
                    t({}, {1, 4, 5}), t({}, {5, 5}), t({}, {1, 1, 1})},
                   {21.366, 0.76405, -0.38755, -7.7188, -4.086, 2.5905, -2.2637, -0.054858, 2.8763, 2.1183},
                   {34.2686, -12.3798, 2.2145, -0.3213}};
        m["M3"] = {{t({}, {}), t({1}, {}), t({5}, {}), t({}, {2}), t({}, {5, 5}), t({}, {1, 1, 2}), t({}, {1, 1, 5}),
                    t({}, {1, 2, 3}), t({}, {2, 3, 3})},
                   {14.986, 0.72049, -0.12131, -6.6797, 1.6136, 1.8557, -1.2517, -1.6357, 0.80815},
                   {37.3892, -16.6653, 4.0258, -0.5578}};
        m["M4"] = {{t({}, {}), t({3}, {}), t({}, {2}), t({}, {3}), t({}, {4})},
                   {30.392, 0.061677, -5.6359, -1.8699, -0.080413},
                   {}};
        const std::vector<TermSpec> ofr_terms = {t({}, {}),         t({1}, {}),        t({2}, {}),
                                                 t({}, {1, 1, 1}),  t({3}, {}),        t({}, {1, 1, 3}),
                                                 t({}, {3, 3, 3}),  t({}, {1, 3}),     t({}, {1, 3, 3})};
        m["OFR"] = {ofr_terms,
                    {6.2479, 1.2013, -0.2608, -2.6783, -0.2080, 8.8399, 3.6636, -0.6162, -9.7707},
                    {}};
        m["OFR-EA"] = {ofr_terms,
                       {13.7292, 0.7315, -0.0047, -0.8280, -0.2495, 3.6774, 2.0210, -1.7617, -4.6409},
                       {}};
        return m;
    }();
    return models;
}

const Published& lookup(const std::string& name) {
    const auto& models = published();
    const auto it = models.find(name);
    if (it == models.end()) throw Error(Errc::InvalidArgument, "unknown reference model '" + name + "'");
    return it->second;
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) {
        const auto b = field.find_first_not_of(" \t\r");
        const auto e = field.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? std::string{} : field.substr(b, e - b + 1));
    }
    return out;
}

double parse_double(const std::string& s, const std::filesystem::path& path, std::size_t line) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw Error(Errc::Parse, path.string() + ":" + std::to_string(line) + ": bad number '" + s + "'");
}

}  // namespace

void PrbsConfig::validate() const {
    if (register_length < 4 || register_length > 24) throw Error(Errc::InvalidConfig, "PRBS register length must be 4..24");
    if (!(low <= high)) throw Error(Errc::InvalidConfig, "PRBS low level must not exceed high level");
    if (hold < 1) throw Error(Errc::InvalidConfig, "PRBS hold must be >= 1");
    if ((seed & ((std::uint32_t{1} << register_length) - 1)) == 0)
        throw Error(Errc::InvalidConfig, "PRBS seed must leave a nonzero register state");
}

const std::vector<int>& lfsr_taps(int register_length) {
    static const std::map<int, std::vector<int>> taps = {
        {4, {4, 3}},          {5, {5, 3}},          {6, {6, 5}},          {7, {7, 6}},
        {8, {8, 6, 5, 4}},    {9, {9, 5}},          {10, {10, 7}},        {11, {11, 9}},
        {12, {12, 6, 4, 1}},  {13, {13, 4, 3, 1}},  {14, {14, 5, 3, 1}},  {15, {15, 14}},
        {16, {16, 15, 13, 4}}, {17, {17, 14}},      {18, {18, 11}},       {19, {19, 6, 2, 1}},
        {20, {20, 17}},       {21, {21, 19}},       {22, {22, 21}},       {23, {23, 18}},
        {24, {24, 23, 22, 17}},
    };
    const auto it = taps.find(register_length);
    if (it == taps.end()) throw Error(Errc::InvalidConfig, "no LFSR taps for register length " + std::to_string(register_length));
    return it->second;
}

std::vector<std::uint8_t> lfsr_bits(int register_length, std::uint32_t seed, std::size_t count) {
    const auto& taps = lfsr_taps(register_length);
    const std::uint32_t mask = (std::uint32_t{1} << register_length) - 1;
    std::uint32_t state = seed & mask;
    if (state == 0) throw Error(Errc::InvalidConfig, "LFSR state must be nonzero");
    std::vector<std::uint8_t> bits(count);
    for (auto& b : bits) {
        b = static_cast<std::uint8_t>((state >> (register_length - 1)) & 1U);
        std::uint32_t fb = 0;
        for (int tap : taps) fb ^= (state >> (tap - 1)) & 1U;
        state = ((state << 1) | fb) & mask;
    }
    return bits;
}

std::vector<double> gen_prbs(const PrbsConfig& config) {
    config.validate();
    const std::size_t n_bits = (config.length + config.hold - 1) / config.hold;
    const auto bits = lfsr_bits(config.register_length, config.seed, n_bits);
    std::vector<double> u;
    u.reserve(config.length);
    for (std::size_t i = 0; i < config.length; ++i) u.push_back(bits[i / config.hold] ? config.high : config.low);
    return u;
}

PlantSpec::PlantSpec(ModelStructure structure, double noise_sigma, double v_d, double probe_low, double probe_high)
    : structure_(std::move(structure)), sigma_(noise_sigma), v_d_(v_d) {
    if (!structure_.estimated()) throw Error(Errc::InvalidConfig, "plant structure needs coefficients");
    if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) throw Error(Errc::InvalidConfig, "noise sigma must be >= 0");
    if (!has_polynomial_static(structure_))
        throw Error(Errc::InvalidConfig, "plant structure must come from the pruned clusters");
    static_ = static_polynomial(structure_);

    PrbsConfig probe;
    probe.register_length = 11;
    probe.low = probe_low;
    probe.high = probe_high;
    probe.length = kProbeSteps;
    const PlantSpec quiet = *this;
    try {
        (void)simulate_plant(quiet, gen_prbs(probe), 0);
    } catch (const Error& e) {
        if (e.code() == Errc::Diverged) throw Error(Errc::InvalidConfig, "plant is not free-run stable on the probe");
        throw;
    }
}

Series simulate_plant(const PlantSpec& plant, const std::vector<double>& u, std::uint64_t noise_seed) {
    const auto& model = plant.structure();
    const auto lag = static_cast<std::size_t>(std::max(model.max_lag(), 0));
    Series out;
    out.u = u;
    out.y.assign(u.size(), 0.0);
    if (u.empty()) return out;
    const double y0 = eval_static(plant.static_map(), u.front());
    for (std::size_t k = 0; k < std::min(lag, u.size()); ++k) out.y[k] = y0;
    for (std::size_t k = lag; k < u.size(); ++k) {
        const double v = model.predict(out.y, u, k);
        if (!std::isfinite(v) || std::abs(v) > kPlantBound) throw Error(Errc::Diverged, "plant simulation diverged");
        out.y[k] = v;
    }
    if (plant.noise_sigma() > 0.0) {
        std::mt19937_64 engine(noise_seed);
        std::normal_distribution<double> noise(0.0, plant.noise_sigma());
        for (auto& y : out.y) y += noise(engine);
    }
    return out;
}

Series decimate(const Series& series, std::size_t factor) {
    if (factor < 1) throw Error(Errc::InvalidArgument, "decimation factor must be >= 1");
    if (series.u.size() != series.y.size()) throw Error(Errc::InvalidArgument, "u and y lengths differ");
    Series out;
    for (std::size_t k = 0; k < series.size(); k += factor) {
        out.u.push_back(series.u[k]);
        out.y.push_back(series.y[k]);
    }
    return out;
}

void StaticGridSpec::validate() const {
    if (count < 2) throw Error(Errc::InvalidConfig, "static grid needs at least two points");
    if (!(u_min < u_max)) throw Error(Errc::InvalidConfig, "static grid range is empty");
}

std::vector<StaticSample> static_grid(const StaticGridSpec& spec) {
    spec.validate();
    std::vector<StaticSample> out;
    out.reserve(spec.count);
    const double step = (spec.u_max - spec.u_min) / static_cast<double>(spec.count - 1);
    for (std::size_t i = 0; i < spec.count; ++i) {
        const double u = spec.u_min + step * static_cast<double>(i);
        out.push_back({u, buck_static_reference(u, spec.v_d)});
    }
    return out;
}

DatasetBundle split(const Series& series, std::size_t n_est, int max_lag, std::vector<StaticSample> static_curve) {
    const auto need = static_cast<std::size_t>(std::max(max_lag, 0)) + 1;
    if (n_est < need || n_est > series.size() || series.size() - n_est < need)
        throw Error(Errc::SplitTooSmall, "split leaves a segment shorter than max lag + 1");
    DatasetBundle bundle;
    bundle.estimation = series.slice(0, n_est);
    bundle.validation = series.slice(n_est, series.size() - n_est);
    bundle.static_curve = std::move(static_curve);
    bundle.validate(max_lag);
    return bundle;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<double> CsvTable::column(const std::string& name) const {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw Error(Errc::Parse, "missing column '" + name + "'");
    const auto c = static_cast<std::size_t>(it - columns.begin());
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r[c]);
    return out;
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::Io, "cannot open " + path.string());
    CsvTable table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#' || line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto fields = split_fields(line);
        if (table.columns.empty()) {
            table.columns = std::move(fields);
            continue;
        }
        if (fields.size() != table.columns.size())
            throw Error(Errc::Parse, path.string() + ":" + std::to_string(line_no) + ": wrong field count");
        std::vector<double> row;
        row.reserve(fields.size());
        for (const auto& f : fields) row.push_back(parse_double(f, path, line_no));
        table.rows.push_back(std::move(row));
    }
    if (table.columns.empty()) throw Error(Errc::Parse, path.string() + ": no header row");
    return table;
}

void write_csv(const std::filesystem::path& path, const CsvTable& table, const std::string& comment) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::Io, "cannot write " + path.string());
    if (!comment.empty()) out << "# " << comment << '\n';
    for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i];
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_double(row[i]);
        out << '\n';
    }
    if (!out) throw Error(Errc::Io, "write failed for " + path.string());
}

Series read_series_csv(const std::filesystem::path& path) {
    const auto table = read_csv(path);
    Series s;
    s.u = table.column("u");
    s.y = table.column("y");
    return s;
}

void write_series_csv(const std::filesystem::path& path, const Series& series, const std::string& comment) {
    CsvTable table;
    table.columns = {"k", "u", "y"};
    for (std::size_t k = 0; k < series.size(); ++k)
        table.rows.push_back({static_cast<double>(k), series.u[k], series.y[k]});
    write_csv(path, table, comment);
}

std::vector<StaticSample> read_static_csv(const std::filesystem::path& path) {
    const auto table = read_csv(path);
    const auto u = table.column("u_bar");
    const auto y = table.column("y_bar");
    std::vector<StaticSample> out;
    for (std::size_t i = 0; i < u.size(); ++i) out.push_back({u[i], y[i]});
    return out;
}

void write_static_csv(const std::filesystem::path& path, std::span<const StaticSample> curve,
                      const std::string& comment) {
    CsvTable table;
    table.columns = {"u_bar", "y_bar"};
    for (const auto& s : curve) table.rows.push_back({s.u_bar, s.y_bar});
    write_csv(path, table, comment);
}

std::vector<std::string> reference_model_names() { return {"M1", "M2", "M3", "M4", "OFR", "OFR-EA"}; }

ModelStructure reference_model(const std::string& name) {
    const auto& p = lookup(name);
    return make_structure(kReferencePool, p.terms, p.theta);
}

std::vector<double> reference_static_coefficients(const std::string& name) { return lookup(name).static_coefficients; }

}  // namespace gbid

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "gbid/estimation.hpp"

namespace gbid {

struct PrbsConfig {
    int register_length = 9;
    double low = 2.2;
    double high = 2.5;
    std::size_t hold = 1;
    std::size_t length = 168;
    std::uint32_t seed = 1;

    void validate() const;
};

/// Feedback taps (1-based register positions) of a maximal-length LFSR, lengths 4..24.
const std::vector<int>& lfsr_taps(int register_length);

/// Raw LFSR output bits, one per shift.
std::vector<std::uint8_t> lfsr_bits(int register_length, std::uint32_t seed, std::size_t count);

/// Bits mapped to {low, high}, each held for `hold` samples, truncated to `length`.
std::vector<double> gen_prbs(const PrbsConfig& config);

/// True system used to synthesize data: a structure with a polynomial static map plus
/// additive white output noise.
class PlantSpec {
public:
    /// Checks the static map exists and probes 2000 free-run steps over [probe_low, probe_high].
    PlantSpec(ModelStructure structure, double noise_sigma, double v_d = 24.0, double probe_low = 2.2,
              double probe_high = 2.5);

    [[nodiscard]] const ModelStructure& structure() const noexcept { return structure_; }
    [[nodiscard]] double noise_sigma() const noexcept { return sigma_; }
    [[nodiscard]] double v_d() const noexcept { return v_d_; }
    [[nodiscard]] const StaticPolynomial& static_map() const noexcept { return static_; }

private:
    ModelStructure structure_;
    double sigma_;
    double v_d_;
    StaticPolynomial static_;
};

/// Noise-free recursion from the static value at u[0], plus N(0, sigma^2) output noise.
/// Throws Diverged when the recursion leaves a sane range.
Series simulate_plant(const PlantSpec& plant, const std::vector<double>& u, std::uint64_t noise_seed);

/// Every factor-th sample starting at index 0. No anti-alias filtering.
Series decimate(const Series& series, std::size_t factor);

struct StaticGridSpec {
    double u_min = 1.0;
    double u_max = 4.0;
    std::size_t count = 61;
    double v_d = 24.0;

    void validate() const;
};

/// Equally spaced grid of the buck converter's reference static curve.
std::vector<StaticSample> static_grid(const StaticGridSpec& spec);

/// First n_est samples estimate, the rest validate. Throws SplitTooSmall when either part
/// cannot hold max_lag + 1 samples.
DatasetBundle split(const Series& series, std::size_t n_est, int max_lag, std::vector<StaticSample> static_curve);

/// Fixed-precision text for doubles (17 significant digits, round-trips exactly).
std::string format_double(double v);

/// Numeric CSV: a header row of column names, '#' lines are comments.
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    [[nodiscard]] std::vector<double> column(const std::string& name) const;
};

CsvTable read_csv(const std::filesystem::path& path);
void write_csv(const std::filesystem::path& path, const CsvTable& table, const std::string& comment = {});

/// `k,u,y`
Series read_series_csv(const std::filesystem::path& path);
void write_series_csv(const std::filesystem::path& path, const Series& series, const std::string& comment = {});

/// `u_bar,y_bar`
std::vector<StaticSample> read_static_csv(const std::filesystem::path& path);
void write_static_csv(const std::filesystem::path& path, std::span<const StaticSample> curve,
                      const std::string& comment = {});

/// Pool the published models live in.
inline constexpr PoolConfig kReferencePool{5, 5, 3};

/// Published models by name: M1, M2, M3, M4, OFR, OFR-EA.
std::vector<std::string> reference_model_names();
ModelStructure reference_model(const std::string& name);

/// Published static coefficients a_0..a_3 (M1, M2, M3 only; empty otherwise).
std::vector<double> reference_static_coefficients(const std::string& name);

}  // namespace gbid

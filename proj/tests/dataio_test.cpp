#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "gbid/dataio.hpp"
#include "gbid/error.hpp"
#include "gbid/serialization.hpp"

using namespace gbid;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("gbid_dataio_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::size_t smallest_period(const std::vector<std::uint8_t>& bits, std::size_t max_period) {
    for (std::size_t p = 1; p <= max_period; ++p) {
        bool ok = true;
        for (std::size_t i = 0; i + p < bits.size() && ok; ++i) ok = bits[i] == bits[i + p];
        if (ok) return p;
    }
    return 0;
}

}  // namespace

TEST(Lfsr, MaximalPeriodForSmallRegisters) {
    for (int n = 4; n <= 16; ++n) {
        const std::size_t period = (std::size_t{1} << n) - 1;
        const auto bits = lfsr_bits(n, 1, 2 * period + 5);
        EXPECT_EQ(smallest_period(bits, period), period) << n;
        std::size_t ones = 0;
        for (std::size_t i = 0; i < period; ++i) ones += bits[i];
        EXPECT_EQ(ones, (period + 1) / 2) << n;
    }
}

TEST(Lfsr, LargeRegistersDoNotRepeatEarly) {
    for (int n = 17; n <= 24; ++n) {
        const std::size_t period = (std::size_t{1} << n) - 1;
        const auto bits = lfsr_bits(n, 1, period + 64);
        for (std::size_t i = 0; i < 64; ++i) ASSERT_EQ(bits[i], bits[i + period]) << n;
        std::size_t ones = 0;
        for (std::size_t i = 0; i < period; ++i) ones += bits[i];
        EXPECT_EQ(ones, (period + 1) / 2) << n;
    }
    EXPECT_THROW(lfsr_taps(3), Error);
    EXPECT_THROW(lfsr_bits(8, 256, 4), Error);
}

TEST(Prbs, LevelsHoldAndDeterminism) {
    PrbsConfig c;
    c.register_length = 4;
    c.hold = 3;
    c.length = 90;
    const auto u = gen_prbs(c);
    ASSERT_EQ(u.size(), 90u);
    for (double v : u) EXPECT_TRUE(v == 2.2 || v == 2.5);
    for (std::size_t i = 0; i < u.size(); i += 3) {
        EXPECT_EQ(u[i], u[i + 1]);
        EXPECT_EQ(u[i], u[i + 2]);
    }
    EXPECT_EQ(gen_prbs(c), u);
    c.low = c.high = 2.3;
    for (double v : gen_prbs(c)) EXPECT_EQ(v, 2.3);
    c.hold = 0;
    EXPECT_THROW(c.validate(), Error);
}

TEST(Plant, FixedPointMatchesStaticMap) {
    for (const std::string name : {"M2", "M3", "M4"}) {
        const PlantSpec plant(reference_model(name), 0.0);
        const std::vector<double> u(400, 2.35);
        const auto s = simulate_plant(plant, u, 1);
        EXPECT_NEAR(s.y.back(), eval_static(plant.static_map(), 2.35), 1e-6) << name;
    }
}

TEST(Plant, M3SettlesNearBuckReference) {
    const PlantSpec plant(reference_model("M3"), 0.0);
    const auto s = simulate_plant(plant, std::vector<double>(400, 2.35), 1);
    EXPECT_NEAR(s.y.back(), buck_static_reference(2.35, 24.0), 0.5);
}

TEST(Plant, NoiseLevelAndReproducibility) {
    const PlantSpec noisy(reference_model("M3"), 0.05);
    const std::vector<double> u(3000, 2.35);
    const auto a = simulate_plant(noisy, u, 7);
    const auto b = simulate_plant(noisy, u, 7);
    EXPECT_EQ(a.y, b.y);
    const double settle = eval_static(noisy.static_map(), 2.35);
    double var = 0;
    for (std::size_t k = 500; k < a.size(); ++k) var += (a.y[k] - settle) * (a.y[k] - settle);
    const double sd = std::sqrt(var / static_cast<double>(a.size() - 500));
    EXPECT_NEAR(sd, 0.05, 0.01);
    const PlantSpec clean(reference_model("M3"), 0.0);
    EXPECT_EQ(simulate_plant(clean, gen_prbs({}), 1).y, simulate_plant(clean, gen_prbs({}), 2).y);
}

TEST(Plant, RejectsUnsuitableStructures) {
    EXPECT_THROW(PlantSpec(make_structure(kReferencePool, {TermSpec({1}, {1})}, {0.1}), 0.05), Error);
    EXPECT_THROW(PlantSpec(make_structure(kReferencePool, {TermSpec({1}, {}), TermSpec({}, {1})}, {1.5, 1.0}), 0.0), Error);
    EXPECT_THROW(PlantSpec(reference_model("M3"), -1.0), Error);
}

TEST(Decimate, Examples) {
    Series s;
    for (std::size_t k = 0; k < 168 * 12; ++k) {
        s.u.push_back(static_cast<double>(k));
        s.y.push_back(-static_cast<double>(k));
    }
    const auto d = decimate(s, 12);
    ASSERT_EQ(d.size(), 168u);
    EXPECT_EQ(d.u[1], 12.0);
    EXPECT_EQ(decimate(s, 1).u, s.u);
    EXPECT_EQ(decimate(s, 5000).size(), 1u);
}

TEST(Split, Examples) {
    const PlantSpec plant(reference_model("M3"), 0.05);
    const auto s = simulate_plant(plant, gen_prbs({}), 3);
    ASSERT_EQ(s.size(), 168u);
    const auto b = split(s, 100, 5, static_grid({}));
    EXPECT_EQ(b.estimation.size(), 100u);
    EXPECT_EQ(b.validation.size(), 68u);
    EXPECT_EQ(b.validation.u.front(), s.u[100]);
    EXPECT_EQ(b.static_curve.size(), 61u);
    try {
        (void)split(s, 168, 5, static_grid({}));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::SplitTooSmall);
    }
    EXPECT_EQ(split(s, 168 - 6, 5, static_grid({})).validation.size(), 6u);
    EXPECT_THROW(split(s, 168 - 5, 5, static_grid({})), Error);
}

TEST(StaticGrid, Endpoints) {
    const auto g = static_grid({});
    EXPECT_DOUBLE_EQ(g.front().u_bar, 1.0);
    EXPECT_DOUBLE_EQ(g.back().u_bar, 4.0);
    EXPECT_DOUBLE_EQ(g.front().y_bar, 24.0);
    EXPECT_DOUBLE_EQ(g.back().y_bar, 0.0);
    EXPECT_NEAR(g[30].u_bar, 2.5, 1e-15);
}

TEST(Csv, SeriesRoundTripIsExact) {
    const auto dir = temp_dir("series");
    const PlantSpec plant(reference_model("M3"), 0.05);
    const auto s = simulate_plant(plant, gen_prbs({}), 11);
    write_series_csv(dir / "s.csv", s, "config_hash=abc seed=1");
    const auto back = read_series_csv(dir / "s.csv");
    EXPECT_EQ(back.u, s.u);
    EXPECT_EQ(back.y, s.y);
    const auto curve = static_grid({});
    write_static_csv(dir / "c.csv", curve);
    const auto c2 = read_static_csv(dir / "c.csv");
    ASSERT_EQ(c2.size(), curve.size());
    for (std::size_t i = 0; i < curve.size(); ++i) EXPECT_EQ(c2[i].y_bar, curve[i].y_bar);
    std::ifstream in(dir / "s.csv");
    std::string first;
    std::getline(in, first);
    EXPECT_EQ(first, "# config_hash=abc seed=1");
}

TEST(Csv, Errors) {
    const auto dir = temp_dir("errors");
    try {
        (void)read_csv(dir / "missing.csv");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::Io);
    }
    std::ofstream(dir / "bad.csv") << "k,u,y\n0,1,x\n";
    try {
        (void)read_series_csv(dir / "bad.csv");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::Parse);
    }
    std::ofstream(dir / "short.csv") << "k,u,y\n0,1\n";
    EXPECT_THROW(read_series_csv(dir / "short.csv"), Error);
    std::ofstream(dir / "nocol.csv") << "k,u\n0,1\n";
    EXPECT_THROW(read_series_csv(dir / "nocol.csv"), Error);
}

TEST(Fixtures, MatchCompiledReferenceModels) {
    for (const auto& name : reference_model_names()) {
        const auto j = read_json(fs::path(GBID_FIXTURE_DIR) / (name + ".json"));
        EXPECT_EQ(j.at("name").get<std::string>(), name);
        const auto from_file = model_from_json(j);
        const auto compiled = reference_model(name);
        ASSERT_EQ(from_file.xi(), compiled.xi()) << name;
        EXPECT_EQ(from_file.selected(), compiled.selected()) << name;
        EXPECT_EQ(from_file.coefficients(), compiled.coefficients()) << name;
        const auto printed = reference_static_coefficients(name);
        if (j.contains("published_static_coefficients"))
            EXPECT_EQ(j.at("published_static_coefficients").get<std::vector<double>>(), printed) << name;
        else
            EXPECT_TRUE(printed.empty()) << name;
    }
    EXPECT_THROW(reference_model("M9"), Error);
}

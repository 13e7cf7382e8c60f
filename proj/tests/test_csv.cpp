#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "pauliflow/cli.hpp"

using namespace pauliflow;

namespace {

std::string to_csv(const SweepResult& result)
{
    std::ostringstream out;
    write_sweep_csv(result, out);
    return out.str();
}

bool same(const std::optional<double>& a, const std::optional<double>& b)
{
    return a.has_value() == b.has_value() && (!a || *a == *b);
}

} // namespace

TEST(Csv, HeaderAndLineEndings)
{
    SweepResult result;
    result.rows.push_back({1.0, {2.0, 3.0, 4.0, 5.0, 6.0, 7.0}});
    const std::string text = to_csv(result);
    EXPECT_EQ(text, std::string(kSweepHeader) + "\n1,2,3,4,5,6,7\n");
    EXPECT_EQ(text.find('\r'), std::string::npos);
}

TEST(Csv, NodeRowLeavesVelocityCellsEmpty)
{
    SweepResult result;
    SweepRow row;
    row.abscissa = 1.5e-7;
    row.values.v_independent = 5.99e4;
    row.values.density = 0.0;
    row.values.principal = 0.0;
    row.values.spurious = 0.0;
    result.rows.push_back(row);
    const std::string text = to_csv(result);
    const std::string line = text.substr(text.find('\n') + 1);
    EXPECT_EQ(line, "1.4999999999999999e-07,,,59900,0,0,0\n");
}

TEST(Csv, RoundTripIsExact)
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> mantissa(-1.0, 1.0);
    std::uniform_int_distribution<int> exponent(-300, 300);
    SweepResult result;
    for (int r = 0; r < 200; ++r) {
        SweepRow row;
        row.abscissa = std::ldexp(mantissa(rng), exponent(rng));
        std::optional<double>* cells[] = {&row.values.v_exact,   &row.values.v_factorized, &row.values.v_independent,
                                          &row.values.density,   &row.values.principal,    &row.values.spurious};
        for (auto* cell : cells) {
            if (rng() % 4 != 0) {
                *cell = std::ldexp(mantissa(rng), exponent(rng));
            }
        }
        result.rows.push_back(row);
    }
    result.rows.push_back({0.0, {-0.0, 5e-324, 1.7976931348623157e308, {}, {}, {}}});

    const std::vector<SweepRow> parsed = parse_sweep_csv(to_csv(result));
    ASSERT_EQ(parsed.size(), result.rows.size());
    for (std::size_t k = 0; k < parsed.size(); ++k) {
        EXPECT_EQ(parsed[k].abscissa, result.rows[k].abscissa);
        EXPECT_TRUE(same(parsed[k].values.v_exact, result.rows[k].values.v_exact)) << k;
        EXPECT_TRUE(same(parsed[k].values.v_factorized, result.rows[k].values.v_factorized)) << k;
        EXPECT_TRUE(same(parsed[k].values.v_independent, result.rows[k].values.v_independent)) << k;
        EXPECT_TRUE(same(parsed[k].values.density, result.rows[k].values.density)) << k;
        EXPECT_TRUE(same(parsed[k].values.principal, result.rows[k].values.principal)) << k;
        EXPECT_TRUE(same(parsed[k].values.spurious, result.rows[k].values.spurious)) << k;
    }
}

TEST(Csv, SweepRoundTripAndConstantIndependentColumn)
{
    const ScenarioConfig cfg = parse_config("[[packet]]\nx0_nm = 150\nk0_per_nm = 0.518\nsigma_nm = 25\nspin = \"up\"\n");
    const SweepResult result = run_velocity_sweep(cfg.system(), 0, 0.0, 300e-9, 31, 0.0, SweepOptions{});
    const std::string text = to_csv(result);
    const std::vector<SweepRow> parsed = parse_sweep_csv(text);
    ASSERT_EQ(parsed.size(), 31u);
    for (std::size_t k = 0; k < parsed.size(); ++k) {
        EXPECT_EQ(parsed[k].abscissa, result.rows[k].abscissa);
        EXPECT_EQ(parsed[k].values.v_independent, result.rows[k].values.v_independent);
        EXPECT_EQ(parsed[k].values.v_exact, result.rows[k].values.v_exact);
        EXPECT_EQ(*parsed[k].values.v_independent, *parsed[0].values.v_independent);
    }
    EXPECT_EQ(to_csv(result), text);
}

TEST(Csv, EmitWritesFileAndReportsPath)
{
    SweepResult result;
    result.rows.push_back({1.0, {}});
    const auto dir = std::filesystem::temp_directory_path() / "pauliflow-test-csv";
    std::filesystem::create_directories(dir);
    const auto path = dir / "sweep.csv";
    emit_csv(result, path);
    std::ifstream in(path, std::ios::binary);
    std::stringstream text;
    text << in.rdbuf();
    EXPECT_EQ(text.str(), std::string(kSweepHeader) + "\n1,,,,,,\n");

    const auto bad = dir / "missing-dir" / "sweep.csv";
    try {
        emit_csv(result, bad);
        FAIL() << "wrote into a missing directory";
    } catch (const IoError& e) {
        EXPECT_NE(std::string(e.what()).find(bad.string()), std::string::npos) << e.what();
    }
    std::filesystem::remove_all(dir);
}

TEST(Csv, MalformedInputIsRejected)
{
    const std::string header = std::string(kSweepHeader) + "\n";
    EXPECT_THROW((void)parse_sweep_csv(""), IoError);
    EXPECT_THROW((void)parse_sweep_csv("a,b\n1,2\n"), IoError);
    EXPECT_THROW((void)parse_sweep_csv(header + "1,2,3\n"), IoError);
    EXPECT_THROW((void)parse_sweep_csv(header + "1,x,,,,,\n"), IoError);
    EXPECT_THROW((void)parse_sweep_csv(header + ",1,,,,,\n"), IoError);
    EXPECT_TRUE(parse_sweep_csv(header).empty());
}

TEST(Csv, FormatDoubleRoundTrips)
{
    std::mt19937_64 rng(3);
    for (int k = 0; k < 10000; ++k) {
        double value = 0.0;
        const std::uint64_t bits = rng();
        std::memcpy(&value, &bits, sizeof value);
        if (!std::isfinite(value)) {
            continue;
        }
        EXPECT_EQ(std::strtod(format_double(value).c_str(), nullptr), value);
    }
    EXPECT_EQ(format_double(59967.635), "59967.635000000002");
}

TEST(Csv, TrajectoryTable)
{
    TrajectorySet set;
    set.times = {0.0, 1e-16};
    set.paths = {{1e-9, 2e-9}, {-1e-9, -3e-9}};
    std::ostringstream out;
    write_trajectory_csv(set, out);
    EXPECT_EQ(out.str(), "t_s,x1_m,x2_m\n0,1.0000000000000001e-09,-1.0000000000000001e-09\n"
                         "9.9999999999999998e-17,2.0000000000000001e-09,-3e-09\n");
}

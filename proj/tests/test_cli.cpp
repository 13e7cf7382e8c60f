#include <gtest/gtest.h>

#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pauliflow/cli.hpp"

using namespace pauliflow;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code = 0;
    std::string out;
    std::string err;
};

Outcome run(const std::vector<std::string>& args)
{
    std::ostringstream out;
    std::ostringstream err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    std::stringstream text;
    text << in.rdbuf();
    return text.str();
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override
    {
        dir_ = fs::temp_directory_path()
            / ("pauliflow-cli-" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
        unsetenv("PAULIFLOW_THREADS");
    }
    void TearDown() override
    {
        fs::remove_all(dir_);
        unsetenv("PAULIFLOW_THREADS");
    }

    fs::path file(const std::string& name) const { return dir_ / name; }

    fs::path write(const std::string& name, const std::string& text) const
    {
        std::ofstream(file(name), std::ios::binary) << text;
        return file(name);
    }

    // The single JSON error line of a failed run.
    static nlohmann::json error_of(const Outcome& r)
    {
        EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1) << r.err;
        return nlohmann::json::parse(r.err);
    }

    fs::path dir_;
};

constexpr const char* kSingle = "[[packet]]\nx0_nm = 150\nk0_per_nm = 0.518\nsigma_nm = 25\nspin = \"up\"\n"
                                "[sweep]\nfrom_nm = 0\nto_nm = 300\nsteps = 21\n";

} // namespace

TEST_F(CliTest, ValidateListsEverySuite)
{
    const Outcome r = run({"validate"});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(r.err.empty());
    for (const char* suite : {"oracle-equivalence", "spin-summed-density-current", "norm-collapse", "antisymmetry",
                              "pauli-nodes", "gradient-finite-difference", "same-spin-consistency",
                              "norm-decomposition"}) {
        EXPECT_NE(r.out.find(suite), std::string::npos) << suite;
    }
    EXPECT_EQ(r.out.find("FAIL"), std::string::npos);
}

TEST_F(CliTest, DefaultDistanceSweepHasFourRows)
{
    const Outcome r = run({"distance-sweep"});
    ASSERT_EQ(r.code, 0) << r.err;
    const std::vector<SweepRow> rows = parse_sweep_csv(r.out);
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_EQ(rows[0].abscissa, 1.41);
    EXPECT_EQ(rows[1].abscissa, 2.83);
    EXPECT_EQ(rows[2].abscissa, 5.65);
    EXPECT_EQ(rows[3].abscissa, 7.07);
    for (const auto& row : rows) {
        EXPECT_TRUE(row.values.v_exact && row.values.v_factorized && row.values.v_independent);
    }
}

TEST_F(CliTest, SweepsAreByteIdenticalAcrossThreadCounts)
{
    for (const char* command : {"velocity-sweep", "distance-sweep", "norm-sweep"}) {
        const Outcome one = run({command, "--threads", "1"});
        const Outcome four = run({command, "--threads", "4"});
        const Outcome again = run({command, "--threads", "1"});
        ASSERT_EQ(one.code, 0) << one.err;
        EXPECT_EQ(one.out, four.out) << command;
        EXPECT_EQ(one.out, again.out) << command;
    }
    setenv("PAULIFLOW_THREADS", "3", 1);
    const Outcome env = run({"velocity-sweep"});
    EXPECT_EQ(env.code, 0);
    EXPECT_EQ(env.out, run({"velocity-sweep", "--threads", "1"}).out);
}

TEST_F(CliTest, DefaultVelocitySweepCoversTheProbeRange)
{
    const Outcome r = run({"velocity-sweep"});
    ASSERT_EQ(r.code, 0) << r.err;
    const std::vector<SweepRow> rows = parse_sweep_csv(r.out);
    ASSERT_EQ(rows.size(), 301u);
    EXPECT_EQ(rows.front().abscissa, 0.0);
    EXPECT_NEAR(rows.back().abscissa, 300e-9, 1e-21);
}

TEST_F(CliTest, OutputFilesMetadataAndPlotScript)
{
    const fs::path config = write("single.toml", kSingle);
    const fs::path csv = file("v.csv");
    const fs::path script = file("plot.py");
    const Outcome r = run({"velocity-sweep", "--config", config.string(), "--out", csv.string(), "--plot-script",
                       script.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(r.out.empty());
    const std::vector<SweepRow> rows = parse_sweep_csv(slurp(csv));
    ASSERT_EQ(rows.size(), 21u);
    for (const auto& row : rows) {
        EXPECT_EQ(*row.values.v_independent, *rows[0].values.v_independent);
    }
    const std::string meta = slurp(csv.string() + ".meta");
    EXPECT_EQ(meta.rfind(kToolVersion, 0), 0u) << meta;
    EXPECT_NE(meta.find("k0_per_nm = 0.518"), std::string::npos) << meta;
    const std::string py = slurp(script);
    EXPECT_NE(py.find("\"v.csv\""), std::string::npos) << py;
    EXPECT_NE(py.find("matplotlib"), std::string::npos);
}

TEST_F(CliTest, NormSweepWithIntegratedNorms)
{
    const fs::path csv = file("n.csv");
    const Outcome r = run({"norm-sweep", "--integrated", "--out", csv.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const std::vector<SweepRow> rows = parse_sweep_csv(slurp(csv));
    ASSERT_EQ(rows.size(), 301u);
    for (const auto& row : rows) {
        ASSERT_TRUE(row.values.density && row.values.principal && row.values.spurious);
    }
    const std::string meta = slurp(csv.string() + ".meta");
    EXPECT_NE(meta.find("integrated_norm_det="), std::string::npos) << meta;
    EXPECT_NE(meta.find("integrated_norm_bruteforce="), std::string::npos) << meta;

    const Outcome no_out = run({"norm-sweep", "--integrated"});
    EXPECT_EQ(no_out.code, 2);
    EXPECT_EQ(error_of(no_out)["error"], "UsageError");
}

TEST_F(CliTest, Trajectories)
{
    const fs::path config = write("traj.toml", std::string(kSingle) + "[trajectory]\nt_max_fs = 5\ndt_fs = 0.5\n"
                                                                      "offsets_sigma = [1]\n");
    const fs::path csv = file("t.csv");
    const Outcome r = run({"trajectories", "--config", config.string(), "--out", csv.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const std::string text = slurp(csv);
    EXPECT_EQ(text.substr(0, text.find('\n')), "t_s,x1_m");
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 12);
    EXPECT_NE(slurp(csv.string() + ".meta").find("stop_reason=reached t_max"), std::string::npos);
}

TEST_F(CliTest, BenchEmitsTimingTable)
{
    const Outcome r = run({"bench", "--max-n", "3", "--large-n", "0"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "n,permsum_s,determinant_s,factorized_s");
    EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 3);
}

TEST_F(CliTest, UsageErrorsExitTwoWithJson)
{
    for (const std::vector<std::string>& args :
         std::vector<std::vector<std::string>>{{}, {"frobnicate"}, {"validate", "--bogus"}, {"validate", "--threads", "0"},
                                               {"velocity-sweep", "--config", file("absent.toml").string()},
                                               {"velocity-sweep", "--plot-script", "p.py"}}) {
        const Outcome r = run(args);
        EXPECT_EQ(r.code, 2) << r.err;
        const nlohmann::json line = error_of(r);
        EXPECT_EQ(line["exit_code"], 2);
        EXPECT_TRUE(line.contains("message"));
    }
    setenv("PAULIFLOW_THREADS", "many", 1);
    EXPECT_EQ(run({"distance-sweep"}).code, 2);
}

TEST_F(CliTest, ConfigErrorsCarryLineAndKey)
{
    const fs::path config = write("bad.toml", "[[packet]]\nx0_nm = 0\nsigma_nm = 0\nspin = \"up\"\n");
    const Outcome r = run({"velocity-sweep", "--config", config.string()});
    EXPECT_EQ(r.code, 2);
    const nlohmann::json line = error_of(r);
    EXPECT_EQ(line["error"], "ConfigError");
    EXPECT_EQ(line["line"], 3);
    EXPECT_EQ(line["key"], "sigma_nm");

    const fs::path distance = write("d.toml", std::string(kSingle).substr(0, std::string(kSingle).find("[sweep]"))
                                                  + "[sweep]\nd_values = [1]\n");
    EXPECT_EQ(run({"velocity-sweep", "--config", distance.string()}).code, 2);
}

TEST_F(CliTest, ComputationFailuresExitOne)
{
    const fs::path config = write("cap.toml", "[[packet]]\nx0_nm = 0\nsigma_nm = 25\nspin = \"up\"\n"
                                              "[[packet]]\nx0_nm = 60\nsigma_nm = 25\nspin = \"down\"\n"
                                              "[limits]\nassignment_max = 1\n");
    const Outcome r = run({"velocity-sweep", "--config", config.string()});
    EXPECT_EQ(r.code, 1);
    EXPECT_EQ(error_of(r)["error"], "CapacityError");

    const Outcome io = run({"validate", "--out", (dir_ / "no-such-dir" / "v.txt").string()});
    EXPECT_EQ(io.code, 1);
    EXPECT_EQ(error_of(io)["error"], "IoError");
}

TEST_F(CliTest, HelpExitsZero)
{
    const Outcome r = run({"--help"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("distance-sweep"), std::string::npos);
}

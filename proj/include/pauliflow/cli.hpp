#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pauliflow/bohm.hpp"
#include "pauliflow/experiments.hpp"
#include "pauliflow/manybody.hpp"
#include "pauliflow/trajectory.hpp"

namespace pauliflow {

/// Scenario file problem. line is 1-based, 0 when the problem is not tied to
/// a line (a missing section, for instance).
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::size_t line, std::string key, const std::string& what);

    std::size_t line() const { return line_; }
    const std::string& key() const { return key_; }

private:
    std::size_t line_;
    std::string key_;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct PositionSweepSpec {
    std::size_t particle = 0; // 0-based; files use 1-based particle_index
    double from = 0.0;        // m
    double to = 300e-9;       // m
    std::size_t steps = 301;
};

struct DistanceSweepSpec {
    std::vector<double> distances = default_distances();
    double x_probe = 150e-9; // m
};

struct TrajectorySpec {
    double dt = 0.1e-15;    // s
    double t_max = 100e-15; // s
    VelocityMethod method = VelocityMethod::Exact;
    /// Start offsets in units of each packet's sigma; empty means all zero.
    std::vector<double> offsets_sigma;
};

/// Everything a scenario file can set, resolved to SI units. A file defines at
/// most one sweep kind; when it defines none, both get their defaults.
struct ScenarioConfig {
    double mass_ratio = 1.0; // multiples of the electron mass
    double t = 0.0;          // s
    std::vector<GaussianPacket> packets;
    std::optional<PositionSweepSpec> position_sweep;
    std::optional<DistanceSweepSpec> distance_sweep;
    MethodSet methods;
    Limits limits;
    TrajectorySpec trajectory;
    DistanceMetric metric;
    GeometryRule geometry = GeometryRule::Split;

    PhysicalConstants constants() const;
    ManyBodySystem system() const;
    /// packets[0] is the probe; the spins of all packets form the pattern.
    ClusterTemplate cluster() const;
    /// Resolved values in scenario-file syntax.
    std::string echo() const;
};

ScenarioConfig parse_config(std::string_view text);
ScenarioConfig load_config(const std::filesystem::path& path);

/// Built-in scenario: the default cluster at d = 1.41 for position sweeps and
/// trajectories, and the default distance list for distance sweeps.
ScenarioConfig default_scenario();

inline constexpr std::string_view kSweepHeader =
    "abscissa,v_exact_mps,v_factorized_mps,v_independent_mps,density,principal,spurious";

/// %.17g, which round-trips every finite double.
std::string format_double(double value);

void write_sweep_csv(const SweepResult& result, std::ostream& out);
void emit_csv(const SweepResult& result, const std::filesystem::path& destination);
/// Inverse of write_sweep_csv. Throws IoError on malformed input.
std::vector<SweepRow> parse_sweep_csv(std::string_view text);

/// Header t_s,x1_m,...,xN_m.
void write_trajectory_csv(const TrajectorySet& set, std::ostream& out);

struct BenchRow {
    std::size_t n = 0;
    std::optional<double> permsum_s;
    std::optional<double> determinant_s;
    std::optional<double> factorized_s;
};

struct BenchOptions {
    std::size_t max_n = 10;
    std::size_t large_n = 100; // factorized-only row; 0 disables it
    double min_seconds = 0.25; // keep repeating a measurement until this much time is spent
    std::size_t min_repeats = 5;
    std::size_t max_repeats = 2000;
};

/// Same-spin chain of n packets, 3 sigma apart, each particle at its centre.
ManyBodySystem bench_system(std::size_t n);

/// Per-N best-of-repeats wall time of one psi_permsum, one psi_assignment and
/// one velocity_factorized evaluation.
std::vector<BenchRow> run_bench(const BenchOptions& options);
void write_bench_csv(const std::vector<BenchRow>& rows, std::ostream& out);

/// Full command line without the program name. Normal output goes to `out`,
/// help text too; failures print one JSON object line to `err`.
/// Returns 0 on success, 1 on computation or validation failure, 2 on usage errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace pauliflow

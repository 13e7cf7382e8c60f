#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include "pauliflow/cli.hpp"
#include "pauliflow/errors.hpp"
#include "pauliflow/parallel.hpp"
#include "pauliflow/validation.hpp"

namespace pauliflow {

namespace {

// Thrown for inconsistent flag combinations found after parsing.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct GlobalFlags {
    std::string config;
    std::string out;
    std::string plot_script;
    std::optional<std::size_t> threads;
};

std::size_t resolve_threads(const GlobalFlags& flags)
{
    if (flags.threads) {
        return *flags.threads;
    }
    if (const char* env = std::getenv("PAULIFLOW_THREADS"); env != nullptr && *env != '\0') {
        char* end = nullptr;
        const unsigned long long value = std::strtoull(env, &end, 10);
        if (*end != '\0' || value == 0 || value > 4096) {
            throw UsageError(std::string("PAULIFLOW_THREADS must be a positive integer, got '") + env + "'");
        }
        return static_cast<std::size_t>(value);
    }
    return hardware_threads();
}

ScenarioConfig scenario(const GlobalFlags& flags)
{
    return flags.config.empty() ? default_scenario() : load_config(flags.config);
}

std::ofstream open_output(const std::filesystem::path& path)
{
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    return file;
}

void finish(std::ofstream& file, const std::filesystem::path& path)
{
    file.flush();
    if (!file) {
        throw IoError("write failed: " + path.string());
    }
}

// Writes `body` to --out when given, else to stdout.
template <typename WriteFn>
void emit(const GlobalFlags& flags, std::ostream& out, WriteFn&& write)
{
    if (flags.out.empty()) {
        write(out);
        return;
    }
    std::ofstream file = open_output(flags.out);
    write(file);
    finish(file, flags.out);
}

void write_meta(const GlobalFlags& flags, const std::string& text)
{
    if (flags.out.empty()) {
        return;
    }
    const std::filesystem::path path = flags.out + ".meta";
    std::ofstream file = open_output(path);
    file << text;
    finish(file, path);
}

enum class PlotKind { Velocity, Distance, Norm, Trajectory, Bench };

std::string python_string(const std::string& s)
{
    return nlohmann::json(s).dump();
}

void write_plot_script(const GlobalFlags& flags, PlotKind kind)
{
    if (flags.plot_script.empty()) {
        return;
    }
    const std::filesystem::path script = flags.plot_script;
    const std::filesystem::path csv = flags.out;
    const std::filesystem::path base = script.has_parent_path() ? script.parent_path() : ".";
    const std::string relative = std::filesystem::relative(csv, base).generic_string();

    std::ostringstream py;
    py << "import csv\n"
          "import pathlib\n\n"
          "import matplotlib\n"
          "matplotlib.use(\"Agg\")\n"
          "import matplotlib.pyplot as plt\n\n"
       << "CSV = pathlib.Path(__file__).resolve().parent / " << python_string(relative) << "\n\n"
       << "with open(CSV, newline=\"\") as f:\n"
          "    rows = list(csv.DictReader(f))\n\n\n"
          "def column(name, scale=1.0):\n"
          "    return [float(r[name]) * scale if r[name] != \"\" else float(\"nan\") for r in rows]\n\n\n"
          "fig, ax = plt.subplots(figsize=(7, 4.5))\n";
    switch (kind) {
    case PlotKind::Velocity:
    case PlotKind::Distance: {
        const bool position = kind == PlotKind::Velocity;
        py << "x = column(\"abscissa\"" << (position ? ", 1e9" : "") << ")\n"
           << "for name, label in [(\"v_exact_mps\", \"exact\"), (\"v_factorized_mps\", \"factorized\"),\n"
              "                    (\"v_independent_mps\", \"independent\")]:\n"
              "    y = column(name)\n"
              "    if any(v == v for v in y):\n"
              "        ax.plot(x, y, " << (position ? "" : "marker=\"o\", ") << "label=label)\n"
           << "ax.set_xlabel(" << (position ? "\"position (nm)\"" : "\"phase-space distance d\"") << ")\n"
           << "ax.set_ylabel(\"Bohm velocity (m/s)\")\n";
        break;
    }
    case PlotKind::Norm:
        py << "x = column(\"abscissa\")\n"
              "density = column(\"density\")\n"
              "peak = max(v for v in density if v == v) or 1.0\n"
              "for name in [\"density\", \"principal\", \"spurious\"]:\n"
              "    ax.plot(x, [v / peak for v in column(name)], label=name)\n"
              "ax.set_xlabel(\"abscissa (m, or d for distance sweeps)\")\n"
              "ax.set_ylabel(\"relative weight\")\n";
        break;
    case PlotKind::Trajectory:
        py << "t = column(\"t_s\", 1e15)\n"
              "for name in rows[0].keys() if rows else []:\n"
              "    if name != \"t_s\":\n"
              "        ax.plot(column(name, 1e9), t, label=name)\n"
              "ax.set_xlabel(\"position (nm)\")\n"
              "ax.set_ylabel(\"time (fs)\")\n";
        break;
    case PlotKind::Bench:
        py << "n = column(\"n\")\n"
              "for name in [\"permsum_s\", \"determinant_s\", \"factorized_s\"]:\n"
              "    ax.semilogy(n, column(name), marker=\"o\", label=name)\n"
              "ax.set_xlabel(\"N\")\n"
              "ax.set_ylabel(\"seconds per evaluation\")\n";
        break;
    }
    py << "ax.legend()\n"
          "fig.tight_layout()\n"
          "fig.savefig(CSV.with_suffix(\".png\"), dpi=150)\n";

    std::ofstream file = open_output(script);
    file << py.str();
    finish(file, script);
}

SweepOptions sweep_options(const ScenarioConfig& cfg, const GlobalFlags& flags)
{
    return SweepOptions{cfg.methods, cfg.limits, resolve_threads(flags)};
}

std::string scenario_meta(const SweepResult& result, const ScenarioConfig& cfg)
{
    return result.metadata + "\n# resolved scenario\n" + cfg.echo();
}

int velocity_sweep(const GlobalFlags& flags, std::ostream& out)
{
    const ScenarioConfig cfg = scenario(flags);
    if (!cfg.position_sweep) {
        throw UsageError("the scenario defines a distance sweep; use distance-sweep or norm-sweep");
    }
    const auto& s = *cfg.position_sweep;
    const SweepResult result =
        run_velocity_sweep(cfg.system(), s.particle, s.from, s.to, s.steps, cfg.t, sweep_options(cfg, flags));
    emit(flags, out, [&](std::ostream& o) { write_sweep_csv(result, o); });
    write_meta(flags, scenario_meta(result, cfg));
    write_plot_script(flags, PlotKind::Velocity);
    return 0;
}

int distance_sweep(const GlobalFlags& flags, std::ostream& out)
{
    const ScenarioConfig cfg = scenario(flags);
    if (!cfg.distance_sweep) {
        throw UsageError("the scenario defines a positional sweep; use velocity-sweep or norm-sweep");
    }
    const auto& s = *cfg.distance_sweep;
    const SweepResult result = run_distance_sweep(cfg.cluster(), s.distances, s.x_probe, cfg.t, sweep_options(cfg, flags));
    emit(flags, out, [&](std::ostream& o) { write_sweep_csv(result, o); });
    write_meta(flags, scenario_meta(result, cfg));
    write_plot_script(flags, PlotKind::Distance);
    return 0;
}

std::string integrated_norms(const ManyBodySystem& sys, const Limits& limits)
{
    std::string line = "integrated_norm_det=" + format_double(integrated_norm_det(sys));
    if (sys.size() <= limits.bruteforce_norm_max_n) {
        line += " integrated_norm_bruteforce=" + format_double(integrated_norm_bruteforce(sys, limits));
    } else {
        line += " integrated_norm_bruteforce=skipped(N>" + std::to_string(limits.bruteforce_norm_max_n) + ")";
    }
    return line;
}

int norm_sweep(const GlobalFlags& flags, bool integrated, std::ostream& out)
{
    if (integrated && flags.out.empty()) {
        throw UsageError("--integrated writes to <out>.meta and needs --out");
    }
    const ScenarioConfig cfg = scenario(flags);
    const SweepOptions options = sweep_options(cfg, flags);
    SweepResult result;
    std::string extra;
    if (cfg.position_sweep) {
        const auto& s = *cfg.position_sweep;
        const ManyBodySystem sys = cfg.system();
        result = run_norm_sweep(sys, s.particle, s.from, s.to, s.steps, cfg.t, options);
        if (integrated) {
            extra = integrated_norms(sys, cfg.limits) + '\n';
        }
    } else {
        const auto& s = *cfg.distance_sweep;
        const ClusterTemplate cluster = cfg.cluster();
        result = run_norm_sweep(cluster, s.distances, s.x_probe, cfg.t, options);
        if (integrated) {
            for (double d : s.distances) {
                extra += "d=" + format_double(d) + ' ' + integrated_norms(build_cluster(cluster, d), cfg.limits) + '\n';
            }
        }
    }
    emit(flags, out, [&](std::ostream& o) { write_sweep_csv(result, o); });
    std::string meta = scenario_meta(result, cfg);
    if (integrated) {
        meta += "\n# integrated norms\n" + extra;
    }
    write_meta(flags, meta);
    write_plot_script(flags, PlotKind::Norm);
    return 0;
}

int trajectories(const GlobalFlags& flags, std::ostream& out)
{
    const ScenarioConfig cfg = scenario(flags);
    const ManyBodySystem sys = cfg.system();
    std::vector<double> start;
    for (std::size_t j = 0; j < sys.size(); ++j) {
        const double offset = cfg.trajectory.offsets_sigma.empty() ? 0.0 : cfg.trajectory.offsets_sigma[j];
        start.push_back(sys.packet(j).x0 + offset * sys.packet(j).sigma);
    }
    const TrajectorySet set =
        integrate(sys, start, cfg.trajectory.t_max, cfg.trajectory.dt, cfg.trajectory.method, cfg.limits);
    emit(flags, out, [&](std::ostream& o) { write_trajectory_csv(set, o); });
    std::string meta = std::string(kToolVersion) + "\ntrajectories method=" + std::string(to_string(set.method))
        + "\nstop_reason=" + (set.truncated() ? set.stop_reason : "reached t_max") + "\n\n# resolved scenario\n"
        + cfg.echo();
    write_meta(flags, meta);
    write_plot_script(flags, PlotKind::Trajectory);
    return 0;
}

int validate(const GlobalFlags& flags, std::uint64_t seed, std::ostream& out)
{
    if (!flags.plot_script.empty()) {
        throw UsageError("validate has no plot output");
    }
    const std::vector<SuiteReport> reports = run_validation(seed);
    emit(flags, out, [&](std::ostream& o) { print_reports(o, reports); });
    const bool ok = std::all_of(reports.begin(), reports.end(), [](const SuiteReport& r) { return r.passed(); });
    return ok ? 0 : 1;
}

int bench(const GlobalFlags& flags, const BenchOptions& options, std::ostream& out)
{
    const std::vector<BenchRow> rows = run_bench(options);
    emit(flags, out, [&](std::ostream& o) { write_bench_csv(rows, o); });
    write_plot_script(flags, PlotKind::Bench);
    return 0;
}

void error_line(std::ostream& err, const std::string& kind, const std::string& message, int code,
                nlohmann::json extra = nlohmann::json::object())
{
    nlohmann::json line = {{"error", kind}, {"message", message}, {"exit_code", code}};
    line.update(extra);
    err << line.dump() << '\n';
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Bohmian velocities of many-electron Gaussian wave packets", "pauliflow"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalFlags flags;
    app.add_option("--config", flags.config, "Scenario file (built-in default scenario when omitted)")
        ->check(CLI::ExistingFile);
    app.add_option("--out", flags.out, "Output CSV path (stdout when omitted)");
    app.add_option("--plot-script", flags.plot_script, "Write a matplotlib script that plots the --out CSV");
    app.add_option("--threads", flags.threads, "Sweep worker threads (fallback: PAULIFLOW_THREADS, then all cores)")
        ->check(CLI::Range(std::size_t{1}, std::size_t{4096}));

    auto* velocity = app.add_subcommand("velocity-sweep", "Velocities while one particle moves across a range");
    auto* distance = app.add_subcommand("distance-sweep", "Probe velocities for neighbours at each phase-space distance");
    auto* norm = app.add_subcommand("norm-sweep", "Density split into principal and spurious spin terms");
    bool integrated = false;
    norm->add_flag("--integrated", integrated, "Also write integrated norms to <out>.meta");
    auto* traj = app.add_subcommand("trajectories", "Integrate Bohm trajectories from the packet centres");
    auto* val = app.add_subcommand("validate", "Run the oracle-equivalence and invariant suites");
    std::uint64_t seed = 20090601;
    val->add_option("--seed", seed, "Random seed of the suites");
    auto* bench_cmd = app.add_subcommand("bench", "Time permutation sum, determinant and factorized velocity");
    BenchOptions bench_options;
    bench_cmd->add_option("--max-n", bench_options.max_n, "Largest N for the permutation sum")
        ->check(CLI::Range(std::size_t{2}, std::size_t{12}));
    bench_cmd->add_option("--large-n", bench_options.large_n, "N of the extra factorized-only row (0 disables)");

    std::vector<const char*> argv{"pauliflow"};
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            app.exit(e, out, err);
            return 0;
        }
        error_line(err, "UsageError", e.what(), 2);
        return 2;
    }

    try {
        if (!flags.plot_script.empty() && flags.out.empty()) {
            throw UsageError("--plot-script needs --out");
        }
        if (velocity->parsed()) {
            return velocity_sweep(flags, out);
        }
        if (distance->parsed()) {
            return distance_sweep(flags, out);
        }
        if (norm->parsed()) {
            return norm_sweep(flags, integrated, out);
        }
        if (traj->parsed()) {
            return trajectories(flags, out);
        }
        if (val->parsed()) {
            return validate(flags, seed, out);
        }
        return bench(flags, bench_options, out);
    } catch (const ConfigError& e) {
        error_line(err, "ConfigError", e.what(), 2, {{"line", e.line()}, {"key", e.key()}});
        return 2;
    } catch (const UsageError& e) {
        error_line(err, "UsageError", e.what(), 2);
        return 2;
    } catch (const GeometryError& e) {
        error_line(err, "GeometryError", e.what(), 2);
        return 2;
    } catch (const DomainError& e) {
        error_line(err, "DomainError", e.what(), 2);
        return 2;
    } catch (const CapacityError& e) {
        error_line(err, "CapacityError", e.what(), 1);
        return 1;
    } catch (const NodeError& e) {
        error_line(err, "NodeError", e.what(), 1);
        return 1;
    } catch (const IoError& e) {
        error_line(err, "IoError", e.what(), 1);
        return 1;
    } catch (const std::exception& e) {
        error_line(err, "Error", e.what(), 1);
        return 1;
    }
}

} // namespace pauliflow

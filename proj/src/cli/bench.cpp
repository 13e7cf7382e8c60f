#include <algorithm>
#include <chrono>
#include <ostream>

#include "pauliflow/bohm.hpp"
#include "pauliflow/cli.hpp"
#include "pauliflow/manybody.hpp"

namespace pauliflow {

namespace {

// Best-of-repeats wall time of fn(); repeats until min_seconds have passed.
template <typename Fn>
double best_time(const BenchOptions& options, Fn&& fn)
{
    using Clock = std::chrono::steady_clock;
    double best = 0.0;
    double spent = 0.0;
    for (std::size_t r = 0; r < std::max<std::size_t>(options.max_repeats, 1); ++r) {
        const auto start = Clock::now();
        fn();
        const double elapsed = std::chrono::duration<double>(Clock::now() - start).count();
        best = r == 0 ? elapsed : std::min(best, elapsed);
        spent += elapsed;
        if (spent >= options.min_seconds && r + 1 >= options.min_repeats) {
            break;
        }
    }
    return best;
}

Configuration centres(const ManyBodySystem& sys)
{
    Configuration conf;
    for (const auto& p : sys.packets()) {
        conf.positions.push_back(p.x0);
    }
    return conf;
}

// Keeps results observable so the timed calls are not optimized away.
volatile double sink = 0.0;

} // namespace

ManyBodySystem bench_system(std::size_t n)
{
    const PhysicalConstants c;
    const double sigma = 25e-9;
    const double k0 = c.mass * 6e4 / c.hbar;
    std::vector<GaussianPacket> packets;
    for (std::size_t j = 0; j < n; ++j) {
        GaussianPacket p;
        p.x0 = 3.0 * sigma * static_cast<double>(j);
        p.k0 = k0 * (1.0 + 0.01 * static_cast<double>(j % 7));
        p.sigma = sigma;
        p.spin = Spin::Up;
        packets.push_back(p);
    }
    return ManyBodySystem(std::move(packets), c);
}

std::vector<BenchRow> run_bench(const BenchOptions& options)
{
    std::vector<BenchRow> rows;
    Limits limits;
    limits.permsum_max_n = std::max(limits.permsum_max_n, options.max_n);
    for (std::size_t n = 2; n <= options.max_n; ++n) {
        const ManyBodySystem sys = bench_system(n);
        const Configuration conf = centres(sys);
        const std::vector<Spin> spins = sys.nominal_spins();
        const SpinAssignment assignment = nominal_assignment(sys);
        BenchRow row;
        row.n = n;
        row.permsum_s = best_time(options, [&] { sink = psi_permsum(sys, conf, spins, limits).log_magnitude; });
        row.determinant_s = best_time(options, [&] { sink = psi_assignment(sys, conf, assignment).log_magnitude; });
        row.factorized_s = best_time(options, [&] { sink = velocity_factorized(sys, conf, 0, limits); });
        rows.push_back(row);
    }
    if (options.large_n > options.max_n) {
        const ManyBodySystem sys = bench_system(options.large_n);
        const Configuration conf = centres(sys);
        BenchRow row;
        row.n = options.large_n;
        row.factorized_s = best_time(options, [&] { sink = velocity_factorized(sys, conf, 0, limits); });
        rows.push_back(row);
    }
    return rows;
}

void write_bench_csv(const std::vector<BenchRow>& rows, std::ostream& out)
{
    out << "n,permsum_s,determinant_s,factorized_s\n";
    for (const auto& row : rows) {
        out << row.n;
        for (const auto& cell : {row.permsum_s, row.determinant_s, row.factorized_s}) {
            out << ',';
            if (cell) {
                out << format_double(*cell);
            }
        }
        out << '\n';
    }
}

} // namespace pauliflow

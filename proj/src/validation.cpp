#include "pauliflow/validation.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <ostream>

#include "pauliflow/bohm.hpp"
#include "pauliflow/errors.hpp"

namespace pauliflow {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void record(SuiteReport& report, double error)
{
    ++report.checks;
    if (!(error <= report.tolerance)) {
        ++report.failures;
    }
    if (std::isnan(error)) {
        report.max_error = std::numeric_limits<double>::infinity();
    } else {
        report.max_error = std::max(report.max_error, error);
    }
}

std::size_t random_size(Rng& rng, std::size_t max_n)
{
    return 1 + rng.index(max_n);
}

// Velocity scale hbar / (m sigma) of a system, used to normalize errors of
// quantities that can legitimately vanish.
double velocity_unit(const ManyBodySystem& sys)
{
    return sys.constants().hbar / (sys.constants().mass * sys.packet(0).sigma);
}

double mean_sigma(const ManyBodySystem& sys)
{
    double total = 0.0;
    for (const auto& p : sys.packets()) {
        total += p.sigma;
    }
    return total / static_cast<double>(sys.size());
}

// log of the largest magnitude a single permutation term can reach:
// sum over particles of the largest orbital of matching spin, over sqrt(N!).
double log_term_scale(const ManyBodySystem& sys, const Configuration& conf, const std::vector<Spin>& spins)
{
    double total = -0.5 * std::lgamma(static_cast<double>(sys.size()) + 1.0);
    for (std::size_t p = 0; p < sys.size(); ++p) {
        double row = kNegInf;
        for (const auto& packet : sys.packets()) {
            if (packet.spin == spins[p]) {
                row = std::max(row, eval_scaled(packet, conf.positions[p], conf.t, sys.constants()).log_magnitude);
            }
        }
        total += row;
    }
    return total;
}

// Relative amplitude difference with an absolute floor of 8 n epsilon of the
// term scale, the level below which the determinant reports an exact zero.
// Both sides of a comparison are cancellation limited below that floor.
double amplitude_error(const ScaledComplex& a, const ScaledComplex& b, double log_scale, double tolerance,
                       std::size_t n)
{
    if (log_scale == kNegInf) {
        return a.is_zero() && b.is_zero() ? 0.0 : std::numeric_limits<double>::infinity();
    }
    const std::complex<double> x = a.is_zero() ? 0.0 : a.scaled(log_scale);
    const std::complex<double> y = b.is_zero() ? 0.0 : b.scaled(log_scale);
    const double floor = 8.0 * static_cast<double>(n) * std::numeric_limits<double>::epsilon() / tolerance;
    const double denominator = std::max({std::abs(x), std::abs(y), floor});
    return std::abs(x - y) / denominator;
}

} // namespace

double Rng::uniform(double lo, double hi)
{
    const double unit = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * unit;
}

std::size_t Rng::index(std::size_t n)
{
    return static_cast<std::size_t>(engine_() % n);
}

ManyBodySystem random_system(Rng& rng, std::size_t n, double sigma)
{
    std::vector<GaussianPacket> packets;
    packets.reserve(n);
    const double half_span = static_cast<double>(n);
    for (std::size_t j = 0; j < n; ++j) {
        GaussianPacket packet;
        packet.sigma = sigma * rng.uniform(0.8, 1.25);
        packet.x0 = sigma * rng.uniform(-half_span, half_span);
        packet.k0 = rng.uniform(-2.0, 2.0) / sigma;
        packet.spin = rng.coin() ? Spin::Up : Spin::Down;
        packets.push_back(packet);
    }
    return ManyBodySystem(std::move(packets));
}

Configuration random_configuration(Rng& rng, const ManyBodySystem& sys, double t)
{
    double centre = 0.0;
    double width = 0.0;
    for (const auto& p : sys.packets()) {
        centre += center_at(p, t, sys.constants());
        width = std::max(width, width_at(p, t, sys.constants()));
    }
    centre /= static_cast<double>(sys.size());
    const double half_span = (static_cast<double>(sys.size()) + 1.5) * width;
    Configuration conf;
    conf.t = t;
    for (std::size_t p = 0; p < sys.size(); ++p) {
        conf.positions.push_back(centre + rng.uniform(-half_span, half_span));
    }
    return conf;
}

TupleOracle tuple_oracle(const ManyBodySystem& sys, const Configuration& conf, std::size_t i, const Limits& limits)
{
    const std::size_t n = sys.size();
    std::vector<ScaledComplex> amplitudes;
    std::vector<ScaledComplex> gradients;
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
        std::vector<Spin> spins(n);
        for (std::size_t p = 0; p < n; ++p) {
            spins[p] = ((mask >> p) & 1U) != 0 ? Spin::Up : Spin::Down;
        }
        amplitudes.push_back(psi_permsum(sys, conf, spins, limits));
        gradients.push_back(grad_psi_permsum(sys, conf, spins, i, limits));
    }
    TupleOracle out;
    double scale = kNegInf;
    for (const auto& a : amplitudes) {
        scale = std::max(scale, 2.0 * a.log_magnitude);
    }
    if (scale == kNegInf) {
        return out;
    }
    out.log_scale = scale;
    for (std::size_t k = 0; k < amplitudes.size(); ++k) {
        out.density += std::exp(2.0 * amplitudes[k].log_magnitude - scale);
        const ScaledComplex product = amplitudes[k].conj() * gradients[k];
        if (!product.is_zero()) {
            out.current += std::exp(product.log_magnitude - scale) * std::sin(product.phase);
        }
    }
    out.current *= sys.constants().hbar / sys.constants().mass;
    return out;
}

SuiteReport oracle_equivalence_suite(std::uint64_t seed, std::size_t systems)
{
    SuiteReport report{"oracle-equivalence", 0, 0, 0.0, 1e-10};
    Rng rng(seed);
    for (std::size_t s = 0; s < systems; ++s) {
        const ManyBodySystem sys = random_system(rng, random_size(rng, 6));
        const Configuration conf = random_configuration(rng, sys);
        for (const auto& assignment : enumerate_assignments(sys.size(), sys.up_count())) {
            const ScaledComplex fast = psi_assignment(sys, conf, assignment);
            const std::vector<Spin> spins = assignment.spins(sys.size());
            const ScaledComplex reference = psi_permsum(sys, conf, spins);
            record(report, amplitude_error(fast, reference, log_term_scale(sys, conf, spins), report.tolerance,
                                           sys.size()));
        }
    }
    return report;
}

SuiteReport spin_summed_suite(std::uint64_t seed, std::size_t systems)
{
    SuiteReport report{"spin-summed-density-current", 0, 0, 0.0, 1e-9};
    Rng rng(seed);
    for (std::size_t s = 0; s < systems; ++s) {
        const ManyBodySystem sys = random_system(rng, random_size(rng, 6));
        const Configuration conf = random_configuration(rng, sys);
        const std::size_t i = rng.index(sys.size());
        const SpinSummedFlux flux = spin_summed_flux(sys, conf);
        const TupleOracle reference = tuple_oracle(sys, conf, i);
        if (reference.density == 0.0 || flux.density == 0.0) {
            record(report, reference.density == flux.density ? 0.0 : 1.0);
            continue;
        }
        const double shift = std::exp(flux.log_scale - reference.log_scale);
        const double density = flux.density * shift;
        const double current = flux.currents[i] * shift;
        record(report, std::abs(density - reference.density) / reference.density);
        const double current_scale = std::abs(reference.current) + reference.density * velocity_unit(sys);
        record(report, std::abs(current - reference.current) / current_scale);
    }
    return report;
}

SuiteReport norm_collapse_suite(std::uint64_t seed, std::size_t systems)
{
    SuiteReport report{"norm-collapse", 0, 0, 0.0, 1e-10};
    Rng rng(seed);
    for (std::size_t s = 0; s < systems; ++s) {
        const ManyBodySystem sys = random_system(rng, random_size(rng, 4));
        const double fast = integrated_norm_det(sys);
        const double brute = integrated_norm_bruteforce(sys);
        record(report, std::abs(fast - brute) / std::abs(brute));
    }
    return report;
}

SuiteReport antisymmetry_suite(std::uint64_t seed, std::size_t systems)
{
    SuiteReport report{"antisymmetry", 0, 0, 0.0, 1e-12};
    Rng rng(seed);
    for (std::size_t s = 0; s < systems; ++s) {
        const ManyBodySystem sys = random_system(rng, 2 + rng.index(5));
        const Configuration conf = random_configuration(rng, sys);
        const auto assignments = enumerate_assignments(sys.size(), sys.up_count());
        const std::vector<Spin> spins = assignments[rng.index(assignments.size())].spins(sys.size());
        const std::size_t i = rng.index(sys.size());
        std::size_t j = rng.index(sys.size() - 1);
        j += j >= i ? 1 : 0;

        Configuration swapped = conf;
        std::swap(swapped.positions[i], swapped.positions[j]);
        std::vector<Spin> swapped_spins = spins;
        std::swap(swapped_spins[i], swapped_spins[j]);

        const ScaledComplex original = psi_permsum(sys, conf, spins);
        const ScaledComplex exchanged = psi_permsum(sys, swapped, swapped_spins);
        record(report, amplitude_error(exchanged, -original, log_term_scale(sys, conf, spins), report.tolerance,
                                       sys.size()));
    }
    return report;
}

SuiteReport pauli_suite(std::uint64_t seed, std::size_t systems)
{
    SuiteReport report{"pauli-nodes", 0, 0, 0.0, 1e-14};
    Rng rng(seed);
    for (std::size_t s = 0; s < systems; ++s) {
        std::vector<GaussianPacket> packets = random_system(rng, 2 + rng.index(4)).packets();
        // Duplicate one orbital, spin label included.
        const std::size_t source = rng.index(packets.size());
        std::size_t target = rng.index(packets.size() - 1);
        target += target >= source ? 1 : 0;
        packets[target] = packets[source];
        const ManyBodySystem sys(packets);
        const Configuration conf = random_configuration(rng, sys);

        // Amplitudes relative to the product of per-particle orbital maxima.
        double scale = 0.0;
        for (std::size_t p = 0; p < sys.size(); ++p) {
            double row = kNegInf;
            for (const auto& packet : sys.packets()) {
                row = std::max(row, eval_scaled(packet, conf.positions[p], conf.t, sys.constants()).log_magnitude);
            }
            scale += row;
        }
        for (const auto& assignment : enumerate_assignments(sys.size(), sys.up_count())) {
            const ScaledComplex brute = psi_permsum(sys, conf, assignment.spins(sys.size()));
            record(report, brute.is_zero() ? 0.0 : std::exp(brute.log_magnitude - scale));
            const ScaledComplex fast = psi_assignment(sys, conf, assignment);
            record(report, fast.is_zero() ? 0.0 : std::exp(fast.log_magnitude - scale));
        }
        bool node = false;
        try {
            (void)velocity_exact(sys, conf, 0);
        } catch (const NodeError&) {
            node = true;
        }
        record(report, node ? 0.0 : 1.0);
        node = false;
        try {
            (void)velocity_factorized(sys, conf, target);
        } catch (const NodeError&) {
            node = true;
        }
        record(report, node ? 0.0 : 1.0);
    }
    return report;
}

SuiteReport gradient_suite(std::uint64_t seed, std::size_t samples)
{
    SuiteReport report{"gradient-finite-difference", 0, 0, 0.0, 1e-6};
    Rng rng(seed);
    for (std::size_t s = 0; s < samples; ++s) {
        const ManyBodySystem sys = random_system(rng, random_size(rng, 5));
        const double t = rng.coin() ? 0.0 : rng.uniform(0.0, 2.0) * 2.0 * sys.constants().mass
                * sys.packet(0).sigma * sys.packet(0).sigma / sys.constants().hbar;
        const Configuration conf = random_configuration(rng, sys, t);
        const auto assignments = enumerate_assignments(sys.size(), sys.up_count());
        const SpinAssignment& assignment = assignments[rng.index(assignments.size())];
        const std::size_t i = rng.index(sys.size());

        const ScaledComplex value = psi_assignment(sys, conf, assignment);
        if (value.is_zero()) {
            continue;
        }
        const double h = 1e-6 * mean_sigma(sys);
        Configuration plus = conf;
        Configuration minus = conf;
        plus.positions[i] += h;
        minus.positions[i] -= h;
        const double reference = value.log_magnitude;
        const std::complex<double> fd = (psi_assignment(sys, plus, assignment).scaled(reference)
                                         - psi_assignment(sys, minus, assignment).scaled(reference))
            / (2.0 * h);
        const std::complex<double> analytic = grad_psi_assignment(sys, conf, assignment, i).scaled(reference);
        const double scale = std::abs(analytic) + 1.0 / mean_sigma(sys);
        record(report, std::abs(fd - analytic) / scale);
    }
    return report;
}

SuiteReport same_spin_consistency_suite(std::uint64_t seed, std::size_t systems)
{
    SuiteReport report{"same-spin-consistency", 0, 0, 0.0, 1e-12};
    Rng rng(seed);
    for (std::size_t s = 0; s < systems; ++s) {
        std::vector<GaussianPacket> packets = random_system(rng, random_size(rng, 6)).packets();
        const Spin spin = rng.coin() ? Spin::Up : Spin::Down;
        for (auto& p : packets) {
            p.spin = spin;
        }
        const ManyBodySystem sys(packets);
        const Configuration conf = random_configuration(rng, sys);
        const std::size_t i = rng.index(sys.size());
        try {
            const double exact = velocity_exact(sys, conf, i);
            const double factorized = velocity_factorized(sys, conf, i);
            record(report, std::abs(exact - factorized) / (std::abs(exact) + velocity_unit(sys)));
        } catch (const NodeError&) {
            // Both paths must agree on nodes too.
            bool factorized_node = false;
            try {
                (void)velocity_factorized(sys, conf, i);
            } catch (const NodeError&) {
                factorized_node = true;
            }
            record(report, factorized_node ? 0.0 : 1.0);
        }
    }
    return report;
}

SuiteReport decomposition_suite(std::uint64_t seed, std::size_t systems)
{
    SuiteReport report{"norm-decomposition", 0, 0, 0.0, 1e-12};
    Rng rng(seed);
    for (std::size_t s = 0; s < systems; ++s) {
        const ManyBodySystem sys = random_system(rng, random_size(rng, 6));
        const Configuration conf = random_configuration(rng, sys);
        const NormDecomposition split = norm_decomposition(sys, conf);
        if (split.principal < 0.0 || split.spurious < 0.0) {
            record(report, 1.0);
            continue;
        }
        if (split.density == 0.0) {
            record(report, split.principal + split.spurious == 0.0 ? 0.0 : 1.0);
            continue;
        }
        record(report, std::abs(split.principal + split.spurious - split.density) / split.density);
    }
    return report;
}

std::vector<SuiteReport> run_validation(std::uint64_t seed)
{
    return {
        oracle_equivalence_suite(seed + 1, 500),
        spin_summed_suite(seed + 2, 200),
        norm_collapse_suite(seed + 3, 200),
        antisymmetry_suite(seed + 4, 200),
        pauli_suite(seed + 5, 50),
        gradient_suite(seed + 6, 1000),
        same_spin_consistency_suite(seed + 7, 200),
        decomposition_suite(seed + 8, 200),
    };
}

void print_reports(std::ostream& out, const std::vector<SuiteReport>& reports)
{
    char line[256];
    for (const auto& r : reports) {
        std::snprintf(line, sizeof line, "%-28s %s checks=%zu failures=%zu max_error=%.3e tolerance=%.0e\n",
                      r.name.c_str(), r.passed() ? "PASS" : "FAIL", r.checks, r.failures, r.max_error, r.tolerance);
        out << line;
    }
}

} // namespace pauliflow

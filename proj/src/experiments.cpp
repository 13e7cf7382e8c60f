#include "pauliflow/experiments.hpp"

#include <array>
#include <cmath>
#include <sstream>
#include <utility>

#include "pauliflow/constants.hpp"
#include "pauliflow/errors.hpp"
#include "pauliflow/parallel.hpp"

namespace pauliflow {

namespace {

// Unit phase-space directions (position, wave vector) in metric units, in the
// order neighbours of each class are placed.
using Direction = std::pair<double, double>;

constexpr double kHalfRoot2 = 0.70710678118654752440;
constexpr double kHalfRoot3 = 0.86602540378443864676;

constexpr std::array<Direction, 4> kDiagonalSame{
    {{kHalfRoot2, kHalfRoot2}, {-kHalfRoot2, -kHalfRoot2}, {kHalfRoot2, -kHalfRoot2}, {-kHalfRoot2, kHalfRoot2}}};
constexpr std::array<Direction, 4> kDiagonalOpposite{
    {{kHalfRoot2, -kHalfRoot2}, {-kHalfRoot2, kHalfRoot2}, {kHalfRoot2, kHalfRoot2}, {-kHalfRoot2, -kHalfRoot2}}};
constexpr std::array<Direction, 4> kAxisSame{{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};
constexpr std::array<Direction, 4> kAxisOpposite{{{0, 1}, {0, -1}, {1, 0}, {-1, 0}}};
// Angles 0, 45, -30, 60 degrees; the opposite class is mirrored in position.
constexpr std::array<Direction, 4> kSplitSame{{{1, 0}, {kHalfRoot2, kHalfRoot2}, {kHalfRoot3, -0.5}, {0.5, kHalfRoot3}}};
constexpr std::array<Direction, 4> kSplitOpposite{
    {{-1, 0}, {-kHalfRoot2, kHalfRoot2}, {-kHalfRoot3, -0.5}, {-0.5, kHalfRoot3}}};

const std::array<Direction, 4>& directions(GeometryRule rule, bool same_spin)
{
    switch (rule) {
    case GeometryRule::Diagonal:
        return same_spin ? kDiagonalSame : kDiagonalOpposite;
    case GeometryRule::Axis:
        return same_spin ? kAxisSame : kAxisOpposite;
    case GeometryRule::Split:
        break;
    }
    return same_spin ? kSplitSame : kSplitOpposite;
}

std::string describe(const ManyBodySystem& sys)
{
    std::ostringstream out;
    out.precision(17);
    out << "mass_kg=" << sys.constants().mass << '\n';
    for (std::size_t j = 0; j < sys.size(); ++j) {
        const auto& p = sys.packet(j);
        out << "packet " << j + 1 << ": x0_m=" << p.x0 << " k0_per_m=" << p.k0 << " sigma_m=" << p.sigma
            << " spin=" << pauliflow::to_string(p.spin) << '\n';
    }
    return out.str();
}

std::string describe(const ClusterTemplate& cluster)
{
    std::ostringstream out;
    out.precision(17);
    out << "mass_kg=" << cluster.constants.mass << '\n'
        << "probe: x0_m=" << cluster.probe.x0 << " k0_per_m=" << cluster.probe.k0
        << " sigma_m=" << cluster.probe.sigma << '\n'
        << "spin_pattern=";
    for (Spin s : cluster.spin_pattern) {
        out << pauliflow::to_string(s) << ' ';
    }
    out << "\ngeometry=" << pauliflow::to_string(cluster.geometry) << " position_scale=" << cluster.metric.position_scale
        << " wavevector_scale=" << cluster.metric.wavevector_scale << '\n';
    return out.str();
}

std::vector<double> linspace(double from, double to, std::size_t steps)
{
    if (steps < 2) {
        throw DomainError("a sweep needs at least 2 steps");
    }
    if (!std::isfinite(from) || !std::isfinite(to) || !(from < to)) {
        throw DomainError("sweep range must satisfy from < to");
    }
    std::vector<double> xs(steps);
    for (std::size_t s = 0; s < steps; ++s) {
        xs[s] = from + (to - from) * static_cast<double>(s) / static_cast<double>(steps - 1);
    }
    return xs;
}

void check_increasing(std::span<const double> values)
{
    if (values.empty()) {
        throw DomainError("distance list must not be empty");
    }
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (!std::isfinite(values[k]) || values[k] < 0.0) {
            throw DomainError("distances must be finite and non-negative");
        }
        if (k > 0 && !(values[k] > values[k - 1])) {
            throw DomainError("distances must be strictly increasing");
        }
    }
}

Configuration centres(const ManyBodySystem& sys, double t)
{
    Configuration conf;
    conf.t = t;
    for (const auto& packet : sys.packets()) {
        conf.positions.push_back(center_at(packet, t, sys.constants()));
    }
    return conf;
}

SweepResult position_sweep(const ManyBodySystem& sys, std::size_t particle, double from, double to,
                           std::size_t steps, double t, const SweepOptions& options, bool with_norms)
{
    if (particle >= sys.size()) {
        throw DomainError("sweep particle index out of range");
    }
    const std::vector<double> xs = linspace(from, to, steps);
    const Configuration base = centres(sys, t);
    auto rows = parallel_map(xs.size(), options.threads, [&](std::size_t s) {
        Configuration conf = base;
        conf.positions[particle] = xs[s];
        return SweepRow{xs[s], evaluate_breakdown(sys, conf, particle, options.methods, options.limits, with_norms)};
    });
    std::ostringstream meta;
    meta.precision(17);
    meta << kToolVersion << '\n' << describe(sys) << "sweep particle=" << particle + 1 << " t_s=" << t << '\n';
    return {std::move(rows), meta.str()};
}

SweepResult cluster_sweep(const ClusterTemplate& cluster, std::span<const double> distances, double x_probe,
                          double t, const SweepOptions& options, bool with_norms)
{
    check_increasing(distances);
    auto rows = parallel_map(distances.size(), options.threads, [&](std::size_t k) {
        const ManyBodySystem sys = build_cluster(cluster, distances[k]);
        Configuration conf = centres(sys, t);
        conf.positions[0] = x_probe;
        return SweepRow{distances[k], evaluate_breakdown(sys, conf, 0, options.methods, options.limits, with_norms)};
    });
    std::ostringstream meta;
    meta.precision(17);
    meta << kToolVersion << '\n' << describe(cluster) << "x_probe_m=" << x_probe << " t_s=" << t << '\n';
    return {std::move(rows), meta.str()};
}

} // namespace

std::string_view to_string(GeometryRule rule)
{
    switch (rule) {
    case GeometryRule::Diagonal:
        return "diagonal";
    case GeometryRule::Axis:
        return "axis";
    case GeometryRule::Split:
        break;
    }
    return "split";
}

double phase_space_distance(const GaussianPacket& a, const GaussianPacket& b, const DistanceMetric& metric)
{
    a.validate();
    b.validate();
    if (a.sigma != b.sigma) {
        throw GeometryError("phase-space distance requires packets of equal sigma");
    }
    const double dx = (b.x0 - a.x0) / (metric.position_scale * a.sigma);
    const double dk = (b.k0 - a.k0) * a.sigma / metric.wavevector_scale;
    return std::hypot(dx, dk);
}

ClusterTemplate default_cluster_template()
{
    ClusterTemplate cluster;
    const double target_velocity = 6e4; // m/s
    cluster.probe = GaussianPacket{150.0 * kNanometre, cluster.constants.mass * target_velocity / cluster.constants.hbar,
                                   25.0 * kNanometre, Spin::Up};
    cluster.spin_pattern = {Spin::Up, Spin::Up, Spin::Up, Spin::Down, Spin::Down};
    cluster.geometry = GeometryRule::Split;
    return cluster;
}

std::vector<double> default_distances()
{
    return {1.41, 2.83, 5.65, 7.07};
}

ManyBodySystem build_cluster(const GaussianPacket& probe, double d, std::span<const Spin> spin_pattern,
                             const PhysicalConstants& constants, GeometryRule geometry, const DistanceMetric& metric)
{
    probe.validate();
    if (spin_pattern.empty()) {
        throw GeometryError("spin pattern must contain at least the probe");
    }
    if (spin_pattern[0] != probe.spin) {
        throw GeometryError("first spin in the pattern must match the probe spin");
    }
    if (!std::isfinite(d) || d < 0.0) {
        throw GeometryError("phase-space distance must be finite and non-negative");
    }
    if (!(metric.position_scale > 0.0) || !(metric.wavevector_scale > 0.0)) {
        throw GeometryError("distance metric scales must be positive");
    }

    const auto& same = directions(geometry, true);
    const auto& opposite = directions(geometry, false);
    const double dx = d * metric.position_scale * probe.sigma;
    const double dk = d * metric.wavevector_scale / probe.sigma;

    std::vector<GaussianPacket> packets{probe};
    std::size_t same_used = 0;
    std::size_t opposite_used = 0;
    for (std::size_t j = 1; j < spin_pattern.size(); ++j) {
        const bool is_same = spin_pattern[j] == probe.spin;
        std::size_t& used = is_same ? same_used : opposite_used;
        if (used >= same.size()) {
            throw GeometryError("spin pattern length " + std::to_string(spin_pattern.size())
                                + " needs more than four neighbours of one spin class");
        }
        const Direction offset = (is_same ? same : opposite)[used++];
        packets.push_back(GaussianPacket{probe.x0 + offset.first * dx, probe.k0 + offset.second * dk, probe.sigma,
                                         spin_pattern[j]});
    }
    return ManyBodySystem(std::move(packets), constants);
}

ManyBodySystem build_cluster(const ClusterTemplate& cluster, double d)
{
    return build_cluster(cluster.probe, d, cluster.spin_pattern, cluster.constants, cluster.geometry, cluster.metric);
}

SweepResult run_velocity_sweep(const ManyBodySystem& sys, std::size_t particle, double from, double to,
                               std::size_t steps, double t, const SweepOptions& options)
{
    return position_sweep(sys, particle, from, to, steps, t, options, false);
}

SweepResult run_distance_sweep(const ClusterTemplate& cluster, std::span<const double> distances, double x_probe,
                               double t, const SweepOptions& options)
{
    return cluster_sweep(cluster, distances, x_probe, t, options, false);
}

SweepResult run_norm_sweep(const ManyBodySystem& sys, std::size_t particle, double from, double to,
                           std::size_t steps, double t, const SweepOptions& options)
{
    return position_sweep(sys, particle, from, to, steps, t, options, true);
}

SweepResult run_norm_sweep(const ClusterTemplate& cluster, std::span<const double> distances, double x_probe,
                           double t, const SweepOptions& options)
{
    return cluster_sweep(cluster, distances, x_probe, t, options, true);
}

} // namespace pauliflow

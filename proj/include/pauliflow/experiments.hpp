#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pauliflow/bohm.hpp"
#include "pauliflow/manybody.hpp"
#include "pauliflow/wavepacket.hpp"

namespace pauliflow {

inline constexpr const char* kToolVersion = "pauliflow 1.0.0";

/// Units of the phase-space distance: positions are measured in
/// position_scale * sigma and wave vectors in wavevector_scale / sigma.
struct DistanceMetric {
    double position_scale = 1.0;
    double wavevector_scale = 0.5;
};

/// Dimensionless distance sqrt((dX / sx)^2 + (dK / sk)^2) between two packets
/// of equal width. Throws GeometryError when the widths differ.
double phase_space_distance(const GaussianPacket& a, const GaussianPacket& b, const DistanceMetric& metric = {});

/// How neighbours are laid out around the probe in phase space.
///  - Diagonal: offsets (+-j, +-j) in metric units with j = d / sqrt(2).
///    Same-spin neighbours take (+,+), (-,-), (+,-), (-,+) in that order;
///    opposite-spin neighbours take (+,-), (-,+), (+,+), (-,-).
///  - Axis: offsets (+-d, 0) and (0, +-d); same-spin neighbours start on the
///    position axis, opposite-spin ones on the wave-vector axis.
///  - Split: same-spin neighbours at angles 0, 45, -30, 60 degrees in the
///    (position, wave vector) plane; opposite-spin neighbours are their mirror
///    images in position. No two particles share a centre, and the layout has
///    no point symmetry about the probe.
enum class GeometryRule { Diagonal, Axis, Split };

std::string_view to_string(GeometryRule rule);

struct ClusterTemplate {
    GaussianPacket probe;
    std::vector<Spin> spin_pattern; // spin_pattern[0] is the probe
    GeometryRule geometry = GeometryRule::Diagonal;
    DistanceMetric metric;
    PhysicalConstants constants;
};

/// Probe at x = 150 nm, k0 giving 6e4 m/s for a free electron, sigma = 25 nm,
/// surrounded by two Up and two Down neighbours in the Split layout.
ClusterTemplate default_cluster_template();

/// {1.41, 2.83, 5.65, 7.07}
std::vector<double> default_distances();

/// Probe followed by neighbours (in pattern order), each at phase-space
/// distance d from the probe. Throws GeometryError on an invalid pattern.
ManyBodySystem build_cluster(const GaussianPacket& probe, double d, std::span<const Spin> spin_pattern,
                             const PhysicalConstants& constants = {}, GeometryRule geometry = GeometryRule::Diagonal,
                             const DistanceMetric& metric = {});

ManyBodySystem build_cluster(const ClusterTemplate& cluster, double d);

struct SweepRow {
    double abscissa = 0.0;
    VelocityBreakdown values;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::string metadata;
};

struct SweepOptions {
    MethodSet methods;
    Limits limits;
    std::size_t threads = 1;
};

/// Moves particle `particle` over [from, to] in `steps` points while every
/// other particle sits at its packet centre.
SweepResult run_velocity_sweep(const ManyBodySystem& sys, std::size_t particle, double from, double to,
                               std::size_t steps, double t, const SweepOptions& options);

/// One row per distance: the probe (particle 0) at x_probe, neighbours at
/// their centres. Distances must be strictly increasing.
SweepResult run_distance_sweep(const ClusterTemplate& cluster, std::span<const double> distances, double x_probe,
                               double t, const SweepOptions& options);

/// As run_velocity_sweep, always filling density / principal / spurious.
SweepResult run_norm_sweep(const ManyBodySystem& sys, std::size_t particle, double from, double to,
                           std::size_t steps, double t, const SweepOptions& options);

/// As run_distance_sweep, always filling density / principal / spurious.
SweepResult run_norm_sweep(const ClusterTemplate& cluster, std::span<const double> distances, double x_probe,
                           double t, const SweepOptions& options);

} // namespace pauliflow

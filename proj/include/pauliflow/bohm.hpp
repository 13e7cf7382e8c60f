#pragma once

#include <cstddef>
#include <optional>

#include "pauliflow/manybody.hpp"
#include "pauliflow/scaled.hpp"
#include "pauliflow/wavepacket.hpp"

namespace pauliflow {

/// One evaluation point. Quantities whose method was not requested, or whose
/// velocity is undefined at a node, are empty.
struct VelocityBreakdown {
    std::optional<double> v_exact;       // m/s
    std::optional<double> v_factorized;  // m/s
    std::optional<double> v_independent; // m/s
    std::optional<double> density;
    std::optional<double> principal;
    std::optional<double> spurious;
};

/// Bohm velocity of particle i from the spin-summed antisymmetric wave function:
/// current_i / density on a shared scale. Throws NodeError at nodes.
double velocity_exact(const ManyBodySystem& sys, const Configuration& conf, std::size_t i, const Limits& limits = {});

/// Velocities of all particles from one spin-summed evaluation.
std::vector<double> velocities_exact(const ManyBodySystem& sys, const Configuration& conf, const Limits& limits = {});

/// Bohm velocity of particle i from the Slater determinant of its own nominal
/// spin block only (spin-up x spin-down product form). Orbitals and
/// coordinates of the opposite spin are never read.
double velocity_factorized(const ManyBodySystem& sys, const Configuration& conf, std::size_t i,
                           const Limits& limits = {});

std::vector<double> velocities_factorized(const ManyBodySystem& sys, const Configuration& conf,
                                          const Limits& limits = {});

/// Velocity of a lone electron in `packet`: (hbar/m) Im[psi'/psi].
double velocity_independent(const GaussianPacket& packet, double x, double t, const PhysicalConstants& c);

/// Nominal-assignment term (principal) and the remaining assignments
/// (spurious) of the spin-summed density, sharing `log_scale`.
struct NormDecomposition {
    double log_scale = 0.0;
    double density = 0.0;
    double principal = 0.0;
    double spurious = 0.0;

    ScaledReal scaled_density() const { return {density, log_scale}; }
    ScaledReal scaled_principal() const { return {principal, log_scale}; }
    ScaledReal scaled_spurious() const { return {spurious, log_scale}; }
};

NormDecomposition norm_decomposition(const ManyBodySystem& sys, const Configuration& conf, const Limits& limits = {});

/// Which columns of a VelocityBreakdown to compute.
struct MethodSet {
    bool exact = true;
    bool factorized = true;
    bool independent = true;
};

/// Evaluate every requested method for particle i. NodeError leaves the
/// corresponding velocity empty. Density columns are filled when the exact
/// method is requested or `with_norms` is set.
VelocityBreakdown evaluate_breakdown(const ManyBodySystem& sys, const Configuration& conf, std::size_t i,
                                     const MethodSet& methods, const Limits& limits = {}, bool with_norms = false);

} // namespace pauliflow

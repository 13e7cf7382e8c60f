#include "pauliflow/bohm.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "manybody_detail.hpp"
#include "pauliflow/errors.hpp"

namespace pauliflow {

namespace {

void check_particle(const ManyBodySystem& sys, std::size_t i)
{
    if (i >= sys.size()) {
        throw DomainError("particle index " + std::to_string(i) + " out of range");
    }
}

void require_above_node(const SpinSummedFlux& flux, const Limits& limits)
{
    const double relative = flux.relative_log_density();
    if (!(relative >= limits.epsilon_node_log)) {
        throw NodeError("spin-summed density below node threshold (relative log density "
                        + std::to_string(relative) + ")");
    }
}

double block_velocity(const ManyBodySystem& sys, const ScaledDeterminant& block, const ScaledComplex& gradient,
                      const Limits& limits)
{
    const double relative = 2.0 * (block.value.log_magnitude - block.row_reference);
    if (block.value.is_zero() || !(relative >= limits.epsilon_node_log)) {
        throw NodeError("same-spin block density below node threshold");
    }
    if (gradient.is_zero()) {
        return 0.0;
    }
    const double hbar_over_m = sys.constants().hbar / sys.constants().mass;
    return hbar_over_m * std::exp(gradient.log_magnitude - block.value.log_magnitude)
        * std::sin(gradient.phase - block.value.phase);
}

} // namespace

double velocity_exact(const ManyBodySystem& sys, const Configuration& conf, std::size_t i, const Limits& limits)
{
    check_particle(sys, i);
    const std::size_t particles[] = {i};
    const SpinSummedFlux flux = detail::flux_for(sys, conf, limits, particles, nullptr, nullptr);
    require_above_node(flux, limits);
    return flux.currents[i] / flux.density;
}

std::vector<double> velocities_exact(const ManyBodySystem& sys, const Configuration& conf, const Limits& limits)
{
    std::vector<std::size_t> all(sys.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    const SpinSummedFlux flux = detail::flux_for(sys, conf, limits, all, nullptr, nullptr);
    require_above_node(flux, limits);
    std::vector<double> velocities(sys.size());
    for (std::size_t i = 0; i < sys.size(); ++i) {
        velocities[i] = flux.currents[i] / flux.density;
    }
    return velocities;
}

double velocity_factorized(const ManyBodySystem& sys, const Configuration& conf, std::size_t i, const Limits& limits)
{
    check_particle(sys, i);
    conf.validate(sys.size());
    // Nominal pairing: particle p carries the spin of orbital p, so the block
    // particles and the block orbitals are the same index set.
    const auto& block = sys.orbitals_with(sys.packet(i).spin);
    const ScaledDeterminant value = detail::block_determinant_for(sys, conf, block, block, std::nullopt);
    const ScaledComplex gradient = detail::block_determinant_for(sys, conf, block, block, i).value;
    return block_velocity(sys, value, gradient, limits);
}

std::vector<double> velocities_factorized(const ManyBodySystem& sys, const Configuration& conf, const Limits& limits)
{
    conf.validate(sys.size());
    std::vector<double> velocities(sys.size());
    for (Spin spin : {Spin::Up, Spin::Down}) {
        const auto& block = sys.orbitals_with(spin);
        if (block.empty()) {
            continue;
        }
        const ScaledDeterminant value = detail::block_determinant_for(sys, conf, block, block, std::nullopt);
        for (std::size_t i : block) {
            const ScaledComplex gradient = detail::block_determinant_for(sys, conf, block, block, i).value;
            velocities[i] = block_velocity(sys, value, gradient, limits);
        }
    }
    return velocities;
}

double velocity_independent(const GaussianPacket& packet, double x, double t, const PhysicalConstants& c)
{
    return c.hbar / c.mass * log_derivative(packet, x, t, c).imag();
}

NormDecomposition norm_decomposition(const ManyBodySystem& sys, const Configuration& conf, const Limits& limits)
{
    std::vector<double> log_densities;
    std::size_t nominal = 0;
    const SpinSummedFlux flux = detail::flux_for(sys, conf, limits, {}, &log_densities, &nominal);

    NormDecomposition result;
    result.log_scale = flux.log_scale;
    result.density = flux.density;
    if (flux.density == 0.0) {
        return result;
    }
    for (std::size_t a = 0; a < log_densities.size(); ++a) {
        const double term = std::exp(log_densities[a] - flux.log_scale);
        if (a == nominal) {
            result.principal = term;
        } else {
            result.spurious += term;
        }
    }
    return result;
}

VelocityBreakdown evaluate_breakdown(const ManyBodySystem& sys, const Configuration& conf, std::size_t i,
                                     const MethodSet& methods, const Limits& limits, bool with_norms)
{
    check_particle(sys, i);
    conf.validate(sys.size());
    VelocityBreakdown out;

    if (methods.exact || with_norms) {
        std::vector<double> log_densities;
        std::size_t nominal = 0;
        std::vector<std::size_t> differentiate;
        if (methods.exact) {
            differentiate.push_back(i);
        }
        const SpinSummedFlux flux = detail::flux_for(sys, conf, limits, differentiate, &log_densities, &nominal);
        double principal = 0.0;
        double spurious = 0.0;
        if (flux.density > 0.0) {
            for (std::size_t a = 0; a < log_densities.size(); ++a) {
                const double term = std::exp(log_densities[a] - flux.log_scale);
                (a == nominal ? principal : spurious) += term;
            }
        }
        const double scale = flux.density > 0.0 ? std::exp(flux.log_scale) : 0.0;
        out.density = flux.density * scale;
        out.principal = principal * scale;
        out.spurious = spurious * scale;
        if (methods.exact && flux.relative_log_density() >= limits.epsilon_node_log) {
            out.v_exact = flux.currents[i] / flux.density;
        }
    }
    if (methods.factorized) {
        try {
            out.v_factorized = velocity_factorized(sys, conf, i, limits);
        } catch (const NodeError&) {
        }
    }
    if (methods.independent) {
        out.v_independent = velocity_independent(sys.packet(i), conf.positions[i], conf.t, sys.constants());
    }
    return out;
}

} // namespace pauliflow

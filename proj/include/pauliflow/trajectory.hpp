#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "pauliflow/manybody.hpp"

namespace pauliflow {

enum class VelocityMethod { Exact, Factorized };

std::string_view to_string(VelocityMethod method);

struct TrajectorySet {
    std::vector<double> times;              // s
    std::vector<std::vector<double>> paths; // paths[i][k] = x_i(times[k]), m
    VelocityMethod method = VelocityMethod::Exact;
    /// Empty when the integration reached t_max.
    std::string stop_reason;

    bool truncated() const { return !stop_reason.empty(); }
};

/// Bohm velocities of all particles at (positions, t).
std::vector<double> velocity_field(const ManyBodySystem& sys, std::span<const double> positions, double t,
                                   VelocityMethod method, const Limits& limits = {});

/// One classic fourth-order Runge-Kutta step. A NodeError raised at any stage
/// is rethrown with the stage number in its message.
std::vector<double> rk4_step(const ManyBodySystem& sys, std::span<const double> positions, double t, double dt,
                             VelocityMethod method, const Limits& limits = {});

/// Fixed-step integration from t = 0 to t_max (the last step is shortened to
/// land on t_max). Stops early, keeping the finite prefix, on NodeError.
TrajectorySet integrate(const ManyBodySystem& sys, std::span<const double> initial_positions, double t_max, double dt,
                        VelocityMethod method, const Limits& limits = {});

} // namespace pauliflow

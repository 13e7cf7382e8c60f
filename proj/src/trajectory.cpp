#include "pauliflow/trajectory.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include "pauliflow/bohm.hpp"
#include "pauliflow/errors.hpp"

namespace pauliflow {

namespace {

std::vector<double> shifted(std::span<const double> base, const std::vector<double>& slope, double h)
{
    std::vector<double> out(base.begin(), base.end());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] += h * slope[i];
    }
    return out;
}

} // namespace

std::string_view to_string(VelocityMethod method)
{
    return method == VelocityMethod::Exact ? "exact" : "factorized";
}

std::vector<double> velocity_field(const ManyBodySystem& sys, std::span<const double> positions, double t,
                                   VelocityMethod method, const Limits& limits)
{
    const Configuration conf{std::vector<double>(positions.begin(), positions.end()), t};
    std::vector<double> v = method == VelocityMethod::Exact ? velocities_exact(sys, conf, limits)
                                                            : velocities_factorized(sys, conf, limits);
    for (double vi : v) {
        if (!std::isfinite(vi)) {
            throw NodeError("non-finite Bohm velocity");
        }
    }
    return v;
}

std::vector<double> rk4_step(const ManyBodySystem& sys, std::span<const double> positions, double t, double dt,
                             VelocityMethod method, const Limits& limits)
{
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw DomainError("time step must be positive and finite");
    }
    int stage = 1;
    try {
        const std::vector<double> k1 = velocity_field(sys, positions, t, method, limits);
        stage = 2;
        const std::vector<double> k2 = velocity_field(sys, shifted(positions, k1, 0.5 * dt), t + 0.5 * dt, method, limits);
        stage = 3;
        const std::vector<double> k3 = velocity_field(sys, shifted(positions, k2, 0.5 * dt), t + 0.5 * dt, method, limits);
        stage = 4;
        const std::vector<double> k4 = velocity_field(sys, shifted(positions, k3, dt), t + dt, method, limits);

        std::vector<double> next(positions.begin(), positions.end());
        for (std::size_t i = 0; i < next.size(); ++i) {
            next[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        return next;
    } catch (const NodeError& error) {
        throw NodeError("RK4 stage " + std::to_string(stage) + ": " + error.what());
    }
}

TrajectorySet integrate(const ManyBodySystem& sys, std::span<const double> initial_positions, double t_max, double dt,
                        VelocityMethod method, const Limits& limits)
{
    if (initial_positions.size() != sys.size()) {
        throw DomainError("initial positions must have one entry per particle");
    }
    if (!(dt > 0.0) || !std::isfinite(dt) || !(t_max > 0.0) || !std::isfinite(t_max)) {
        throw DomainError("t_max and dt must be positive and finite");
    }

    TrajectorySet set;
    set.method = method;
    set.paths.resize(sys.size());
    std::vector<double> positions(initial_positions.begin(), initial_positions.end());
    auto record = [&](double t) {
        set.times.push_back(t);
        for (std::size_t i = 0; i < positions.size(); ++i) {
            set.paths[i].push_back(positions[i]);
        }
    };
    record(0.0);

    const auto steps = static_cast<std::size_t>(std::ceil(t_max / dt * (1.0 - 1e-12)));
    double t = 0.0;
    for (std::size_t k = 1; k <= steps; ++k) {
        const double t_next = k == steps ? t_max : static_cast<double>(k) * dt;
        try {
            positions = rk4_step(sys, positions, t, t_next - t, method, limits);
        } catch (const NodeError& error) {
            char when[40];
            std::snprintf(when, sizeof when, "%.17g", t);
            set.stop_reason = std::string("node at t=") + when + " s: " + error.what();
            break;
        }
        t = t_next;
        record(t);
    }
    return set;
}

} // namespace pauliflow

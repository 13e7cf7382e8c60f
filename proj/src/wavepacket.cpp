#include "pauliflow/wavepacket.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "pauliflow/errors.hpp"

namespace pauliflow {

namespace {

using namespace std::complex_literals;

void require_finite(double value, const char* what)
{
    if (!std::isfinite(value)) {
        throw DomainError(std::string(what) + " must be finite");
    }
}

void check_point(const GaussianPacket& packet, double x, double t, const PhysicalConstants& c)
{
    packet.validate();
    c.validate();
    require_finite(x, "position");
    require_finite(t, "time");
    if (t < 0.0) {
        throw DomainError("time must be non-negative");
    }
}

// sigma * (1 + i hbar t / (2 m sigma^2))
std::complex<double> complex_width(const GaussianPacket& packet, double t, const PhysicalConstants& c)
{
    const double spreading = c.hbar * t / (2.0 * c.mass * packet.sigma * packet.sigma);
    return packet.sigma * std::complex<double>(1.0, spreading);
}

} // namespace

std::string_view to_string(Spin spin)
{
    return spin == Spin::Up ? "up" : "down";
}

void PhysicalConstants::validate() const
{
    if (!std::isfinite(hbar) || hbar <= 0.0) {
        throw DomainError("hbar must be positive and finite");
    }
    if (!std::isfinite(mass) || mass <= 0.0) {
        throw DomainError("mass must be positive and finite");
    }
}

void GaussianPacket::validate() const
{
    require_finite(x0, "packet x0");
    require_finite(k0, "packet k0");
    require_finite(sigma, "packet sigma");
    if (sigma <= 0.0) {
        throw DomainError("packet sigma must be positive");
    }
}

double group_velocity(const GaussianPacket& packet, const PhysicalConstants& c)
{
    return c.hbar * packet.k0 / c.mass;
}

double center_at(const GaussianPacket& packet, double t, const PhysicalConstants& c)
{
    return packet.x0 + group_velocity(packet, c) * t;
}

double width_at(const GaussianPacket& packet, double t, const PhysicalConstants& c)
{
    const double spreading = c.hbar * t / (2.0 * c.mass * packet.sigma * packet.sigma);
    return packet.sigma * std::sqrt(1.0 + spreading * spreading);
}

std::complex<double> log_eval(const GaussianPacket& packet, double x, double t, const PhysicalConstants& c)
{
    check_point(packet, x, t, c);
    const std::complex<double> width = complex_width(packet, t, c);
    const double travel = group_velocity(packet, c) * t;
    const double offset = x - packet.x0 - travel;
    const double normalization = -0.25 * std::log(2.0 * std::numbers::pi);
    return normalization - 0.5 * std::log(width) - offset * offset / (4.0 * packet.sigma * width)
        + 1i * packet.k0 * (x - packet.x0 - 0.5 * travel);
}

std::complex<double> log_derivative(const GaussianPacket& packet, double x, double t,
                                    const PhysicalConstants& c)
{
    check_point(packet, x, t, c);
    const std::complex<double> width = complex_width(packet, t, c);
    const double offset = x - packet.x0 - group_velocity(packet, c) * t;
    return -offset / (2.0 * packet.sigma * width) + 1i * packet.k0;
}

std::complex<double> eval(const GaussianPacket& packet, double x, double t, const PhysicalConstants& c)
{
    return std::exp(log_eval(packet, x, t, c));
}

std::complex<double> ddx(const GaussianPacket& packet, double x, double t, const PhysicalConstants& c)
{
    return eval(packet, x, t, c) * log_derivative(packet, x, t, c);
}

ScaledComplex eval_scaled(const GaussianPacket& packet, double x, double t, const PhysicalConstants& c)
{
    return ScaledComplex::from_log(log_eval(packet, x, t, c));
}

ScaledComplex ddx_scaled(const GaussianPacket& packet, double x, double t, const PhysicalConstants& c)
{
    return eval_scaled(packet, x, t, c) * log_derivative(packet, x, t, c);
}

std::complex<double> overlap(const GaussianPacket& a, const GaussianPacket& b, double t,
                             const PhysicalConstants& c)
{
    a.validate();
    b.validate();
    c.validate();
    require_finite(t, "time");
    if (t < 0.0) {
        throw DomainError("time must be non-negative");
    }

    // Integrate conj(psi_a) psi_b in coordinates centred between the packets;
    // the form is symmetric so that swapping a and b conjugates every term.
    const double curvature_a = 1.0 / (4.0 * a.sigma * a.sigma);
    const double curvature_b = 1.0 / (4.0 * b.sigma * b.sigma);
    const double curvature = curvature_a + curvature_b;
    const double separation = b.x0 - a.x0;
    const double mean_k = 0.5 * (a.k0 + b.k0);

    const std::complex<double> linear((curvature_b - curvature_a) * separation, b.k0 - a.k0);
    const std::complex<double> constant(-0.25 * curvature * separation * separation, -mean_k * separation);

    const double variance_sum = a.sigma * a.sigma + b.sigma * b.sigma;
    const double prefactor = std::sqrt(2.0 * a.sigma * b.sigma / variance_sum);
    return prefactor * std::exp(linear * linear / (4.0 * curvature) + constant);
}

} // namespace pauliflow

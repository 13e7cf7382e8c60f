#include "pauliflow/scaled.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pauliflow {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

} // namespace

double wrap_phase(double phase)
{
    double wrapped = std::remainder(phase, kTwoPi);
    if (wrapped <= -std::numbers::pi) {
        wrapped += kTwoPi;
    }
    return wrapped;
}

ScaledComplex ScaledComplex::from_complex(std::complex<double> z)
{
    if (z == 0.0) {
        return zero();
    }
    return {std::log(std::abs(z)), std::arg(z)};
}

ScaledComplex ScaledComplex::from_log(std::complex<double> log_z)
{
    return {log_z.real(), wrap_phase(log_z.imag())};
}

ScaledComplex ScaledComplex::from_polar_log(double log_magnitude, double phase)
{
    if (log_magnitude == kNegInf) {
        return zero();
    }
    return {log_magnitude, wrap_phase(phase)};
}

std::complex<double> ScaledComplex::to_complex() const
{
    if (is_zero()) {
        return {0.0, 0.0};
    }
    if (!(std::abs(log_magnitude) < kConvertibleLog)) {
        throw std::range_error("ScaledComplex magnitude outside convertible range");
    }
    return std::polar(std::exp(log_magnitude), phase);
}

std::complex<double> ScaledComplex::scaled(double log_reference) const
{
    if (is_zero()) {
        return {0.0, 0.0};
    }
    return std::polar(std::exp(log_magnitude - log_reference), phase);
}

ScaledComplex ScaledComplex::operator-() const
{
    if (is_zero()) {
        return zero();
    }
    return {log_magnitude, wrap_phase(phase + std::numbers::pi)};
}

ScaledComplex& ScaledComplex::operator*=(const ScaledComplex& other)
{
    if (is_zero() || other.is_zero()) {
        *this = zero();
        return *this;
    }
    log_magnitude += other.log_magnitude;
    phase = wrap_phase(phase + other.phase);
    return *this;
}

ScaledComplex& ScaledComplex::operator/=(const ScaledComplex& other)
{
    if (other.is_zero()) {
        throw std::domain_error("ScaledComplex division by zero");
    }
    if (is_zero()) {
        return *this;
    }
    log_magnitude -= other.log_magnitude;
    phase = wrap_phase(phase - other.phase);
    return *this;
}

ScaledComplex& ScaledComplex::operator*=(std::complex<double> factor)
{
    return *this *= from_complex(factor);
}

ScaledComplex& ScaledComplex::operator*=(double factor)
{
    return *this *= from_complex({factor, 0.0});
}

ScaledComplex operator+(const ScaledComplex& a, const ScaledComplex& b)
{
    if (a.is_zero()) {
        return b;
    }
    if (b.is_zero()) {
        return a;
    }
    const double reference = std::max(a.log_magnitude, b.log_magnitude);
    const std::complex<double> total = a.scaled(reference) + b.scaled(reference);
    ScaledComplex result = ScaledComplex::from_complex(total);
    if (!result.is_zero()) {
        result.log_magnitude += reference;
    }
    return result;
}

ScaledComplex sum(std::span<const ScaledComplex> terms)
{
    double reference = kNegInf;
    for (const auto& term : terms) {
        reference = std::max(reference, term.log_magnitude);
    }
    if (reference == kNegInf) {
        return ScaledComplex::zero();
    }
    std::complex<double> total{0.0, 0.0};
    for (const auto& term : terms) {
        total += term.scaled(reference);
    }
    ScaledComplex result = ScaledComplex::from_complex(total);
    if (!result.is_zero()) {
        result.log_magnitude += reference;
    }
    return result;
}

double relative_difference(const ScaledComplex& a, const ScaledComplex& b)
{
    if (b.is_zero()) {
        return a.is_zero() ? 0.0 : std::numeric_limits<double>::infinity();
    }
    if (a.is_zero()) {
        return 1.0;
    }
    const double log_ratio = a.log_magnitude - b.log_magnitude;
    if (log_ratio > 700.0) {
        return std::numeric_limits<double>::infinity();
    }
    const std::complex<double> ratio = std::polar(std::exp(log_ratio), a.phase - b.phase);
    return std::abs(ratio - 1.0);
}

double ScaledReal::value() const
{
    if (mantissa == 0.0) {
        return 0.0;
    }
    return mantissa * std::exp(log_scale);
}

double ScaledReal::log_abs() const
{
    if (mantissa == 0.0) {
        return kNegInf;
    }
    return std::log(std::abs(mantissa)) + log_scale;
}

} // namespace pauliflow

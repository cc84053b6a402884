// model.hpp - physical parameters, derived constants, collective basis and
// the Lorentzian spectral density shared by every other module.

#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace bellmem {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr cplx kI{0.0, 1.0};

// Physical constants of the two-qubit/waveguide model. Frequencies in rad/s,
// lengths in m. In normalized runs omega0 = v = 1, so times are in units of
// 1/omega0 and lengths in units of 1/k0.
struct PhysicalParams {
    double omega0{1.0};  // qubit transition frequency
    double gamma{0.05};  // on-resonance coupling strength of the Lorentzian
    double lambda{0.066};  // spectral half-width
    double J{0.0};       // coherent exchange (signed)
    double d{0.0};       // half-separation, qubits at -d and +d
    double v{1.0};       // group velocity

    void validate() const {
        if (!(omega0 > 0.0) || !std::isfinite(omega0))
            throw std::invalid_argument("PhysicalParams: omega0 must be > 0");
        if (!(gamma >= 0.0) || !std::isfinite(gamma))
            throw std::invalid_argument("PhysicalParams: gamma must be >= 0");
        if (!(lambda > 0.0) || !std::isfinite(lambda))
            throw std::invalid_argument("PhysicalParams: lambda must be > 0");
        if (!(v > 0.0) || !std::isfinite(v))
            throw std::invalid_argument("PhysicalParams: v must be > 0");
        if (!std::isfinite(J) || !std::isfinite(d))
            throw std::invalid_argument("PhysicalParams: J and d must be finite");
    }

    double k0() const { return omega0 / v; }
    double lambda0() const { return 2.0 * kPi / k0(); }
    // Pseudomode coupling g = sqrt(gamma*lambda/2).
    double g() const { return std::sqrt(gamma * lambda / 2.0); }
    cplx lambda_tilde() const { return {lambda, -omega0}; }
    // Geometry phase k0*d.
    double phase() const { return k0() * d; }

    // Inverse of g(): the gamma that yields a requested pseudomode coupling.
    static double gamma_from_g(double g, double lambda) { return 2.0 * g * g / lambda; }
};

struct DerivedConstants {
    double k0;
    double lambda0;
    double g;
    cplx lambda_tilde;
};

inline DerivedConstants derive_constants(const PhysicalParams& p) {
    p.validate();
    return {p.k0(), p.lambda0(), p.g(), p.lambda_tilde()};
}

// Scale factors between SI and the omega0 = v = 1 frame.
struct UnitScale {
    double time{1.0};    // seconds per internal time unit (1/omega0)
    double length{1.0};  // metres per internal length unit (1/k0)
    double rate{1.0};    // rad/s per internal rate unit (omega0)
};

// Returns the same physics with omega0 = v = 1. Rates become fractions of
// omega0, d becomes k0*d.
inline PhysicalParams normalized(const PhysicalParams& p, UnitScale* scale = nullptr) {
    p.validate();
    PhysicalParams n;
    n.omega0 = 1.0;
    n.v = 1.0;
    n.gamma = p.gamma / p.omega0;
    n.lambda = p.lambda / p.omega0;
    n.J = p.J / p.omega0;
    n.d = p.d * p.k0();
    if (scale) {
        scale->time = 1.0 / p.omega0;
        scale->length = 1.0 / p.k0();
        scale->rate = p.omega0;
    }
    return n;
}

// ---------------------------------------------------------------------------
// Symmetric/antisymmetric basis: s = (a1 + a2)/sqrt2, a = (a1 - a2)/sqrt2.

struct CollectiveAmplitudes {
    cplx s;
    cplx a;
};

struct QubitAmplitudes {
    cplx alpha1;
    cplx alpha2;
};

inline CollectiveAmplitudes to_collective(cplx alpha1, cplx alpha2) {
    const double r = std::numbers::sqrt2 / 2.0;
    return {r * (alpha1 + alpha2), r * (alpha1 - alpha2)};
}

inline QubitAmplitudes from_collective(cplx s, cplx a) {
    const double r = std::numbers::sqrt2 / 2.0;
    return {r * (s + a), r * (s - a)};
}

// J_L(omega) = gamma*lambda^2 / ((omega - omega0)^2 + lambda^2)
inline double lorentzian_density(double omega, const PhysicalParams& p) {
    const double det = omega - p.omega0;
    return p.gamma * p.lambda * p.lambda / (det * det + p.lambda * p.lambda);
}

// Same density in terms of the detuning omega - omega0; avoids cancellation
// when the rotating frame is used.
inline double lorentzian_density_detuned(double detuning, const PhysicalParams& p) {
    return p.gamma * p.lambda * p.lambda / (detuning * detuning + p.lambda * p.lambda);
}

}  // namespace bellmem

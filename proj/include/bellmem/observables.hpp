// observables.hpp - reduced two-qubit state and correlation measures:
// CHSH (closed form and Horodecki), mutual information, trace distance.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "bellmem/model.hpp"

namespace bellmem {

inline constexpr double kTsirelson = 2.0 * std::numbers::sqrt2;

// Tolerance used when admitting populations that drifted slightly outside
// [0, 1] through floating-point evolution.
inline constexpr double kPopulationTol = 1e-10;

// Two-qubit state in the basis {|ee>, |eg>, |ge>, |gg>}; qubit A is the
// first factor. For states built from single-excitation amplitudes the
// populations and relative phase are cached.
struct ReducedDensityMatrix {
    Eigen::Matrix4cd rho = Eigen::Matrix4cd::Zero();
    double P1{0.0};
    double P2{0.0};
    double phi{0.0};  // arg(alpha2 * conj(alpha1))

    // Validates an arbitrary 4x4 density matrix (Hermitian, unit trace, PSD).
    static ReducedDensityMatrix from_matrix(const Eigen::Matrix4cd& m) {
        if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
            throw std::domain_error("density matrix is not Hermitian");
        if (std::abs(m.trace() - cplx{1.0, 0.0}) > 1e-10)
            throw std::domain_error("density matrix trace differs from 1");
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(m, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -1e-12)
            throw std::domain_error("density matrix is not positive semidefinite");
        ReducedDensityMatrix r;
        r.rho = m;
        r.P1 = std::real(m(0, 0) + m(1, 1));
        r.P2 = std::real(m(0, 0) + m(2, 2));
        r.phi = std::arg(m(2, 1));
        return r;
    }
};

// X-form state obtained by tracing the bath out of
// alpha1|eg,0> + alpha2|ge,0> + sum_k beta_k |gg,1_k>.
inline ReducedDensityMatrix reduced_density(cplx alpha1, cplx alpha2) {
    const double p1 = std::norm(alpha1);
    const double p2 = std::norm(alpha2);
    if (p1 + p2 > 1.0 + kPopulationTol)
        throw std::domain_error("reduced_density: |alpha1|^2 + |alpha2|^2 exceeds 1");
    ReducedDensityMatrix r;
    r.rho(1, 1) = p1;
    r.rho(1, 2) = alpha1 * std::conj(alpha2);
    r.rho(2, 1) = alpha2 * std::conj(alpha1);
    r.rho(2, 2) = p2;
    r.rho(3, 3) = 1.0 - p1 - p2;
    r.P1 = p1;
    r.P2 = p2;
    r.phi = std::arg(alpha2 * std::conj(alpha1));
    return r;
}

namespace detail {

inline const std::array<Eigen::Matrix2cd, 3>& paulis() {
    static const std::array<Eigen::Matrix2cd, 3> s = [] {
        std::array<Eigen::Matrix2cd, 3> p;
        // basis order {|e>, |g>}; sigma_z|e> = +|e>
        p[0] << 0, 1, 1, 0;
        p[1] << 0, cplx(0, -1), cplx(0, 1), 0;
        p[2] << 1, 0, 0, -1;
        return p;
    }();
    return s;
}

inline void check_populations(double P1, double P2) {
    if (!(P1 >= -kPopulationTol) || !(P2 >= -kPopulationTol) || !(P1 + P2 <= 1.0 + kPopulationTol))
        throw std::domain_error("populations must satisfy P1, P2 >= 0 and P1 + P2 <= 1");
}

inline double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

}  // namespace detail

// T_ij = Tr[rho sigma_i (x) sigma_j]
inline Eigen::Matrix3d correlation_matrix(const Eigen::Matrix4cd& rho) {
    const auto& s = detail::paulis();
    Eigen::Matrix3d T;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            Eigen::Matrix4cd op;
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    op.block<2, 2>(2 * a, 2 * b) = s[static_cast<std::size_t>(i)](a, b) * s[static_cast<std::size_t>(j)];
            T(i, j) = std::real((rho * op).trace());
        }
    }
    return T;
}

// Eigenvalues of a real symmetric 3x3 matrix, descending. Uses the
// trigonometric solution of the characteristic cubic; falls back to Jacobi
// iteration when two roots are close enough that the closed form loses digits.
inline std::array<double, 3> symmetric3_eigenvalues(const Eigen::Matrix3d& U) {
    const double p1 = U(0, 1) * U(0, 1) + U(0, 2) * U(0, 2) + U(1, 2) * U(1, 2);
    const double q = U.trace() / 3.0;
    const double scale = std::max(U.cwiseAbs().maxCoeff(), 1e-300);
    std::array<double, 3> e{};
    bool closed_ok = true;
    if (p1 <= 1e-30 * scale * scale) {
        e = {U(0, 0), U(1, 1), U(2, 2)};
    } else {
        const double p2 = (U(0, 0) - q) * (U(0, 0) - q) + (U(1, 1) - q) * (U(1, 1) - q) +
                          (U(2, 2) - q) * (U(2, 2) - q) + 2.0 * p1;
        const double p = std::sqrt(p2 / 6.0);
        const Eigen::Matrix3d B = (U - q * Eigen::Matrix3d::Identity()) / p;
        const double r = std::clamp(B.determinant() / 2.0, -1.0, 1.0);
        const double ang = std::acos(r) / 3.0;
        e[0] = q + 2.0 * p * std::cos(ang);
        e[2] = q + 2.0 * p * std::cos(ang + 2.0 * kPi / 3.0);
        e[1] = 3.0 * q - e[0] - e[2];
        // acos loses about half the digits near r = +-1 (nearly double roots)
        closed_ok = std::abs(std::abs(r) - 1.0) > 1e-6;
    }
    if (!closed_ok) {
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(U, Eigen::EigenvaluesOnly);
        const auto& ev = es.eigenvalues();
        e = {ev(0), ev(1), ev(2)};
    }
    std::sort(e.begin(), e.end(), std::greater<>());
    return e;
}

// Maximal CHSH value for single-excitation populations:
// 2 sqrt(u1 + max(u1, u3)), u1 = 4 P1 P2, u3 = (1 - 2P1 - 2P2)^2.
inline double chsh_closed(double P1, double P2) {
    detail::check_populations(P1, P2);
    const double p1 = detail::clamp01(P1);
    const double p2 = detail::clamp01(P2);
    const double u1 = 4.0 * p1 * p2;
    const double w = 1.0 - 2.0 * p1 - 2.0 * p2;
    const double u3 = w * w;
    return 2.0 * std::sqrt(u1 + std::max(u1, u3));
}

// Horodecki criterion for any two-qubit state: 2 sqrt(u1 + u2) from the two
// largest eigenvalues of U = T^T T.
inline double chsh_horodecki(const Eigen::Matrix4cd& rho) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(rho, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-12)
        throw std::domain_error("chsh_horodecki: state is not positive semidefinite");
    const Eigen::Matrix3d T = correlation_matrix(rho);
    const auto u = symmetric3_eigenvalues(T.transpose() * T);
    return 2.0 * std::sqrt(std::max(0.0, u[0] + u[1]));
}

inline double chsh_horodecki(const ReducedDensityMatrix& r) { return chsh_horodecki(r.rho); }

// h(x) = -x log2 x - (1-x) log2(1-x), with h(0) = h(1) = 0.
inline double binary_entropy(double x) {
    if (!(x >= -1e-12) || !(x <= 1.0 + 1e-12)) throw std::domain_error("binary_entropy: x outside [0, 1]");
    x = detail::clamp01(x);
    if (x == 0.0 || x == 1.0) return 0.0;
    return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

// Quantum mutual information in bits: h(P1) + h(P2) - h(P1 + P2).
inline double qmi(double P1, double P2) {
    detail::check_populations(P1, P2);
    const double p1 = detail::clamp01(P1);
    const double p2 = detail::clamp01(P2);
    const double val = binary_entropy(p1) + binary_entropy(p2) - binary_entropy(std::min(1.0, p1 + p2));
    return std::clamp(val, 0.0, 2.0);
}

// D = 1/2 ||rho1 - rho2||_1 for Hermitian matrices of equal dimension.
inline double trace_distance(const Eigen::MatrixXcd& rho1, const Eigen::MatrixXcd& rho2) {
    if (rho1.rows() != rho2.rows() || rho1.cols() != rho2.cols() || rho1.rows() != rho1.cols())
        throw std::invalid_argument("trace_distance: dimension mismatch");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho1 - rho2, Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

inline double trace_distance(const ReducedDensityMatrix& r1, const ReducedDensityMatrix& r2) {
    return trace_distance(Eigen::MatrixXcd(r1.rho), Eigen::MatrixXcd(r2.rho));
}

// Trace distance between two X-form states given by their qubit amplitudes.
// Same quantity as trace_distance(reduced_density(x), reduced_density(y)) but
// without an eigensolver: the difference has a 2x2 {eg, ge} block and a scalar
// |gg> corner.
inline double trace_distance_xform(const QubitAmplitudes& x, const QubitAmplitudes& y) {
    const double d1 = std::norm(x.alpha1) - std::norm(y.alpha1);
    const double d2 = std::norm(x.alpha2) - std::norm(y.alpha2);
    const cplx c = x.alpha1 * std::conj(x.alpha2) - y.alpha1 * std::conj(y.alpha2);
    const double mean = 0.5 * (d1 + d2);
    const double rad = std::sqrt(0.25 * (d1 - d2) * (d1 - d2) + std::norm(c));
    return 0.5 * (std::abs(mean + rad) + std::abs(mean - rad) + std::abs(d1 + d2));
}

// Closed form 2|s||a| for the pair {|eg>, |ge>} when the qubit swap acts as
// (s, a) -> (s, -a) on the evolved amplitudes.
inline double trace_distance_closed(cplx s, cplx a) {
    if (std::norm(s) + std::norm(a) > 1.0 + kPopulationTol)
        throw std::domain_error("trace_distance_closed: |s|^2 + |a|^2 exceeds 1");
    return 2.0 * std::abs(s) * std::abs(a);
}

}  // namespace bellmem

// Independent reference computations shared by the unit and acceptance tests.
// None of these call into the library routines they are used to check.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;

// Von Neumann entropy in bits of a Hermitian PSD matrix.
inline double entropy_bits(const Eigen::MatrixXcd& rho) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
    double s = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        const double p = es.eigenvalues()(i);
        if (p > 1e-300) s -= p * std::log2(p);
    }
    return s;
}

// Reduced states of a two-qubit density matrix (first factor = A).
inline Eigen::Matrix2cd partial_trace_B(const Eigen::Matrix4cd& rho) {
    Eigen::Matrix2cd r = Eigen::Matrix2cd::Zero();
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int k = 0; k < 2; ++k) r(a, b) += rho(2 * a + k, 2 * b + k);
    return r;
}

inline Eigen::Matrix2cd partial_trace_A(const Eigen::Matrix4cd& rho) {
    Eigen::Matrix2cd r = Eigen::Matrix2cd::Zero();
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int k = 0; k < 2; ++k) r(a, b) += rho(2 * k + a, 2 * k + b);
    return r;
}

inline double mutual_information(const Eigen::Matrix4cd& rho) {
    return entropy_bits(partial_trace_B(rho)) + entropy_bits(partial_trace_A(rho)) - entropy_bits(rho);
}

// Density matrix of amplitudes a1|eg> + a2|ge> with the rest of the norm on |gg>,
// built as a mixture rather than from the X-form template.
inline Eigen::Matrix4cd xstate(cplx a1, cplx a2) {
    Eigen::Vector4cd psi(0.0, a1, a2, 0.0);
    Eigen::Matrix4cd rho = psi * psi.adjoint();
    rho(3, 3) += 1.0 - std::norm(a1) - std::norm(a2);
    return rho;
}

// CHSH maximum by direct search over measurement directions. For fixed b, b'
// the optimal a, a' give |T(b+b')| + |T(b-b')|; the search runs over b, b' on
// a sphere grid followed by random local refinement.
inline double chsh_search(const Eigen::Matrix3d& T, unsigned seed = 7) {
    auto dir = [](double th, double ph) {
        return Eigen::Vector3d(std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th));
    };
    auto value = [&](const Eigen::Vector3d& b, const Eigen::Vector3d& bp) {
        return (T * (b + bp)).norm() + (T * (b - bp)).norm();
    };
    const int n = 24;
    double best = 0.0;
    Eigen::Vector4d arg(0, 0, 0, 0);
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j < 2 * n; ++j)
            for (int k = 0; k <= n; ++k)
                for (int l = 0; l < 2 * n; ++l) {
                    const double th1 = M_PI * i / n, ph1 = M_PI * j / n, th2 = M_PI * k / n, ph2 = M_PI * l / n;
                    const double v = value(dir(th1, ph1), dir(th2, ph2));
                    if (v > best) {
                        best = v;
                        arg = {th1, ph1, th2, ph2};
                    }
                }
    std::mt19937_64 rng(seed);
    double step = M_PI / n;
    for (int round = 0; round < 60; ++round) {
        std::normal_distribution<double> nd(0.0, step);
        for (int t = 0; t < 200; ++t) {
            Eigen::Vector4d c = arg + Eigen::Vector4d(nd(rng), nd(rng), nd(rng), nd(rng));
            const double v = value(dir(c(0), c(1)), dir(c(2), c(3)));
            if (v > best) {
                best = v;
                arg = c;
            }
        }
        step *= 0.8;
    }
    return best;
}

inline Eigen::Matrix3d pauli_correlations(const Eigen::Matrix4cd& rho) {
    Eigen::Matrix2cd sx, sy, sz;
    sx << 0, 1, 1, 0;
    sy << 0, cplx(0, -1), cplx(0, 1), 0;
    sz << 1, 0, 0, -1;
    const Eigen::Matrix2cd s[3] = {sx, sy, sz};
    Eigen::Matrix3d T;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            Eigen::Matrix4cd op;
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) op.block<2, 2>(2 * a, 2 * b) = s[i](a, b) * s[j];
            T(i, j) = (rho * op).trace().real();
        }
    return T;
}

// Fixed-step RK4 for dx/dt = A x on a dense complex system.
inline Eigen::VectorXcd rk4(const Eigen::MatrixXcd& A, Eigen::VectorXcd x, double t, int steps) {
    const double h = t / steps;
    for (int i = 0; i < steps; ++i) {
        const Eigen::VectorXcd k1 = A * x;
        const Eigen::VectorXcd k2 = A * (x + 0.5 * h * k1);
        const Eigen::VectorXcd k3 = A * (x + 0.5 * h * k2);
        const Eigen::VectorXcd k4 = A * (x + h * k3);
        x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return x;
}

// Symmetric 3x3 eigenvalues by cyclic Jacobi rotations, descending.
inline Eigen::Vector3d jacobi_eigenvalues(Eigen::Matrix3d a) {
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < 3; ++p)
            for (int q = p + 1; q < 3; ++q) off += a(p, q) * a(p, q);
        if (off < 1e-40) break;
        for (int p = 0; p < 3; ++p)
            for (int q = p + 1; q < 3; ++q) {
                if (a(p, q) == 0.0) continue;
                const double th = 0.5 * std::atan2(2.0 * a(p, q), a(q, q) - a(p, p));
                const double c = std::cos(th), s = std::sin(th);
                Eigen::Matrix3d r = Eigen::Matrix3d::Identity();
                r(p, p) = c;
                r(q, q) = c;
                r(p, q) = s;
                r(q, p) = -s;
                a = r.transpose() * a * r;
            }
    }
    Eigen::Vector3d e = a.diagonal();
    std::sort(e.data(), e.data() + 3, std::greater<>());
    return e;
}

}  // namespace oracle

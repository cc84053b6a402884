// pseudomode.hpp - continuum-limit four-mode model X = [s, a, beta, alpha]:
// evolution matrix, spectral propagation, dark-state lifetimes and the
// Feshbach reduction onto the qubit block.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "bellmem/diagnostics.hpp"
#include "bellmem/discrete_bath.hpp"
#include "bellmem/model.hpp"

namespace bellmem {

using Vector4c = Eigen::Matrix<cplx, 4, 1>;

struct FourModeState {
    cplx s, a, beta, alpha;

    static FourModeState from_collective(cplx s0, cplx a0) {
        if (std::norm(s0) + std::norm(a0) > 1.0 + 1e-10)
            throw std::domain_error("FourModeState: |s|^2 + |a|^2 exceeds 1");
        return {s0, a0, 0.0, 0.0};
    }
    static FourModeState from_qubits(cplx alpha1, cplx alpha2) {
        const auto c = to_collective(alpha1, alpha2);
        return from_collective(c.s, c.a);
    }

    Vector4c vec() const { return Vector4c(s, a, beta, alpha); }
    static FourModeState from_vec(const Vector4c& x) { return {x(0), x(1), x(2), x(3)}; }
    QubitAmplitudes qubits() const { return bellmem::from_collective(s, a); }
};

// Trigonometric factors of the geometry phase. Phases within a few ulps of a
// multiple of pi/2 are snapped so that exact nodes give exact zeros.
struct Geometry {
    double phi{0.0};
    double cos2{1.0};     // cos^2(phi)
    double sin2{0.0};     // sin^2(phi)
    double sin2phi{0.0};  // sin(2 phi)

    static Geometry from_phase(double phi) {
        Geometry g;
        g.phi = phi;
        const double m = phi / (kPi / 2.0);
        const double r = std::round(m);
        if (std::abs(m - r) <= 1e-14 * std::max(1.0, std::abs(m))) {
            const bool even = std::fmod(std::abs(r), 2.0) == 0.0;
            g.cos2 = even ? 1.0 : 0.0;
            g.sin2 = even ? 0.0 : 1.0;
            g.sin2phi = 0.0;
            return g;
        }
        const double c = std::cos(phi), s = std::sin(phi);
        g.cos2 = c * c;
        g.sin2 = s * s;
        g.sin2phi = 2.0 * s * c;
        return g;
    }

    // phi = n*pi + eps, evaluated from eps directly so tiny offsets keep full
    // relative precision.
    static Geometry near_node(double eps, int n = 1) {
        Geometry g;
        g.phi = n * kPi + eps;
        const double c = std::cos(eps), s = std::sin(eps);
        g.cos2 = c * c;
        g.sin2 = s * s;
        g.sin2phi = std::sin(2.0 * eps);
        return g;
    }

    bool block_diagonal() const { return sin2phi == 0.0 && (cos2 == 0.0 || sin2 == 0.0); }
};

struct EvolutionMatrix {
    Eigen::Matrix4cd M;
    Geometry geom;
    PhysicalParams params;
};

inline EvolutionMatrix build_M(const PhysicalParams& p, const Geometry& geom) {
    p.validate();
    const double g = p.g();
    const cplx lt = p.lambda_tilde();
    Eigen::Matrix4cd M = Eigen::Matrix4cd::Zero();
    M(0, 0) = cplx(0.0, -(p.omega0 + p.J));
    M(1, 1) = cplx(0.0, -(p.omega0 - p.J));
    M(0, 2) = cplx(0.0, 2.0 * g * geom.cos2);
    M(0, 3) = -g * geom.sin2phi;
    M(1, 2) = g * geom.sin2phi;
    M(1, 3) = cplx(0.0, 2.0 * g * geom.sin2);
    M(2, 0) = cplx(0.0, g);
    M(3, 1) = cplx(0.0, g);
    M(2, 2) = -lt;
    M(3, 3) = -lt;
    return {M, geom, p};
}

inline EvolutionMatrix build_M(const PhysicalParams& p, double d) {
    p.validate();
    return build_M(p, Geometry::from_phase(p.k0() * d));
}

// M at phi = n*pi + eps.
inline EvolutionMatrix build_M_near_node(const PhysicalParams& p, double eps, int n = 1) {
    return build_M(p, Geometry::near_node(eps, n));
}

// ---------------------------------------------------------------------------

struct SpectralDecomposition {
    std::array<cplx, 4> mu;      // lab-frame eigenvalues, slowest decay first
    std::array<cplx, 4> mu_rot;  // same, with omega0 removed: mu + i omega0
    Eigen::Matrix4cd P;
    Eigen::Matrix4cd P_inv;
    double reconstruction_residual{0.0};
    double omega0{1.0};

    double rate(std::size_t i) const { return -mu[i].real(); }
};

namespace detail {

// Coefficients (c0..c3, monic) of the secular cubic written in the offset
// delta = y - center, where y is a rotating-frame eigenvalue and center is one
// of the qubit diagonal entries. The constant term is proportional to the
// coupling of the state at `center`, so near-dark roots keep full precision.
struct OffsetCubic {
    cplx center;
    std::array<cplx, 4> c;

    cplx eval(cplx x) const { return ((c[3] * x + c[2]) * x + c[1]) * x + c[0]; }
    cplx deriv(cplx x) const { return (3.0 * c[3] * x + 2.0 * c[2]) * x + c[1]; }
};

inline std::array<OffsetCubic, 2> offset_cubics(const PhysicalParams& p, const Geometry& geom) {
    const double g2 = p.g() * p.g();
    const cplx a11(0.0, -p.J);  // rotating frame
    const cplx a22(0.0, p.J);
    const cplx shift = cplx(p.lambda, 0.0) - cplx(0.0, 2.0 * p.omega0);  // w = y + shift
    std::array<OffsetCubic, 2> out;
    {
        const cplx D = a22 - a11;
        const cplx W0 = a22 + shift;
        out[1] = {a22, {2.0 * g2 * geom.sin2 * D, W0 * D + 2.0 * g2, W0 + D, 1.0}};
    }
    {
        const cplx D = a11 - a22;
        const cplx W0 = a11 + shift;
        out[0] = {a11, {2.0 * g2 * geom.cos2 * D, W0 * D + 2.0 * g2, W0 + D, 1.0}};
    }
    return out;
}

inline cplx newton_polish(const OffsetCubic& q, cplx y0, double scale) {
    cplx x = y0 - q.center;
    for (int it = 0; it < 40; ++it) {
        const cplx dq = q.deriv(x);
        if (dq == cplx(0.0, 0.0)) break;
        const cplx step = q.eval(x) / dq;
        if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) break;
        x -= step;
        if (std::abs(step) <= 1e-17 * std::max(std::abs(x), 1e-300) || std::abs(step) == 0.0) break;
    }
    const cplx y = q.center + x;
    // refinement must stay near the solver value; anything else means the
    // iteration jumped to a neighbouring root
    if (std::abs(y - y0) > 1e-6 * scale) return y0;
    return y;
}

// Eigenvector of the 2x2 block [[a, b], [c, d]] for eigenvalue m.
inline Eigen::Vector2cd block_eigenvector(cplx a, cplx b, cplx c, cplx d, cplx m) {
    Eigen::Vector2cd v1(m - d, c), v2(b, m - a);
    Eigen::Vector2cd v = v1.norm() >= v2.norm() ? v1 : v2;
    if (v.norm() == 0.0) v = Eigen::Vector2cd(1.0, 0.0);
    return v.normalized();
}

// Stable roots of x^2 - tr x + det = 0.
inline std::array<cplx, 2> quadratic_roots(cplx tr, cplx det) {
    const cplx disc = std::sqrt(tr * tr - 4.0 * det);
    const cplx q = 0.5 * (tr + ((std::real(std::conj(tr) * disc) >= 0.0) ? disc : -disc));
    if (q == cplx(0.0, 0.0)) return {cplx(0.0), cplx(0.0)};
    return {q, det / q};
}

inline std::string point_string(const PhysicalParams& p, const Geometry& geom) {
    std::ostringstream os;
    os.precision(17);
    os << "(omega0=" << p.omega0 << ", gamma=" << p.gamma << ", lambda=" << p.lambda << ", J=" << p.J
       << ", k0*d=" << geom.phi << ")";
    return os.str();
}

inline SpectralDecomposition decompose_once(const EvolutionMatrix& em, bool* degenerate) {
    const auto& p = em.params;
    const Eigen::Matrix4cd Mr = em.M + cplx(0.0, p.omega0) * Eigen::Matrix4cd::Identity();
    const double scale = std::max(Mr.norm(), p.omega0);
    std::array<cplx, 4> ev;
    Eigen::Matrix4cd P = Eigen::Matrix4cd::Zero();

    if (p.g() == 0.0 || em.geom.block_diagonal()) {
        // (s, beta) and (a, alpha) decouple; solve both 2x2 blocks in closed form
        for (int b = 0; b < 2; ++b) {
            const cplx A = Mr(b, b), B = Mr(b, b + 2), C = Mr(b + 2, b), D = Mr(b + 2, b + 2);
            auto r = quadratic_roots(A + D, A * D - B * C);
            // exact roots when the block is triangular
            if (B == cplx(0.0) || C == cplx(0.0)) r = {A, D};
            for (int k = 0; k < 2; ++k) {
                const auto v = block_eigenvector(A, B, C, D, r[static_cast<std::size_t>(k)]);
                const int col = 2 * b + k;
                ev[static_cast<std::size_t>(col)] = r[static_cast<std::size_t>(k)];
                P(b, col) = v(0);
                P(b + 2, col) = v(1);
            }
        }
    } else {
        Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(Mr, true);
        if (es.info() != Eigen::Success)
            throw NumericalError("spectral_decompose: eigensolver failed at " + point_string(p, em.geom));
        P = es.eigenvectors();
        for (int i = 0; i < 4; ++i) ev[static_cast<std::size_t>(i)] = es.eigenvalues()(i);

        // one eigenvalue is exactly -lambda_tilde (+ i omega0): the pseudomode
        // combination orthogonal to the coupled one
        const cplx yD = -p.lambda_tilde() + cplx(0.0, p.omega0);
        std::size_t iD = 0;
        for (std::size_t i = 1; i < 4; ++i)
            if (std::abs(ev[i] - yD) < std::abs(ev[iD] - yD)) iD = i;
        ev[iD] = yD;
        const auto cubics = offset_cubics(p, em.geom);
        for (std::size_t i = 0; i < 4; ++i) {
            if (i == iD) continue;
            const auto& q = std::abs(ev[i] - cubics[0].center) < std::abs(ev[i] - cubics[1].center) ? cubics[0]
                                                                                                    : cubics[1];
            ev[i] = newton_polish(q, ev[i], scale);
        }
        for (std::size_t i = 0; i < 4 && degenerate; ++i)
            for (std::size_t j = i + 1; j < 4; ++j)
                if (std::abs(ev[i] - ev[j]) < 1e-10 * p.omega0) *degenerate = true;
    }

    std::array<int, 4> order{0, 1, 2, 3};
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
        const cplx u = ev[static_cast<std::size_t>(x)], w = ev[static_cast<std::size_t>(y)];
        if (-u.real() != -w.real()) return -u.real() < -w.real();
        return u.imag() < w.imag();
    });

    SpectralDecomposition out;
    out.omega0 = p.omega0;
    Eigen::Matrix4cd Ps;
    for (int k = 0; k < 4; ++k) {
        const auto src = static_cast<std::size_t>(order[static_cast<std::size_t>(k)]);
        out.mu_rot[static_cast<std::size_t>(k)] = ev[src];
        out.mu[static_cast<std::size_t>(k)] = ev[src] - cplx(0.0, p.omega0);
        Ps.col(k) = P.col(static_cast<Eigen::Index>(src));
    }
    out.P = Ps;
    Eigen::FullPivLU<Eigen::Matrix4cd> lu(Ps);
    if (!lu.isInvertible())
        throw NumericalError("spectral_decompose: eigenvector matrix is singular (defective M) at " +
                             point_string(p, em.geom));
    out.P_inv = lu.inverse();

    Eigen::Matrix4cd L = Eigen::Matrix4cd::Zero();
    for (int k = 0; k < 4; ++k) L(k, k) = out.mu[static_cast<std::size_t>(k)];
    out.reconstruction_residual = (out.P * L * out.P_inv - em.M).norm() / em.M.norm();
    return out;
}

}  // namespace detail

// Eigen-decomposition of M(d) = P diag(mu) P^-1. Solved in the frame rotating
// at omega0; each generic eigenvalue is polished on the exact secular cubic.
inline SpectralDecomposition spectral_decompose(const EvolutionMatrix& em) {
    if (!em.M.allFinite()) throw NumericalError("spectral_decompose: M has non-finite entries");
    bool degenerate = false;
    SpectralDecomposition dec = detail::decompose_once(em, &degenerate);
    if (degenerate) {
        // perturb d by one part in 1e12 to move off the crossing
        const double phi = em.geom.phi;
        const double nudged = phi != 0.0 ? phi * (1.0 + 1e-12) : 1e-12;
        warn("spectral_decompose: eigenvalues coincide within 1e-10 omega0 at " +
             detail::point_string(em.params, em.geom) + "; perturbing d by 1e-12 relative");
        dec = detail::decompose_once(build_M(em.params, Geometry::from_phase(nudged)), nullptr);
    }
    if (!(dec.reconstruction_residual < 1e-9))
        throw NumericalError("spectral_decompose: reconstruction residual " +
                             std::to_string(dec.reconstruction_residual) + " at " +
                             detail::point_string(em.params, em.geom));
    return dec;
}

// Evolution through the decomposition. Pseudomodes of a physical initial
// state start at zero; X0 may be any vector.
class FourModePropagator {
public:
    FourModePropagator(const SpectralDecomposition& dec, const Vector4c& x0)
        : dec_(dec), x0_(x0), c_(dec.P_inv * x0) {}

    Vector4c at(double t, Frame frame = Frame::lab) const {
        if (t == 0.0) return x0_;
        Vector4c w;
        for (int k = 0; k < 4; ++k) w(k) = std::exp(dec_.mu_rot[static_cast<std::size_t>(k)] * t) * c_(k);
        Vector4c x = dec_.P * w;
        if (frame == Frame::lab) x *= std::exp(cplx(0.0, -dec_.omega0 * t));
        return x;
    }

private:
    SpectralDecomposition dec_;
    Vector4c x0_;
    Vector4c c_;
};

inline std::vector<FourModeState> propagate(const SpectralDecomposition& dec, const FourModeState& x0,
                                            const std::vector<double>& times, Frame frame = Frame::lab) {
    check_time_grid(times);
    FourModePropagator prop(dec, x0.vec());
    std::vector<FourModeState> out;
    out.reserve(times.size());
    for (double t : times) out.push_back(FourModeState::from_vec(prop.at(t, frame)));
    return out;
}

// Classical fixed-step RK4 for dX/dt = M X, used to cross-check propagate.
// Each output interval is split into equal steps no longer than h_max.
inline std::vector<FourModeState> rk4_reference(const EvolutionMatrix& em, const FourModeState& x0,
                                                const std::vector<double>& times, double h_max) {
    check_time_grid(times);
    if (!(h_max > 0.0)) throw std::invalid_argument("rk4_reference: h_max must be > 0");
    const auto& p = em.params;
    if (p.lambda * h_max >= 0.01 || p.omega0 * h_max >= 0.05) {
        std::ostringstream os;
        os << "rk4_reference: step h=" << h_max << " violates lambda*h < 0.01 or omega0*h < 0.05";
        warn(os.str());
    }
    const Eigen::Matrix4cd& M = em.M;
    std::vector<FourModeState> out;
    out.reserve(times.size());
    Vector4c x = x0.vec();
    double t = 0.0;
    for (double target : times) {
        const double span = target - t;
        if (span > 0.0) {
            const auto n = static_cast<long>(std::ceil(span / h_max));
            const double h = span / static_cast<double>(n);
            for (long i = 0; i < n; ++i) {
                const Vector4c k1 = M * x;
                const Vector4c k2 = M * (x + 0.5 * h * k1);
                const Vector4c k3 = M * (x + 0.5 * h * k2);
                const Vector4c k4 = M * (x + h * k3);
                x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            }
        }
        t = target;
        out.push_back(FourModeState::from_vec(x));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Lifetimes

inline constexpr double kDefaultRateFloor = 1e-30;  // in units of omega0

struct DarkLifetime {
    double gamma_df{0.0};  // slowest decay rate
    double T_df{std::numeric_limits<double>::infinity()};
    bool is_protected{false};
};

// Slowest decay rate min_j(-Re mu_j). A rate at or below rate_floor (given in
// units of omega0) counts as an exact zero mode: the state is protected.
inline DarkLifetime dark_lifetime(const SpectralDecomposition& dec, double rate_floor = kDefaultRateFloor) {
    const double floor = rate_floor * dec.omega0;
    double slowest = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < 4; ++i) slowest = std::min(slowest, dec.rate(i));
    DarkLifetime out;
    if (slowest <= floor) {
        out.is_protected = true;
        return out;
    }
    out.gamma_df = slowest;
    out.T_df = 1.0 / slowest;
    return out;
}

// ---------------------------------------------------------------------------
// Feshbach reduction onto the (s, a) block

inline Eigen::Matrix2cd qubit_block(const PhysicalParams& p) {
    Eigen::Matrix2cd A = Eigen::Matrix2cd::Zero();
    A(0, 0) = cplx(0.0, -(p.omega0 + p.J));
    A(1, 1) = cplx(0.0, -(p.omega0 - p.J));
    return A;
}

// Sigma(z, phi) = g^2/(z + lambda - i omega0) [[2cos^2, i sin2phi], [-i sin2phi, 2sin^2]]
inline Eigen::Matrix2cd feshbach_self_energy(cplx z, const Geometry& geom, const PhysicalParams& p) {
    const cplx den = z + p.lambda_tilde();
    if (std::abs(den) < 1e-12 * p.omega0)
        throw std::domain_error("feshbach_self_energy: z is at the pseudomode pole");
    const cplx f = p.g() * p.g() / den;
    Eigen::Matrix2cd S;
    S << 2.0 * geom.cos2 * f, cplx(0.0, geom.sin2phi) * f, cplx(0.0, -geom.sin2phi) * f, 2.0 * geom.sin2 * f;
    return S;
}

inline Eigen::Matrix2cd feshbach_self_energy(cplx z, double phi, const PhysicalParams& p) {
    return feshbach_self_energy(z, Geometry::from_phase(phi), p);
}

// Schur complement of M - zI on the qubit block: eigenvalues of M (other than
// -lambda_tilde) are the zeros of det(zI - A + Sigma(z)), and
// det(M - zI) = (z + lambda_tilde)^2 det(zI - A + Sigma(z)).
inline cplx feshbach_determinant(cplx z, const Geometry& geom, const PhysicalParams& p) {
    const Eigen::Matrix2cd K = cplx(z) * Eigen::Matrix2cd::Identity() - qubit_block(p) + feshbach_self_energy(z, geom, p);
    return K.determinant();
}

// Zeros of the secular function, i.e. the roots of the pole-free cubic
// (z + lambda_tilde) det(zI - A + Sigma(z)), followed by the D-block root.
inline std::array<cplx, 4> feshbach_roots(const Geometry& geom, const PhysicalParams& p) {
    const auto cubics = detail::offset_cubics(p, geom);
    const auto& q = cubics[1];
    // companion matrix of the monic cubic in delta
    Eigen::Matrix3cd C = Eigen::Matrix3cd::Zero();
    C(0, 2) = -q.c[0];
    C(1, 2) = -q.c[1];
    C(2, 2) = -q.c[2];
    C(1, 0) = 1.0;
    C(2, 1) = 1.0;
    Eigen::ComplexEigenSolver<Eigen::Matrix3cd> es(C, false);
    std::array<cplx, 4> out;
    for (int i = 0; i < 3; ++i) {
        cplx x = es.eigenvalues()(i);
        for (int it = 0; it < 3; ++it) {
            const cplx dq = q.deriv(x);
            if (dq == cplx(0.0)) break;
            x -= q.eval(x) / dq;
        }
        out[static_cast<std::size_t>(i)] = q.center + x - cplx(0.0, p.omega0);
    }
    out[3] = -p.lambda_tilde();
    return out;
}

// Static Schur variant: the self-energy frozen at z = 0, so the qubit block
// becomes the constant matrix A - Sigma(0). Kept as a contrast; it does not
// reproduce the spectrum of M.
inline std::array<cplx, 4> feshbach_roots_static(const Geometry& geom, const PhysicalParams& p) {
    const Eigen::Matrix2cd Ms = qubit_block(p) - feshbach_self_energy(cplx(0.0), geom, p);
    const auto r = detail::quadratic_roots(Ms.trace(), Ms.determinant());
    return {r[0], r[1], -p.lambda_tilde(), -p.lambda_tilde()};
}

enum class SelfEnergyPoint { on_shell, static_zero };

// M_eff(eps) = A - Sigma(z, pi + eps) using the quartic-order expansions
// cos^2 = 1 - eps^2 + eps^4/3, sin^2 = eps^2 - eps^4/3, sin 2phi = 2eps - 4eps^3/3.
// On shell z is the node eigenvalue -i(omega0 - J) of the dark |A>.
inline Eigen::Matrix2cd effective_matrix(double eps, const PhysicalParams& p,
                                         SelfEnergyPoint point = SelfEnergyPoint::on_shell) {
    if (!(std::abs(eps) < 0.5)) throw std::invalid_argument("effective_matrix: |eps| must be < 0.5");
    const double e2 = eps * eps, e4 = e2 * e2;
    Geometry geom;
    geom.phi = kPi + eps;
    geom.cos2 = 1.0 - e2 + e4 / 3.0;
    geom.sin2 = e2 - e4 / 3.0;
    geom.sin2phi = 2.0 * eps - 4.0 * eps * e2 / 3.0;
    const cplx z = point == SelfEnergyPoint::on_shell ? cplx(0.0, -(p.omega0 - p.J)) : cplx(0.0);
    return qubit_block(p) - feshbach_self_energy(z, geom, p);
}

// Eigenvalue of a 2x2 matrix that continues the second diagonal entry, computed
// as d + delta with delta the small root so that tiny real parts survive.
inline cplx dark_branch_eigenvalue(const Eigen::Matrix2cd& m) {
    const cplx a = m(0, 0), b = m(0, 1), c = m(1, 0), d = m(1, 1);
    const cplx D = d - a;
    const cplx disc = std::sqrt(D * D + 4.0 * b * c);
    const cplx q = -0.5 * (D + ((std::real(std::conj(D) * disc) >= 0.0) ? disc : -disc));
    if (q == cplx(0.0)) return d;
    return d - b * c / q;
}

// Lambda0 = 2 g^2 J^2 lambda / (J^2 lambda^2 + (g^2 + 2 J omega0 - J^2)^2)
inline double lambda0_prefactor(const PhysicalParams& p) {
    p.validate();
    const double g2 = p.g() * p.g();
    const double J = p.J;
    const double x = g2 + 2.0 * J * p.omega0 - J * J;
    const double den = J * J * p.lambda * p.lambda + x * x;
    if (!(den > 0.0)) throw std::domain_error("lambda0_prefactor: vanishing denominator");
    return 2.0 * g2 * J * J * p.lambda / den;
}

// Leading-order dark decay rate Lambda0 * eps^2 about the node.
inline double gamma_df_analytic(double eps, const PhysicalParams& p) {
    if (std::abs(eps) > 0.3) warn("gamma_df_analytic: |eps| > 0.3, outside the quadratic regime");
    return lambda0_prefactor(p) * eps * eps;
}

}  // namespace bellmem

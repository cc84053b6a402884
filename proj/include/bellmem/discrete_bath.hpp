// discrete_bath.hpp - finite mirror-terminated reservoir: uniform mode ladder,
// single-excitation Hamiltonian and exact spectral evolution.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "bellmem/diagnostics.hpp"
#include "bellmem/model.hpp"

namespace bellmem {

struct DiscreteBathSpec {
    std::size_t n_modes{100};
    double span{0.462};  // half-window around omega0, rad/s
    bool use_k0_phase{true};
    // Coupling |g| used when n_modes == 1, where the ladder spacing is undefined.
    std::optional<double> single_mode_coupling;

    void validate() const {
        if (n_modes == 0) throw std::invalid_argument("DiscreteBathSpec: n_modes must be >= 1");
        if (!(span > 0.0) || !std::isfinite(span))
            throw std::invalid_argument("DiscreteBathSpec: span must be > 0");
        if (n_modes == 1 && !single_mode_coupling)
            throw std::invalid_argument(
                "DiscreteBathSpec: n_modes == 1 requires an explicit single_mode_coupling");
    }

    // Ladder spacing 2*span/(n_modes - 1).
    double spacing() const {
        if (n_modes < 2) throw std::invalid_argument("DiscreteBathSpec: spacing needs n_modes >= 2");
        return 2.0 * span / static_cast<double>(n_modes - 1);
    }

    // Mirror separation L = pi*v/spacing.
    double mirror_length(double v) const { return kPi * v / spacing(); }
};

struct BathModes {
    std::vector<double> omegas;     // absolute mode frequencies
    std::vector<double> detunings;  // omega_k - omega0, kept separately to avoid cancellation
    std::vector<double> g_abs;      // |g_k|
    std::vector<cplx> phase1;       // g_k^(1) = g_k * phase1[k]
    std::vector<cplx> phase2;       // g_k^(2) = g_k * phase2[k]
    double spacing{0.0};            // 0 for the single-mode case

    std::size_t size() const { return omegas.size(); }
};

// T_P = 2*pi/spacing, the photon round trip between the mirrors.
inline double poincare_time(const DiscreteBathSpec& spec) {
    if (spec.n_modes < 2) throw std::invalid_argument("poincare_time: n_modes must be >= 2");
    if (!(spec.span > 0.0)) throw std::invalid_argument("poincare_time: span must be > 0");
    return 2.0 * kPi / spec.spacing();
}

// Uniform ladder centred on omega0 with |g_k|^2 = J_L(omega_k) * spacing / (2 pi).
inline BathModes build_modes(const PhysicalParams& params, const DiscreteBathSpec& spec) {
    params.validate();
    spec.validate();

    BathModes m;
    const std::size_t n = spec.n_modes;
    m.omegas.resize(n);
    m.detunings.resize(n);
    m.g_abs.resize(n);
    m.phase1.resize(n);
    m.phase2.resize(n);

    if (n == 1) {
        m.detunings[0] = 0.0;
        m.g_abs[0] = *spec.single_mode_coupling;
    } else {
        m.spacing = spec.spacing();
        for (std::size_t k = 0; k < n; ++k) {
            // symmetric about omega0: -span, ..., +span
            const double det = spec.span * (2.0 * static_cast<double>(k) / static_cast<double>(n - 1) - 1.0);
            m.detunings[k] = det;
            m.g_abs[k] = std::sqrt(lorentzian_density_detuned(det, params) * m.spacing / (2.0 * kPi));
        }
        const double edge = lorentzian_density_detuned(spec.span, params);
        if (edge > params.gamma / 50.0) {
            std::ostringstream os;
            os << "bath window edge density J_L(omega0 + span) = " << edge / params.gamma
               << " * gamma exceeds gamma/50; the Lorentzian tails are truncated";
            warn(os.str());
        }
    }

    const double k0 = params.k0();
    for (std::size_t k = 0; k < n; ++k) {
        m.omegas[k] = params.omega0 + m.detunings[k];
        const double kk = spec.use_k0_phase ? k0 : m.omegas[k] / params.v;
        m.phase1[k] = std::polar(1.0, kk * params.d);
        m.phase2[k] = std::polar(1.0, -kk * params.d);
    }
    return m;
}

// Bath correlation function sum_k |g_k|^2 exp(-i (omega_k - omega0) t). Its
// continuum limit is (gamma*lambda/2) exp(-lambda |t|).
inline cplx bath_correlation(const BathModes& modes, double t) {
    cplx acc{0.0, 0.0};
    for (std::size_t k = 0; k < modes.size(); ++k)
        acc += modes.g_abs[k] * modes.g_abs[k] * std::polar(1.0, -modes.detunings[k] * t);
    return acc;
}

enum class Frame { lab, rotating };

// Single-excitation Hamiltonian in the basis {|eg,0>, |ge,0>, |gg,1_k>}.
// i d/dt psi = H psi. In the rotating frame omega0 is removed from the diagonal.
inline Eigen::MatrixXcd assemble_hamiltonian(const PhysicalParams& params,
                                             const BathModes& modes,
                                             Frame frame = Frame::rotating) {
    const auto n = static_cast<Eigen::Index>(modes.size());
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(n + 2, n + 2);
    const double shift = frame == Frame::rotating ? 0.0 : params.omega0;
    H(0, 0) = shift;
    H(1, 1) = shift;
    H(0, 1) = params.J;
    H(1, 0) = params.J;
    for (Eigen::Index k = 0; k < n; ++k) {
        const auto kk = static_cast<std::size_t>(k);
        const cplx g1 = modes.g_abs[kk] * modes.phase1[kk];
        const cplx g2 = modes.g_abs[kk] * modes.phase2[kk];
        H(2 + k, 0) = g1;
        H(0, 2 + k) = std::conj(g1);
        H(2 + k, 1) = g2;
        H(1, 2 + k) = std::conj(g2);
        H(2 + k, 2 + k) = frame == Frame::rotating ? modes.detunings[kk] : modes.omegas[kk];
    }
    return H;
}

struct SingleExcitationState {
    cplx alpha1{0.0, 0.0};
    cplx alpha2{0.0, 0.0};
    Eigen::VectorXcd betas;

    static SingleExcitationState qubits(cplx a1, cplx a2, std::size_t n_modes) {
        return {a1, a2, Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(n_modes))};
    }

    double bath_population() const { return betas.squaredNorm(); }
    double norm2() const { return std::norm(alpha1) + std::norm(alpha2) + bath_population(); }

    Eigen::VectorXcd to_vector() const {
        Eigen::VectorXcd v(betas.size() + 2);
        v(0) = alpha1;
        v(1) = alpha2;
        v.tail(betas.size()) = betas;
        return v;
    }

    static SingleExcitationState from_vector(const Eigen::VectorXcd& v) {
        return {v(0), v(1), v.tail(v.size() - 2)};
    }
};

// Exact propagator exp(-iHt) from one Hermitian eigendecomposition.
class SpectralPropagator {
public:
    explicit SpectralPropagator(const Eigen::MatrixXcd& H) {
        if (H.rows() != H.cols() || H.rows() < 2)
            throw std::invalid_argument("SpectralPropagator: H must be square with dim >= 2");
        const double asym = (H - H.adjoint()).cwiseAbs().maxCoeff();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(H);
        if (solver.info() != Eigen::Success) {
            std::ostringstream os;
            os << "SpectralPropagator: Hermitian eigensolver failed (dim " << H.rows()
               << ", ||H||_F = " << H.norm() << ", max|H - H^dagger| = " << asym << ")";
            throw NumericalError(os.str());
        }
        energies_ = solver.eigenvalues();
        vectors_ = solver.eigenvectors();
    }

    Eigen::Index dim() const { return energies_.size(); }
    const Eigen::VectorXd& energies() const { return energies_; }
    const Eigen::MatrixXcd& eigenvectors() const { return vectors_; }

    Eigen::VectorXcd apply(const Eigen::VectorXcd& psi0, double t) const {
        const Eigen::VectorXcd c = vectors_.adjoint() * psi0;
        return vectors_ * phased(c, t);
    }

    // Coefficients of psi0 in the eigenbasis; reuse across many times.
    Eigen::VectorXcd project(const Eigen::VectorXcd& psi0) const { return vectors_.adjoint() * psi0; }

    // Qubit amplitudes (alpha1, alpha2) at time t from projected coefficients.
    QubitAmplitudes qubit_amplitudes(const Eigen::VectorXcd& coeffs, double t) const {
        cplx a1{0.0, 0.0}, a2{0.0, 0.0};
        for (Eigen::Index m = 0; m < energies_.size(); ++m) {
            const cplx w = coeffs(m) * std::polar(1.0, -energies_(m) * t);
            a1 += vectors_(0, m) * w;
            a2 += vectors_(1, m) * w;
        }
        return {a1, a2};
    }

private:
    Eigen::VectorXcd phased(const Eigen::VectorXcd& c, double t) const {
        Eigen::VectorXcd out(c.size());
        for (Eigen::Index m = 0; m < c.size(); ++m) out(m) = c(m) * std::polar(1.0, -energies_(m) * t);
        return out;
    }

    Eigen::VectorXd energies_;
    Eigen::MatrixXcd vectors_;
};

inline void check_time_grid(const std::vector<double>& times) {
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!(times[i] >= 0.0) || !std::isfinite(times[i]))
            throw std::invalid_argument("time grid must be finite and non-negative");
        if (i > 0 && times[i] < times[i - 1]) throw std::invalid_argument("time grid must be sorted");
    }
}

inline std::vector<SingleExcitationState> evolve(const Eigen::MatrixXcd& H,
                                                 const SingleExcitationState& psi0,
                                                 const std::vector<double>& times) {
    check_time_grid(times);
    if (psi0.betas.size() + 2 != H.rows())
        throw std::invalid_argument("evolve: state and Hamiltonian dimensions differ");
    if (std::abs(psi0.norm2() - 1.0) > 1e-10) throw std::invalid_argument("evolve: psi0 must be normalized");
    const SpectralPropagator prop(H);
    const Eigen::VectorXcd v0 = psi0.to_vector();
    const Eigen::VectorXcd c = prop.project(v0);
    std::vector<SingleExcitationState> out;
    out.reserve(times.size());
    for (double t : times) {
        if (t == 0.0) {
            out.push_back(psi0);
            continue;
        }
        Eigen::VectorXcd ph(c.size());
        for (Eigen::Index m = 0; m < c.size(); ++m) ph(m) = c(m) * std::polar(1.0, -prop.energies()(m) * t);
        out.push_back(SingleExcitationState::from_vector(prop.eigenvectors() * ph));
    }
    return out;
}

// n+1 equally spaced samples on [0, t_end].
inline std::vector<double> uniform_grid(double t_end, std::size_t n_intervals) {
    if (n_intervals == 0) throw std::invalid_argument("uniform_grid: need at least one interval");
    std::vector<double> t(n_intervals + 1);
    for (std::size_t i = 0; i <= n_intervals; ++i)
        t[i] = t_end * static_cast<double>(i) / static_cast<double>(n_intervals);
    return t;
}

}  // namespace bellmem

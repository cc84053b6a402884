#include <gtest/gtest.h>

#include "bellmem/discrete_bath.hpp"
#include "oracles.hpp"

using namespace bellmem;

namespace {

PhysicalParams revival_params() {
    PhysicalParams p;
    p.gamma = 0.05;
    p.lambda = 0.066;
    p.J = -1e-3;
    p.d = p.lambda0() / 4.0;
    return p;
}

struct SilenceWarnings {
    SilenceWarnings() { set_warning_handler({}); }
    ~SilenceWarnings() { set_warning_handler([](const std::string& m) { std::clog << "warning: " << m << '\n'; }); }
};

}  // namespace

TEST(DiscreteBath, LadderAndCouplings) {
    const auto p = revival_params();
    DiscreteBathSpec spec;
    spec.n_modes = 101;
    spec.span = 0.5;
    const auto m = build_modes(p, spec);
    ASSERT_EQ(m.size(), 101u);
    EXPECT_NEAR(m.spacing, 0.01, 1e-15);
    EXPECT_DOUBLE_EQ(m.detunings.front(), -0.5);
    EXPECT_DOUBLE_EQ(m.detunings.back(), 0.5);
    EXPECT_NEAR(m.detunings[50], 0.0, 1e-15);
    // coupling rule |g_k|^2 = J_L(omega_k) dw / (2 pi)
    for (std::size_t k = 0; k < m.size(); ++k) {
        const double det = m.omegas[k] - p.omega0;
        const double jl = p.gamma * p.lambda * p.lambda / (det * det + p.lambda * p.lambda);
        EXPECT_NEAR(m.g_abs[k] * m.g_abs[k], jl * 0.01 / (2.0 * kPi), 1e-14);
    }
    EXPECT_NEAR(poincare_time(spec), 2.0 * kPi / 0.01, 1e-9);
    EXPECT_NEAR(spec.mirror_length(1.0), kPi / 0.01, 1e-9);
}

TEST(DiscreteBath, SpecValidation) {
    DiscreteBathSpec spec;
    spec.n_modes = 1;
    EXPECT_THROW(spec.validate(), std::invalid_argument);
    EXPECT_THROW(poincare_time(spec), std::invalid_argument);
    spec.single_mode_coupling = 0.02;
    EXPECT_NO_THROW(spec.validate());
    spec.n_modes = 0;
    EXPECT_THROW(spec.validate(), std::invalid_argument);
    spec = {};
    spec.span = -1.0;
    EXPECT_THROW(spec.validate(), std::invalid_argument);
}

TEST(DiscreteBath, NarrowWindowWarns) {
    const auto p = revival_params();
    std::vector<std::string> seen;
    set_warning_handler([&](const std::string& m) { seen.push_back(m); });
    DiscreteBathSpec spec;
    spec.span = 0.1;  // J_L(edge) ~ 0.3 gamma
    build_modes(p, spec);
    set_warning_handler([](const std::string& m) { std::clog << "warning: " << m << '\n'; });
    EXPECT_EQ(seen.size(), 1u);
}

TEST(DiscreteBath, HamiltonianStructure) {
    const auto p = revival_params();
    DiscreteBathSpec spec;
    spec.n_modes = 20;
    spec.span = 0.462;
    const auto m = build_modes(p, spec);
    const auto H = assemble_hamiltonian(p, m, Frame::rotating);
    EXPECT_LT((H - H.adjoint()).cwiseAbs().maxCoeff(), 1e-16);
    EXPECT_DOUBLE_EQ(H(0, 1).real(), p.J);
    EXPECT_DOUBLE_EQ(H(0, 0).real(), 0.0);
    const auto Hl = assemble_hamiltonian(p, m, Frame::lab);
    EXPECT_DOUBLE_EQ(Hl(0, 0).real(), p.omega0);
    EXPECT_NEAR(Hl(5, 5).real(), m.omegas[3], 1e-15);
    // at d = lambda0/4 the symmetric combination decouples from every mode
    for (Eigen::Index k = 0; k < 20; ++k) EXPECT_NEAR(std::abs(H(2 + k, 0) + H(2 + k, 1)), 0.0, 1e-16);
}

TEST(DiscreteBath, KernelApproachesExponential) {
    SilenceWarnings quiet;
    PhysicalParams p;
    p.gamma = 0.05;
    p.lambda = 0.066;
    std::vector<double> errs;
    for (std::size_t n : {50u, 100u, 200u, 400u, 800u}) {
        DiscreteBathSpec spec;
        spec.n_modes = n;
        spec.span = 1.5 * std::sqrt(static_cast<double>(n)) * p.lambda;
        const auto m = build_modes(p, spec);
        double num = 0.0, den = 0.0;
        for (int i = 0; i <= 300; ++i) {
            const double t = 3.0 / p.lambda * i / 300.0;
            const cplx ref = 0.5 * p.gamma * p.lambda * std::exp(-p.lambda * t);
            num += std::norm(bath_correlation(m, t) - ref);
            den += std::norm(ref);
        }
        errs.push_back(std::sqrt(num / den));
    }
    for (std::size_t i = 1; i < errs.size(); ++i) EXPECT_LT(errs[i], errs[i - 1]) << "at refinement " << i;
    EXPECT_LT(errs.back(), 0.05);
}

TEST(DiscreteBath, SpectralEvolutionMatchesRk4) {
    const auto p = revival_params();
    DiscreteBathSpec spec;
    spec.n_modes = 12;
    spec.span = 0.462;
    spec.use_k0_phase = false;
    const auto m = build_modes(p, spec);
    const auto H = assemble_hamiltonian(p, m);
    auto psi0 = SingleExcitationState::qubits(1.0, 0.0, 12);
    const std::vector<double> times{0.0, 5.0, 40.0};
    const auto out = evolve(H, psi0, times);
    const Eigen::MatrixXcd A = cplx(0.0, -1.0) * H;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const auto ref = oracle::rk4(A, psi0.to_vector(), times[i], 40000);
        EXPECT_LT((out[i].to_vector() - ref).norm(), 1e-9) << "t = " << times[i];
        EXPECT_NEAR(out[i].norm2(), 1.0, 1e-12);
    }
    EXPECT_EQ(out[0].alpha1, cplx(1.0, 0.0));
}

TEST(DiscreteBath, DarkSymmetricAmplitudeFrozen) {
    SilenceWarnings quiet;
    const auto p = revival_params();
    DiscreteBathSpec spec;
    const auto m = build_modes(p, spec);
    const auto H = assemble_hamiltonian(p, m);
    const auto s0 = from_collective(1.0, 0.0);
    const auto psi0 = SingleExcitationState::qubits(s0.alpha1, s0.alpha2, m.size());
    for (const auto& st : evolve(H, psi0, uniform_grid(1500.0, 30))) {
        EXPECT_NEAR(std::norm(to_collective(st.alpha1, st.alpha2).s), 1.0, 1e-12);
    }
}

TEST(DiscreteBath, ZeroCouplingIsStatic) {
    auto p = revival_params();
    p.gamma = 0.0;
    p.J = 0.0;
    DiscreteBathSpec spec;
    spec.n_modes = 10;
    const auto m = build_modes(p, spec);
    const auto out = evolve(assemble_hamiltonian(p, m), SingleExcitationState::qubits(0.6, 0.8, 10), {0.0, 100.0});
    EXPECT_NEAR(std::abs(out[1].alpha1 - cplx(0.6)), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(out[1].alpha2 - cplx(0.8)), 0.0, 1e-14);
}

TEST(DiscreteBath, EvolveRejectsBadInput) {
    const auto p = revival_params();
    DiscreteBathSpec spec;
    spec.n_modes = 4;
    const auto H = assemble_hamiltonian(p, build_modes(p, spec));
    EXPECT_THROW(evolve(H, SingleExcitationState::qubits(1.0, 1.0, 4), {0.0}), std::invalid_argument);
    EXPECT_THROW(evolve(H, SingleExcitationState::qubits(1.0, 0.0, 4), {1.0, 0.5}), std::invalid_argument);
    EXPECT_THROW(evolve(H, SingleExcitationState::qubits(1.0, 0.0, 3), {0.0}), std::invalid_argument);
}

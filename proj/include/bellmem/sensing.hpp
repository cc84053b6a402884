// sensing.hpp - displacement sensing with the dark branch: survival
// probability, Bernoulli Fisher information and the Cramer-Rao bound.
// Lambda0 is in 1/s and (k0 dd)^2 is dimensionless.

#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "bellmem/model.hpp"

namespace bellmem {

struct SensingProtocol {
    double t_int{1.0};          // interrogation time, s
    std::uint64_t n_rep{1};     // repetitions
    double lambda0{0.0};        // dark-branch prefactor Lambda0, 1/s
    double k0{1.0};             // wavenumber, 1/m

    void validate() const {
        if (!(t_int > 0.0) || !std::isfinite(t_int)) throw std::invalid_argument("SensingProtocol: t_int must be > 0");
        if (n_rep < 1) throw std::invalid_argument("SensingProtocol: n_rep must be >= 1");
        if (!(lambda0 > 0.0) || !std::isfinite(lambda0))
            throw std::invalid_argument("SensingProtocol: lambda0 must be > 0");
        if (!(k0 > 0.0) || !std::isfinite(k0)) throw std::invalid_argument("SensingProtocol: k0 must be > 0");
    }

    // distance between adjacent nodes of the same channel, pi/k0
    double d_node() const { return kPi / k0; }
};

// Gamma_df(dd) = Lambda0 (k0 dd)^2
inline double dark_decay_rate(double delta_d, double lambda0, double k0) {
    const double x = k0 * delta_d;
    return lambda0 * x * x;
}

inline double survival_probability(double delta_d, const SensingProtocol& proto) {
    proto.validate();
    if (!(delta_d >= 0.0)) throw std::invalid_argument("survival_probability: delta_d must be >= 0");
    return std::exp(-dark_decay_rate(delta_d, proto.lambda0, proto.k0) * proto.t_int);
}

// 4 Lambda0 k0^2 T_int
inline double fisher_weak_decay(const SensingProtocol& proto) {
    proto.validate();
    return 4.0 * proto.lambda0 * proto.k0 * proto.k0 * proto.t_int;
}

// (dP/d dd)^2 / (P (1 - P)) for the Bernoulli survival outcome. With
// x = Lambda0 T (k0 dd)^2 this is 4 Lambda0 T k0^2 x / (e^x - 1), which tends
// to the weak-decay constant as dd -> 0; that limit is returned below
// 1e-9 d_node.
inline double fisher_single_shot_exact(double delta_d, const SensingProtocol& proto) {
    proto.validate();
    if (!(delta_d >= 0.0)) throw std::invalid_argument("fisher_single_shot_exact: delta_d must be >= 0");
    const double weak = fisher_weak_decay(proto);
    if (delta_d < 1e-9 * proto.d_node()) return weak;
    const double x = dark_decay_rate(delta_d, proto.lambda0, proto.k0) * proto.t_int;
    return weak * x / std::expm1(x);
}

// dd_min = (1/(2 k0)) sqrt(1/(Lambda0 T_int N))
inline double crb_min_displacement(const SensingProtocol& proto) {
    proto.validate();
    const double n = static_cast<double>(proto.n_rep);
    return 1.0 / (2.0 * proto.k0) * std::sqrt(1.0 / (proto.lambda0 * proto.t_int * n));
}

// Dark lifetime at a relative offset dd/d_node from a node.
inline double lifetime_at_offset(double frac, double lambda0) {
    const double eps = kPi * frac;
    return 1.0 / (lambda0 * eps * eps);
}

}  // namespace bellmem

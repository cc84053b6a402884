// pipelines.hpp - end-to-end runs: revival (discrete bath), the
// (d, lambda) backflow map and the near-node lifetime scan (four-mode model),
// and the Cramer-Rao table. Each returns its numbers plus a CSV rendering.
//
// All dynamics run in omega0 = v = 1 units. Output is SI unless the config
// asks for normalized output: time in 1/omega0, rates in omega0, lengths in lambda0.

#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "bellmem/backflow.hpp"
#include "bellmem/config.hpp"
#include "bellmem/csv.hpp"
#include "bellmem/discrete_bath.hpp"
#include "bellmem/observables.hpp"
#include "bellmem/parallel.hpp"
#include "bellmem/pseudomode.hpp"
#include "bellmem/sensing.hpp"

#ifndef BELLMEM_VERSION
#define BELLMEM_VERSION "0.1.0"
#endif

namespace bellmem {

inline constexpr const char* kVersion = BELLMEM_VERSION;

namespace detail {

inline std::vector<std::string> header_block(const RunConfig& cfg, Command cmd) {
    std::vector<std::string> h;
    h.push_back(std::string("bellmem ") + kVersion + " " + command_name(cmd));
    h.push_back(std::string("units: ") + (cfg.normalized ? "normalized (omega0 = 1, lengths in lambda0)" : "SI"));
    h.push_back("effective config:");
    std::istringstream is(to_ini(cfg));
    for (std::string line; std::getline(is, line);) h.push_back(line.empty() ? "" : "  " + line);
    return h;
}

inline std::string join_times(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + fmt_double(v[i]);
    return s;
}

struct OutputScale {
    double time;    // output time per internal unit
    double rate;    // output rate per internal unit
    double length;  // output length per metre
};

inline OutputScale output_scale(const RunConfig& cfg) {
    const auto& p = cfg.physical;
    if (cfg.normalized) return {1.0, 1.0, 1.0 / p.lambda0()};
    return {1.0 / p.omega0, p.omega0, 1.0};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Revival: discrete mirror-terminated bath

struct RevivalResult {
    std::vector<double> t;  // internal units (1/omega0)
    std::vector<double> P1, P2, P_bath, s2, a2, D, I_AB, B;
    std::vector<double> D_closed;  // 2|s||a| of the state evolved from |eg>
    double T_P{0.0};
    double N_blp{0.0};
    double N_bell{0.0};
    std::vector<double> peaks_D, peaks_I, peaks_B;
    CsvTable csv;
};

inline RevivalResult run_revival(const RunConfig& raw, unsigned threads = default_thread_count()) {
    const RunConfig cfg = resolve(raw, Command::revival);
    const PhysicalParams pn = normalized(cfg.physical);
    DiscreteBathSpec spec = cfg.bath;
    spec.span = cfg.bath.span / cfg.physical.omega0;

    const BathModes modes = build_modes(pn, spec);
    const SpectralPropagator prop(assemble_hamiltonian(pn, modes, Frame::rotating));
    const std::size_t dim = modes.size();

    RevivalResult r;
    r.T_P = poincare_time(spec);
    const double horizon = *cfg.sweep.time_horizon * cfg.physical.omega0;
    const auto n_int = static_cast<std::size_t>(std::ceil(horizon / r.T_P * *cfg.sweep.samples_per_period - 1e-9));
    r.t = uniform_grid(horizon, std::max<std::size_t>(n_int, 2));
    const std::size_t n = r.t.size();

    const auto init = initial_amplitudes(cfg.sweep.initial);
    const auto c_init = prop.project(SingleExcitationState::qubits(init.alpha1, init.alpha2, dim).to_vector());
    const auto c_eg = prop.project(SingleExcitationState::qubits(1.0, 0.0, dim).to_vector());
    const auto c_ge = prop.project(SingleExcitationState::qubits(0.0, 1.0, dim).to_vector());

    for (auto* v : {&r.P1, &r.P2, &r.P_bath, &r.s2, &r.a2, &r.D, &r.I_AB, &r.B, &r.D_closed}) v->assign(n, 0.0);
    parallel_for(n, threads, [&](std::size_t i) {
        const double t = r.t[i];
        const QubitAmplitudes q = t == 0.0 ? init : prop.qubit_amplitudes(c_init, t);
        const QubitAmplitudes x = t == 0.0 ? QubitAmplitudes{1.0, 0.0} : prop.qubit_amplitudes(c_eg, t);
        const QubitAmplitudes y = t == 0.0 ? QubitAmplitudes{0.0, 1.0} : prop.qubit_amplitudes(c_ge, t);
        const double p1 = std::norm(q.alpha1), p2 = std::norm(q.alpha2);
        const auto sa = to_collective(q.alpha1, q.alpha2);
        const auto sx = to_collective(x.alpha1, x.alpha2);
        r.P1[i] = p1;
        r.P2[i] = p2;
        r.P_bath[i] = std::max(0.0, 1.0 - p1 - p2);
        r.s2[i] = std::norm(sa.s);
        r.a2[i] = std::norm(sa.a);
        r.D[i] = trace_distance_xform(x, y);
        r.D_closed[i] = trace_distance_closed(sx.s, sx.a);
        r.I_AB[i] = qmi(p1, p2);
        r.B[i] = chsh_closed(p1, p2);
    });

    const TimeSeries sD(r.t, r.D), sI(r.t, r.I_AB), sB(r.t, r.B);
    r.N_blp = blp_measure(sD);
    r.N_bell = bell_backflow(sB);
    r.peaks_D = detect_peaks(sD, default_prominence(sD));
    r.peaks_I = detect_peaks(sI, default_prominence(sI));
    r.peaks_B = detect_peaks(sB, default_prominence(sB));

    const auto sc = detail::output_scale(cfg);
    auto& csv = r.csv;
    csv.header = detail::header_block(cfg, Command::revival);
    csv.columns = {"t", "P1", "P2", "P_bath", "|s|^2", "|a|^2", "D", "I_AB", "B"};
    for (std::size_t i = 0; i < n; ++i)
        csv.add_row({r.t[i] * sc.time, r.P1[i], r.P2[i], r.P_bath[i], r.s2[i], r.a2[i], r.D[i], r.I_AB[i], r.B[i]});
    auto scaled = [&](std::vector<double> v) {
        for (double& x : v) x *= sc.time;
        return detail::join_times(v);
    };
    csv.footer = {"N_blp = " + fmt_double(r.N_blp),
                  "N_bell = " + fmt_double(r.N_bell),
                  "T_P = " + fmt_double(r.T_P * sc.time),
                  "peaks_D = " + scaled(r.peaks_D),
                  "peaks_I_AB = " + scaled(r.peaks_I),
                  "peaks_B = " + scaled(r.peaks_B)};
    return r;
}

// ---------------------------------------------------------------------------
// (d, lambda) map from the four-mode model

struct MapCell {
    double d{0.0};       // m
    double lambda{0.0};  // rad/s
    double N_blp{0.0};
    double N_bell{0.0};
};

// BLP from the pair {|eg>, |ge>} (general trace distance, both states
// propagated) and Bell backflow of the prepared |S>, on a uniform grid.
inline MapCell map_cell(const PhysicalParams& p, double horizon, int samples_per_period) {
    const PhysicalParams pn = normalized(p);
    const auto dec = spectral_decompose(build_M(pn, pn.d));
    const FourModePropagator eg(dec, FourModeState::from_qubits(1.0, 0.0).vec());
    const FourModePropagator ge(dec, FourModeState::from_qubits(0.0, 1.0).vec());
    const FourModePropagator sym(dec, FourModeState::from_collective(1.0, 0.0).vec());
    const auto n = static_cast<std::size_t>(std::ceil(horizon / (2.0 * kPi) * samples_per_period - 1e-9));
    const auto t = uniform_grid(horizon, std::max<std::size_t>(n, 2));
    std::vector<double> D(t.size()), B(t.size());
    auto qubits = [](const Vector4c& x) { return from_collective(x(0), x(1)); };
    for (std::size_t i = 0; i < t.size(); ++i) {
        D[i] = trace_distance_xform(qubits(eg.at(t[i], Frame::rotating)), qubits(ge.at(t[i], Frame::rotating)));
        const auto q = qubits(sym.at(t[i], Frame::rotating));
        const double p1 = std::norm(q.alpha1), p2 = std::norm(q.alpha2);
        B[i] = chsh_closed(p1, p2);
    }
    return {p.d, p.lambda, blp_measure({t, D}), bell_backflow({t, B})};
}

struct MapResult {
    std::vector<MapCell> cells;  // d-major, then lambda
    std::size_t n_d{0}, n_lambda{0};
    CsvTable csv;

    const MapCell& at(std::size_t i, std::size_t j) const { return cells[i * n_lambda + j]; }
};

inline MapResult run_map(const RunConfig& raw, unsigned threads = default_thread_count()) {
    const RunConfig cfg = resolve(raw, Command::map);
    const auto& sw = cfg.sweep;
    MapResult r;
    r.n_d = sw.d_values.size();
    r.n_lambda = sw.lambda_values.size();
    r.cells.resize(r.n_d * r.n_lambda);
    const double horizon = *sw.time_horizon * cfg.physical.omega0;
    parallel_for(r.cells.size(), threads, [&](std::size_t k) {
        PhysicalParams p = cfg.at_lambda(sw.lambda_values[k % r.n_lambda]);
        p.d = sw.d_values[k / r.n_lambda];
        r.cells[k] = map_cell(p, horizon, *sw.samples_per_period);
    });

    const auto sc = detail::output_scale(cfg);
    const double rate_out = cfg.normalized ? 1.0 / cfg.physical.omega0 : 1.0;
    double max_n = 0.0, max_b = 0.0;
    r.csv.header = detail::header_block(cfg, Command::map);
    r.csv.columns = {"d", "lambda", "N_blp", "N_bell"};
    for (const auto& c : r.cells) {
        r.csv.add_row({c.d * sc.length, c.lambda * rate_out, c.N_blp, c.N_bell});
        max_n = std::max(max_n, c.N_blp);
        max_b = std::max(max_b, c.N_bell);
    }
    r.csv.footer = {"max_N_blp = " + fmt_double(max_n), "max_N_bell = " + fmt_double(max_b)};
    return r;
}

// The lobe {N_bell > frac max} lies inside the one-cell dilation of {N_blp > frac max}.
inline bool lobes_contained(const MapResult& m, double frac = 0.05) {
    double max_n = 0.0, max_b = 0.0;
    for (const auto& c : m.cells) {
        max_n = std::max(max_n, c.N_blp);
        max_b = std::max(max_b, c.N_bell);
    }
    auto in_blp = [&](long i, long j) {
        if (i < 0 || j < 0 || i >= static_cast<long>(m.n_d) || j >= static_cast<long>(m.n_lambda)) return false;
        return m.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j)).N_blp > frac * max_n;
    };
    for (std::size_t i = 0; i < m.n_d; ++i)
        for (std::size_t j = 0; j < m.n_lambda; ++j) {
            if (!(m.at(i, j).N_bell > frac * max_b)) continue;
            bool covered = false;
            for (long di = -1; di <= 1 && !covered; ++di)
                for (long dj = -1; dj <= 1 && !covered; ++dj)
                    covered = in_blp(static_cast<long>(i) + di, static_cast<long>(j) + dj);
            if (!covered) return false;
        }
    return true;
}

// ---------------------------------------------------------------------------
// Lifetime scan about the antisymmetric node d_node = lambda0/2

struct LifetimeRow {
    double frac;
    double gamma_exact;     // internal units (omega0)
    double gamma_analytic;
    double T_exact_lambda;  // T_df * lambda
    double T_analytic_lambda;
};

struct LifetimeResult {
    std::vector<LifetimeRow> rows;
    double lambda0_prefactor{0.0};  // internal units (omega0)
    double slope{0.0};              // fitted over dd/d_node in [1e-6, 1e-3]
    CsvTable csv;
};

// Least-squares slope of log(gamma_exact) against log(frac) over [lo, hi].
inline double loglog_slope(const std::vector<LifetimeRow>& rows, double lo, double hi) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (const auto& r : rows) {
        if (r.frac < lo * (1 - 1e-12) || r.frac > hi * (1 + 1e-12) || !(r.gamma_exact > 0.0)) continue;
        const double x = std::log(r.frac), y = std::log(r.gamma_exact);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n < 2) return std::nan("");
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

inline LifetimeResult run_lifetime_scan(const RunConfig& raw, unsigned threads = default_thread_count()) {
    const RunConfig cfg = resolve(raw, Command::lifetime);
    const PhysicalParams pn = normalized(cfg.physical);
    LifetimeResult r;
    r.lambda0_prefactor = lambda0_prefactor(pn);
    const auto& fr = cfg.sweep.delta_d_frac;
    r.rows.resize(fr.size());
    parallel_for(fr.size(), threads, [&](std::size_t i) {
        const double eps = kPi * fr[i];
        const auto lt = dark_lifetime(spectral_decompose(build_M_near_node(pn, eps)));
        const double ga = r.lambda0_prefactor * eps * eps;
        const double inf = std::numeric_limits<double>::infinity();
        r.rows[i] = {fr[i], lt.gamma_df, ga, lt.is_protected ? inf : pn.lambda / lt.gamma_df,
                     ga > 0.0 ? pn.lambda / ga : inf};
    });
    r.slope = loglog_slope(r.rows, 1e-6, 1e-3);

    const double rate_out = cfg.normalized ? 1.0 : cfg.physical.omega0;
    const double time_out = 1.0 / rate_out;
    r.csv.header = detail::header_block(cfg, Command::lifetime);
    r.csv.columns = {"delta_d_frac", "gamma_exact", "gamma_analytic", "T_df_exact*lambda", "T_df_analytic*lambda", "ratio"};
    for (const auto& row : r.rows)
        r.csv.add_row({row.frac, row.gamma_exact * rate_out, row.gamma_analytic * rate_out, row.T_exact_lambda,
                       row.T_analytic_lambda, row.gamma_exact / row.gamma_analytic});
    r.csv.footer = {"Lambda0 = " + fmt_double(r.lambda0_prefactor * rate_out),
                    "slope(1e-6..1e-3) = " + fmt_double(r.slope),
                    "T_df(1e-5) = " + fmt_double(lifetime_at_offset(1e-5, r.lambda0_prefactor) * time_out),
                    "T_df(1e-4) = " + fmt_double(lifetime_at_offset(1e-4, r.lambda0_prefactor) * time_out)};
    return r;
}

// ---------------------------------------------------------------------------
// Cramer-Rao table

struct CrbRow {
    double t_int;
    std::uint64_t n_rep;
    double fisher;       // 1/m^2
    double delta_d_min;  // m
};

struct CrbResult {
    std::vector<CrbRow> rows;
    double lambda0{0.0};  // 1/s
    double k0{0.0};       // 1/m
    CsvTable csv;
};

inline CrbResult run_crb(const RunConfig& raw) {
    const RunConfig cfg = resolve(raw, Command::crb);
    CrbResult r;
    r.lambda0 = lambda0_prefactor(cfg.physical);
    r.k0 = cfg.physical.k0();
    if (cfg.sensing.lambda0 && std::abs(*cfg.sensing.lambda0 - r.lambda0) > 1e-9 * r.lambda0)
        throw ConfigError("[sensing] lambda0 = " + fmt_double(*cfg.sensing.lambda0) +
                          " disagrees with the value " + fmt_double(r.lambda0) + " implied by [physical]");
    r.csv.header = detail::header_block(cfg, Command::crb);
    r.csv.header.push_back("Lambda0 = " + fmt_double(r.lambda0) + " 1/s, k0 = " + fmt_double(r.k0) + " 1/m");
    r.csv.columns = {"t_int", "n_rep", "fisher", "delta_d_min"};
    for (std::size_t i = 0; i < cfg.sensing.t_int.size(); ++i) {
        SensingProtocol proto{cfg.sensing.t_int[i], cfg.sensing.n_rep[i], r.lambda0, r.k0};
        const CrbRow row{proto.t_int, proto.n_rep, fisher_weak_decay(proto), crb_min_displacement(proto)};
        r.rows.push_back(row);
        r.csv.add_row(std::vector<std::string>{fmt_double(row.t_int), std::to_string(row.n_rep), fmt_double(row.fisher),
                                               fmt_double(row.delta_d_min)});
    }
    return r;
}

}  // namespace bellmem

// config.hpp - INI run configuration with unit-aware quantities.
//
//   [physical]  omega0, gamma | g, lambda, J, d, v
//   [bath]      n_modes, span, phase (k0 | exact)
//   [sweep]     initial, time_horizon, samples_per_period, d, lambda, delta_d_frac
//   [sensing]   t_int, n_rep, lambda0
//   [output]    path, normalized
//
// Values are "<number> [unit]" or comma lists of those; "linspace(a, b, n) unit"
// and "logspace(a, b, n) unit" expand to n points. Bare numbers are SI
// (rad/s, m, m/s, s).

#pragma once

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "bellmem/csv.hpp"
#include "bellmem/diagnostics.hpp"
#include "bellmem/discrete_bath.hpp"
#include "bellmem/model.hpp"

namespace bellmem {

enum class Command { revival, map, lifetime, crb };

inline const char* command_name(Command c) {
    switch (c) {
        case Command::revival: return "revival";
        case Command::map: return "map";
        case Command::lifetime: return "lifetime";
        case Command::crb: return "crb";
    }
    return "?";
}

enum class InitialState { eg, ge, S, A };

inline const char* initial_name(InitialState s) {
    switch (s) {
        case InitialState::eg: return "eg";
        case InitialState::ge: return "ge";
        case InitialState::S: return "S";
        case InitialState::A: return "A";
    }
    return "?";
}

inline QubitAmplitudes initial_amplitudes(InitialState s) {
    switch (s) {
        case InitialState::eg: return {1.0, 0.0};
        case InitialState::ge: return {0.0, 1.0};
        case InitialState::S: return from_collective(1.0, 0.0);
        case InitialState::A: return from_collective(0.0, 1.0);
    }
    return {1.0, 0.0};
}

struct SweepGrid {
    std::vector<double> d_values;       // m
    std::vector<double> lambda_values;  // rad/s
    std::optional<double> time_horizon; // s; command default when unset
    std::optional<int> samples_per_period;
    std::vector<double> delta_d_frac;
    InitialState initial{InitialState::eg};
};

struct SensingBlock {
    std::vector<double> t_int;         // s
    std::vector<std::uint64_t> n_rep;
    std::optional<double> lambda0;     // 1/s; must agree with the physical block if given
};

struct RunConfig {
    PhysicalParams physical;
    bool g_given{false};  // g, not gamma, is held fixed when lambda is swept
    double g_value{0.0};
    DiscreteBathSpec bath;
    SweepGrid sweep;
    SensingBlock sensing;
    std::string output_path;
    bool normalized{false};

    double g() const { return g_given ? g_value : physical.g(); }

    // Physical parameters at a swept lambda, holding g or gamma as configured.
    PhysicalParams at_lambda(double lambda) const {
        PhysicalParams p = physical;
        p.lambda = lambda;
        if (g_given) p.gamma = PhysicalParams::gamma_from_g(g_value, lambda);
        return p;
    }
};

// ---------------------------------------------------------------------------

namespace detail {

enum class Dim { rate, length, speed, time, count, pure };

struct UnitContext {
    double omega0 = std::numeric_limits<double>::quiet_NaN();
    double lambda = std::numeric_limits<double>::quiet_NaN();
    double lambda0 = std::numeric_limits<double>::quiet_NaN();
    double T_P = std::numeric_limits<double>::quiet_NaN();
};

inline std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

[[noreturn]] inline void config_fail(const std::string& where, const std::string& msg) {
    throw ConfigError(where + ": " + msg);
}

inline double unit_factor(std::string_view unit, Dim dim, const UnitContext& ctx, const std::string& where) {
    auto need = [&](double v, const char* name) {
        if (std::isnan(v)) config_fail(where, std::string("unit '") + std::string(unit) + "' needs " + name + " to be known first");
        return v;
    };
    const std::string u(unit);
    switch (dim) {
        case Dim::rate:
            if (u.empty() || u == "rad/s") return 1.0;
            if (u == "Hz") return 2.0 * kPi;
            if (u == "kHz") return 2.0 * kPi * 1e3;
            if (u == "MHz") return 2.0 * kPi * 1e6;
            if (u == "GHz") return 2.0 * kPi * 1e9;
            if (u == "omega0") return need(ctx.omega0, "omega0");
            if (u == "lambda") return need(ctx.lambda, "lambda");
            break;
        case Dim::length:
            if (u.empty() || u == "m") return 1.0;
            if (u == "mm") return 1e-3;
            if (u == "um") return 1e-6;
            if (u == "nm") return 1e-9;
            if (u == "lambda0") return need(ctx.lambda0, "omega0 and v");
            break;
        case Dim::speed:
            if (u.empty() || u == "m/s") return 1.0;
            if (u == "c") return kSpeedOfLight;
            break;
        case Dim::time:
            if (u.empty() || u == "s") return 1.0;
            if (u == "ms") return 1e-3;
            if (u == "us") return 1e-6;
            if (u == "ns") return 1e-9;
            if (u == "/omega0") return 1.0 / need(ctx.omega0, "omega0");
            if (u == "/lambda") return 1.0 / need(ctx.lambda, "lambda");
            if (u == "T_P") return need(ctx.T_P, "the [bath] block");
            break;
        case Dim::count:
        case Dim::pure:
            if (u.empty()) return 1.0;
            break;
    }
    config_fail(where, "unknown or inapplicable unit '" + u + "'");
}

inline double parse_number(std::string_view s, const std::string& where) {
    s = trim(s);
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        config_fail(where, "expected a number, got '" + std::string(s) + "'");
    if (!std::isfinite(v)) config_fail(where, "value must be finite");
    return v;
}

// "<number> [unit]" or a bare unit meaning 1 unit.
inline double parse_scalar(std::string_view text, Dim dim, const UnitContext& ctx, const std::string& where) {
    text = trim(text);
    if (text.empty()) config_fail(where, "empty value");
    double v = 1.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    std::string_view unit;
    if (res.ec == std::errc()) {
        unit = trim(std::string_view(res.ptr, static_cast<std::size_t>(text.data() + text.size() - res.ptr)));
    } else {
        v = 1.0;
        unit = text;
    }
    if (!std::isfinite(v)) config_fail(where, "value must be finite");
    return v * unit_factor(unit, dim, ctx, where);
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) return out;
        start = pos + 1;
    }
}

inline std::vector<double> parse_list(std::string_view text, Dim dim, const UnitContext& ctx, const std::string& where) {
    text = trim(text);
    for (const char* fn : {"linspace", "logspace"}) {
        const std::string_view name(fn);
        if (text.substr(0, name.size()) != name) continue;
        const auto open = text.find('(');
        const auto close = text.find(')');
        if (open != name.size() || close == std::string_view::npos)
            config_fail(where, std::string("malformed ") + fn + "(a, b, n)");
        const auto args = split(text.substr(open + 1, close - open - 1), ',');
        if (args.size() != 3) config_fail(where, std::string(fn) + " takes three arguments");
        const double a = parse_number(args[0], where);
        const double b = parse_number(args[1], where);
        const double nd = parse_number(args[2], where);
        if (nd < 1.0 || nd != std::floor(nd) || nd > 1e7) config_fail(where, "point count must be a positive integer");
        const auto n = static_cast<std::size_t>(nd);
        const double f = unit_factor(trim(text.substr(close + 1)), dim, ctx, where);
        std::vector<double> v(n);
        const bool log = name == "logspace";
        if (log && !(a > 0.0 && b > 0.0)) config_fail(where, "logspace bounds must be > 0");
        for (std::size_t i = 0; i < n; ++i) {
            const double x = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
            double val = log ? std::exp(std::log(a) + x * (std::log(b) - std::log(a))) : a + x * (b - a);
            if (i == 0) val = a;
            if (i + 1 == n && n > 1) val = b;
            v[i] = val * f;
        }
        return v;
    }
    std::vector<double> out;
    for (auto item : split(text, ',')) out.push_back(parse_scalar(item, dim, ctx, where));
    return out;
}

inline bool parse_bool(std::string_view s, const std::string& where) {
    s = trim(s);
    if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
    if (s == "false" || s == "no" || s == "off" || s == "0") return false;
    config_fail(where, "expected true or false, got '" + std::string(s) + "'");
}

inline std::uint64_t to_count(double v, const std::string& where) {
    if (!(v >= 1.0) || v != std::floor(v) || v > 9007199254740992.0)
        config_fail(where, "expected a positive integer");
    return static_cast<std::uint64_t>(v);
}

inline std::string join(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt_double(v[i]);
    return s;
}

}  // namespace detail

// Parses INI text. Command-specific defaults are filled later by resolve().
inline RunConfig parse_config(const std::string& text) {
    namespace pt = boost::property_tree;
    using namespace detail;
    pt::ptree tree;
    try {
        std::istringstream is(text);
        pt::ini_parser::read_ini(is, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config syntax: ") + e.message() + " (line " + std::to_string(e.line()) + ")");
    }

    static const std::map<std::string, std::set<std::string>> known = {
        {"physical", {"omega0", "gamma", "g", "lambda", "J", "d", "v"}},
        {"bath", {"n_modes", "span", "phase"}},
        {"sweep", {"initial", "time_horizon", "samples_per_period", "d", "lambda", "delta_d_frac"}},
        {"sensing", {"t_int", "n_rep", "lambda0"}},
        {"output", {"path", "normalized"}},
    };
    for (const auto& [sec, body] : tree) {
        const auto it = known.find(sec);
        if (it == known.end()) throw ConfigError("unknown section [" + sec + "]");
        if (!body.data().empty()) throw ConfigError("key '" + sec + "' outside any section");
        for (const auto& [key, val] : body)
            if (!it->second.count(key)) throw ConfigError("[" + sec + "] unknown key '" + key + "'");
    }

    auto get = [&](const std::string& sec, const std::string& key) -> std::optional<std::string> {
        const auto s = tree.get_child_optional(sec);
        if (!s) return std::nullopt;
        const auto v = s->get_optional<std::string>(key);
        if (!v) return std::nullopt;
        return *v;
    };
    auto where = [](const std::string& sec, const std::string& key) { return "[" + sec + "] " + key; };

    RunConfig cfg;
    UnitContext ctx;
    auto& p = cfg.physical;

    if (auto v = get("physical", "omega0")) p.omega0 = parse_scalar(*v, Dim::rate, ctx, where("physical", "omega0"));
    if (!(p.omega0 > 0.0)) config_fail(where("physical", "omega0"), "must be > 0");
    ctx.omega0 = p.omega0;
    if (auto v = get("physical", "v")) p.v = parse_scalar(*v, Dim::speed, ctx, where("physical", "v"));
    if (!(p.v > 0.0)) config_fail(where("physical", "v"), "must be > 0");
    ctx.lambda0 = p.lambda0();
    // rate defaults are fractions of omega0
    p.lambda = 0.066 * p.omega0;
    p.gamma = 0.05 * p.omega0;
    if (auto v = get("physical", "lambda")) p.lambda = parse_scalar(*v, Dim::rate, ctx, where("physical", "lambda"));
    if (!(p.lambda > 0.0)) config_fail(where("physical", "lambda"), "must be > 0");
    ctx.lambda = p.lambda;
    const auto gam = get("physical", "gamma");
    const auto gg = get("physical", "g");
    if (gam && gg) config_fail("[physical]", "give either gamma or g, not both");
    if (gam) p.gamma = parse_scalar(*gam, Dim::rate, ctx, where("physical", "gamma"));
    if (gg) {
        cfg.g_given = true;
        cfg.g_value = parse_scalar(*gg, Dim::rate, ctx, where("physical", "g"));
        if (!(cfg.g_value >= 0.0)) config_fail(where("physical", "g"), "must be >= 0");
        p.gamma = PhysicalParams::gamma_from_g(cfg.g_value, p.lambda);
    }
    if (!(p.gamma >= 0.0)) config_fail(where("physical", "gamma"), "must be >= 0");
    p.J = 0.0;
    if (auto v = get("physical", "J")) p.J = parse_scalar(*v, Dim::rate, ctx, where("physical", "J"));
    p.d = 0.25 * ctx.lambda0;
    if (auto v = get("physical", "d")) p.d = parse_scalar(*v, Dim::length, ctx, where("physical", "d"));
    try {
        p.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("[physical] ") + e.what());
    }

    auto& b = cfg.bath;
    b.span = 7.0 * p.lambda;
    if (auto v = get("bath", "n_modes"))
        b.n_modes = static_cast<std::size_t>(to_count(parse_scalar(*v, Dim::count, ctx, where("bath", "n_modes")), where("bath", "n_modes")));
    if (b.n_modes < 2) config_fail(where("bath", "n_modes"), "must be >= 2");
    if (auto v = get("bath", "span")) b.span = parse_scalar(*v, Dim::rate, ctx, where("bath", "span"));
    if (!(b.span > 0.0)) config_fail(where("bath", "span"), "must be > 0");
    if (auto v = get("bath", "phase")) {
        const auto s = trim(*v);
        if (s == "k0") b.use_k0_phase = true;
        else if (s == "exact") b.use_k0_phase = false;
        else config_fail(where("bath", "phase"), "expected k0 or exact");
    }
    ctx.T_P = poincare_time(b);

    auto& sw = cfg.sweep;
    if (auto v = get("sweep", "initial")) {
        const auto s = trim(*v);
        if (s == "eg") sw.initial = InitialState::eg;
        else if (s == "ge") sw.initial = InitialState::ge;
        else if (s == "S") sw.initial = InitialState::S;
        else if (s == "A") sw.initial = InitialState::A;
        else config_fail(where("sweep", "initial"), "expected eg, ge, S or A");
    }
    if (auto v = get("sweep", "time_horizon")) {
        sw.time_horizon = parse_scalar(*v, Dim::time, ctx, where("sweep", "time_horizon"));
        if (!(*sw.time_horizon > 0.0)) config_fail(where("sweep", "time_horizon"), "must be > 0");
    }
    if (auto v = get("sweep", "samples_per_period")) {
        const double n = parse_scalar(*v, Dim::count, ctx, where("sweep", "samples_per_period"));
        if (n < 100.0 || n != std::floor(n) || n > 1e7)
            config_fail(where("sweep", "samples_per_period"), "must be an integer >= 100");
        sw.samples_per_period = static_cast<int>(n);
    }
    if (auto v = get("sweep", "d")) sw.d_values = parse_list(*v, Dim::length, ctx, where("sweep", "d"));
    if (auto v = get("sweep", "lambda")) sw.lambda_values = parse_list(*v, Dim::rate, ctx, where("sweep", "lambda"));
    if (auto v = get("sweep", "delta_d_frac"))
        sw.delta_d_frac = parse_list(*v, Dim::pure, ctx, where("sweep", "delta_d_frac"));

    auto& se = cfg.sensing;
    if (auto v = get("sensing", "t_int")) se.t_int = parse_list(*v, Dim::time, ctx, where("sensing", "t_int"));
    if (auto v = get("sensing", "n_rep"))
        for (double x : parse_list(*v, Dim::count, ctx, where("sensing", "n_rep")))
            se.n_rep.push_back(to_count(x, where("sensing", "n_rep")));
    if (auto v = get("sensing", "lambda0")) {
        UnitContext sctx;  // 1/s only
        se.lambda0 = parse_scalar(*v, Dim::rate, sctx, where("sensing", "lambda0"));
    }

    if (auto v = get("output", "path")) cfg.output_path = std::string(trim(*v));
    if (auto v = get("output", "normalized")) cfg.normalized = parse_bool(*v, where("output", "normalized"));
    return cfg;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

namespace detail {

inline void require_increasing(const std::vector<double>& v, const std::string& where) {
    if (v.empty()) config_fail(where, "must not be empty");
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] > v[i - 1])) config_fail(where, "values must be strictly increasing");
}

}  // namespace detail

// Fills command defaults and validates every block the command reads.
inline RunConfig resolve(RunConfig cfg, Command cmd) {
    using detail::config_fail;
    const auto& p = cfg.physical;
    auto& sw = cfg.sweep;
    switch (cmd) {
        case Command::revival:
            if (!sw.time_horizon) sw.time_horizon = 3.5 * poincare_time(cfg.bath);
            if (!sw.samples_per_period) sw.samples_per_period = 2000;  // per T_P
            break;
        case Command::map:
            if (!sw.time_horizon) sw.time_horizon = 400.0 / p.omega0;
            if (!sw.samples_per_period) sw.samples_per_period = 100;  // per 2 pi/omega0
            if (sw.d_values.empty())
                for (int i = 0; i < 40; ++i) sw.d_values.push_back(0.5 * p.lambda0() * i / 39.0);
            if (sw.lambda_values.empty())
                for (int i = 0; i < 40; ++i) sw.lambda_values.push_back(p.omega0 * std::pow(10.0, -4.0 + 4.0 * i / 39.0));
            detail::require_increasing(sw.d_values, "[sweep] d");
            detail::require_increasing(sw.lambda_values, "[sweep] lambda");
            for (double l : sw.lambda_values)
                if (!(l > 0.0)) config_fail("[sweep] lambda", "values must be > 0");
            for (double d : sw.d_values)
                if (!(d >= 0.0)) config_fail("[sweep] d", "values must be >= 0");
            break;
        case Command::lifetime:
            if (sw.delta_d_frac.empty())
                for (int i = 0; i <= 80; ++i) sw.delta_d_frac.push_back(std::pow(10.0, -8.0 + 0.1 * i));
            detail::require_increasing(sw.delta_d_frac, "[sweep] delta_d_frac");
            if (!(sw.delta_d_frac.front() > 0.0)) config_fail("[sweep] delta_d_frac", "values must be > 0");
            break;
        case Command::crb:
            if (cfg.sensing.t_int.empty()) {
                cfg.sensing.t_int = {1.0, 100e-6};
                cfg.sensing.n_rep = {100000, 100000000};
            }
            if (cfg.sensing.t_int.size() != cfg.sensing.n_rep.size())
                config_fail("[sensing]", "t_int and n_rep must list the same number of entries");
            for (double t : cfg.sensing.t_int)
                if (!(t > 0.0)) config_fail("[sensing] t_int", "values must be > 0");
            break;
    }
    return cfg;
}

// Effective configuration in canonical SI form; parse_config(to_ini(c))
// reproduces c exactly.
inline std::string to_ini(const RunConfig& c) {
    using detail::join;
    std::ostringstream os;
    const auto& p = c.physical;
    os << "[physical]\n";
    os << "omega0 = " << fmt_double(p.omega0) << "\n";
    os << "v = " << fmt_double(p.v) << "\n";
    os << "lambda = " << fmt_double(p.lambda) << "\n";
    if (c.g_given) os << "g = " << fmt_double(c.g_value) << "\n";
    else os << "gamma = " << fmt_double(p.gamma) << "\n";
    os << "J = " << fmt_double(p.J) << "\n";
    os << "d = " << fmt_double(p.d) << "\n";
    os << "\n[bath]\n";
    os << "n_modes = " << c.bath.n_modes << "\n";
    os << "span = " << fmt_double(c.bath.span) << "\n";
    os << "phase = " << (c.bath.use_k0_phase ? "k0" : "exact") << "\n";
    os << "\n[sweep]\n";
    os << "initial = " << initial_name(c.sweep.initial) << "\n";
    if (c.sweep.time_horizon) os << "time_horizon = " << fmt_double(*c.sweep.time_horizon) << "\n";
    if (c.sweep.samples_per_period) os << "samples_per_period = " << *c.sweep.samples_per_period << "\n";
    if (!c.sweep.d_values.empty()) os << "d = " << join(c.sweep.d_values) << "\n";
    if (!c.sweep.lambda_values.empty()) os << "lambda = " << join(c.sweep.lambda_values) << "\n";
    if (!c.sweep.delta_d_frac.empty()) os << "delta_d_frac = " << join(c.sweep.delta_d_frac) << "\n";
    os << "\n[sensing]\n";
    if (!c.sensing.t_int.empty()) os << "t_int = " << join(c.sensing.t_int) << "\n";
    if (!c.sensing.n_rep.empty()) {
        os << "n_rep = ";
        for (std::size_t i = 0; i < c.sensing.n_rep.size(); ++i) os << (i ? ", " : "") << c.sensing.n_rep[i];
        os << "\n";
    }
    if (c.sensing.lambda0) os << "lambda0 = " << fmt_double(*c.sensing.lambda0) << "\n";
    os << "\n[output]\n";
    if (!c.output_path.empty()) os << "path = " << c.output_path << "\n";
    os << "normalized = " << (c.normalized ? "true" : "false") << "\n";
    return os.str();
}

}  // namespace bellmem

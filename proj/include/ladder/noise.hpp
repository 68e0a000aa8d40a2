// Copyright 2026 The ladder authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "ladder/core/common.hpp"
#include "ladder/core/json_io.hpp"
#include "ladder/core/tensor.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <set>
#include <string>
#include <vector>

namespace ladder {

// Qutrit levels.
inline constexpr Index kG = 0, kE = 1, kF = 2;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Coherence parameters of one source qutrit (microseconds) and its
/// source-specific emission durations (nanoseconds).
struct SourceParams {
    double T1_e = kInf;
    double T1_f = kInf;
    double T2s_ge = kInf;
    double T2s_ef = kInf;
    double t_cnot = 110.0;
    double t_swap = 186.0;
};

/// Error model of the two-source device. Angles are stored in radians;
/// JSON carries degrees.
struct NoiseParams {
    std::array<SourceParams, 2> source;
    double gamma_H = 0.0;
    double gamma_pi = 0.0;
    double gamma_CZ = 0.0;
    double L_CZ = 0.0;
    double L_pi = 0.0;
    double phi_leak = 0.0;
    double t_1q = 128.0;
    double t_cz = 173.0;
    double t_cycle = 650.0;

    /// Measured device values with the suggested coherent errors.
    static NoiseParams all_errors() {
        NoiseParams p = decoherence_only();
        p.gamma_H = deg_to_rad(0.25);
        p.gamma_pi = deg_to_rad(0.25);
        p.gamma_CZ = deg_to_rad(0.5);
        p.L_CZ = 0.02;
        p.L_pi = 0.01;
        return p;
    }

    static NoiseParams decoherence_only() {
        NoiseParams p = ideal();
        p.source[0] = {27.0, 16.0, 22.0, 12.0, 110.0, 186.0};
        p.source[1] = {22.0, 4.0, 23.0, 6.0, 106.0, 240.0};
        return p;
    }

    static NoiseParams ideal() {
        NoiseParams p;
        p.source[0].t_cnot = 110.0;
        p.source[0].t_swap = 186.0;
        p.source[1].t_cnot = 106.0;
        p.source[1].t_swap = 240.0;
        return p;
    }

    static NoiseParams preset(const std::string& name) {
        if (name == "ideal") return ideal();
        if (name == "decoherence_only") return decoherence_only();
        if (name == "all_errors" || name == "default") return all_errors();
        throw ConfigError("unknown noise preset '" + name + "'");
    }

    /// Throws ConfigError on invalid values; returns soft warnings.
    std::vector<std::string> validate() const {
        std::vector<std::string> warn;
        auto positive = [](double v, const std::string& what) {
            if (!(v > 0)) throw ConfigError(what + " must be > 0");
        };
        for (int s = 0; s < 2; ++s) {
            const auto& p = source[static_cast<std::size_t>(s)];
            const std::string tag = "S" + std::to_string(s + 1) + ".";
            positive(p.T1_e, tag + "T1_e");
            positive(p.T1_f, tag + "T1_f");
            positive(p.T2s_ge, tag + "T2s_ge");
            positive(p.T2s_ef, tag + "T2s_ef");
            positive(p.t_cnot, tag + "t_cnot");
            positive(p.t_swap, tag + "t_swap");
            if (p.T2s_ge > 2 * p.T1_e) warn.push_back(tag + "T2s_ge exceeds 2*T1_e");
            if (p.T2s_ef > 2 * p.T1_f) warn.push_back(tag + "T2s_ef exceeds 2*T1_f");
        }
        positive(t_1q, "t_1q");
        positive(t_cz, "t_cz");
        positive(t_cycle, "t_cycle");
        for (auto [v, name] : {std::pair{L_CZ, "L_CZ"}, std::pair{L_pi, "L_pi"}})
            if (!(v >= 0.0 && v <= 0.25)) throw ConfigError(std::string(name) + " must lie in [0, 0.25]");
        for (auto [v, name] : {std::pair{gamma_H, "gamma_H"}, std::pair{gamma_pi, "gamma_pi"},
                               std::pair{gamma_CZ, "gamma_CZ"}})
            if (!(std::abs(v) < kPi)) throw ConfigError(std::string(name) + " must satisfy |gamma| < pi");
        return warn;
    }
};

// ---------------------------------------------------------------------------
// JSON (degrees for angles, microseconds for lifetimes, "inf" allowed).

namespace detail {

inline json time_to_json(double t) { return std::isinf(t) ? json("inf") : json(t); }

inline double time_from_json(const json& j, const std::string& key) {
    if (j.is_null()) return kInf;
    if (j.is_string()) {
        if (j.get<std::string>() == "inf") return kInf;
        throw ConfigError("noise." + key + ": expected a number or \"inf\"");
    }
    if (!j.is_number()) throw ConfigError("noise." + key + ": expected a number");
    return j.get<double>();
}

inline double number_from_json(const json& j, const std::string& key) {
    if (!j.is_number()) throw ConfigError("noise." + key + ": expected a number");
    return j.get<double>();
}

inline void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key())) throw ConfigError(where + ": unknown key '" + it.key() + "'");
}

}  // namespace detail

inline json to_json(const NoiseParams& p) {
    json j;
    for (int s = 0; s < 2; ++s) {
        const auto& q = p.source[static_cast<std::size_t>(s)];
        j["S" + std::to_string(s + 1)] = {{"T1_e_us", detail::time_to_json(q.T1_e)},
                                          {"T1_f_us", detail::time_to_json(q.T1_f)},
                                          {"T2s_ge_us", detail::time_to_json(q.T2s_ge)},
                                          {"T2s_ef_us", detail::time_to_json(q.T2s_ef)},
                                          {"t_cnot_ns", q.t_cnot},
                                          {"t_swap_ns", q.t_swap}};
    }
    const double r2d = 180.0 / kPi;
    j["gamma_H_deg"] = p.gamma_H * r2d;
    j["gamma_pi_deg"] = p.gamma_pi * r2d;
    j["gamma_CZ_deg"] = p.gamma_CZ * r2d;
    j["L_CZ"] = p.L_CZ;
    j["L_pi"] = p.L_pi;
    j["phi_leak_deg"] = p.phi_leak * r2d;
    j["t_single_ns"] = p.t_1q;
    j["t_cphase_ns"] = p.t_cz;
    j["t_cycle_ns"] = p.t_cycle;
    return j;
}

/// Parse a `noise` section. An optional "preset" key selects the base
/// values; remaining keys override them.
inline NoiseParams noise_from_json(const json& j) {
    static const std::set<std::string> top = {"preset",       "S1",   "S2",    "gamma_H_deg", "gamma_pi_deg",
                                              "gamma_CZ_deg", "L_CZ", "L_pi",  "phi_leak_deg", "t_single_ns",
                                              "t_cphase_ns",  "t_cycle_ns"};
    static const std::set<std::string> src = {"T1_e_us", "T1_f_us", "T2s_ge_us", "T2s_ef_us", "t_cnot_ns",
                                              "t_swap_ns"};
    detail::reject_unknown(j, top, "noise");
    NoiseParams p = NoiseParams::all_errors();
    if (j.contains("preset")) {
        if (!j["preset"].is_string()) throw ConfigError("noise.preset: expected a string");
        p = NoiseParams::preset(j["preset"].get<std::string>());
    }
    for (int s = 0; s < 2; ++s) {
        const std::string key = "S" + std::to_string(s + 1);
        if (!j.contains(key)) continue;
        const json& js = j[key];
        detail::reject_unknown(js, src, "noise." + key);
        auto& q = p.source[static_cast<std::size_t>(s)];
        if (js.contains("T1_e_us")) q.T1_e = detail::time_from_json(js["T1_e_us"], key + ".T1_e_us");
        if (js.contains("T1_f_us")) q.T1_f = detail::time_from_json(js["T1_f_us"], key + ".T1_f_us");
        if (js.contains("T2s_ge_us")) q.T2s_ge = detail::time_from_json(js["T2s_ge_us"], key + ".T2s_ge_us");
        if (js.contains("T2s_ef_us")) q.T2s_ef = detail::time_from_json(js["T2s_ef_us"], key + ".T2s_ef_us");
        if (js.contains("t_cnot_ns")) q.t_cnot = detail::number_from_json(js["t_cnot_ns"], key + ".t_cnot_ns");
        if (js.contains("t_swap_ns")) q.t_swap = detail::number_from_json(js["t_swap_ns"], key + ".t_swap_ns");
    }
    auto num = [&](const char* key, double& dst, double factor = 1.0) {
        if (j.contains(key)) dst = detail::number_from_json(j[key], key) * factor;
    };
    const double d2r = kPi / 180.0;
    num("gamma_H_deg", p.gamma_H, d2r);
    num("gamma_pi_deg", p.gamma_pi, d2r);
    num("gamma_CZ_deg", p.gamma_CZ, d2r);
    num("L_CZ", p.L_CZ);
    num("L_pi", p.L_pi);
    num("phi_leak_deg", p.phi_leak, d2r);
    num("t_single_ns", p.t_1q);
    num("t_cphase_ns", p.t_cz);
    num("t_cycle_ns", p.t_cycle);
    p.validate();
    return p;
}

// ---------------------------------------------------------------------------
// Channels.

/// Single-qutrit Kraus channel.
struct KrausChannel {
    std::vector<Matrix> ops;

    /// max |sum M^dagger M - I|.
    double completeness_error() const {
        if (ops.empty()) return kInf;
        Matrix s = Matrix::Zero(ops.front().cols(), ops.front().cols());
        for (const auto& m : ops) s += m.adjoint() * m;
        return (s - Matrix::Identity(s.rows(), s.cols())).cwiseAbs().maxCoeff();
    }

    Matrix apply(const Matrix& rho) const {
        Matrix out = Matrix::Zero(rho.rows(), rho.cols());
        for (const auto& m : ops) out += m * rho * m.adjoint();
        return out;
    }

    /// Choi matrix sum_ij |i><j| (x) E(|i><j|), input factor least significant.
    Matrix choi() const {
        const Index d = ops.front().cols();
        Matrix c = Matrix::Zero(d * d, d * d);
        for (Index i = 0; i < d; ++i)
            for (Index j = 0; j < d; ++j) {
                Matrix eij = Matrix::Zero(d, d);
                eij(i, j) = 1.0;
                c += kron_le(eij, apply(eij));
            }
        return c;
    }
};

namespace detail {

inline double decay_prob(double t_ns, double T_us) {
    if (std::isinf(T_us)) return 0.0;
    return 1.0 - std::exp(-t_ns / (1000.0 * T_us));
}

inline void check_time(double t) {
    if (!(t >= 0.0)) throw ConfigError("duration must be >= 0, got " + std::to_string(t));
}

}  // namespace detail

/// Qutrit amplitude damping: e -> g with p_eg = 1 - exp(-t/T1_e), f -> e
/// with p_fe = 1 - exp(-t/T1_f). t in ns, lifetimes in microseconds.
inline KrausChannel amplitude_damping(double t, double T1_e, double T1_f) {
    detail::check_time(t);
    const double peg = detail::decay_prob(t, T1_e);
    const double pfe = detail::decay_prob(t, T1_f);
    Matrix m1 = Matrix::Zero(3, 3), m2 = Matrix::Zero(3, 3), m3 = Matrix::Zero(3, 3);
    m1(kG, kG) = 1.0;
    m1(kE, kE) = std::sqrt(1.0 - peg);
    m1(kF, kF) = std::sqrt(1.0 - pfe);
    m2(kG, kE) = std::sqrt(peg);
    m3(kE, kF) = std::sqrt(pfe);
    return {{m1, m2, m3}};
}

/// Pure-dephasing probability 1 - exp(t/T1) exp(-2t/T2s).
inline double phase_damping_prob(double t, double T1, double T2s, const std::string& pair) {
    double a = std::isinf(T1) ? 0.0 : t / (1000.0 * T1);
    double b = std::isinf(T2s) ? 0.0 : 2.0 * t / (1000.0 * T2s);
    double p = 1.0 - std::exp(a - b);
    if (p < -1e-15)
        throw ConfigError("phase damping probability negative for " + pair + ": T2s=" + std::to_string(T2s) +
                          " us exceeds 2*T1=" + std::to_string(2 * T1) + " us");
    return std::max(p, 0.0);
}

/// Qutrit phase damping; the e level uses (T1_e, T2s_ge), the f level
/// (T1_f, T2s_ef).
inline KrausChannel phase_damping(double t, double T1_e, double T1_f, double T2s_ge, double T2s_ef) {
    detail::check_time(t);
    const double pe = phase_damping_prob(t, T1_e, T2s_ge, "(T1_e, T2s_ge)");
    const double pf = phase_damping_prob(t, T1_f, T2s_ef, "(T1_f, T2s_ef)");
    Matrix m1 = Matrix::Zero(3, 3), m2 = Matrix::Zero(3, 3), m3 = Matrix::Zero(3, 3);
    m1(kG, kG) = 1.0;
    m1(kE, kE) = std::sqrt(1.0 - pe);
    m1(kF, kF) = std::sqrt(1.0 - pf);
    m2(kE, kE) = std::sqrt(pe);
    m3(kF, kF) = std::sqrt(pf);
    return {{m1, m2, m3}};
}

/// Phase damping after amplitude damping, as one Kraus set. Exactly-zero
/// products are dropped.
inline KrausChannel decoherence_step(double t, const SourceParams& p) {
    auto ad = amplitude_damping(t, p.T1_e, p.T1_f);
    auto pd = phase_damping(t, p.T1_e, p.T1_f, p.T2s_ge, p.T2s_ef);
    KrausChannel out;
    for (const auto& b : pd.ops)
        for (const auto& a : ad.ops) {
            Matrix k = b * a;
            if (k.cwiseAbs().maxCoeff() > 0.0) out.ops.push_back(std::move(k));
        }
    return out;
}

// ---------------------------------------------------------------------------
// Coherent gates.

/// (pi - gamma) rotation about (X+Z)/sqrt2 on {g,e}, global phase i dropped.
inline Matrix imperfect_hadamard(double gamma) {
    Matrix u = Matrix::Identity(3, 3);
    const double c = std::cos(gamma / 2), s = std::sin(gamma / 2);
    const double h = 1.0 / std::sqrt(2.0);
    u(kG, kG) = c * h + kI * s;
    u(kG, kE) = c * h;
    u(kE, kG) = c * h;
    u(kE, kE) = -c * h + kI * s;
    return u;
}

/// (pi - gamma) rotation about x in the {e,f} manifold, global phase i dropped.
inline Matrix imperfect_pi_ef(double gamma) {
    Matrix u = Matrix::Identity(3, 3);
    const double c = std::cos(gamma / 2), s = std::sin(gamma / 2);
    u(kE, kE) = kI * s;
    u(kE, kF) = c;
    u(kF, kE) = c;
    u(kF, kF) = kI * s;
    return u;
}

namespace detail {

inline void check_leak(double L) {
    if (!(L >= 0.0 && L <= 0.25)) throw ConfigError("leakage probability must lie in [0, 0.25]");
}

/// 2x2 exchange on (a, b): a -> sqrt(1-4L) b + e^{i phi} sqrt(4L) a,
/// b -> sqrt(1-4L) a - e^{-i phi} sqrt(4L) b.
inline Matrix exchange_block(double L, double phi) {
    const double t = std::sqrt(1.0 - 4.0 * L), r = std::sqrt(4.0 * L);
    Matrix m(2, 2);
    m(0, 0) = std::exp(kI * phi) * r;
    m(1, 0) = t;
    m(0, 1) = t;
    m(1, 1) = -std::exp(-kI * phi) * r;
    return m;
}

}  // namespace detail

/// Two-qutrit CPHASE on S1 (x) S2 (S1 least significant): a (2pi - gamma)
/// rotation on |ee> <-> |fg> followed by the leakage exchange
/// |ee> -> sqrt(1-4L)|ee> + e^{i phi} sqrt(4L)|fg>.
inline Matrix imperfect_cphase(double gamma, double L, double phi) {
    detail::check_leak(L);
    const Index ee = kE + 3 * kE, fg = kF + 3 * kG;
    const double c = std::cos(gamma / 2), s = std::sin(gamma / 2);
    Matrix rot = Matrix::Identity(9, 9);
    rot(ee, ee) = -c;
    rot(fg, fg) = -c;
    rot(ee, fg) = -kI * s;
    rot(fg, ee) = -kI * s;
    const double t = std::sqrt(1.0 - 4.0 * L), r = std::sqrt(4.0 * L);
    Matrix leak = Matrix::Identity(9, 9);
    leak(ee, ee) = t;
    leak(fg, ee) = std::exp(kI * phi) * r;
    leak(fg, fg) = t;
    leak(ee, fg) = -std::exp(-kI * phi) * r;
    return leak * rot;
}

enum class ExchangeCore { CnotF0E1, SwapE0G1 };

/// Qutrit (x) photon exchange (qutrit least significant, index q + 3p).
/// The CNOT core exchanges |f0> and |e1>; the SWAP core |e0> and |g1>.
inline Matrix imperfect_emission_exchange(double L, double phi, ExchangeCore core) {
    detail::check_leak(L);
    Index a, b;
    if (core == ExchangeCore::CnotF0E1) {
        a = kF + 3 * 0;
        b = kE + 3 * 1;
    } else {
        a = kE + 3 * 0;
        b = kG + 3 * 1;
    }
    // a -> sqrt(1-4L) b + e^{i phi} sqrt(4L) a ; b -> sqrt(1-4L) a - e^{-i phi} sqrt(4L) b
    Matrix blk = detail::exchange_block(L, phi);
    Matrix u = Matrix::Identity(6, 6);
    u(a, a) = blk(0, 0);
    u(b, a) = blk(1, 0);
    u(a, b) = blk(0, 1);
    u(b, b) = blk(1, 1);
    return u;
}

/// Unitaries of one parameter set, built once.
struct GateSet {
    Matrix hadamard;
    Matrix pi_ef;
    Matrix cphase;
    Matrix cnot_exchange;
    Matrix swap_exchange;

    explicit GateSet(const NoiseParams& p)
        : hadamard(imperfect_hadamard(p.gamma_H)),
          pi_ef(imperfect_pi_ef(p.gamma_pi)),
          cphase(imperfect_cphase(p.gamma_CZ, p.L_CZ, p.phi_leak)),
          cnot_exchange(imperfect_emission_exchange(p.L_pi, p.phi_leak, ExchangeCore::CnotF0E1)),
          swap_exchange(imperfect_emission_exchange(0.0, p.phi_leak, ExchangeCore::SwapE0G1)) {}
};

}  // namespace ladder

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

#include "ladder/core/json_io.hpp"
#include "ladder/core/mpo.hpp"
#include "ladder/emitter.hpp"
#include "ladder/measure.hpp"
#include "ladder/tomo.hpp"

#include <array>
#include <random>
#include <string>
#include <vector>

namespace ladder {

/// p1: H, CPHASE, CNOT-type emission. p2: H, CPHASE, SWAP-type emission.
enum class Process { P1, P2 };

inline std::string to_string(Process p) { return p == Process::P1 ? "p1" : "p2"; }

inline Process process_from_string(const std::string& s) {
    if (s == "p1") return Process::P1;
    if (s == "p2") return Process::P2;
    throw ConfigError("unknown process '" + s + "' (expected p1 or p2)");
}

/// Linear map from two-qubit source Pauli coefficients r_mn = tr(rho s_m s_n)
/// to four-qubit output coefficients o_ijkl = tr(rho' s_i s_j s_k s_l) over
/// [S1, S2, P1, P2]. Row index i + 4j + 16k + 64l, column m + 4n.
struct ProcessMap {
    Process process = Process::P1;
    Matrix chi = Matrix::Zero(256, 16);
};

// ---------------------------------------------------------------------------
// Pauli bookkeeping.

namespace detail {

/// Multi-qubit Pauli string for a little-endian label index.
inline Matrix pauli_string(Index label, int qubits) {
    std::vector<Matrix> ops;
    for (int q = 0; q < qubits; ++q) {
        ops.push_back(pauli(static_cast<int>(label % 4)));
        label /= 4;
    }
    return kron_le(ops);
}

inline const std::vector<Matrix>& pauli_basis(int qubits) {
    static std::array<std::vector<Matrix>, 5> cache;
    auto& out = cache.at(static_cast<std::size_t>(qubits));
    if (out.empty()) {
        Index count = 1;
        for (int q = 0; q < qubits; ++q) count *= 4;
        for (Index k = 0; k < count; ++k) out.push_back(pauli_string(k, qubits));
    }
    return out;
}

inline Vector pauli_coefficients(const Matrix& op, int qubits) {
    const auto& b = pauli_basis(qubits);
    Vector v(static_cast<Index>(b.size()));
    for (std::size_t k = 0; k < b.size(); ++k) v(static_cast<Index>(k)) = (op * b[k]).trace();
    return v;
}

inline Matrix from_pauli_coefficients(const Vector& v, int qubits) {
    const auto& b = pauli_basis(qubits);
    const Index d = b.front().rows();
    Matrix m = Matrix::Zero(d, d);
    for (std::size_t k = 0; k < b.size(); ++k) m += v(static_cast<Index>(k)) * b[k];
    return m / static_cast<double>(d);
}

/// The four single-source preparations {g, (g+e)/sqrt2, (g-ie)/sqrt2, e}.
inline Vector preparation(int k) {
    Vector v = Vector::Zero(2);
    const double h = 1.0 / std::sqrt(2.0);
    switch (k) {
        case 0: v(0) = 1.0; break;
        case 1: v << h, h; break;
        case 2: v << h, cplx(0.0, -h); break;
        default: v(1) = 1.0; break;
    }
    return v;
}

/// Embed a two-qubit source operator into the qutrit pair (f levels empty).
inline Matrix embed_sources(const Matrix& q) {
    Matrix m = Matrix::Zero(9, 9);
    for (Index a = 0; a < 4; ++a)
        for (Index b = 0; b < 4; ++b) m((a % 2) + 3 * (a / 2), (b % 2) + 3 * (b / 2)) = q(a, b);
    return m;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// One emission cycle on the dense state.

/// Steps of a single cycle, with its photons relabelled P1 (from S1) and P2.
inline std::vector<Step> cycle_steps(Process p, const NoiseParams& noise) {
    Circuit c = build_circuit(ProtocolSpec::full(2, noise));
    const int cycle = p == Process::P1 ? 1 : 2;
    const int offset = p == Process::P1 ? 0 : 2;
    std::vector<Step> out;
    for (auto st : c.steps) {
        if (st.cycle != cycle) continue;
        for (auto& s : st.on)
            if (s.kind == SiteLabel::Kind::Photon) s = SiteLabel::photon(s.index - offset);
        out.push_back(std::move(st));
    }
    return out;
}

/// Run one cycle on a source-pair state; returns the joint state on
/// [S1, S2, P1, P2] with qutrit sources.
inline DensityMatrix run_cycle(const std::vector<Step>& steps, const Matrix& sources9) {
    DensityMatrix rho({SiteLabel::source(1), SiteLabel::source(2)}, sources9);
    Matrix vac = Matrix::Zero(2, 2);
    vac(0, 0) = 1.0;
    for (const auto& st : steps) {
        switch (st.kind) {
            case Step::Kind::Unitary: apply_unitary(rho, st.on, st.u); break;
            case Step::Kind::Channel: apply_channel(rho, st.on, st.kraus); break;
            case Step::Kind::NewPhoton: rho = append_site(rho, st.on.front(), vac); break;
            case Step::Kind::EndCycle: break;
        }
    }
    return permute_sites(rho, {SiteLabel::source(1), SiteLabel::source(2), SiteLabel::photon(1), SiteLabel::photon(2)});
}

enum class PhotonReadout { Exact, Sampled };

struct ProcessTomographyOptions {
    PhotonReadout photons = PhotonReadout::Exact;
    DetectionConfig detection;       // sampled mode: shots per source-basis setting
    double assignment_error = 0.0;   // symmetric g<->e readout flip probability
    bool discard_f = false;          // drop f-level events instead of reading them as e
    unsigned jobs = 1;
};

namespace detail {

/// Source readout restricted to the qubit subspace: f is either read as e
/// (the channel {P_ge, |e><f|} on each source) or discarded with
/// renormalization.
inline Matrix read_sources(DensityMatrix joint, bool discard_f) {
    if (!discard_f) {
        Matrix pge = Matrix::Zero(3, 3), fe = Matrix::Zero(3, 3);
        pge(0, 0) = pge(1, 1) = 1.0;
        fe(1, 2) = 1.0;
        for (int s = 1; s <= 2; ++s) apply_channel(joint, {SiteLabel::source(s)}, {pge, fe});
    }
    const Matrix& m = joint.data();  // [S1(3), S2(3), P1, P2]
    Matrix q(16, 16);
    for (Index a = 0; a < 16; ++a)
        for (Index b = 0; b < 16; ++b)
            q(a, b) = m((a % 2) + 3 * ((a / 2) % 2) + 9 * (a / 4), (b % 2) + 3 * ((b / 2) % 2) + 9 * (b / 4));
    const double t = q.trace().real();
    if (!(t > 0)) throw NumericalError("all population left the qubit subspace");
    return discard_f ? Matrix(q / t) : q;
}

/// Symmetric assignment error p on each source: Bloch components shrink by 1 - 2p.
inline Matrix apply_assignment_error(const Matrix& q, double p) {
    if (p == 0.0) return q;
    Vector c = pauli_coefficients(q, 4);
    for (Index k = 0; k < c.size(); ++k) {
        const Index s1 = k % 4, s2 = (k / 4) % 4;
        if (s1 != 0) c(k) *= 1.0 - 2.0 * p;
        if (s2 != 0) c(k) *= 1.0 - 2.0 * p;
    }
    return from_pauli_coefficients(c, 4);
}

/// Sampled joint tomography: Pauli-basis source readout with multinomial
/// counts, heterodyne moment tomography of the conditional photon states.
inline Matrix sampled_joint_state(const Matrix& q, const DetectionConfig& det, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const std::array<Matrix, 3> basis_u = [] {
        const double h = 1.0 / std::sqrt(2.0);
        Matrix ux(2, 2), uy(2, 2), uz = Matrix::Identity(2, 2);
        ux << h, h, h, -h;
        uy << h, cplx(0, -h), h, cplx(0, h);
        return std::array<Matrix, 3>{ux, uy, uz};
    }();
    const SiteList ph = {SiteLabel::photon(1), SiteLabel::photon(2)};
    // Per setting (b1, b2): outcome probabilities and photon estimates.
    Vector coeff = Vector::Zero(256);
    std::array<std::array<std::array<Matrix, 4>, 3>, 3> cond;
    std::array<std::array<std::array<double, 4>, 3>, 3> freq{};
    for (int b1 = 0; b1 < 3; ++b1)
        for (int b2 = 0; b2 < 3; ++b2) {
            Matrix u = kron_le(std::vector<Matrix>{basis_u[static_cast<std::size_t>(b1)], basis_u[static_cast<std::size_t>(b2)],
                                                   Matrix::Identity(4, 4)});
            Matrix r = u * q * u.adjoint();
            std::array<double, 4> p{};
            std::array<Matrix, 4> blocks;
            for (Index o = 0; o < 4; ++o) {
                Matrix blk(4, 4);
                for (Index a = 0; a < 4; ++a)
                    for (Index b = 0; b < 4; ++b) blk(a, b) = r(o + 4 * a, o + 4 * b);
                p[static_cast<std::size_t>(o)] = std::max(0.0, blk.trace().real());
                blocks[static_cast<std::size_t>(o)] = blk;
            }
            std::discrete_distribution<int> pick(p.begin(), p.end());
            std::array<std::size_t, 4> counts{};
            for (std::size_t s = 0; s < det.shots; ++s) ++counts[static_cast<std::size_t>(pick(rng))];
            for (std::size_t o = 0; o < 4; ++o) {
                freq[static_cast<std::size_t>(b1)][static_cast<std::size_t>(b2)][o] =
                    static_cast<double>(counts[o]) / static_cast<double>(det.shots);
                Matrix est = Matrix::Identity(4, 4) / 4.0;
                if (counts[o] > 0 && p[o] > 0) {
                    DetectionConfig c = det;
                    c.shots = counts[o];
                    c.seed = rng();
                    DensityMatrix cond_state(ph, hermitian_part(blocks[o] / p[o]));
                    MleOptions mo;
                    mo.fix_phase = false;
                    est = mle_from_moments(measure_moments(cond_state, c), mo).rho.data();
                }
                cond[static_cast<std::size_t>(b1)][static_cast<std::size_t>(b2)][o] = est;
            }
        }
    // Joint Pauli coefficients: identity components read in the Z basis.
    const auto& p2 = pauli_basis(2);
    for (Index k = 0; k < 256; ++k) {
        const int i = static_cast<int>(k % 4), j = static_cast<int>((k / 4) % 4);
        const Index kp = k / 16;
        const int b1 = i == 0 ? 2 : i - 1, b2 = j == 0 ? 2 : j - 1;
        cplx acc = 0.0;
        for (int o = 0; o < 4; ++o) {
            const double s1 = (i != 0 && (o & 1)) ? -1.0 : 1.0;
            const double s2 = (j != 0 && (o & 2)) ? -1.0 : 1.0;
            const auto& c = cond[static_cast<std::size_t>(b1)][static_cast<std::size_t>(b2)][static_cast<std::size_t>(o)];
            acc += s1 * s2 * freq[static_cast<std::size_t>(b1)][static_cast<std::size_t>(b2)][static_cast<std::size_t>(o)] *
                   (c * p2[static_cast<std::size_t>(kp)]).trace();
        }
        coeff(k) = acc;
    }
    return project_density(from_pauli_coefficients(coeff, 4));
}

}  // namespace detail

/// Prepare the 16 product inputs, run one cycle each, reconstruct the
/// outputs, and invert the input coefficient matrix.
inline ProcessMap run_process_tomography(Process p, const NoiseParams& noise, const ProcessTomographyOptions& opt = {}) {
    auto steps = cycle_steps(p, noise);
    Matrix in(16, 16), out(256, 16);
    std::vector<Matrix> outputs(16);
    detail::parallel_tasks(16, opt.jobs, [&](std::size_t idx) {
        const int a = static_cast<int>(idx % 4), b = static_cast<int>(idx / 4);
        Vector psi = kron_le(detail::preparation(a), detail::preparation(b));
        Matrix q_in = psi * psi.adjoint();
        auto joint = run_cycle(steps, detail::embed_sources(q_in));
        Matrix q = detail::read_sources(joint, opt.discard_f);
        if (opt.photons == PhotonReadout::Sampled)
            q = detail::sampled_joint_state(q, opt.detection, opt.detection.seed * 1000003ULL + idx);
        outputs[idx] = detail::apply_assignment_error(q, opt.assignment_error);
    });
    for (std::size_t idx = 0; idx < 16; ++idx) {
        const int a = static_cast<int>(idx % 4), b = static_cast<int>(idx / 4);
        Vector psi = kron_le(detail::preparation(a), detail::preparation(b));
        in.col(static_cast<Index>(idx)) = detail::pauli_coefficients(psi * psi.adjoint(), 2);
        out.col(static_cast<Index>(idx)) = detail::pauli_coefficients(outputs[idx], 4);
    }
    Eigen::FullPivLU<Matrix> lu(in);
    if (!lu.isInvertible()) throw NumericalError("input preparations are not informationally complete");
    ProcessMap m;
    m.process = p;
    m.chi = out * lu.inverse();
    return m;
}

// ---------------------------------------------------------------------------
// Choi representation.

/// Superoperator on column-major vectorized operators: vec(out) = S vec(in).
inline Matrix superoperator(const ProcessMap& m) {
    const auto& pin = detail::pauli_basis(2);
    const auto& pout = detail::pauli_basis(4);
    Matrix to_coeff(16, 16);  // vec(E) -> r
    for (Index k = 0; k < 16; ++k)
        for (Index a = 0; a < 4; ++a)
            for (Index b = 0; b < 4; ++b) to_coeff(k, a + 4 * b) = pin[static_cast<std::size_t>(k)](b, a);
    Matrix from_coeff(256, 256);  // o -> vec(O)
    for (Index k = 0; k < 256; ++k)
        from_coeff.col(k) = Eigen::Map<const Vector>(pout[static_cast<std::size_t>(k)].data(), 256) / 16.0;
    return from_coeff * m.chi * to_coeff;
}

inline Matrix apply_map(const ProcessMap& m, const Matrix& in) {
    Vector v = superoperator(m) * Eigen::Map<const Vector>(in.data(), 16);
    return Eigen::Map<const Matrix>(v.data(), 16, 16);
}

/// C = sum_ab |a><b| (x) chi(|a><b|), input factor least significant;
/// tr C = 4 for trace-preserving maps.
inline Matrix choi_from_chi(const ProcessMap& m) {
    Matrix s = superoperator(m);
    Matrix c = Matrix::Zero(64, 64);
    for (Index a = 0; a < 4; ++a)
        for (Index b = 0; b < 4; ++b) {
            Vector v = s.col(a + 4 * b);
            Eigen::Map<const Matrix> o(v.data(), 16, 16);
            for (Index i = 0; i < 16; ++i)
                for (Index j = 0; j < 16; ++j) c(a + 4 * i, b + 4 * j) = o(i, j);
        }
    return c;
}

inline ProcessMap chi_from_choi(const Matrix& c, Process p = Process::P1) {
    if (c.rows() != 64 || c.cols() != 64) throw ConfigError("Choi matrix must be 64x64");
    Matrix in(16, 16), out(256, 16);
    for (Index a = 0; a < 4; ++a)
        for (Index b = 0; b < 4; ++b) {
            Matrix e = Matrix::Zero(4, 4);
            e(a, b) = 1.0;
            Matrix o(16, 16);
            for (Index i = 0; i < 16; ++i)
                for (Index j = 0; j < 16; ++j) o(i, j) = c(a + 4 * i, b + 4 * j);
            in.col(a + 4 * b) = detail::pauli_coefficients(e, 2);
            out.col(a + 4 * b) = detail::pauli_coefficients(o, 4);
        }
    ProcessMap m;
    m.process = p;
    m.chi = out * in.inverse();
    return m;
}

/// |tr[C (s_i s_j (x) 1)] - 4 d_i0 d_j0| for the 16 input Pauli labels.
inline std::vector<double> trace_preservation_residuals(const Matrix& choi) {
    std::vector<double> r;
    for (Index k = 0; k < 16; ++k) {
        Matrix op = kron_le(detail::pauli_basis(2)[static_cast<std::size_t>(k)], Matrix::Identity(16, 16));
        r.push_back(std::abs((choi * op).trace() - (k == 0 ? 4.0 : 0.0)));
    }
    return r;
}

inline double check_trace_preserving(const Matrix& choi) {
    auto r = trace_preservation_residuals(choi);
    return *std::max_element(r.begin(), r.end());
}

inline double min_choi_eigenvalue(const Matrix& choi) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(choi), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

/// Uhlmann fidelity of the trace-normalized Choi states.
inline double process_fidelity(const ProcessMap& a, const ProcessMap& b) {
    return std::clamp(uhlmann_fidelity(choi_from_chi(a) / 4.0, choi_from_chi(b) / 4.0), 0.0, 1.0);
}

inline ProcessMap ideal_process_map(Process p) { return run_process_tomography(p, NoiseParams::ideal()); }

// ---------------------------------------------------------------------------
// Chaining maps into a photonic MPO.

namespace detail {

/// Split the photon following the combined source index off the head.
inline Mpo::SiteTensor peel_after_sources(std::vector<Matrix>& ops, Index ds, Index max_bond, double eps,
                                          double& disc2, double& total2) {
    const Index dl = static_cast<Index>(ops.size());
    const Index hd = ops.front().rows();
    const Index rest = hd / (2 * ds);
    const Index nh = ds * rest;
    Matrix m(4 * dl, nh * nh);
    for (Index l = 0; l < dl; ++l) {
        const Matrix& o = ops[static_cast<std::size_t>(l)];
        for (Index b = 0; b < hd; ++b) {
            const Index sb = b % ds, pb = (b / ds) % 2, rb = b / (2 * ds);
            for (Index k = 0; k < hd; ++k) {
                const Index sk = k % ds, pk = (k / ds) % 2, rk = k / (2 * ds);
                m((pk + 2 * pb) * dl + l, (sk + ds * rk) + nh * (sb + ds * rb)) = o(k, b);
            }
        }
    }
    auto svd = truncated_svd(m, max_bond, eps);
    disc2 += svd.discarded * svd.discarded;
    total2 += svd.s.squaredNorm() + svd.discarded * svd.discarded;
    Mpo::SiteTensor t(4);
    for (Index p = 0; p < 4; ++p) t[static_cast<std::size_t>(p)] = svd.u.middleRows(p * dl, dl);
    Matrix r = svd.s.asDiagonal() * svd.v.adjoint();
    std::vector<Matrix> next(static_cast<std::size_t>(r.rows()), Matrix(nh, nh));
    for (Index l = 0; l < r.rows(); ++l)
        for (Index b = 0; b < nh; ++b)
            for (Index k = 0; k < nh; ++k) next[static_cast<std::size_t>(l)](k, b) = r(l, k + nh * b);
    ops = std::move(next);
    return t;
}

}  // namespace detail

/// Start from |gg><gg|, apply p1 n-1 times and p2 once, emitting photon pairs
/// (2k-1 from S1, 2k from S2), then trace the sources.
inline Mpo chain_maps(const ProcessMap& p1, const ProcessMap& p2, int n, Index max_bond = Mpo::kDefaultMaxBond,
                      double eps = 1e-12) {
    if (n < 1) throw ConfigError("chain needs n >= 1");
    const Matrix s1 = superoperator(p1), s2 = superoperator(p2);
    std::vector<Matrix> ops(1, Matrix::Zero(4, 4));
    ops[0](0, 0) = 1.0;
    std::vector<Mpo::SiteTensor> out;
    double disc2 = 0.0, total2 = 0.0;
    for (int k = 1; k <= n; ++k) {
        const Matrix& s = k < n ? s1 : s2;
        for (auto& o : ops) {
            Vector v = s * Eigen::Map<const Vector>(o.data(), 16);
            o = Eigen::Map<const Matrix>(v.data(), 16, 16);
        }
        out.push_back(detail::peel_after_sources(ops, 4, max_bond, eps, disc2, total2));
        out.push_back(detail::peel_after_sources(ops, 4, max_bond, eps, disc2, total2));
        const Index nb = static_cast<Index>(ops.size());
        if (nb > max_bond) throw BondOverflowError("chained map exceeds bond limit", 0.0);
    }
    const Index dl = static_cast<Index>(ops.size());
    Matrix tr(dl, 1);
    for (Index l = 0; l < dl; ++l) tr(l, 0) = ops[static_cast<std::size_t>(l)].trace();
    for (auto& w : out.back()) w = w * tr;
    Mpo mpo(photon_sites(2 * n), std::move(out), max_bond, eps);
    mpo.set_truncation_error(total2 > 0 ? std::sqrt(disc2 / total2) : 0.0);
    mpo.compress(max_bond, eps);
    apply_frame_correction(mpo, n);
    return mpo;
}

// ---------------------------------------------------------------------------
// Serialization.

inline json to_json(const ProcessMap& m) {
    json re = json::array(), im = json::array();
    for (Index i = 0; i < m.chi.rows(); ++i) {
        json r = json::array(), c = json::array();
        for (Index j = 0; j < m.chi.cols(); ++j) {
            r.push_back(m.chi(i, j).real());
            c.push_back(m.chi(i, j).imag());
        }
        re.push_back(std::move(r));
        im.push_back(std::move(c));
    }
    return {{"process", to_string(m.process)},
            {"layout", "rows i+4j+16k+64l over [S1,S2,P1,P2]; cols m+4n over [S1,S2]"},
            {"chi_real", re},
            {"chi_imag", im}};
}

inline ProcessMap process_map_from_json(const json& j) {
    ProcessMap m;
    m.process = process_from_string(j.at("process").get<std::string>());
    const auto& re = j.at("chi_real");
    const auto& im = j.at("chi_imag");
    if (re.size() != 256 || im.size() != 256) throw ConfigError("chi must have 256 rows");
    for (Index i = 0; i < 256; ++i) {
        if (re[static_cast<std::size_t>(i)].size() != 16 || im[static_cast<std::size_t>(i)].size() != 16)
            throw ConfigError("chi must have 16 columns");
        for (Index k = 0; k < 16; ++k)
            m.chi(i, k) = cplx(re[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)].get<double>(),
                               im[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)].get<double>());
    }
    return m;
}

}  // namespace ladder

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

#include "ladder/core/density_matrix.hpp"
#include "ladder/core/mpo.hpp"
#include "ladder/graphstate.hpp"
#include "ladder/noise.hpp"

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

namespace ladder {

enum class Variant { FullCluster, PartialEntanglers, BellCNOT, BellCPHASE };

inline std::string to_string(Variant v) {
    switch (v) {
        case Variant::FullCluster: return "full";
        case Variant::PartialEntanglers: return "partial";
        case Variant::BellCNOT: return "bell_cnot";
        case Variant::BellCPHASE: return "bell_cphase";
    }
    return "?";
}

inline Variant variant_from_string(const std::string& s) {
    if (s == "full") return Variant::FullCluster;
    if (s == "partial") return Variant::PartialEntanglers;
    if (s == "bell_cnot") return Variant::BellCNOT;
    if (s == "bell_cphase") return Variant::BellCPHASE;
    throw ConfigError("unknown variant '" + s + "' (full|partial|bell_cnot|bell_cphase)");
}

/// Which gates run in which emission cycle.
struct ProtocolSpec {
    int n = 1;
    Variant variant = Variant::FullCluster;
    std::vector<bool> cphase;  // size n: CPHASE in cycle k
    std::vector<bool> cnot;    // size n-1: CNOT emission in cycle k (else SWAP)
    int bell_source = 1;
    NoiseParams noise = NoiseParams::all_errors();

    static ProtocolSpec full(int n, const NoiseParams& noise) {
        ProtocolSpec s;
        s.n = n;
        s.variant = Variant::FullCluster;
        s.cphase.assign(static_cast<std::size_t>(std::max(n, 0)), true);
        s.cnot.assign(static_cast<std::size_t>(std::max(n - 1, 0)), true);
        s.noise = noise;
        s.validate();
        return s;
    }

    static ProtocolSpec partial(int n, std::vector<bool> cphase, std::vector<bool> cnot, const NoiseParams& noise) {
        ProtocolSpec s;
        s.n = n;
        s.variant = Variant::PartialEntanglers;
        s.cphase = std::move(cphase);
        s.cnot = std::move(cnot);
        s.noise = noise;
        s.validate();
        return s;
    }

    static ProtocolSpec bell_cnot(int source, const NoiseParams& noise) {
        ProtocolSpec s;
        s.n = 1;
        s.variant = Variant::BellCNOT;
        s.bell_source = source;
        s.noise = noise;
        s.validate();
        return s;
    }

    static ProtocolSpec bell_cphase(const NoiseParams& noise) {
        ProtocolSpec s = full(1, noise);
        s.variant = Variant::BellCPHASE;
        return s;
    }

    int num_photons() const { return 2 * n; }

    void validate() const {
        if (n < 1) throw ConfigError("protocol needs n >= 1");
        if (variant == Variant::BellCNOT) {
            if (bell_source != 1 && bell_source != 2) throw ConfigError("bell source must be 1 or 2");
            if (n != 1) throw ConfigError("Bell variants have n = 1");
        } else {
            if (cphase.size() != static_cast<std::size_t>(n))
                throw ConfigError("cphase flags must have n = " + std::to_string(n) + " entries");
            if (cnot.size() != static_cast<std::size_t>(n - 1))
                throw ConfigError("cnot flags must have n-1 = " + std::to_string(n - 1) + " entries");
        }
        noise.validate();
    }
};

/// One scheduled operation.
struct Step {
    enum class Kind { Unitary, Channel, NewPhoton, EndCycle };
    Kind kind = Kind::Unitary;
    SiteList on;
    Matrix u;
    std::vector<Matrix> kraus;
    std::string label;
    int cycle = 0;
};

struct Circuit {
    std::vector<Step> steps;
    SiteList photons;                 // in emission order
    std::array<double, 2> time{0, 0};  // decoherence time applied per source (ns)
    int cycles = 0;
};

namespace detail {

inline SiteLabel src(int s) { return SiteLabel::source(s); }

}  // namespace detail

/// Gate/channel schedule for a protocol. Every gate is followed by the
/// decoherence step of its duration on the source(s) it touches; each cycle
/// ends with the residual idle decoherence so that a cycle lasts t_cycle.
inline Circuit build_circuit(const ProtocolSpec& spec) {
    spec.validate();
    const NoiseParams& np = spec.noise;
    const GateSet gates(np);
    Circuit c;
    std::array<double, 2> busy{0, 0};

    auto decohere = [&](int s, double t, int cycle, const std::string& why) {
        Step st;
        st.kind = Step::Kind::Channel;
        st.on = {detail::src(s)};
        st.kraus = decoherence_step(t, np.source[static_cast<std::size_t>(s - 1)]).ops;
        st.label = "decohere(" + why + ")";
        st.cycle = cycle;
        c.steps.push_back(std::move(st));
        busy[static_cast<std::size_t>(s - 1)] += t;
        c.time[static_cast<std::size_t>(s - 1)] += t;
    };
    auto unitary = [&](SiteList on, const Matrix& u, const std::string& label, int cycle) {
        Step st;
        st.kind = Step::Kind::Unitary;
        st.on = std::move(on);
        st.u = u;
        st.label = label;
        st.cycle = cycle;
        c.steps.push_back(std::move(st));
    };
    auto new_photon = [&](int v, int cycle) {
        Step st;
        st.kind = Step::Kind::NewPhoton;
        st.on = {SiteLabel::photon(v)};
        st.label = "emit P" + std::to_string(v);
        st.cycle = cycle;
        c.steps.push_back(std::move(st));
        c.photons.push_back(SiteLabel::photon(v));
    };
    auto end_cycle = [&](int cycle, const std::vector<int>& sources) {
        for (int s : sources) {
            double idle = np.t_cycle - busy[static_cast<std::size_t>(s - 1)];
            if (idle < -1e-9)
                throw ConfigError("cycle " + std::to_string(cycle) + ": gates on S" + std::to_string(s) + " take " +
                                  std::to_string(busy[static_cast<std::size_t>(s - 1)]) + " ns, longer than the " +
                                  std::to_string(np.t_cycle) + " ns cycle");
            decohere(s, std::max(idle, 0.0), cycle, "idle");
        }
        Step st;
        st.kind = Step::Kind::EndCycle;
        st.cycle = cycle;
        st.label = "end cycle " + std::to_string(cycle);
        c.steps.push_back(std::move(st));
        busy = {0, 0};
        ++c.cycles;
    };
    auto cnot_emit = [&](int s, int v, int cycle) {
        unitary({detail::src(s)}, gates.pi_ef, "pi_ef(S" + std::to_string(s) + ")", cycle);
        decohere(s, np.t_1q, cycle, "pi_ef");
        new_photon(v, cycle);
        unitary({detail::src(s), SiteLabel::photon(v)}, gates.cnot_exchange, "f0<->e1(S" + std::to_string(s) + ")",
                cycle);
        decohere(s, np.source[static_cast<std::size_t>(s - 1)].t_cnot, cycle, "cnot");
    };
    auto swap_emit = [&](int s, int v, int cycle) {
        new_photon(v, cycle);
        unitary({detail::src(s), SiteLabel::photon(v)}, gates.swap_exchange, "e0<->g1(S" + std::to_string(s) + ")",
                cycle);
        decohere(s, np.source[static_cast<std::size_t>(s - 1)].t_swap, cycle, "swap");
    };

    if (spec.variant == Variant::BellCNOT) {
        const int s = spec.bell_source;
        unitary({detail::src(s)}, gates.hadamard, "H(S" + std::to_string(s) + ")", 1);
        decohere(s, np.t_1q, 1, "H");
        cnot_emit(s, 1, 1);
        end_cycle(1, {s});
        swap_emit(s, 2, 2);
        end_cycle(2, {s});
        return c;
    }

    for (int k = 1; k <= spec.n; ++k) {
        for (int s = 1; s <= 2; ++s) {
            unitary({detail::src(s)}, gates.hadamard, "H(S" + std::to_string(s) + ")", k);
            decohere(s, np.t_1q, k, "H");
        }
        if (spec.cphase[static_cast<std::size_t>(k - 1)]) {
            unitary({detail::src(1), detail::src(2)}, gates.cphase, "CPHASE", k);
            decohere(1, np.t_cz, k, "cphase");
            decohere(2, np.t_cz, k, "cphase");
        }
        const bool cnot = k < spec.n && spec.cnot[static_cast<std::size_t>(k - 1)];
        for (int s = 1; s <= 2; ++s) {
            const int v = 2 * (k - 1) + s;
            if (cnot)
                cnot_emit(s, v, k);
            else
                swap_emit(s, v, k);
        }
        end_cycle(k, {1, 2});
    }
    return c;
}

// ---------------------------------------------------------------------------
// Dense execution.

using StepObserver = std::function<void(const Step&, const DensityMatrix&)>;

inline constexpr int kDenseMaxRungs = 4;

/// Joint state of sources and photons after the full schedule.
inline DensityMatrix simulate_dense_joint(const ProtocolSpec& spec, const StepObserver& observe = {}) {
    if (spec.n > kDenseMaxRungs)
        throw CapacityError("dense simulation supports n <= " + std::to_string(kDenseMaxRungs) + ", got " +
                            std::to_string(spec.n));
    Circuit c = build_circuit(spec);
    Matrix gg = Matrix::Zero(9, 9);
    gg(0, 0) = 1.0;
    DensityMatrix rho({SiteLabel::source(1), SiteLabel::source(2)}, gg);
    Matrix vac = Matrix::Zero(2, 2);
    vac(0, 0) = 1.0;
    for (const auto& st : c.steps) {
        switch (st.kind) {
            case Step::Kind::Unitary: apply_unitary(rho, st.on, st.u); break;
            case Step::Kind::Channel: apply_channel(rho, st.on, st.kraus); break;
            case Step::Kind::NewPhoton: rho = append_site(rho, st.on.front(), vac); break;
            case Step::Kind::EndCycle: break;
        }
        if (observe) observe(st, rho);
    }
    return rho;
}

inline bool uses_frame(const ProtocolSpec& spec) {
    return spec.variant == Variant::FullCluster || spec.variant == Variant::PartialEntanglers ||
           spec.variant == Variant::BellCPHASE;
}

/// Photonic state P1..P2n (sources traced, frame correction applied).
inline DensityMatrix simulate_dense(const ProtocolSpec& spec) {
    DensityMatrix joint = simulate_dense_joint(spec);
    DensityMatrix ph = partial_trace(joint, photon_sites(spec.num_photons()));
    if (uses_frame(spec)) apply_frame_correction(ph, spec.n);
    return ph;
}

// ---------------------------------------------------------------------------
// MPO execution.

struct MpoSimOptions {
    Index max_bond = 4096;
    double eps = 1e-12;
    bool strict = false;
};

namespace detail {

/// Operator on [S1, S2, active photons] carrying a left bond: one matrix
/// per bond index.
struct Head {
    SiteList sites;
    std::vector<Matrix> ops;
};

/// Split the least significant photon of the head off as an MPO site.
/// Head sites must be [S1, S2, P_a, rest...].
inline Mpo::SiteTensor peel_photon(Head& head, const MpoSimOptions& opt, double& disc2, double& total2) {
    const Index dl = static_cast<Index>(head.ops.size());
    const Index hd = head.ops.front().rows();
    const Index rest = hd / 18;  // dims beyond S1, S2, P_a
    // Row: p * dl + l with p = k + 2 b; column: (s_k, r_k, s_b, r_b).
    const Index cols = 9 * rest * 9 * rest;
    Matrix m(4 * dl, cols);
    for (Index l = 0; l < dl; ++l) {
        const Matrix& o = head.ops[static_cast<std::size_t>(l)];
        for (Index b = 0; b < hd; ++b) {
            const Index sb = b % 9, pb = (b / 9) % 2, rb = b / 18;
            for (Index k = 0; k < hd; ++k) {
                const Index sk = k % 9, pk = (k / 9) % 2, rk = k / 18;
                const Index row = (pk + 2 * pb) * dl + l;
                const Index col = (sk + 9 * rk) + 9 * rest * (sb + 9 * rb);
                m(row, col) = o(k, b);
            }
        }
    }
    auto svd = truncated_svd(m, opt.max_bond, opt.eps);
    disc2 += svd.discarded * svd.discarded;
    total2 += svd.s.squaredNorm() + svd.discarded * svd.discarded;
    if (svd.overflow && opt.strict)
        throw BondOverflowError("MPO simulation bond limit exceeded", svd.discarded);
    Mpo::SiteTensor t(4);
    for (Index p = 0; p < 4; ++p) t[static_cast<std::size_t>(p)] = svd.u.middleRows(p * dl, dl);
    Matrix r = svd.s.asDiagonal() * svd.v.adjoint();
    const Index dr = r.rows();
    const Index nh = 9 * rest;
    std::vector<Matrix> ops(static_cast<std::size_t>(dr), Matrix(nh, nh));
    for (Index l = 0; l < dr; ++l)
        for (Index b = 0; b < nh; ++b)
            for (Index k = 0; k < nh; ++k) ops[static_cast<std::size_t>(l)](k, b) = r(l, k + nh * b);
    head.ops = std::move(ops);
    head.sites.erase(head.sites.begin() + 2);
    return t;
}

}  // namespace detail

/// Photonic MPO on P1..P2n. Emitted photons are never touched again, so
/// they are split off the source operator at the end of each cycle.
inline Mpo simulate_mpo(const ProtocolSpec& spec, const MpoSimOptions& opt = {}) {
    Circuit c = build_circuit(spec);
    detail::Head head;
    head.sites = {SiteLabel::source(1), SiteLabel::source(2)};
    Matrix gg = Matrix::Zero(9, 9);
    gg(0, 0) = 1.0;
    head.ops = {gg};
    SiteList out_sites;
    std::vector<Mpo::SiteTensor> out;
    double disc2 = 0.0, total2 = 0.0;
    Matrix vac = Matrix::Zero(2, 2);
    vac(0, 0) = 1.0;

    for (const auto& st : c.steps) {
        switch (st.kind) {
            case Step::Kind::Unitary: {
                auto pos = detail::positions_of(head.sites, st.on);
                auto map = local_index_map(Radix(head.sites), pos);
                for (auto& o : head.ops) conjugate_local(o, map, st.u);
                break;
            }
            case Step::Kind::Channel: {
                auto pos = detail::positions_of(head.sites, st.on);
                auto map = local_index_map(Radix(head.sites), pos);
                for (auto& o : head.ops) apply_kraus(o, map, st.kraus);
                break;
            }
            case Step::Kind::NewPhoton:
                head.sites.push_back(st.on.front());
                for (auto& o : head.ops) o = kron_le(o, vac);
                break;
            case Step::Kind::EndCycle:
                while (head.sites.size() > 2) {
                    out_sites.push_back(head.sites[2]);
                    out.push_back(detail::peel_photon(head, opt, disc2, total2));
                }
                break;
        }
    }
    // Trace the sources into the last photon.
    const Index dl = static_cast<Index>(head.ops.size());
    Matrix tr(dl, 1);
    for (Index l = 0; l < dl; ++l) tr(l, 0) = head.ops[static_cast<std::size_t>(l)].trace();
    for (auto& w : out.back()) w = w * tr;
    Mpo mpo(out_sites, std::move(out), opt.max_bond, opt.eps);
    mpo.set_truncation_error(total2 > 0 ? std::sqrt(disc2 / total2) : 0.0);
    mpo.compress(opt.max_bond, opt.eps, opt.strict);
    if (uses_frame(spec)) apply_frame_correction(mpo, spec.n);
    return mpo;
}

// ---------------------------------------------------------------------------
// Trajectories.

/// Generator for shot `shot` of a run seeded with `seed`.
inline std::mt19937_64 shot_rng(std::uint64_t seed, std::uint64_t shot) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(shot), static_cast<std::uint32_t>(shot >> 32)};
    return std::mt19937_64(seq);
}

/// Final pure state of one trajectory on [S1, S2, P1..P2n].
struct Trajectory {
    SiteList sites;
    Vector psi;
};

/// Circuit with the index tables of every step precomputed for state vectors.
struct TrajectoryPlan {
    const Circuit* circuit = nullptr;
    std::vector<IndexMatrix> maps;
    SiteList final_sites;

    explicit TrajectoryPlan(const Circuit& c) : circuit(&c) {
        SiteList sites = {SiteLabel::source(1), SiteLabel::source(2)};
        maps.resize(c.steps.size());
        for (std::size_t i = 0; i < c.steps.size(); ++i) {
            const Step& st = c.steps[i];
            if (st.kind == Step::Kind::NewPhoton) sites.push_back(st.on.front());
            if (st.kind == Step::Kind::Unitary || st.kind == Step::Kind::Channel)
                maps[i] = local_index_map(Radix(sites), detail::positions_of(sites, st.on));
        }
        final_sites = std::move(sites);
    }
};

inline Trajectory run_trajectory(const TrajectoryPlan& plan, std::mt19937_64& rng) {
    const Circuit& c = *plan.circuit;
    Trajectory tr;
    tr.sites = plan.final_sites;
    tr.psi = Vector::Zero(9);
    tr.psi(0) = 1.0;
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    Vector v;
    for (std::size_t i = 0; i < c.steps.size(); ++i) {
        const Step& st = c.steps[i];
        switch (st.kind) {
            case Step::Kind::Unitary: apply_left(tr.psi, plan.maps[i], st.u); break;
            case Step::Kind::Channel: {
                if (st.kraus.size() == 1) {
                    apply_left(tr.psi, plan.maps[i], st.kraus.front());
                    tr.psi /= tr.psi.norm();
                    break;
                }
                // Born-weighted branch choice.
                const double u = uni(rng);
                double acc = 0.0;
                bool done = false;
                for (std::size_t k = 0; k < st.kraus.size() && !done; ++k) {
                    v = tr.psi;
                    apply_left(v, plan.maps[i], st.kraus[k]);
                    const double w = v.squaredNorm();
                    acc += w;
                    if (w > 0 && (u < acc || k + 1 == st.kraus.size())) {
                        tr.psi = v / std::sqrt(w);
                        done = true;
                    }
                }
                if (!done) throw NumericalError("trajectory branch with zero weight");
                break;
            }
            case Step::Kind::NewPhoton: {
                Vector vac = Vector::Zero(2);
                vac(0) = 1.0;
                tr.psi = kron_le(tr.psi, vac);
                break;
            }
            case Step::Kind::EndCycle: break;
        }
    }
    return tr;
}

inline Trajectory run_trajectory(const Circuit& c, std::mt19937_64& rng) { return run_trajectory(TrajectoryPlan(c), rng); }

/// Mean and standard error of a per-shot scalar.
struct TrajectoryEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::size_t shots = 0;
    std::uint64_t seed = 0;
};

/// Calls `visit(shot, trajectory)` for every shot. Shots are independent:
/// results do not depend on `jobs`.
inline void simulate_trajectories(const ProtocolSpec& spec, std::size_t shots, std::uint64_t seed,
                                  const std::function<void(std::size_t, const Trajectory&)>& visit) {
    if (shots < 1) throw ConfigError("shots must be >= 1");
    Circuit c = build_circuit(spec);
    TrajectoryPlan plan(c);
    for (std::size_t s = 0; s < shots; ++s) {
        auto rng = shot_rng(seed, s);
        visit(s, run_trajectory(plan, rng));
    }
}

/// Ensemble estimate of a per-trajectory observable, optionally spread over
/// `jobs` threads (per-shot generators keep the result bitwise identical).
inline TrajectoryEstimate estimate_trajectories(const ProtocolSpec& spec, std::size_t shots, std::uint64_t seed,
                                                const std::function<double(const Trajectory&)>& observable,
                                                unsigned jobs = 1) {
    if (shots < 1) throw ConfigError("shots must be >= 1");
    Circuit c = build_circuit(spec);
    TrajectoryPlan plan(c);
    std::vector<double> values(shots);
    auto worker = [&](std::size_t begin, std::size_t end) {
        for (std::size_t s = begin; s < end; ++s) {
            auto rng = shot_rng(seed, s);
            values[s] = observable(run_trajectory(plan, rng));
        }
    };
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(shots)));
    if (jobs == 1) {
        worker(0, shots);
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (shots + jobs - 1) / jobs;
        for (unsigned j = 0; j < jobs; ++j) {
            std::size_t b = j * chunk, e = std::min(shots, b + chunk);
            if (b < e) pool.emplace_back(worker, b, e);
        }
        for (auto& t : pool) t.join();
    }
    TrajectoryEstimate est;
    est.shots = shots;
    est.seed = seed;
    double sum = 0.0;
    for (double v : values) sum += v;
    est.mean = sum / static_cast<double>(shots);
    double var = 0.0;
    for (double v : values) var += (v - est.mean) * (v - est.mean);
    var /= static_cast<double>(shots > 1 ? shots - 1 : 1);
    est.stderr_ = std::sqrt(var / static_cast<double>(shots));
    return est;
}

/// <target| tr_S |Psi><Psi| |target> for one trajectory.
inline double trajectory_fidelity(const Trajectory& tr, const PureState& target) {
    // Sources occupy the two least significant (qutrit) digits.
    const Index ns = 9;
    const Index np = tr.psi.size() / ns;
    PureState t = permute_sites(target, SiteList(tr.sites.begin() + 2, tr.sites.end()));
    if (t.dim() != np) throw ConfigError("target does not match the photonic register");
    Eigen::Map<const Matrix> psi(tr.psi.data(), ns, np);  // psi(s, photons)
    Vector overlap = psi.conjugate() * t.amplitudes();
    return overlap.squaredNorm();
}

// ---------------------------------------------------------------------------

enum class SimMode { Dense, Mpo, Trajectories };

inline SimMode sim_mode_from_string(const std::string& s) {
    if (s == "dense") return SimMode::Dense;
    if (s == "mpo") return SimMode::Mpo;
    if (s == "traj") return SimMode::Trajectories;
    throw ConfigError("unknown mode '" + s + "' (dense|mpo|traj)");
}

struct SimResult {
    std::optional<DensityMatrix> dense;
    std::optional<Mpo> mpo;
    std::optional<TrajectoryEstimate> trajectories;  // fidelity to the ideal target
    double wall_seconds = 0.0;
    std::uint64_t seed = 0;
};

/// Ideal photonic target of a protocol variant.
inline PureState ideal_target(const ProtocolSpec& spec) {
    if (spec.variant == Variant::BellCNOT) {
        Vector v = Vector::Zero(4);
        v(0) = v(3) = 1.0 / std::sqrt(2.0);
        return {photon_sites(2), v};
    }
    if (spec.variant == Variant::PartialEntanglers) {
        // Ideal circuit output, computed on the pure-state path.
        ProtocolSpec ideal = spec;
        ideal.noise = NoiseParams::ideal();
        std::mt19937_64 rng(0);
        auto tr = run_trajectory(build_circuit(ideal), rng);
        Eigen::Map<const Matrix> psi(tr.psi.data(), 9, tr.psi.size() / 9);
        Vector ph = psi.row(0).transpose();  // sources end in |gg>
        return {SiteList(tr.sites.begin() + 2, tr.sites.end()), ph};
    }
    return ideal_cluster_state(LadderGraph(spec.n));
}

inline SimResult simulate(const ProtocolSpec& spec, SimMode mode, std::size_t shots = 1000, std::uint64_t seed = 1,
                          unsigned jobs = 1) {
    auto t0 = std::chrono::steady_clock::now();
    SimResult r;
    r.seed = seed;
    switch (mode) {
        case SimMode::Dense: r.dense = simulate_dense(spec); break;
        case SimMode::Mpo: r.mpo = simulate_mpo(spec); break;
        case SimMode::Trajectories: {
            PureState target = ideal_target(spec);
            r.trajectories = estimate_trajectories(
                spec, shots, seed, [&](const Trajectory& t) { return trajectory_fidelity(t, target); }, jobs);
            break;
        }
    }
    r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

}  // namespace ladder

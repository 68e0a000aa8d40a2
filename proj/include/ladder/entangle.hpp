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
#include "ladder/core/json_io.hpp"
#include "ladder/core/mpo.hpp"
#include "ladder/graphstate.hpp"

#include <atomic>
#include <cmath>
#include <random>
#include <string>
#include <thread>
#include <vector>

namespace ladder {

inline constexpr double kNegativityClip = 1e-10;

/// (||rho^{T_A}||_1 - 1) / 2 with `part` as subsystem A.
inline double negativity(const DensityMatrix& rho, const SiteList& part) {
    if (part.empty() || part.size() >= rho.sites().size()) throw ConfigError("negativity needs a proper bipartition");
    auto pt = partial_transpose(rho, part);
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(pt.data()), Eigen::EigenvaluesOnly);
    const double tr = rho.data().trace().real();
    const double n = (es.eigenvalues().cwiseAbs().sum() - tr) / (2.0 * tr);
    return n < kNegativityClip ? 0.0 : n;
}

/// Negativity across the first site of a two-site state.
inline double negativity(const DensityMatrix& rho) {
    if (rho.sites().size() != 2) throw ConfigError("two-site state expected");
    return negativity(rho, {rho.sites().front()});
}

enum class ProjBasis { X, Z };

/// Corner-to-corner projection scheme: path vertices are X-measured, the
/// rest Z-measured; the two endpoints stay open.
struct ProjectionPlan {
    int first = 1, last = 2;
    std::vector<int> path;  // includes both endpoints
    int switch_column = 1;

    std::vector<int> measured(int num_vertices) const {
        std::vector<int> out;
        for (int v = 1; v <= num_vertices; ++v)
            if (v != first && v != last) out.push_back(v);
        return out;
    }
    ProjBasis basis(int v) const {
        return std::find(path.begin(), path.end(), v) != path.end() ? ProjBasis::X : ProjBasis::Z;
    }
};

/// Monotone paths from vertex 1 (row 1, column 1) to vertex 2n (row 2,
/// column n); the c-th path runs along row 1 to column c and returns on row 2.
inline std::vector<ProjectionPlan> enumerate_paths(const LadderGraph& g) {
    const int n = g.n();
    std::vector<ProjectionPlan> out;
    for (int c = 1; c <= n; ++c) {
        ProjectionPlan p;
        p.first = 1;
        p.last = 2 * n;
        p.switch_column = c;
        for (int k = 1; k <= c; ++k) p.path.push_back(2 * k - 1);
        for (int k = c; k <= n; ++k) p.path.push_back(2 * k);
        out.push_back(std::move(p));
    }
    return out;
}

inline Vector projection_vector(ProjBasis b, int outcome) {
    Vector v(2);
    if (b == ProjBasis::Z) {
        v << (outcome == 0 ? 1.0 : 0.0), (outcome == 0 ? 0.0 : 1.0);
    } else {
        const double h = 1.0 / std::sqrt(2.0);
        v << h, (outcome == 0 ? h : -h);
    }
    return v;
}

struct ProjectedState {
    DensityMatrix rdm;        // normalized endpoint state (ordered first, last)
    double probability = 0;   // Born probability of the outcome string
    bool valid = true;        // false for zero-probability outcomes
};

namespace detail {

/// Sequential contraction of an MPO under site-wise projections. Open sites
/// carry their (ket, bra) indices as a bank of row vectors.
class ProjectionWalker {
public:
    ProjectionWalker(const Mpo& rho, const std::vector<int>& open_positions) : rho_(rho), open_(open_positions) {
        const auto& t = rho.tensors();
        const std::size_t n = t.size();
        right_.assign(n + 1, Vector());
        right_[n] = Vector::Ones(1);
        for (std::size_t i = n; i-- > 0;) {
            const Index d = rho.sites()[i].dim();
            Matrix tr = Matrix::Zero(t[i][0].rows(), t[i][0].cols());
            for (Index k = 0; k < d; ++k) tr += t[i][static_cast<std::size_t>(k + d * k)];
            right_[i] = tr * right_[i + 1];
        }
    }

    const Mpo& state() const { return rho_; }
    const std::vector<Vector>& right() const { return right_; }

    struct Cursor {
        std::size_t pos = 0;
        std::vector<Eigen::RowVectorXcd> bank{Eigen::RowVectorXcd::Ones(1)};
        Index ket_dim = 1;  // product of open dims so far
        double log_prob = 0.0;
    };

    bool is_open(std::size_t i) const {
        return std::find(open_.begin(), open_.end(), static_cast<int>(i)) != open_.end();
    }

    /// Advance through open sites until the next measured site (or the end).
    void skip_open(Cursor& c) const {
        const auto& t = rho_.tensors();
        while (c.pos < t.size() && is_open(c.pos)) {
            const Index d = rho_.sites()[c.pos].dim();
            const Index m = c.ket_dim;
            std::vector<Eigen::RowVectorXcd> nb(static_cast<std::size_t>(m * d * m * d));
            for (Index ket = 0; ket < m; ++ket)
                for (Index bra = 0; bra < m; ++bra)
                    for (Index k = 0; k < d; ++k)
                        for (Index b = 0; b < d; ++b)
                            nb[static_cast<std::size_t>((ket + m * k) + m * d * (bra + m * b))] =
                                c.bank[static_cast<std::size_t>(ket + m * bra)] * t[c.pos][static_cast<std::size_t>(k + d * b)];
            c.bank = std::move(nb);
            c.ket_dim = m * d;
            ++c.pos;
        }
    }

    Matrix projected_tensor(std::size_t i, const Vector& v) const {
        const auto& t = rho_.tensors()[i];
        const Index d = rho_.sites()[i].dim();
        Matrix m = Matrix::Zero(t[0].rows(), t[0].cols());
        for (Index k = 0; k < d; ++k)
            for (Index b = 0; b < d; ++b) {
                const cplx w = std::conj(v(k)) * v(b);
                if (w != cplx(0.0)) m += w * t[static_cast<std::size_t>(k + d * b)];
            }
        return m;
    }

    /// Trace of the open-index bank times the right environment at c.pos.
    Eigen::RowVectorXcd traced_left(const Cursor& c) const {
        Eigen::RowVectorXcd s = Eigen::RowVectorXcd::Zero(c.bank.front().size());
        for (Index k = 0; k < c.ket_dim; ++k) s += c.bank[static_cast<std::size_t>(k + c.ket_dim * k)];
        return s;
    }

    void apply(Cursor& c, const Matrix& m, double cond_prob) const {
        for (auto& r : c.bank) r = r * m;
        // Rescale to keep magnitudes near one.
        for (auto& r : c.bank) r /= cond_prob;
        c.log_prob += std::log(cond_prob);
        ++c.pos;
    }

    DensityMatrix finish(const Cursor& c, const SiteList& open_sites) const {
        const Index m = c.ket_dim;
        Matrix out(m, m);
        for (Index ket = 0; ket < m; ++ket)
            for (Index bra = 0; bra < m; ++bra) out(ket, bra) = c.bank[static_cast<std::size_t>(ket + m * bra)](0);
        out /= out.trace();
        return {open_sites, hermitian_part(out)};
    }

private:
    const Mpo& rho_;
    std::vector<int> open_;
    std::vector<Vector> right_;
};

inline std::mt19937_64 sample_rng(std::uint64_t seed, std::uint64_t path, std::uint64_t sample) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(path), static_cast<std::uint32_t>(sample),
                      static_cast<std::uint32_t>(sample >> 32), 0x656e7461u};
    return std::mt19937_64(seq);
}

}  // namespace detail

/// Apply the plan's projectors with the given outcomes (ordered by vertex
/// label over the measured vertices) and return the endpoint state.
inline ProjectedState project_and_reduce(const Mpo& state, const ProjectionPlan& plan, const std::vector<int>& outcomes) {
    const int nv = static_cast<int>(state.size());
    auto measured = plan.measured(nv);
    if (outcomes.size() != measured.size())
        throw ConfigError("expected " + std::to_string(measured.size()) + " outcomes, got " + std::to_string(outcomes.size()));
    const SiteList open_sites = {SiteLabel::photon(plan.first), SiteLabel::photon(plan.last)};
    auto open_pos = detail::positions_of(state.sites(), open_sites);
    detail::ProjectionWalker walker(state, {static_cast<int>(open_pos[0]), static_cast<int>(open_pos[1])});
    std::vector<int> outcome_at(state.size(), -1);
    std::vector<ProjBasis> basis_at(state.size(), ProjBasis::Z);
    for (std::size_t i = 0; i < measured.size(); ++i) {
        const std::size_t p = site_position(state.sites(), SiteLabel::photon(measured[i]));
        outcome_at[p] = outcomes[i];
        basis_at[p] = plan.basis(measured[i]);
    }
    detail::ProjectionWalker::Cursor c;
    ProjectedState out;
    while (true) {
        walker.skip_open(c);
        if (c.pos >= state.size()) break;
        Matrix m = walker.projected_tensor(c.pos, projection_vector(basis_at[c.pos], outcome_at[c.pos]));
        const double before = (walker.traced_left(c) * walker.right()[c.pos])(0).real();
        const double after = (walker.traced_left(c) * m * walker.right()[c.pos + 1])(0).real();
        const double cond = before != 0.0 ? after / before : 0.0;
        if (!(cond > 1e-300)) {
            out.valid = false;
            out.probability = 0.0;
            out.rdm = DensityMatrix(open_sites, Matrix::Zero(4, 4));
            return out;
        }
        walker.apply(c, m, cond);
    }
    out.probability = std::exp(c.log_prob);
    out.rdm = walker.finish(c, open_sites);
    return out;
}

enum class OutcomeSampling { Born, Uniform };

struct LEOptions {
    std::size_t samples = 1024;
    std::uint64_t seed = 1;
    OutcomeSampling sampling = OutcomeSampling::Born;
    bool exhaustive = false;        // force full enumeration
    bool auto_exhaustive = true;    // enumerate when 2^(N-2) <= samples and N <= 12
    unsigned jobs = 1;
    double zero_probability = 1e-14;
};

struct PathResult {
    int switch_column = 0;
    std::vector<int> path;
    double mean = 0.0;
    double stderr_ = 0.0;
    std::size_t samples = 0;
    std::size_t zero_probability = 0;  // flagged outcomes excluded from the mean
    double probability_sum = 0.0;      // exhaustive mode: total Born weight
};

struct LEResult {
    std::vector<PathResult> paths;
    double mean = 0.0;
    double stderr_ = 0.0;
    std::size_t samples = 0;
    std::uint64_t seed = 0;
    bool exhaustive = false;
    OutcomeSampling sampling = OutcomeSampling::Born;
};

namespace detail {

/// Sample (or weight) one outcome string; returns (negativity, Born probability).
inline std::pair<double, double> run_outcome(const ProjectionWalker& walker, const std::vector<ProjBasis>& basis_at,
                                             const SiteList& open_sites, std::mt19937_64* rng,
                                             const std::vector<int>* fixed, bool born) {
    const Mpo& state = walker.state();
    ProjectionWalker::Cursor c;
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::size_t idx = 0;
    while (true) {
        walker.skip_open(c);
        if (c.pos >= state.size()) break;
        Eigen::RowVectorXcd lt = walker.traced_left(c);
        const double before = (lt * walker.right()[c.pos])(0).real();
        Matrix m0 = walker.projected_tensor(c.pos, projection_vector(basis_at[c.pos], 0));
        const double p0 = std::clamp((lt * m0 * walker.right()[c.pos + 1])(0).real() / before, 0.0, 1.0);
        int o;
        if (fixed)
            o = (*fixed)[idx];
        else if (born)
            o = uni(*rng) < p0 ? 0 : 1;
        else
            o = uni(*rng) < 0.5 ? 0 : 1;
        const double cond = o == 0 ? p0 : 1.0 - p0;
        if (!(cond > 0.0)) return {0.0, 0.0};
        Matrix m = o == 0 ? m0 : walker.projected_tensor(c.pos, projection_vector(basis_at[c.pos], 1));
        walker.apply(c, m, cond);
        ++idx;
    }
    return {negativity(walker.finish(c, open_sites)), std::exp(c.log_prob)};
}

}  // namespace detail

/// Mean endpoint negativity after X/Z projections, averaged over outcomes
/// and then over all corner-to-corner paths.
inline LEResult localizable_entanglement(const Mpo& state, const LEOptions& opt = {}) {
    const int nv = static_cast<int>(state.size());
    if (nv < 2 || nv % 2 != 0) throw ConfigError("localizable entanglement needs 2n photons");
    LadderGraph g(nv / 2);
    auto plans = enumerate_paths(g);
    const std::size_t nmeas = static_cast<std::size_t>(nv - 2);
    LEResult res;
    res.seed = opt.seed;
    res.sampling = opt.sampling;
    res.exhaustive = opt.exhaustive || (opt.auto_exhaustive && nv <= 12 && (std::size_t(1) << nmeas) <= opt.samples);
    const SiteList open_sites = {SiteLabel::photon(1), SiteLabel::photon(nv)};
    auto open_pos = detail::positions_of(state.sites(), open_sites);
    detail::ProjectionWalker walker(state, {static_cast<int>(open_pos[0]), static_cast<int>(open_pos[1])});

    const std::size_t per_path = res.exhaustive ? (std::size_t(1) << nmeas) : opt.samples;
    if (res.exhaustive && nmeas > 24) throw CapacityError("exhaustive enumeration too large");
    std::vector<std::vector<ProjBasis>> basis(plans.size(), std::vector<ProjBasis>(state.size(), ProjBasis::Z));
    std::vector<std::vector<int>> measured_pos(plans.size());
    for (std::size_t p = 0; p < plans.size(); ++p)
        for (int v : plans[p].measured(nv)) {
            const std::size_t pos = site_position(state.sites(), SiteLabel::photon(v));
            basis[p][pos] = plans[p].basis(v);
        }
    std::vector<double> neg(plans.size() * per_path), prob(plans.size() * per_path);
    detail::parallel_tasks(plans.size() * per_path, opt.jobs, [&](std::size_t task) {
        const std::size_t p = task / per_path, s = task % per_path;
        if (res.exhaustive) {
            std::vector<int> o(nmeas);
            for (std::size_t i = 0; i < nmeas; ++i) o[i] = static_cast<int>((s >> i) & 1);
            auto [n, pr] = detail::run_outcome(walker, basis[p], open_sites, nullptr, &o, true);
            neg[task] = n;
            prob[task] = pr;
        } else {
            auto rng = detail::sample_rng(opt.seed, p, s);
            auto [n, pr] = detail::run_outcome(walker, basis[p], open_sites, &rng, nullptr,
                                               opt.sampling == OutcomeSampling::Born);
            neg[task] = n;
            prob[task] = pr;
        }
    });

    double var_sum = 0.0;
    for (std::size_t p = 0; p < plans.size(); ++p) {
        PathResult pr;
        pr.switch_column = plans[p].switch_column;
        pr.path = plans[p].path;
        double wsum = 0.0, wneg = 0.0, s1 = 0.0, s2 = 0.0;
        std::size_t used = 0;
        for (std::size_t s = 0; s < per_path; ++s) {
            const double n = neg[p * per_path + s], w = prob[p * per_path + s];
            if (w <= opt.zero_probability) {
                ++pr.zero_probability;
                continue;
            }
            ++used;
            if (res.exhaustive || opt.sampling == OutcomeSampling::Uniform) {
                wsum += w;
                wneg += w * n;
            }
            s1 += n;
            s2 += n * n;
        }
        pr.samples = used;
        if (res.exhaustive) {
            pr.mean = wsum > 0 ? wneg / wsum : 0.0;
            pr.probability_sum = wsum;
            pr.stderr_ = 0.0;
        } else if (opt.sampling == OutcomeSampling::Uniform) {
            pr.mean = wsum > 0 ? wneg / wsum : 0.0;
            // Delta-method error of the self-normalized estimator.
            double v = 0.0;
            for (std::size_t s = 0; s < per_path; ++s) {
                const double w = prob[p * per_path + s];
                if (w <= opt.zero_probability) continue;
                const double d = w * (neg[p * per_path + s] - pr.mean);
                v += d * d;
            }
            pr.stderr_ = wsum > 0 ? std::sqrt(v) / wsum : 0.0;
        } else {
            pr.mean = used ? s1 / static_cast<double>(used) : 0.0;
            const double var = used > 1 ? std::max(0.0, (s2 - s1 * s1 / used) / static_cast<double>(used - 1)) : 0.0;
            pr.stderr_ = used ? std::sqrt(var / static_cast<double>(used)) : 0.0;
        }
        res.mean += pr.mean;
        var_sum += pr.stderr_ * pr.stderr_;
        res.samples += used;
        res.paths.push_back(std::move(pr));
    }
    res.mean /= static_cast<double>(plans.size());
    res.stderr_ = std::sqrt(var_sum) / static_cast<double>(plans.size());
    return res;
}

inline json to_json(const LEResult& r) {
    json paths = json::array();
    for (const auto& p : r.paths)
        paths.push_back({{"switch_column", p.switch_column}, {"path", p.path}, {"mean", p.mean}, {"stderr", p.stderr_},
                         {"samples", p.samples}, {"zero_probability", p.zero_probability}});
    return {{"mean", r.mean},
            {"stderr", r.stderr_},
            {"samples", r.samples},
            {"seed", r.seed},
            {"exhaustive", r.exhaustive},
            {"sampling", r.sampling == OutcomeSampling::Born ? "born" : "uniform"},
            {"paths", paths}};
}

}  // namespace ladder

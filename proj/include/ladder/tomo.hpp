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
#include "ladder/measure.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

namespace ladder {

// ---------------------------------------------------------------------------
// Small-system maximum likelihood from moments.

/// Euclidean projection of a real vector onto the probability simplex.
inline RealVector project_simplex(const RealVector& v) {
    const Index n = v.size();
    std::vector<double> u(v.data(), v.data() + n);
    std::sort(u.begin(), u.end(), std::greater<>());
    double css = 0.0, theta = 0.0;
    for (Index i = 0; i < n; ++i) {
        css += u[static_cast<std::size_t>(i)];
        const double t = (css - 1.0) / static_cast<double>(i + 1);
        if (u[static_cast<std::size_t>(i)] - t > 0) theta = t;
    }
    RealVector out(n);
    for (Index i = 0; i < n; ++i) out(i) = std::max(v(i) - theta, 0.0);
    return out;
}

/// Closest density matrix in Frobenius norm.
inline Matrix project_density(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(m));
    RealVector lam = project_simplex(es.eigenvalues());
    return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().adjoint();
}

struct MleOptions {
    int max_iter = 20000;
    double tol = 1e-14;            // relative objective change
    double phase_threshold = 0.05;  // minimum |rho(0, 2^i)| before the phase is fixed
    bool fix_phase = true;
};

struct MleResult {
    DensityMatrix rho;
    double objective = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Rotate each mode's phase so that rho(0, 2^i) is real and non-negative,
/// for modes whose coherence magnitude exceeds `threshold`.
inline void apply_phase_convention(DensityMatrix& rho, double threshold) {
    const std::size_t nm = rho.sites().size();
    for (std::size_t i = 0; i < nm; ++i) {
        const cplx c = rho.data()(0, Index(1) << i);
        if (std::abs(c) <= threshold) continue;
        Matrix u = Matrix::Identity(2, 2);
        u(1, 1) = c / std::abs(c);
        apply_unitary(rho, {rho.sites()[i]}, u);
    }
}

/// Weighted least squares in moment space over density matrices:
/// minimise sum_k |tr(rho O_k) - m_k|^2 / var_k with rho PSD and trace one.
inline MleResult mle_from_moments(const MomentTable& table, const MleOptions& opt = {}) {
    const std::size_t nm = table.modes.size();
    if (nm == 0 || nm > kMaxModes) throw CapacityError("moment MLE supports 1..4 modes");
    for (const auto& [k, e] : table.entries) {
        MomentKey sw = k;
        for (std::size_t m = 0; m < nm; ++m) std::swap(sw[2 * m], sw[2 * m + 1]);
        auto it = table.entries.find(sw);
        if (it == table.entries.end()) throw ConfigError("moment table is not conjugation-complete");
    }
    const Index d = Index(1) << nm;
    const Index K = static_cast<Index>(table.entries.size());
    // Row k of A maps vec(rho) (column-major) to tr(rho O_k).
    Matrix A(K, d * d);
    Vector m(K);
    RealVector w(K);
    double vmin = std::numeric_limits<double>::infinity();
    for (const auto& [k, e] : table.entries)
        if (e.variance > 0) vmin = std::min(vmin, e.variance);
    Index row = 0;
    for (const auto& [k, e] : table.entries) {
        // O_k as a matrix: tr(rho O) = sum_ij rho_ij O_ji.
        std::vector<Matrix> ops;
        for (std::size_t q = 0; q < nm; ++q) {
            Matrix a = Matrix::Zero(2, 2);
            a(0, 1) = 1.0;
            Matrix op = Matrix::Identity(2, 2);
            for (int i = 0; i < k[2 * q]; ++i) op = op * a.adjoint();
            for (int i = 0; i < k[2 * q + 1]; ++i) op = op * a;
            ops.push_back(op);
        }
        Matrix O = kron_le(ops);
        for (Index j = 0; j < d; ++j)
            for (Index i = 0; i < d; ++i) A(row, i + d * j) = O(j, i);
        m(row) = e.mean;
        w(row) = std::isfinite(vmin) ? 1.0 / std::max(e.variance, vmin) : 1.0;
        ++row;
    }
    Matrix AtW = A.adjoint() * w.asDiagonal();
    Matrix H = AtW * A;
    Vector b = AtW * m;
    Eigen::SelfAdjointEigenSolver<Matrix> hs(hermitian_part(H), Eigen::EigenvaluesOnly);
    const double lip = std::max(hs.eigenvalues().maxCoeff(), 1e-300);
    const double step = 1.0 / lip;

    auto objective = [&](const Matrix& rho) {
        Vector x = Eigen::Map<const Vector>(rho.data(), d * d);
        Vector r = A * x - m;
        double f = 0.0;
        for (Index k = 0; k < K; ++k) f += w(k) * std::norm(r(k));
        return f;
    };
    auto reshape = [&](const Vector& x) { return Matrix(Eigen::Map<const Matrix>(x.data(), d, d)); };

    // FISTA with adaptive restart.
    Matrix x = Matrix::Identity(d, d) / static_cast<double>(d);
    Matrix y = x;
    double t = 1.0;
    double fx = objective(x);
    MleResult res;
    int it = 0;
    for (; it < opt.max_iter; ++it) {
        Vector yv = Eigen::Map<const Vector>(y.data(), d * d);
        Vector g = H * yv - b;
        Matrix xn = project_density(reshape(yv - step * g));
        const double fn = objective(xn);
        if (fn > fx) {  // restart momentum
            t = 1.0;
            y = x;
            continue;
        }
        const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        y = xn + ((t - 1.0) / tn) * (xn - x);
        const double change = std::abs(fx - fn);
        x = xn;
        t = tn;
        fx = fn;
        if (change <= opt.tol * std::max(1.0, fx) && (xn - y).norm() < 1e-12) {
            res.converged = true;
            break;
        }
        if (fx < 1e-28) {
            res.converged = true;
            break;
        }
    }
    res.rho = DensityMatrix(table.modes, hermitian_part(x));
    if (opt.fix_phase) apply_phase_convention(res.rho, opt.phase_threshold);
    res.objective = fx;
    res.iterations = it;
    return res;
}

// ---------------------------------------------------------------------------
// Local reduced density matrices.

struct LocalRdm {
    SiteList support;  // sorted photon labels
    DensityMatrix rdm;
};

using RdmSet = std::vector<LocalRdm>;

/// Vertex plus its neighbours, padded with the nearest free vertices to four
/// sites when the graph has at least four.
inline std::vector<SiteList> rdm_supports(const LadderGraph& g) {
    std::vector<SiteList> out;
    const int nv = g.num_vertices();
    for (int v = 1; v <= nv; ++v) {
        std::vector<int> s = g.closed_neighborhood(v);
        const std::size_t target = std::min<std::size_t>(4, static_cast<std::size_t>(nv));
        while (s.size() < target) {
            double mean = 0.0;
            for (int u : s) mean += u;
            mean /= static_cast<double>(s.size());
            int best = -1;
            double bd = 1e300;
            for (int u = 1; u <= nv; ++u) {
                if (std::find(s.begin(), s.end(), u) != s.end()) continue;
                const double dd = std::abs(u - mean);
                if (dd < bd - 1e-12) {
                    bd = dd;
                    best = u;
                }
            }
            s.push_back(best);
        }
        std::sort(s.begin(), s.end());
        SiteList sl;
        for (int u : s) sl.push_back(SiteLabel::photon(u));
        out.push_back(std::move(sl));
    }
    return out;
}

inline RdmSet local_rdms_from_state(const Mpo& rho, const LadderGraph& g) {
    RdmSet out;
    for (auto& s : rdm_supports(g)) out.push_back({s, rho.reduced(s)});
    return out;
}

inline RdmSet local_rdms_from_state(const DensityMatrix& rho, const LadderGraph& g) {
    RdmSet out;
    for (auto& s : rdm_supports(g)) out.push_back({s, partial_trace(rho, s)});
    return out;
}

inline double trace_distance(const Matrix& a, const Matrix& b) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(a - b), Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

struct CompatibilityResidual {
    std::size_t a = 0, b = 0;
    SiteList overlap;
    double distance = 0.0;
};

/// Trace distance between overlapping rdms reduced to their intersection.
inline std::vector<CompatibilityResidual> compatibility_residuals(const RdmSet& rdms) {
    std::vector<CompatibilityResidual> out;
    for (std::size_t i = 0; i < rdms.size(); ++i)
        for (std::size_t j = i + 1; j < rdms.size(); ++j) {
            SiteList common;
            for (const auto& s : rdms[i].support)
                if (std::find(rdms[j].support.begin(), rdms[j].support.end(), s) != rdms[j].support.end())
                    common.push_back(s);
            if (common.empty()) continue;
            auto a = partial_trace(rdms[i].rdm, common);
            auto b = partial_trace(rdms[j].rdm, common);
            out.push_back({i, j, common, trace_distance(a.data(), b.data())});
        }
    return out;
}

// ---------------------------------------------------------------------------
// MPO reconstruction from local rdms.

struct ReconstructionOptions {
    Index max_bond = Mpo::kDefaultMaxBond;  // bond of the returned density MPO
    double eps = 1e-8;
    int max_iter = 500;
    Index purification_bond = 16;  // bond of the purification X (rho = X X^dagger)
    double tol = 1e-10;            // stop when the accepted log-likelihood gain falls below this
    double compat_tol = 0.05;
    double step0 = 1.0;
};

struct ReconstructionReport {
    Mpo mpo;
    std::vector<double> log_likelihood;  // accepted iterations
    std::vector<Index> bonds;
    int iterations = 0;
    bool converged = false;
    std::vector<CompatibilityResidual> residuals;
    std::vector<std::string> warnings;
};

namespace detail {

/// Pauli measurement settings on m qubits: unitaries U_b with outcome
/// probabilities diag(U_b rho U_b^dagger).
inline const std::vector<Matrix>& pauli_settings(std::size_t m) {
    static std::array<std::vector<Matrix>, 5> cache;
    auto& out = cache.at(m);
    if (!out.empty()) return out;
    const double h = 1.0 / std::sqrt(2.0);
    Matrix ux(2, 2), uy(2, 2), uz = Matrix::Identity(2, 2);
    ux << h, h, h, -h;
    uy << h, -kI * h, h, kI * h;  // H S^dagger
    const std::array<Matrix, 3> base = {ux, uy, uz};
    std::size_t total = 1;
    for (std::size_t i = 0; i < m; ++i) total *= 3;
    for (std::size_t b = 0; b < total; ++b) {
        std::vector<Matrix> ops;
        std::size_t r = b;
        for (std::size_t i = 0; i < m; ++i) {
            ops.push_back(base[r % 3]);
            r /= 3;
        }
        out.push_back(kron_le(ops));
    }
    return out;
}

/// Locally purified MPO: rho = X X^dagger, X site tensors indexed by
/// p + 2 a (physical p, ancilla a), kept in mixed canonical form.
struct Purification {
    std::vector<std::array<Matrix, 4>> a;
    std::size_t center = 0;

    std::size_t size() const { return a.size(); }

    static Purification maximally_mixed(std::size_t n) {
        Purification x;
        x.a.resize(n);
        for (auto& t : x.a) {
            for (auto& m : t) m = Matrix::Zero(1, 1);
            t[0](0, 0) = t[3](0, 0) = 1.0 / std::sqrt(2.0);
        }
        return x;
    }

    void move_center(std::size_t to) {
        while (center < to) {
            auto& t = a[center];
            const Index dl = t[0].rows(), dr = t[0].cols();
            Matrix m(4 * dl, dr);
            for (int p = 0; p < 4; ++p) m.middleRows(p * dl, dl) = t[static_cast<std::size_t>(p)];
            Eigen::HouseholderQR<Matrix> qr(m);
            const Index k = std::min(m.rows(), m.cols());
            Matrix q = qr.householderQ() * Matrix::Identity(m.rows(), k);
            Matrix r = qr.matrixQR().topRows(k).template triangularView<Eigen::Upper>();
            for (int p = 0; p < 4; ++p) t[static_cast<std::size_t>(p)] = q.middleRows(p * dl, dl);
            for (auto& n : a[center + 1]) n = r * n;
            ++center;
        }
        while (center > to) {
            auto& t = a[center];
            const Index dl = t[0].rows(), dr = t[0].cols();
            Matrix m(4 * dr, dl);  // stacked adjoints
            for (int p = 0; p < 4; ++p) m.middleRows(p * dr, dr) = t[static_cast<std::size_t>(p)].adjoint();
            Eigen::HouseholderQR<Matrix> qr(m);
            const Index k = std::min(m.rows(), m.cols());
            Matrix q = qr.householderQ() * Matrix::Identity(m.rows(), k);
            Matrix r = qr.matrixQR().topRows(k).template triangularView<Eigen::Upper>();
            for (int p = 0; p < 4; ++p) t[static_cast<std::size_t>(p)] = q.middleRows(p * dr, dr).adjoint();
            Matrix ra = r.adjoint();
            for (auto& n : a[center - 1]) n = n * ra;
            --center;
        }
    }

    double norm2() const {
        double s = 0.0;
        for (const auto& m : a[center]) s += m.squaredNorm();
        return s;
    }

    void normalize() {
        const double n = std::sqrt(norm2());
        for (auto& m : a[center]) m /= n;
    }

    /// Left environments L[i] for sites [0, i) and right environments R[i]
    /// for sites [i, n).
    void environments(std::vector<Matrix>& left, std::vector<Matrix>& right) const {
        const std::size_t n = size();
        left.assign(n + 1, Matrix());
        right.assign(n + 1, Matrix());
        left[0] = Matrix::Ones(1, 1);
        for (std::size_t i = 0; i < n; ++i) {
            Matrix e = Matrix::Zero(a[i][0].cols(), a[i][0].cols());
            for (const auto& m : a[i]) e += m.transpose() * left[i] * m.conjugate();
            left[i + 1] = e;
        }
        right[n] = Matrix::Ones(1, 1);
        for (std::size_t i = n; i-- > 0;) {
            Matrix e = Matrix::Zero(a[i][0].rows(), a[i][0].rows());
            for (const auto& m : a[i]) e += m * right[i + 1] * m.adjoint();
            right[i] = e;
        }
    }

    /// Reduced density matrix on `keep` (sorted positions) inside the window
    /// [lo, hi].
    Matrix reduced(const std::vector<std::size_t>& keep, const std::vector<Matrix>& left,
                   const std::vector<Matrix>& right) const {
        const std::size_t lo = keep.front(), hi = keep.back();
        const Index dk = Index(1) << keep.size();
        // env[ket + dk * bra] : (chi x chi) partial contraction.
        std::vector<Matrix> env(1, left[lo]);
        Index cur = 1;
        std::size_t kpos = 0;
        for (std::size_t i = lo; i <= hi; ++i) {
            const bool kept = kpos < keep.size() && keep[kpos] == i;
            const auto& t = a[i];
            if (!kept) {
                for (auto& e : env) {
                    Matrix n = Matrix::Zero(t[0].cols(), t[0].cols());
                    for (const auto& m : t) n += m.transpose() * e * m.conjugate();
                    e = std::move(n);
                }
                continue;
            }
            std::vector<Matrix> next(static_cast<std::size_t>(cur * 2 * cur * 2));
            for (Index kb = 0; kb < cur * cur; ++kb) {
                const Index k = kb % cur, b = kb / cur;
                const Matrix& e = env[static_cast<std::size_t>(kb)];
                for (Index p = 0; p < 2; ++p)
                    for (Index q = 0; q < 2; ++q) {
                        Matrix n = Matrix::Zero(t[0].cols(), t[0].cols());
                        for (Index anc = 0; anc < 2; ++anc)
                            n += t[static_cast<std::size_t>(p + 2 * anc)].transpose() * e *
                                 t[static_cast<std::size_t>(q + 2 * anc)].conjugate();
                        const Index nk = k + cur * p, nb = b + cur * q;
                        next[static_cast<std::size_t>(nk + 2 * cur * nb)] = std::move(n);
                    }
            }
            env = std::move(next);
            cur *= 2;
            ++kpos;
        }
        Matrix out(dk, dk);
        const Matrix& r = right[hi + 1];
        for (Index k = 0; k < dk; ++k)
            for (Index b = 0; b < dk; ++b) out(k, b) = env[static_cast<std::size_t>(k + dk * b)].cwiseProduct(r).sum();
        return out;
    }

    /// X <- (op on the physical legs of `keep`) X, then re-split the window
    /// with truncation to `chi`. The center must be at keep.front().
    void apply_window(const std::vector<std::size_t>& keep, const Matrix& op, Index chi) {
        const std::size_t lo = keep.front(), hi = keep.back();
        const std::size_t w = hi - lo + 1;
        // Merge: block index sum_j l_j 4^j.
        std::vector<Matrix> blk(a[lo].begin(), a[lo].end());
        for (std::size_t i = lo + 1; i <= hi; ++i) {
            std::vector<Matrix> nb(blk.size() * 4);
            for (std::size_t x = 0; x < blk.size(); ++x)
                for (std::size_t l = 0; l < 4; ++l) nb[x + blk.size() * l] = blk[x] * a[i][l];
            blk = std::move(nb);
        }
        // Apply op on the physical bits of the kept sites.
        std::vector<std::size_t> kbit;  // window positions of kept sites
        for (auto k : keep) kbit.push_back(k - lo);
        const std::size_t dk = std::size_t(1) << keep.size();
        std::vector<Matrix> out(blk.size(), Matrix::Zero(blk[0].rows(), blk[0].cols()));
        for (std::size_t x = 0; x < blk.size(); ++x) {
            std::size_t pk = 0, base = x;
            for (std::size_t j = 0; j < kbit.size(); ++j) {
                std::size_t digit = (x >> (2 * kbit[j])) & 3;
                pk |= (digit & 1) << j;
                base &= ~(std::size_t(1) << (2 * kbit[j]));
            }
            for (std::size_t pk2 = 0; pk2 < dk; ++pk2) {
                const cplx c = op(static_cast<Index>(pk2), static_cast<Index>(pk));
                if (c == cplx(0.0)) continue;
                std::size_t y = base;
                for (std::size_t j = 0; j < kbit.size(); ++j) y |= ((pk2 >> j) & 1) << (2 * kbit[j]);
                out[y] += c * blk[x];
            }
        }
        // Split left to right.
        std::size_t rest = out.size();
        std::vector<Matrix> cur = std::move(out);
        for (std::size_t j = 0; j + 1 < w; ++j) {
            rest /= 4;
            const Index dl = cur[0].rows(), dr = cur[0].cols();
            Matrix m(4 * dl, static_cast<Index>(rest) * dr);
            for (std::size_t l = 0; l < 4; ++l)
                for (std::size_t r = 0; r < rest; ++r)
                    m.block(static_cast<Index>(l) * dl, static_cast<Index>(r) * dr, dl, dr) = cur[l + 4 * r];
            // m is short and wide: split through the eigenvectors of m m^dagger.
            Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(m * m.adjoint()));
            const RealVector& ev = es.eigenvalues();  // ascending
            const Index rows = ev.size();
            Index keep = 0;
            while (keep < std::min(rows, chi) && ev(rows - 1 - keep) > 1e-24 * ev(rows - 1)) ++keep;
            keep = std::max<Index>(keep, 1);
            Matrix u = es.eigenvectors().rightCols(keep).rowwise().reverse();
            for (std::size_t l = 0; l < 4; ++l) a[lo + j][l] = u.middleRows(static_cast<Index>(l) * dl, dl);
            Matrix sv = u.adjoint() * m;
            std::vector<Matrix> next(rest);
            for (std::size_t r = 0; r < rest; ++r) next[r] = sv.middleCols(static_cast<Index>(r) * dr, dr);
            cur = std::move(next);
        }
        for (std::size_t l = 0; l < 4; ++l) a[hi][l] = cur[l];
        center = hi;
    }

    Mpo to_mpo(const SiteList& sites, Index max_bond, double eps) const {
        std::vector<Mpo::SiteTensor> t(size());
        for (std::size_t i = 0; i < size(); ++i) {
            t[i].resize(4);
            for (Index k = 0; k < 2; ++k)
                for (Index b = 0; b < 2; ++b) {
                    Matrix s = Matrix::Zero(a[i][0].rows() * a[i][0].rows(), a[i][0].cols() * a[i][0].cols());
                    for (Index anc = 0; anc < 2; ++anc)
                        s += kron_le(Matrix(a[i][static_cast<std::size_t>(k + 2 * anc)]),
                                     Matrix(a[i][static_cast<std::size_t>(b + 2 * anc)].conjugate()));
                    t[i][static_cast<std::size_t>(k + 2 * b)] = std::move(s);
                }
        }
        Mpo m(sites, std::move(t), max_bond, eps);
        m.compress(max_bond, eps);
        return m;
    }
};

struct SupportData {
    std::vector<std::size_t> pos;  // sorted positions in the chain
    std::vector<RealVector> freq;  // per Pauli setting: outcome frequencies
};

inline RealVector setting_probabilities(const Matrix& rho, const Matrix& u) {
    return (u * rho).cwiseProduct(u.conjugate()).rowwise().sum().real();
}

}  // namespace detail

/// Maximum-likelihood MPO consistent with overlapping local rdms. Each
/// support contributes the Pauli-product measurement statistics implied by
/// its rdm; the state is rho = X X^dagger with X an MPO, updated by
/// diluted multiplicative steps X <- (1 + e R_s) X / (1 + e) per support.
inline ReconstructionReport reconstruct_mpo(const RdmSet& rdms, const SiteList& sites,
                                            const ReconstructionOptions& opt = {}) {
    if (rdms.empty()) throw ConfigError("no reduced density matrices given");
    if (opt.max_iter < 1) throw ConfigError("reconstruction needs max_iter >= 1");
    if (opt.purification_bond < 1 || opt.max_bond < 1) throw ConfigError("reconstruction bonds must be >= 1");
    ReconstructionReport rep;
    rep.residuals = compatibility_residuals(rdms);
    for (const auto& r : rep.residuals)
        if (r.distance > opt.compat_tol)
            rep.warnings.push_back("rdms " + std::to_string(r.a) + " and " + std::to_string(r.b) +
                                   " disagree on their overlap (trace distance " + std::to_string(r.distance) + ")");

    auto full = std::find_if(rdms.begin(), rdms.end(), [&](const LocalRdm& r) { return r.support.size() == sites.size(); });
    if (full != rdms.end()) {
        auto rho = permute_sites(full->rdm, sites);
        rep.mpo = Mpo::from_dense(rho, opt.max_bond, opt.eps, false);
        rep.bonds = rep.mpo.bonds();
        rep.converged = true;
        return rep;
    }

    std::vector<detail::SupportData> sup;
    for (const auto& r : rdms) {
        detail::SupportData s;
        SiteList sorted = r.support;
        std::sort(sorted.begin(), sorted.end());
        s.pos = detail::positions_of(sites, sorted);
        std::vector<std::size_t> order(s.pos.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](auto x, auto y) { return s.pos[x] < s.pos[y]; });
        SiteList by_pos;
        std::vector<std::size_t> pos_sorted;
        for (auto o : order) {
            by_pos.push_back(sorted[o]);
            pos_sorted.push_back(s.pos[o]);
        }
        s.pos = pos_sorted;
        Matrix rho = permute_sites(r.rdm, by_pos).data();
        for (const auto& u : detail::pauli_settings(s.pos.size())) s.freq.push_back(detail::setting_probabilities(rho, u));
        sup.push_back(std::move(s));
    }
    std::vector<std::size_t> order(sup.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) { return sup[x].pos.front() < sup[y].pos.front(); });

    constexpr double kFloor = 1e-12;
    auto x = detail::Purification::maximally_mixed(sites.size());
    std::vector<Matrix> left, right;

    // Log-likelihood contribution and ratio operator of one support.
    auto local_terms = [&](const detail::SupportData& sd, const Matrix& model, Matrix* ratio_op) {
        const auto& settings = detail::pauli_settings(sd.pos.size());
        const double ns = static_cast<double>(settings.size());
        double ll = 0.0;
        if (ratio_op) *ratio_op = Matrix::Zero(model.rows(), model.cols());
        for (std::size_t b = 0; b < settings.size(); ++b) {
            RealVector p = detail::setting_probabilities(model, settings[b]);
            const RealVector& f = sd.freq[b];
            RealVector ratio = RealVector::Zero(p.size());
            for (Index o = 0; o < p.size(); ++o) {
                if (f(o) <= kFloor) continue;
                const double pp = std::max(p(o), kFloor);
                ll += f(o) * std::log(pp) / ns;
                ratio(o) = f(o) / pp;
            }
            if (ratio_op) *ratio_op += settings[b].adjoint() * ratio.cast<cplx>().asDiagonal() * settings[b] / ns;
        }
        return ll;
    };
    auto log_likelihood = [&](const detail::Purification& st) {
        st.environments(left, right);
        double ll = 0.0;
        for (const auto& sd : sup) ll += local_terms(sd, st.reduced(sd.pos, left, right), nullptr);
        return ll;
    };
    // Identity environments outside the window once the center sits inside it.
    std::vector<Matrix> unit_left(sites.size() + 1), unit_right(sites.size() + 1);

    double ll = log_likelihood(x);
    rep.log_likelihood.push_back(ll);
    double eps = opt.step0;
    int it = 0;
    for (; it < opt.max_iter; ++it) {
        detail::Purification trial = x;
        for (auto s : order) {
            const auto& pos = sup[s].pos;
            trial.move_center(pos.front());
            const std::size_t lo = pos.front(), hi = pos.back();
            unit_left[lo] = Matrix::Identity(trial.a[lo][0].rows(), trial.a[lo][0].rows());
            unit_right[hi + 1] = Matrix::Identity(trial.a[hi][0].cols(), trial.a[hi][0].cols());
            Matrix ratio;
            local_terms(sup[s], trial.reduced(pos, unit_left, unit_right), &ratio);
            const Index dk = ratio.rows();
            Matrix op = (Matrix::Identity(dk, dk) + eps * ratio) / (1.0 + eps);
            trial.apply_window(pos, op, opt.purification_bond);
            trial.normalize();
        }
        const double tll = log_likelihood(trial);
        if (tll >= ll) {
            const double gain = tll - ll;
            x = std::move(trial);
            ll = tll;
            rep.log_likelihood.push_back(ll);
            eps = std::min(eps * 2.0, 1e6);
            if (gain < opt.tol) {
                rep.converged = true;
                ++it;
                break;
            }
        } else {
            eps *= 0.5;
            if (eps < 1e-10) {
                rep.converged = true;
                ++it;
                break;
            }
        }
    }
    rep.iterations = it;
    rep.mpo = x.to_mpo(sites, opt.max_bond, opt.eps);
    rep.mpo.normalize();
    rep.bonds = rep.mpo.bonds();
    return rep;
}

inline ReconstructionReport reconstruct_mpo(const RdmSet& rdms, const LadderGraph& g,
                                            const ReconstructionOptions& opt = {}) {
    return reconstruct_mpo(rdms, g.sites(), opt);
}

inline json to_json(const ReconstructionReport& r) {
    json res = json::array();
    for (const auto& c : r.residuals)
        res.push_back({{"a", c.a}, {"b", c.b}, {"overlap", sites_to_json(c.overlap)}, {"trace_distance", c.distance}});
    return {{"log_likelihood", r.log_likelihood}, {"bonds", r.bonds},   {"iterations", r.iterations},
            {"converged", r.converged},           {"residuals", res},   {"warnings", r.warnings},
            {"truncation_error", r.mpo.truncation_error()}};
}

inline json to_json(const RdmSet& rdms) {
    json a = json::array();
    for (const auto& r : rdms) a.push_back({{"support", sites_to_json(r.support)}, {"rdm", to_json(r.rdm)}});
    return a;
}

inline RdmSet rdm_set_from_json(const json& j) {
    RdmSet out;
    for (const auto& e : j) out.push_back({sites_from_json(e.at("support")), density_matrix_from_json(e.at("rdm"))});
    return out;
}

}  // namespace ladder

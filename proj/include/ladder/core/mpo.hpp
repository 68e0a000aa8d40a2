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
#include "ladder/core/density_matrix.hpp"
#include "ladder/core/mps.hpp"
#include "ladder/core/sites.hpp"
#include "ladder/core/tensor.hpp"

#include <Eigen/QR>

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace ladder {

/// Matrix product operator for a density operator on a chain of sites.
///
/// Site tensor i is held as d*d matrices of shape (left x right); entry
/// `k + d*b` is the block for ket index k and bra index b, i.e. the tensor
/// element (l, k, b, r) lives at w[k + d*b](l, r).
class Mpo {
public:
    using SiteTensor = std::vector<Matrix>;

    static constexpr Index kDefaultMaxBond = 200;

    Mpo() = default;
    Mpo(SiteList sites, std::vector<SiteTensor> tensors, Index max_bond = kDefaultMaxBond, double eps = 1e-12)
        : sites_(std::move(sites)), tensors_(std::move(tensors)), max_bond_(max_bond), eps_(eps) {
        check();
    }

    const SiteList& sites() const { return sites_; }
    const std::vector<SiteTensor>& tensors() const { return tensors_; }
    std::vector<SiteTensor>& mutable_tensors() { return tensors_; }
    std::size_t size() const { return sites_.size(); }
    Index max_bond() const { return max_bond_; }
    double eps() const { return eps_; }
    double truncation_error() const { return trunc_err_; }
    void set_truncation_error(double e) { trunc_err_ = e; }

    Index bond(std::size_t i) const { return tensors_[i].front().cols(); }
    Index largest_bond() const {
        Index b = 1;
        for (std::size_t i = 0; i < size(); ++i) b = std::max(b, bond(i));
        return b;
    }
    std::vector<Index> bonds() const {
        std::vector<Index> b;
        for (std::size_t i = 0; i + 1 < size(); ++i) b.push_back(bond(i));
        return b;
    }

    void check() const {
        if (sites_.size() != tensors_.size()) throw ConfigError("MPO site/tensor count mismatch");
        if (max_bond_ < 1) throw ConfigError("max_bond must be positive");
        if (eps_ < 0) throw ConfigError("truncation eps must be >= 0");
        for (std::size_t i = 0; i < tensors_.size(); ++i) {
            const Index d = sites_[i].dim();
            if (static_cast<Index>(tensors_[i].size()) != d * d)
                throw ConfigError("MPO physical dimension mismatch at " + sites_[i].str());
            for (const auto& w : tensors_[i])
                if (w.rows() != tensors_[i].front().rows() || w.cols() != tensors_[i].front().cols())
                    throw ConfigError("MPO block shape mismatch at " + sites_[i].str());
            if (i > 0 && tensors_[i - 1].front().cols() != tensors_[i].front().rows())
                throw ConfigError("MPO bond mismatch at " + sites_[i].str());
        }
        if (!tensors_.empty() && (tensors_.front().front().rows() != 1 || tensors_.back().front().cols() != 1))
            throw ConfigError("MPO boundary bonds must be 1");
    }

    /// Product operator of single-site matrices.
    static Mpo product(const SiteList& sites, const std::vector<Matrix>& locals) {
        if (sites.size() != locals.size()) throw ConfigError("product MPO size mismatch");
        std::vector<SiteTensor> ts;
        for (std::size_t i = 0; i < sites.size(); ++i) {
            const Index d = sites[i].dim();
            SiteTensor t(static_cast<std::size_t>(d * d), Matrix(1, 1));
            for (Index b = 0; b < d; ++b)
                for (Index k = 0; k < d; ++k) t[static_cast<std::size_t>(k + d * b)](0, 0) = locals[i](k, b);
            ts.push_back(std::move(t));
        }
        return {sites, std::move(ts)};
    }

    /// |psi><psi| with bond dimension D^2.
    static Mpo from_mps(const Mps& psi, Index max_bond = kDefaultMaxBond, double eps = 1e-12) {
        std::vector<SiteTensor> ts;
        for (std::size_t i = 0; i < psi.size(); ++i) {
            const auto& a = psi.tensors()[i];
            const Index d = static_cast<Index>(a.size());
            SiteTensor t(static_cast<std::size_t>(d * d));
            for (Index b = 0; b < d; ++b)
                for (Index k = 0; k < d; ++k)
                    t[static_cast<std::size_t>(k + d * b)] =
                        kron_le(Matrix(a[static_cast<std::size_t>(k)]),
                                Matrix(a[static_cast<std::size_t>(b)].conjugate()));
            ts.push_back(std::move(t));
        }
        Index mb = std::max(max_bond, psi.max_bond() * psi.max_bond());
        return {psi.sites(), std::move(ts), mb, eps};
    }

    /// SVD decomposition of a dense operator. Strict mode throws
    /// BondOverflowError if max_bond cannot meet eps.
    static Mpo from_dense(const DensityMatrix& rho, Index max_bond = kDefaultMaxBond, double eps = 1e-12,
                          bool strict = true) {
        const SiteList& sites = rho.sites();
        if (sites.empty()) throw ConfigError("empty register");
        Radix radix(sites);
        // Vectorize as little-endian over composite digits p_i = k_i + d_i b_i.
        std::vector<Index> pd;
        for (const auto& s : sites) pd.push_back(s.dim() * s.dim());
        Radix pradix(pd);
        Matrix rem(1, pradix.size());
        const Matrix& m = rho.data();
        for (Index bra = 0; bra < m.cols(); ++bra)
            for (Index ket = 0; ket < m.rows(); ++ket) {
                Index p = 0;
                for (std::size_t i = 0; i < sites.size(); ++i)
                    p += (radix.digit(ket, i) + radix.dim(i) * radix.digit(bra, i)) * pradix.stride(i);
                rem(0, p) = m(ket, bra);
            }
        double norm = m.norm();
        std::vector<SiteTensor> ts;
        double disc2 = 0.0;
        bool overflow = false;
        for (std::size_t i = 0; i < sites.size(); ++i) {
            const Index d2 = pd[i];
            const Index dl = rem.rows();
            const Index rest = rem.cols() / d2;
            Matrix a(dl * d2, rest);
            for (Index r = 0; r < rest; ++r)
                for (Index p = 0; p < d2; ++p) a.block(p * dl, r, dl, 1) = rem.col(p + d2 * r);
            SiteTensor t(static_cast<std::size_t>(d2));
            if (i + 1 == sites.size()) {
                for (Index p = 0; p < d2; ++p) t[static_cast<std::size_t>(p)] = a.middleRows(p * dl, dl);
                ts.push_back(std::move(t));
                break;
            }
            auto svd = truncated_svd(a, max_bond, eps);
            disc2 += svd.discarded * svd.discarded;
            overflow = overflow || svd.overflow;
            for (Index p = 0; p < d2; ++p) t[static_cast<std::size_t>(p)] = svd.u.middleRows(p * dl, dl);
            ts.push_back(std::move(t));
            rem = svd.s.asDiagonal() * svd.v.adjoint();
        }
        double rel = norm > 0 ? std::sqrt(disc2) / norm : 0.0;
        if (overflow && strict)
            throw BondOverflowError("MPO bond limit " + std::to_string(max_bond) + " exceeded; truncation error " +
                                        std::to_string(rel),
                                    rel);
        Mpo out(sites, std::move(ts), max_bond, eps);
        out.trunc_err_ = rel;
        return out;
    }

    /// Right-to-left QR sweep followed by a left-to-right truncating SVD
    /// sweep. Leaves the MPO left-canonical (as a vector in operator space).
    void compress(Index max_bond, double eps, bool strict = false) {
        if (size() < 2) return;
        const std::size_t n = size();
        for (std::size_t i = n - 1; i >= 1; --i) {
            auto& t = tensors_[i];
            const Index d2 = static_cast<Index>(t.size());
            const Index dl = t.front().rows(), dr = t.front().cols();
            Matrix bt(d2 * dr, dl);  // B^dagger
            for (Index p = 0; p < d2; ++p) bt.middleRows(p * dr, dr) = t[static_cast<std::size_t>(p)].adjoint();
            Eigen::HouseholderQR<Matrix> qr(bt);
            const Index m = std::min(bt.rows(), bt.cols());
            Matrix q = qr.householderQ() * Matrix::Identity(bt.rows(), m);
            Matrix r = qr.matrixQR().topRows(m).template triangularView<Eigen::Upper>();
            for (Index p = 0; p < d2; ++p) t[static_cast<std::size_t>(p)] = q.middleRows(p * dr, dr).adjoint();
            Matrix rd = r.adjoint();
            for (auto& w : tensors_[i - 1]) w = w * rd;
        }
        double total = 0.0, disc2 = 0.0;
        bool overflow = false;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            auto& t = tensors_[i];
            const Index d2 = static_cast<Index>(t.size());
            const Index dl = t.front().rows(), dr = t.front().cols();
            Matrix a(d2 * dl, dr);
            for (Index p = 0; p < d2; ++p) a.middleRows(p * dl, dl) = t[static_cast<std::size_t>(p)];
            auto svd = truncated_svd(a, max_bond, eps);
            if (i == 0) total = svd.s.squaredNorm() + svd.discarded * svd.discarded;
            disc2 += svd.discarded * svd.discarded;
            overflow = overflow || svd.overflow;
            for (Index p = 0; p < d2; ++p) t[static_cast<std::size_t>(p)] = svd.u.middleRows(p * dl, dl);
            Matrix carry = svd.s.asDiagonal() * svd.v.adjoint();
            for (auto& w : tensors_[i + 1]) w = carry * w;
        }
        double rel = total > 0 ? std::sqrt(disc2 / total) : 0.0;
        trunc_err_ = std::sqrt(trunc_err_ * trunc_err_ + rel * rel);
        max_bond_ = max_bond;
        eps_ = eps;
        if (overflow && strict)
            throw BondOverflowError("MPO bond limit " + std::to_string(max_bond) + " exceeded; truncation error " +
                                        std::to_string(rel),
                                    rel);
    }

    void compress() { compress(max_bond_, eps_, false); }

    cplx trace_complex() const {
        Matrix v = Matrix::Identity(1, 1);
        for (std::size_t i = 0; i < size(); ++i) v = v * transfer_trace(i);
        return v(0, 0);
    }
    double trace() const { return trace_complex().real(); }

    void scale(cplx f) {
        if (!tensors_.empty())
            for (auto& w : tensors_.back()) w *= f;
    }
    void normalize() {
        double tr = trace();
        if (!(std::abs(tr) > 0)) throw NumericalError("MPO has zero trace");
        scale(1.0 / tr);
    }

    /// tr(rho * prod ops); empty matrices stand for identity.
    cplx expectation(const std::vector<Matrix>& ops) const {
        if (ops.size() != size()) throw ConfigError("operator string length mismatch");
        Matrix v = Matrix::Identity(1, 1);
        for (std::size_t i = 0; i < size(); ++i) {
            if (ops[i].size() == 0) {
                v = v * transfer_trace(i);
                continue;
            }
            const Index d = sites_[i].dim();
            Matrix t = Matrix::Zero(tensors_[i].front().rows(), tensors_[i].front().cols());
            for (Index b = 0; b < d; ++b)
                for (Index k = 0; k < d; ++k) {
                    cplx o = ops[i](b, k);
                    if (o != cplx(0.0)) t += o * tensors_[i][static_cast<std::size_t>(k + d * b)];
                }
            v = v * t;
        }
        return v(0, 0);
    }

    /// <psi| rho |psi> by bond-by-bond contraction.
    double fidelity(const Mps& psi) const {
        if (psi.sites() != sites_) throw ConfigError("fidelity: site lists differ");
        // env column a holds vec(E_a), E_a of shape (Dpsi x Dpsi).
        Matrix env = Matrix::Ones(1, 1);
        Index dpsi = 1;
        for (std::size_t i = 0; i < size(); ++i) {
            const auto& a = psi.tensors()[i];
            const auto& w = tensors_[i];
            const Index d = sites_[i].dim();
            const Index dpsi_r = a.front().cols();
            const Index drho_r = w.front().cols();
            Matrix next = Matrix::Zero(dpsi_r * dpsi_r, drho_r);
            Matrix tm(dpsi_r * dpsi_r, env.cols());
            for (Index k = 0; k < d; ++k) {
                Matrix ak = a[static_cast<std::size_t>(k)].adjoint();
                for (Index b = 0; b < d; ++b) {
                    const Matrix& wkb = w[static_cast<std::size_t>(k + d * b)];
                    for (Index c = 0; c < env.cols(); ++c) {
                        Eigen::Map<const Matrix> e(env.col(c).data(), dpsi, dpsi);
                        Matrix t = ak * e * a[static_cast<std::size_t>(b)];
                        tm.col(c) = Eigen::Map<const Vector>(t.data(), t.size());
                    }
                    next.noalias() += tm * wkb;
                }
            }
            env = std::move(next);
            dpsi = dpsi_r;
        }
        return std::clamp(env(0, 0).real(), 0.0, 1.0);
    }

    /// Reduced operator on `keep` (listed in any order).
    DensityMatrix reduced(const SiteList& keep) const {
        std::vector<bool> kept(size(), false);
        for (const auto& s : keep) kept[site_position(sites_, s)] = true;
        SiteList order;
        Matrix e = Matrix::Ones(1, 1);  // rows: ket + K*bra over kept sites
        Index kdim = 1;
        for (std::size_t i = 0; i < size(); ++i) {
            if (!kept[i]) {
                e = e * transfer_trace(i);
                continue;
            }
            order.push_back(sites_[i]);
            const Index d = sites_[i].dim();
            const Index kd = kdim * d;
            Matrix next(kd * kd, tensors_[i].front().cols());
            for (Index b = 0; b < d; ++b)
                for (Index k = 0; k < d; ++k) {
                    Matrix eb = e * tensors_[i][static_cast<std::size_t>(k + d * b)];
                    for (Index bra = 0; bra < kdim; ++bra)
                        for (Index ket = 0; ket < kdim; ++ket)
                            next.row((ket + kdim * k) + kd * (bra + kdim * b)) = eb.row(ket + kdim * bra);
                }
            e = std::move(next);
            kdim = kd;
        }
        Matrix out(kdim, kdim);
        for (Index bra = 0; bra < kdim; ++bra)
            for (Index ket = 0; ket < kdim; ++ket) out(ket, bra) = e(ket + kdim * bra, 0);
        return permute_sites(DensityMatrix(order, std::move(out)), keep);
    }

    DensityMatrix to_dense() const {
        if (total_dim(sites_) > 4096) throw CapacityError("MPO too large to densify");
        return reduced(sites_);
    }

    /// rho <- U rho U^dagger on site i.
    void apply_local(std::size_t i, const Matrix& u) {
        const Index d = sites_[i].dim();
        auto& t = tensors_[i];
        SiteTensor out(t.size(), Matrix::Zero(t.front().rows(), t.front().cols()));
        for (Index b = 0; b < d; ++b)
            for (Index k = 0; k < d; ++k)
                for (Index bb = 0; bb < d; ++bb)
                    for (Index kk = 0; kk < d; ++kk) {
                        cplx c = u(k, kk) * std::conj(u(b, bb));
                        if (c != cplx(0.0))
                            out[static_cast<std::size_t>(k + d * b)] += c * t[static_cast<std::size_t>(kk + d * bb)];
                    }
        t = std::move(out);
    }

    /// Sum_k w[k + d k] for site i.
    Matrix transfer_trace(std::size_t i) const {
        const Index d = sites_[i].dim();
        Matrix t = tensors_[i][0];
        for (Index k = 1; k < d; ++k) t += tensors_[i][static_cast<std::size_t>(k + d * k)];
        return t;
    }

private:
    SiteList sites_;
    std::vector<SiteTensor> tensors_;
    Index max_bond_ = kDefaultMaxBond;
    double eps_ = 1e-12;
    double trunc_err_ = 0.0;
};

inline double fidelity(const Mpo& rho, const Mps& target) { return rho.fidelity(target); }

}  // namespace ladder

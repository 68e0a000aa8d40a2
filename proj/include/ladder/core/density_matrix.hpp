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
#include "ladder/core/sites.hpp"
#include "ladder/core/tensor.hpp"

#include <algorithm>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace ladder {

/// Normalized state vector on a labeled register.
class PureState {
public:
    PureState() = default;
    PureState(SiteList sites, Vector amplitudes, bool normalize = true)
        : sites_(std::move(sites)), amp_(std::move(amplitudes)) {
        if (amp_.size() != total_dim(sites_)) throw ConfigError("state size does not match sites");
        if (normalize) {
            double nrm = amp_.norm();
            if (nrm == 0.0) throw NumericalError("zero state vector");
            amp_ /= nrm;
        }
    }

    static PureState basis(SiteList sites, Index k) {
        Vector v = Vector::Zero(total_dim(sites));
        v(k) = 1.0;
        return {std::move(sites), std::move(v)};
    }

    const SiteList& sites() const { return sites_; }
    const Vector& amplitudes() const { return amp_; }
    Index dim() const { return amp_.size(); }

private:
    SiteList sites_;
    Vector amp_;
};

/// Dense operator on a labeled register. Physicality is checked on demand
/// with `validate`, since partial transposes share the type.
class DensityMatrix {
public:
    DensityMatrix() = default;
    DensityMatrix(SiteList sites, Matrix data) : sites_(std::move(sites)), data_(std::move(data)) {
        Index d = total_dim(sites_);
        if (data_.rows() != d || data_.cols() != d) throw ConfigError("matrix size does not match sites");
    }

    static DensityMatrix from_pure(const PureState& psi) {
        return {psi.sites(), psi.amplitudes() * psi.amplitudes().adjoint()};
    }
    static DensityMatrix maximally_mixed(SiteList sites) {
        Index d = total_dim(sites);
        return {std::move(sites), Matrix::Identity(d, d) / static_cast<double>(d)};
    }

    const SiteList& sites() const { return sites_; }
    const Matrix& data() const { return data_; }
    Matrix& mutable_data() { return data_; }
    Index dim() const { return data_.rows(); }
    double trace() const { return data_.trace().real(); }
    double purity() const { return (data_ * data_).trace().real(); }

    RealVector eigenvalues() const {
        Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(data_), Eigen::EigenvaluesOnly);
        return es.eigenvalues();
    }

    /// Throws NumericalError unless Hermitian, unit-trace and PSD.
    void validate(double herm_tol = 1e-10, double trace_tol = 1e-10, double eig_tol = 1e-9) const {
        double herm = (data_ - data_.adjoint()).cwiseAbs().maxCoeff();
        if (herm > herm_tol) throw NumericalError("density matrix not Hermitian: " + std::to_string(herm));
        if (std::abs(trace() - 1.0) > trace_tol)
            throw NumericalError("density matrix trace " + std::to_string(trace()));
        double lo = eigenvalues().minCoeff();
        if (lo < -eig_tol) throw NumericalError("density matrix eigenvalue " + std::to_string(lo));
    }

private:
    SiteList sites_;
    Matrix data_;
};

namespace detail {

inline std::vector<std::size_t> positions_of(const SiteList& sites, const SiteList& subset) {
    std::vector<std::size_t> pos;
    pos.reserve(subset.size());
    for (const auto& s : subset) pos.push_back(site_position(sites, s));
    std::set<std::size_t> uniq(pos.begin(), pos.end());
    if (uniq.size() != pos.size()) throw ConfigError("duplicate site label");
    return pos;
}

}  // namespace detail

/// Trace out everything not in `keep`; the result lists `keep` in the order given.
inline DensityMatrix partial_trace(const DensityMatrix& rho, const SiteList& keep) {
    auto pos = detail::positions_of(rho.sites(), keep);
    Radix radix(rho.sites());
    IndexMatrix map = local_index_map(radix, pos);
    const Matrix& m = rho.data();
    Matrix out = Matrix::Zero(map.rows(), map.rows());
    for (Index r = 0; r < map.cols(); ++r)
        for (Index b = 0; b < map.rows(); ++b)
            for (Index a = 0; a < map.rows(); ++a) out(a, b) += m(map(a, r), map(b, r));
    return {keep, std::move(out)};
}

/// Transpose the digits of `part` between row and column indices.
inline DensityMatrix partial_transpose(const DensityMatrix& rho, const SiteList& part) {
    auto pos = detail::positions_of(rho.sites(), part);
    if (pos.empty()) return rho;
    Radix radix(rho.sites());
    IndexMatrix map = local_index_map(radix, pos);
    const Matrix& m = rho.data();
    Matrix out(m.rows(), m.cols());
    const Index d = map.rows();
    for (Index r = 0; r < map.cols(); ++r)
        for (Index s = 0; s < map.cols(); ++s)
            for (Index a = 0; a < d; ++a)
                for (Index b = 0; b < d; ++b) out(map(a, r), map(b, s)) = m(map(b, r), map(a, s));
    return {rho.sites(), std::move(out)};
}

/// Reorder a register to `order` (a permutation of its sites).
inline DensityMatrix permute_sites(const DensityMatrix& rho, const SiteList& order) {
    if (order.size() != rho.sites().size()) throw ConfigError("permutation must list every site");
    if (order == rho.sites()) return rho;
    auto pos = detail::positions_of(rho.sites(), order);
    IndexMatrix map = local_index_map(Radix(rho.sites()), pos);  // single column
    const Matrix& m = rho.data();
    Matrix out(m.rows(), m.cols());
    for (Index b = 0; b < m.cols(); ++b)
        for (Index a = 0; a < m.rows(); ++a) out(a, b) = m(map(a, 0), map(b, 0));
    return {order, std::move(out)};
}

inline PureState permute_sites(const PureState& psi, const SiteList& order) {
    if (order.size() != psi.sites().size()) throw ConfigError("permutation must list every site");
    if (order == psi.sites()) return psi;
    auto pos = detail::positions_of(psi.sites(), order);
    IndexMatrix map = local_index_map(Radix(psi.sites()), pos);
    Vector out(psi.dim());
    for (Index a = 0; a < psi.dim(); ++a) out(a) = psi.amplitudes()(map(a, 0));
    return {order, std::move(out), false};
}

/// <psi| rho |psi>; the target is reordered to match rho when needed.
inline double fidelity(const DensityMatrix& rho, const PureState& target) {
    PureState t = permute_sites(target, rho.sites());
    return std::clamp((t.amplitudes().adjoint() * rho.data() * t.amplitudes())(0, 0).real(), 0.0, 1.0);
}

/// Uhlmann fidelity between two density matrices on the same register.
inline double fidelity(const DensityMatrix& a, const DensityMatrix& b) {
    DensityMatrix bb = permute_sites(b, a.sites());
    return std::clamp(uhlmann_fidelity(a.data(), bb.data()), 0.0, 1.0);
}

/// tr(rho O) for O given as a full matrix on the register.
inline cplx expectation(const DensityMatrix& rho, const Matrix& op) { return (rho.data() * op).trace(); }

/// Apply U to `on` (in the order listed).
inline void apply_unitary(DensityMatrix& rho, const SiteList& on, const Matrix& u) {
    auto pos = detail::positions_of(rho.sites(), on);
    conjugate_local(rho.mutable_data(), local_index_map(Radix(rho.sites()), pos), u);
}

inline void apply_channel(DensityMatrix& rho, const SiteList& on, const std::vector<Matrix>& kraus) {
    auto pos = detail::positions_of(rho.sites(), on);
    apply_kraus(rho.mutable_data(), local_index_map(Radix(rho.sites()), pos), kraus);
}

/// Append a fresh site in the given local state (becomes most significant).
inline DensityMatrix append_site(const DensityMatrix& rho, const SiteLabel& site, const Matrix& local) {
    SiteList s = rho.sites();
    if (std::find(s.begin(), s.end(), site) != s.end()) throw ConfigError("site already present: " + site.str());
    s.push_back(site);
    return {std::move(s), kron_le(rho.data(), local)};
}

/// Product state of single-site density matrices, little-endian.
inline DensityMatrix product_state(const SiteList& sites, const std::vector<Matrix>& locals) {
    if (sites.size() != locals.size()) throw ConfigError("product state size mismatch");
    return {sites, kron_le(locals)};
}

/// Full-register matrix of a product of single-site operators (identity elsewhere).
inline Matrix embed_product(const SiteList& sites, const std::vector<std::pair<SiteLabel, Matrix>>& ops) {
    std::vector<Matrix> locals;
    locals.reserve(sites.size());
    for (const auto& s : sites) locals.push_back(Matrix::Identity(s.dim(), s.dim()));
    for (const auto& [label, op] : ops) locals[site_position(sites, label)] = op;
    return kron_le(locals);
}

}  // namespace ladder

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
#include "ladder/core/sites.hpp"

#include <vector>

namespace ladder {

/// Open-boundary matrix product state. Site tensor k is stored as one
/// (left x right) matrix per physical index.
class Mps {
public:
    using SiteTensor = std::vector<Matrix>;

    Mps() = default;
    Mps(SiteList sites, std::vector<SiteTensor> tensors) : sites_(std::move(sites)), tensors_(std::move(tensors)) {
        if (sites_.size() != tensors_.size()) throw ConfigError("MPS site/tensor count mismatch");
        for (std::size_t i = 0; i < tensors_.size(); ++i) {
            if (static_cast<Index>(tensors_[i].size()) != sites_[i].dim())
                throw ConfigError("MPS physical dimension mismatch at " + sites_[i].str());
            if (i > 0 && tensors_[i - 1].front().cols() != tensors_[i].front().rows())
                throw ConfigError("MPS bond mismatch at " + sites_[i].str());
        }
        if (!tensors_.empty() && (tensors_.front().front().rows() != 1 || tensors_.back().front().cols() != 1))
            throw ConfigError("MPS boundary bonds must be 1");
    }

    const SiteList& sites() const { return sites_; }
    const std::vector<SiteTensor>& tensors() const { return tensors_; }
    std::size_t size() const { return tensors_.size(); }

    Index max_bond() const {
        Index b = 1;
        for (const auto& t : tensors_) b = std::max(b, t.front().cols());
        return b;
    }

    /// <this|this>.
    double norm2() const {
        Matrix e = Matrix::Identity(1, 1);
        for (const auto& t : tensors_) {
            Matrix next = Matrix::Zero(t.front().cols(), t.front().cols());
            for (const auto& a : t) next += a.adjoint() * e * a;
            e = std::move(next);
        }
        return e(0, 0).real();
    }

    /// <this| (product of single-site ops) |this>; `ops[i]` may be empty for identity.
    cplx expectation(const std::vector<Matrix>& ops) const {
        if (ops.size() != tensors_.size()) throw ConfigError("operator string length mismatch");
        Matrix e = Matrix::Identity(1, 1);
        for (std::size_t i = 0; i < tensors_.size(); ++i) {
            const auto& t = tensors_[i];
            Matrix next = Matrix::Zero(t.front().cols(), t.front().cols());
            const Index d = static_cast<Index>(t.size());
            for (Index k = 0; k < d; ++k)
                for (Index b = 0; b < d; ++b) {
                    cplx o = ops[i].size() == 0 ? cplx(k == b ? 1.0 : 0.0) : ops[i](k, b);
                    if (o == cplx(0.0)) continue;
                    next += o * t[k].adjoint() * e * t[b];
                }
            e = std::move(next);
        }
        return e(0, 0);
    }

    PureState to_dense() const {
        Index total = total_dim(sites_);
        if (total > (Index{1} << 24)) throw CapacityError("MPS too large to densify");
        // Rows: composite physical index so far; columns: right bond.
        Matrix acc = Matrix::Identity(1, 1);
        for (const auto& t : tensors_) {
            const Index d = static_cast<Index>(t.size());
            Matrix next(acc.rows() * d, t.front().cols());
            for (Index k = 0; k < d; ++k) next.middleRows(k * acc.rows(), acc.rows()) = acc * t[k];
            acc = std::move(next);
        }
        return {sites_, acc.col(0), false};
    }

    /// Exact-ish SVD decomposition of a dense state, little-endian.
    static Mps from_dense(const PureState& psi, Index max_bond = 1 << 20, double eps = 1e-14) {
        const SiteList& sites = psi.sites();
        std::vector<SiteTensor> ts;
        // rem(l, rest) with rest little-endian over remaining sites.
        Matrix rem = psi.amplitudes().transpose();
        for (std::size_t i = 0; i < sites.size(); ++i) {
            const Index d = sites[i].dim();
            const Index dl = rem.rows();
            const Index rest = rem.cols() / d;
            Matrix a(dl * d, rest);
            for (Index r = 0; r < rest; ++r)
                for (Index k = 0; k < d; ++k) a.block(k * dl, r, dl, 1) = rem.col(k + d * r);
            SiteTensor t(static_cast<std::size_t>(d));
            if (i + 1 == sites.size()) {
                for (Index k = 0; k < d; ++k) t[static_cast<std::size_t>(k)] = a.middleRows(k * dl, dl);
                ts.push_back(std::move(t));
                break;
            }
            auto svd = truncated_svd(a, max_bond, eps);
            for (Index k = 0; k < d; ++k) t[static_cast<std::size_t>(k)] = svd.u.middleRows(k * dl, dl);
            ts.push_back(std::move(t));
            rem = svd.s.asDiagonal() * svd.v.adjoint();
        }
        return {sites, std::move(ts)};
    }

private:
    SiteList sites_;
    std::vector<SiteTensor> tensors_;
};

}  // namespace ladder

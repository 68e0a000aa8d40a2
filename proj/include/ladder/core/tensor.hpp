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

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <numeric>
#include <vector>

namespace ladder {

using IndexMatrix = Eigen::Matrix<Index, Eigen::Dynamic, Eigen::Dynamic>;

/// Full-register index table for an operator acting on `positions`.
///
/// Entry (a, r) is the composite index whose digits on `positions` spell the
/// local index `a` (little-endian in the order given) and whose remaining
/// digits spell `r`.
inline IndexMatrix local_index_map(const Radix& radix, const std::vector<std::size_t>& positions) {
    std::vector<bool> used(radix.sites(), false);
    Index d_op = 1;
    for (auto p : positions) {
        if (p >= radix.sites() || used[p]) throw ConfigError("bad site position in local operator");
        used[p] = true;
        d_op *= radix.dim(p);
    }
    std::vector<std::size_t> rest;
    for (std::size_t k = 0; k < radix.sites(); ++k)
        if (!used[k]) rest.push_back(k);
    Index d_rest = radix.size() / d_op;

    std::vector<Index> op_off(static_cast<std::size_t>(d_op), 0);
    for (Index a = 0; a < d_op; ++a) {
        Index rem = a, off = 0;
        for (auto p : positions) {
            off += (rem % radix.dim(p)) * radix.stride(p);
            rem /= radix.dim(p);
        }
        op_off[static_cast<std::size_t>(a)] = off;
    }
    IndexMatrix idx(d_op, d_rest);
    for (Index r = 0; r < d_rest; ++r) {
        Index rem = r, base = 0;
        for (auto p : rest) {
            base += (rem % radix.dim(p)) * radix.stride(p);
            rem /= radix.dim(p);
        }
        for (Index a = 0; a < d_op; ++a) idx(a, r) = base + op_off[static_cast<std::size_t>(a)];
    }
    return idx;
}

/// m <- (op on the mapped factor) * m, acting on rows.
inline void apply_left(Matrix& m, const IndexMatrix& map, const Matrix& op) {
    const Index d_op = map.rows();
    Matrix block(d_op, m.cols());
    for (Index r = 0; r < map.cols(); ++r) {
        for (Index a = 0; a < d_op; ++a) block.row(a) = m.row(map(a, r));
        block = op * block;
        for (Index a = 0; a < d_op; ++a) m.row(map(a, r)) = block.row(a);
    }
}

inline void apply_left(Vector& v, const IndexMatrix& map, const Matrix& op) {
    const Index d_op = map.rows();
    Vector block(d_op);
    for (Index r = 0; r < map.cols(); ++r) {
        for (Index a = 0; a < d_op; ++a) block(a) = v(map(a, r));
        block = op * block;
        for (Index a = 0; a < d_op; ++a) v(map(a, r)) = block(a);
    }
}

/// m <- m * (op on the mapped factor)^dagger, acting on columns.
inline void apply_right_adjoint(Matrix& m, const IndexMatrix& map, const Matrix& op) {
    const Index d_op = map.rows();
    Matrix block(m.rows(), d_op);
    Matrix opa = op.adjoint();
    for (Index r = 0; r < map.cols(); ++r) {
        for (Index a = 0; a < d_op; ++a) block.col(a) = m.col(map(a, r));
        block = block * opa;
        for (Index a = 0; a < d_op; ++a) m.col(map(a, r)) = block.col(a);
    }
}

/// rho <- U rho U^dagger on the mapped factor.
inline void conjugate_local(Matrix& rho, const IndexMatrix& map, const Matrix& u) {
    apply_right_adjoint(rho, map, u);
    rho.adjointInPlace();
    apply_right_adjoint(rho, map, u);
    rho.adjointInPlace();
}

/// rho <- sum_k K rho K^dagger on the mapped factor.
inline void apply_kraus(Matrix& rho, const IndexMatrix& map, const std::vector<Matrix>& kraus) {
    if (kraus.empty()) throw ConfigError("empty Kraus set");
    if (kraus.size() == 1) {
        conjugate_local(rho, map, kraus.front());
        return;
    }
    Matrix acc = Matrix::Zero(rho.rows(), rho.cols());
    for (const auto& k : kraus) {
        Matrix t = rho;
        conjugate_local(t, map, k);
        acc += t;
    }
    rho = std::move(acc);
}

/// Kronecker product a (x) b with `a` as the *less* significant factor.
inline Matrix kron_le(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < b.rows(); ++i)
        for (Index j = 0; j < b.cols(); ++j)
            out.block(i * a.rows(), j * a.cols(), a.rows(), a.cols()) = b(i, j) * a;
    return out;
}

/// Little-endian Kronecker product of a list: ops[0] is least significant.
inline Matrix kron_le(const std::vector<Matrix>& ops) {
    Matrix out = Matrix::Identity(1, 1);
    for (const auto& o : ops) out = kron_le(out, o);
    return out;
}

inline Vector kron_le(const Vector& a, const Vector& b) {
    Vector out(a.size() * b.size());
    for (Index i = 0; i < b.size(); ++i) out.segment(i * a.size(), a.size()) = b(i) * a;
    return out;
}

inline Matrix hermitian_part(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

/// Principal square root of a Hermitian PSD matrix. Eigenvalues below a
/// relative floor are treated as zero.
inline Matrix sqrt_psd(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(m));
    RealVector ev = es.eigenvalues();
    double floor = 1e-13 * std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
    for (Index i = 0; i < ev.size(); ++i) ev(i) = ev(i) > floor ? std::sqrt(ev(i)) : 0.0;
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

/// Uhlmann fidelity (tr sqrt(sqrt(a) b sqrt(a)))^2 of two PSD matrices,
/// evaluated as the squared nuclear norm of sqrt(a) sqrt(b).
inline double uhlmann_fidelity(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw ConfigError("fidelity dimension mismatch");
    Eigen::JacobiSVD<Matrix> svd(sqrt_psd(a) * sqrt_psd(b));
    double s = svd.singularValues().sum();
    return s * s;
}

/// Result of a truncated SVD: m ~ u * diag(s) * v^dagger.
struct TruncatedSvd {
    Matrix u;
    RealVector s;
    Matrix v;
    double discarded = 0.0;  // Frobenius weight of dropped singular values
    bool overflow = false;   // max_bond forced a discard beyond eps
};

/// Keep the fewest singular values whose dropped tail has Frobenius norm
/// <= eps * ||m||_F, capped at max_bond.
inline TruncatedSvd truncated_svd(const Matrix& m, Index max_bond, double eps) {
    Eigen::BDCSVD<Matrix> bdc(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Matrix mu, mv;
    RealVector sv;
    if (bdc.singularValues().allFinite() && bdc.matrixU().allFinite() && bdc.matrixV().allFinite()) {
        mu = bdc.matrixU();
        mv = bdc.matrixV();
        sv = bdc.singularValues();
    } else {
        // BDCSVD can break down on degenerate spectra; Jacobi is slower but robust.
        Eigen::JacobiSVD<Matrix> jac(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
        mu = jac.matrixU();
        mv = jac.matrixV();
        sv = jac.singularValues();
    }
    if (!sv.allFinite()) throw NumericalError("SVD produced non-finite values");
    const Index full = sv.size();
    double total = sv.squaredNorm();
    double budget = eps * eps * total;

    Index keep = full;
    double tail = 0.0;
    while (keep > 1 && tail + sv(keep - 1) * sv(keep - 1) <= budget) {
        tail += sv(keep - 1) * sv(keep - 1);
        --keep;
    }
    // Exact zeros never count as a bond.
    while (keep > 1 && sv(keep - 1) == 0.0) --keep;

    TruncatedSvd out;
    if (keep > max_bond) {
        out.overflow = true;
        for (Index k = max_bond; k < keep; ++k) tail += sv(k) * sv(k);
        keep = max_bond;
    }
    out.u = mu.leftCols(keep);
    out.s = sv.head(keep);
    out.v = mv.leftCols(keep);
    out.discarded = std::sqrt(tail);
    return out;
}

inline Matrix pauli(int k) {
    Matrix p(2, 2);
    switch (k) {
        case 0: p << 1, 0, 0, 1; break;
        case 1: p << 0, 1, 1, 0; break;
        case 2: p << 0, -kI, kI, 0; break;
        case 3: p << 1, 0, 0, -1; break;
        default: throw ConfigError("pauli index out of range");
    }
    return p;
}

}  // namespace ladder

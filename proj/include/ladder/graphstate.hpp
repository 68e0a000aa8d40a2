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
#include "ladder/core/mps.hpp"

#include <array>
#include <cstdint>
#include <set>
#include <utility>
#include <vector>

namespace ladder {

/// 2 x n ladder. Vertex v (1-based) is photon P_v; odd vertices form the
/// first row, even vertices the second.
class LadderGraph {
public:
    explicit LadderGraph(int n) : n_(n) {
        if (n < 1) throw ConfigError("ladder needs n >= 1");
        for (int k = 1; k <= n; ++k) edges_.emplace_back(2 * k - 1, 2 * k);
        for (int k = 1; k < n; ++k) {
            edges_.emplace_back(2 * k - 1, 2 * k + 1);
            edges_.emplace_back(2 * k, 2 * k + 2);
        }
        adj_.assign(static_cast<std::size_t>(2 * n + 1), {});
        for (auto [a, b] : edges_) {
            adj_[static_cast<std::size_t>(a)].push_back(b);
            adj_[static_cast<std::size_t>(b)].push_back(a);
        }
        for (auto& a : adj_) std::sort(a.begin(), a.end());
    }

    int n() const { return n_; }
    int num_vertices() const { return 2 * n_; }
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }

    const std::vector<int>& neighbors(int v) const {
        check_vertex(v);
        return adj_[static_cast<std::size_t>(v)];
    }
    bool adjacent(int a, int b) const {
        const auto& nb = neighbors(a);
        return std::find(nb.begin(), nb.end(), b) != nb.end();
    }
    int row(int v) const { return (v % 2 == 1) ? 1 : 2; }
    int column(int v) const { return (v + 1) / 2; }

    /// The vertex with its neighbours, ascending.
    std::vector<int> closed_neighborhood(int v) const {
        std::vector<int> s = neighbors(v);
        s.push_back(v);
        std::sort(s.begin(), s.end());
        return s;
    }

    SiteList sites() const { return photon_sites(num_vertices()); }

    void check_vertex(int v) const {
        if (v < 1 || v > 2 * n_) throw ConfigError("vertex " + std::to_string(v) + " out of range");
    }

    json to_json() const {
        json e = json::array();
        for (auto [a, b] : edges_) e.push_back({a, b});
        return {{"n", n_}, {"vertices", num_vertices()}, {"edges", e}};
    }

private:
    int n_;
    std::vector<std::pair<int, int>> edges_;
    std::vector<std::vector<int>> adj_;
};

/// K_v = X_v prod_{u in N(v)} Z_u as a per-site operator string
/// (empty matrix = identity).
inline std::vector<Matrix> stabilizer_string(const LadderGraph& g, int v) {
    std::vector<Matrix> ops(static_cast<std::size_t>(g.num_vertices()));
    ops[static_cast<std::size_t>(v - 1)] = pauli(1);
    for (int u : g.neighbors(v)) ops[static_cast<std::size_t>(u - 1)] = pauli(3);
    return ops;
}

inline Matrix stabilizer_matrix(const LadderGraph& g, int v) {
    auto ops = stabilizer_string(g, v);
    for (auto& o : ops)
        if (o.size() == 0) o = pauli(0);
    return kron_le(ops);
}

/// H = -sum_v K_v on the full photonic register.
inline Matrix cluster_hamiltonian(const LadderGraph& g) {
    if (g.num_vertices() > 12) throw CapacityError("dense Hamiltonian limited to 12 qubits");
    const Index d = Index{1} << g.num_vertices();
    Matrix h = Matrix::Zero(d, d);
    for (int v = 1; v <= g.num_vertices(); ++v) h -= stabilizer_matrix(g, v);
    return h;
}

/// Dense ideal cluster state: amplitudes 2^{-N/2} (-1)^{sum_edges x_a x_b}.
inline PureState ideal_cluster_state(const LadderGraph& g) {
    const int nv = g.num_vertices();
    if (nv > 24) throw CapacityError("dense cluster state limited to 24 qubits");
    const Index d = Index{1} << nv;
    Vector v(d);
    const double amp = std::pow(2.0, -0.5 * nv);
    for (Index x = 0; x < d; ++x) {
        int parity = 0;
        for (auto [a, b] : g.edges()) parity ^= static_cast<int>(((x >> (a - 1)) & 1) & ((x >> (b - 1)) & 1));
        v(x) = parity ? -amp : amp;
    }
    return {g.sites(), std::move(v), false};
}

/// Bond-4 MPS of the ideal cluster state. Every edge joins v to v-1 or
/// v-2, so the bond carries the last two bits.
inline Mps ideal_cluster_mps(const LadderGraph& g) {
    const int nv = g.num_vertices();
    std::vector<Mps::SiteTensor> ts;
    const double s = 1.0 / std::sqrt(2.0);
    for (int v = 1; v <= nv; ++v) {
        const Index dl = (v == 1) ? 1 : 4;
        const Index dr = (v == nv) ? 1 : 4;
        Mps::SiteTensor t(2, Matrix::Zero(dl, dr));
        const bool e1 = v >= 2 && g.adjacent(v, v - 1);
        const bool e2 = v >= 3 && g.adjacent(v, v - 2);
        for (Index l = 0; l < dl; ++l) {
            const int a = static_cast<int>(l & 1);         // x_{v-2}
            const int b = static_cast<int>((l >> 1) & 1);  // x_{v-1}
            for (int x = 0; x < 2; ++x) {
                int parity = x & ((e2 ? a : 0) ^ (e1 ? b : 0));
                const Index r = (v == nv) ? 0 : static_cast<Index>(b + 2 * x);
                t[static_cast<std::size_t>(x)](l, r) = parity ? -s : s;
            }
        }
        ts.push_back(std::move(t));
    }
    return {g.sites(), std::move(ts)};
}

inline Mpo ideal_cluster_mpo(const LadderGraph& g, Index max_bond = Mpo::kDefaultMaxBond) {
    Mpo m = Mpo::from_mps(ideal_cluster_mps(g), max_bond);
    m.compress(std::max<Index>(max_bond, 16), 1e-14);
    return m;
}

/// E_v = (1 - <K_v>)/2 on a dense state containing the closed neighbourhood.
inline double local_energy(const DensityMatrix& rho, const LadderGraph& g, int v) {
    g.check_vertex(v);
    auto support = g.closed_neighborhood(v);
    SiteList keep;
    std::vector<Matrix> ops;
    for (int u : support) {
        keep.push_back(SiteLabel::photon(u));
        ops.push_back(u == v ? pauli(1) : pauli(3));
    }
    auto red = partial_trace(rho, keep);
    return 0.5 * (1.0 - expectation(red, kron_le(ops)).real() / red.trace());
}

inline double local_energy(const Mpo& rho, const LadderGraph& g, int v) {
    g.check_vertex(v);
    if (rho.sites() != g.sites()) throw ConfigError("MPO sites do not match the ladder");
    return 0.5 * (1.0 - rho.expectation(stabilizer_string(g, v)).real() / rho.trace());
}

/// Local-Clifford frame applied to circuit output before comparison with
/// the stabilizer target. Entries index single_qubit_cliffords() for the
/// photon classes {S1 via CNOT, S2 via CNOT, S1 via SWAP, S2 via SWAP}.
/// Determined once by find_local_clifford_frame at n = 2.
inline constexpr std::array<int, 4> kFrameCorrection = {0, 0, 0, 0};

/// The 24 single-qubit Cliffords modulo phase; element 0 is the identity.
inline const std::vector<Matrix>& single_qubit_cliffords() {
    static const std::vector<Matrix> group = [] {
        auto canon = [](Matrix m) {
            for (Index i = 0; i < m.size(); ++i)
                if (std::abs(m(i)) > 1e-9) {
                    m *= std::conj(m(i)) / std::abs(m(i));
                    break;
                }
            return m;
        };
        Matrix h(2, 2), s(2, 2);
        h << 1, 1, 1, -1;
        h /= std::sqrt(2.0);
        s << 1, 0, 0, kI;
        std::vector<Matrix> out = {Matrix::Identity(2, 2)};
        for (std::size_t i = 0; i < out.size(); ++i)
            for (const Matrix& gen : {h, s}) {
                Matrix c = canon(gen * out[i]);
                bool seen = false;
                for (const auto& o : out) seen = seen || (o - c).norm() < 1e-9;
                if (!seen) out.push_back(c);
            }
        return out;
    }();
    return group;
}

inline int frame_class(int vertex, int n) {
    const int col = (vertex + 1) / 2;
    const int src = (vertex % 2 == 1) ? 0 : 1;
    return (col < n ? 0 : 2) + src;
}

/// Apply the frozen frame to a photonic MPO on P_1..P_2n.
inline void apply_frame_correction(Mpo& rho, int n) {
    for (int v = 1; v <= 2 * n; ++v) {
        int c = kFrameCorrection[static_cast<std::size_t>(frame_class(v, n))];
        if (c != 0) rho.apply_local(static_cast<std::size_t>(v - 1), single_qubit_cliffords()[static_cast<std::size_t>(c)]);
    }
}

inline void apply_frame_correction(DensityMatrix& rho, int n) {
    for (int v = 1; v <= 2 * n; ++v) {
        int c = kFrameCorrection[static_cast<std::size_t>(frame_class(v, n))];
        if (c != 0)
            apply_unitary(rho, {SiteLabel::photon(v)}, single_qubit_cliffords()[static_cast<std::size_t>(c)]);
    }
}

/// Brute-force search over local Cliffords C = C_1 (x) ... (x) C_4 maximising
/// <target| C rho C^dagger |target> for a 4-photon state. Returns the
/// per-photon indices and the achieved fidelity.
inline std::pair<std::array<int, 4>, double> find_local_clifford_frame(const DensityMatrix& rho,
                                                                       const PureState& target) {
    if (rho.sites().size() != 4) throw ConfigError("frame search expects four photons");
    const auto& cl = single_qubit_cliffords();
    const int m = static_cast<int>(cl.size());
    PureState t = permute_sites(target, rho.sites());
    std::array<int, 4> best{0, 0, 0, 0};
    double best_f = -1.0;
    // <t| C rho C^+ |t> = <C^+ t| rho |C^+ t>
    std::vector<Matrix> adj;
    for (const auto& c : cl) adj.push_back(c.adjoint());
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
            Matrix ab = kron_le(adj[static_cast<std::size_t>(a)], adj[static_cast<std::size_t>(b)]);
            for (int c = 0; c < m; ++c)
                for (int d = 0; d < m; ++d) {
                    Matrix cd = kron_le(adj[static_cast<std::size_t>(c)], adj[static_cast<std::size_t>(d)]);
                    Vector w = kron_le(ab, cd) * t.amplitudes();
                    double f = (w.adjoint() * rho.data() * w)(0, 0).real();
                    if (f > best_f + 1e-12) {
                        best_f = f;
                        best = {a, b, c, d};
                    }
                }
        }
    return {best, best_f};
}

// ---------------------------------------------------------------------------
// Stabilizer oracle for X/Z projections of graph states.

/// Pauli operator with an i^phase prefactor.
struct PauliString {
    std::vector<std::uint8_t> x, z;
    int phase = 0;

    explicit PauliString(std::size_t n = 0) : x(n, 0), z(n, 0) {}

    bool commutes(const PauliString& o) const {
        int s = 0;
        for (std::size_t i = 0; i < x.size(); ++i) s ^= (x[i] & o.z[i]) ^ (z[i] & o.x[i]);
        return s == 0;
    }

    /// this <- this * o.
    void multiply(const PauliString& o) {
        int p = phase + o.phase;
        for (std::size_t i = 0; i < x.size(); ++i) {
            // Phase exponent of (X^x1 Z^z1)(X^x2 Z^z2) relative to X^(x1^x2) Z^(z1^z2),
            // using the Y = i X Z convention folded into `phase`.
            int x1 = x[i], z1 = z[i], x2 = o.x[i], z2 = o.z[i];
            p += 2 * (z1 & x2);
            x[i] = static_cast<std::uint8_t>(x1 ^ x2);
            z[i] = static_cast<std::uint8_t>(z1 ^ z2);
        }
        phase = ((p % 4) + 4) % 4;
    }

    /// Dense matrix of i^phase prod_i X^x_i Z^z_i on the listed qubits.
    Matrix dense(const std::vector<std::size_t>& qubits) const {
        std::vector<Matrix> ops;
        for (auto q : qubits) {
            Matrix m = Matrix::Identity(2, 2);
            if (x[q]) m = pauli(1) * m;
            if (z[q]) m = m * pauli(3);
            ops.push_back(m);
        }
        static const cplx ip[4] = {1.0, kI, -1.0, -kI};
        return ip[phase] * kron_le(ops);
    }
};

/// Result of projecting a graph state with single-qubit X/Z measurements.
struct ProjectionOracle {
    DensityMatrix endpoints;   // two-qubit state on the unmeasured vertices
    double probability = 0.0;  // Born probability of the requested outcomes
};

/// Predict the post-measurement state of the two unmeasured vertices.
/// `outcomes` maps each measured vertex to its bit (0 -> +1 eigenvalue).
inline ProjectionOracle graph_projection_oracle(const LadderGraph& g, const std::vector<int>& x_set,
                                                const std::vector<int>& z_set,
                                                const std::vector<std::pair<int, int>>& outcomes) {
    const int nv = g.num_vertices();
    std::set<int> xs(x_set.begin(), x_set.end()), zs(z_set.begin(), z_set.end());
    for (int v : xs)
        if (zs.count(v)) throw ConfigError("vertex " + std::to_string(v) + " in both X and Z sets");
    for (int v : xs) g.check_vertex(v);
    for (int v : zs) g.check_vertex(v);
    std::vector<int> free;
    for (int v = 1; v <= nv; ++v)
        if (!xs.count(v) && !zs.count(v)) free.push_back(v);
    if (free.size() != 2) throw ConfigError("projection must leave exactly two vertices");

    const std::size_t n = static_cast<std::size_t>(nv);
    std::vector<PauliString> gens;
    for (int v = 1; v <= nv; ++v) {
        PauliString k(n);
        k.x[static_cast<std::size_t>(v - 1)] = 1;
        for (int u : g.neighbors(v)) k.z[static_cast<std::size_t>(u - 1)] = 1;
        gens.push_back(std::move(k));
    }

    double prob = 1.0;
    std::vector<int> order;
    for (int v = 1; v <= nv; ++v)
        if (xs.count(v) || zs.count(v)) order.push_back(v);
    for (int v : order) {
        int bit = 0;
        bool found = false;
        for (auto [u, b] : outcomes)
            if (u == v) {
                bit = b;
                found = true;
            }
        if (!found) throw ConfigError("missing outcome for vertex " + std::to_string(v));
        PauliString p(n);
        if (xs.count(v))
            p.x[static_cast<std::size_t>(v - 1)] = 1;
        else
            p.z[static_cast<std::size_t>(v - 1)] = 1;
        p.phase = bit ? 2 : 0;

        std::size_t pivot = gens.size();
        for (std::size_t k = 0; k < gens.size(); ++k)
            if (!gens[k].commutes(p)) {
                pivot = k;
                break;
            }
        if (pivot < gens.size()) {
            for (std::size_t k = 0; k < gens.size(); ++k)
                if (k != pivot && !gens[k].commutes(p)) gens[k].multiply(gens[pivot]);
            gens[pivot] = p;
            prob *= 0.5;
            continue;
        }
        // Deterministic: find the product of generators equal to +-P.
        std::vector<PauliString> work = gens;
        std::vector<std::vector<std::size_t>> combo(work.size());
        for (std::size_t k = 0; k < work.size(); ++k) combo[k] = {k};
        // Gaussian elimination on the (x|z) bit matrix.
        std::size_t row = 0;
        std::vector<std::pair<std::size_t, std::size_t>> pivots;  // (row, column)
        for (std::size_t col = 0; col < 2 * n && row < work.size(); ++col) {
            auto bitof = [&](const PauliString& s) { return col < n ? s.x[col] : s.z[col - n]; };
            std::size_t r = row;
            while (r < work.size() && !bitof(work[r])) ++r;
            if (r == work.size()) continue;
            std::swap(work[r], work[row]);
            for (std::size_t k = 0; k < work.size(); ++k)
                if (k != row && bitof(work[k])) work[k].multiply(work[row]);
            pivots.emplace_back(row, col);
            ++row;
        }
        PauliString acc(n);
        for (auto [r, col] : pivots) {
            std::uint8_t want = col < n ? p.x[col] : p.z[col - n];
            std::uint8_t have = col < n ? acc.x[col] : acc.z[col - n];
            if (want != have) acc.multiply(work[r]);
        }
        // acc equals P up to a sign; outcome forced.
        int sign_phase = ((acc.phase - (p.phase & ~2)) % 4 + 4) % 4;  // 0 -> +P, 2 -> -P
        int forced = sign_phase == 2 ? 1 : 0;
        if (forced != bit) prob = 0.0;
    }

    std::vector<std::size_t> fq = {static_cast<std::size_t>(free[0] - 1), static_cast<std::size_t>(free[1] - 1)};
    Matrix rho = Matrix::Identity(4, 4) / 4.0;
    if (prob > 0.0) {
        // Generators acting only on the free pair survive the projection.
        std::vector<PauliString> work = gens;
        std::size_t row = 0;
        for (std::size_t col = 0; col < 2 * n && row < work.size(); ++col) {
            bool on_free = col % n == fq[0] || col % n == fq[1];
            if (on_free) continue;
            auto bitof = [&](const PauliString& s) { return col < n ? s.x[col] : s.z[col - n]; };
            std::size_t r = row;
            while (r < work.size() && !bitof(work[r])) ++r;
            if (r == work.size()) continue;
            std::swap(work[r], work[row]);
            for (std::size_t k = 0; k < work.size(); ++k)
                if (k != row && bitof(work[k])) work[k].multiply(work[row]);
            ++row;
        }
        Matrix proj = Matrix::Identity(4, 4);
        for (std::size_t k = row; k < work.size(); ++k) {
            bool nontrivial = false;
            for (auto q : fq) nontrivial = nontrivial || work[k].x[q] || work[k].z[q];
            if (!nontrivial) continue;
            proj = proj * (Matrix::Identity(4, 4) + work[k].dense(fq)) / 2.0;
        }
        rho = proj / proj.trace();
    }
    return {DensityMatrix({SiteLabel::photon(free[0]), SiteLabel::photon(free[1])}, rho), prob};
}

}  // namespace ladder

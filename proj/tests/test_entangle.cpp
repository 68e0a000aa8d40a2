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

#include "ladder/emitter.hpp"
#include "ladder/entangle.hpp"

#include <gtest/gtest.h>

#include <functional>
#include <random>
#include <set>

using namespace ladder;

namespace {

DensityMatrix bell() {
    Vector v = Vector::Zero(4);
    v(0) = v(3) = 1.0 / std::sqrt(2.0);
    return DensityMatrix::from_pure(PureState(photon_sites(2), v));
}

Matrix random_unitary(std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Matrix a(2, 2);
    for (Index i = 0; i < 4; ++i) a(i % 2, i / 2) = cplx(g(rng), g(rng));
    Eigen::HouseholderQR<Matrix> qr(a);
    return qr.householderQ() * Matrix::Identity(2, 2);
}

// Dense oracle: project every measured vertex and trace down to the endpoints.
std::pair<DensityMatrix, double> dense_projection(const DensityMatrix& rho, const ProjectionPlan& plan,
                                                  const std::vector<int>& outcomes) {
    DensityMatrix r = rho;
    auto measured = plan.measured(static_cast<int>(rho.sites().size()));
    for (std::size_t i = 0; i < measured.size(); ++i) {
        Vector v = projection_vector(plan.basis(measured[i]), outcomes[i]);
        Matrix p = v * v.adjoint();
        apply_channel(r, {SiteLabel::photon(measured[i])}, {p});
    }
    const double prob = r.data().trace().real();
    auto red = partial_trace(r, {SiteLabel::photon(plan.first), SiteLabel::photon(plan.last)});
    return {DensityMatrix(red.sites(), red.data() / prob), prob};
}

Mpo noisy_state(int n, double scale) {
    NoiseParams p = NoiseParams::all_errors();
    for (auto& s : p.source) {
        s.T1_e /= scale;
        s.T1_f /= scale;
        s.T2s_ge /= scale;
        s.T2s_ef /= scale;
    }
    p.gamma_CZ *= scale;
    p.L_CZ = std::min(0.06, p.L_CZ * scale);
    return simulate_mpo(ProtocolSpec::full(n, p));
}

}  // namespace

TEST(Negativity, BellAndProduct) {
    EXPECT_NEAR(negativity(bell()), 0.5, 1e-12);
    Matrix a(2, 2), b(2, 2);
    a << 0.7, 0.2, 0.2, 0.3;
    b << 0.5, cplx(0, 0.1), cplx(0, -0.1), 0.5;
    EXPECT_EQ(negativity(DensityMatrix(photon_sites(2), kron_le(a, b))), 0.0);
}

TEST(Negativity, WernerStateMatchesEigenOracle) {
    const double p = 0.5;
    Matrix rho = p * bell().data() + (1 - p) * Matrix::Identity(4, 4) / 4.0;
    // Partial transpose on the first qubit by index swapping.
    Matrix pt(4, 4);
    for (Index i = 0; i < 4; ++i)
        for (Index j = 0; j < 4; ++j) {
            const Index i1 = i % 2, i2 = i / 2, j1 = j % 2, j2 = j / 2;
            pt(j1 + 2 * i2, i1 + 2 * j2) = rho(i, j);
        }
    Eigen::SelfAdjointEigenSolver<Matrix> es(pt);
    double neg = 0.0;
    for (Index i = 0; i < 4; ++i) neg += std::max(0.0, -es.eigenvalues()(i));
    EXPECT_NEAR(negativity(DensityMatrix(photon_sites(2), rho)), neg, 1e-12);
    EXPECT_NEAR(neg, 0.125, 1e-12);
}

TEST(Negativity, InvariantUnderLocalUnitaries) {
    std::mt19937_64 rng(3);
    DensityMatrix w(photon_sites(2), 0.7 * bell().data() + 0.3 * Matrix::Identity(4, 4) / 4.0);
    const double n0 = negativity(w);
    for (int t = 0; t < 10; ++t) {
        DensityMatrix r = w;
        apply_unitary(r, {SiteLabel::photon(1)}, random_unitary(rng));
        apply_unitary(r, {SiteLabel::photon(2)}, random_unitary(rng));
        EXPECT_NEAR(negativity(r), n0, 1e-9);
    }
    EXPECT_THROW(negativity(w, {}), ConfigError);
}

TEST(Paths, CountMatchesExhaustiveSearch) {
    for (int n = 1; n <= 6; ++n) {
        LadderGraph g(n);
        // Oracle: simple paths from 1 to 2n with exactly n edges.
        std::set<std::vector<int>> found;
        std::vector<int> cur = {1};
        std::function<void()> dfs = [&] {
            if (static_cast<int>(cur.size()) == n + 1) {
                if (cur.back() == 2 * n) found.insert(cur);
                return;
            }
            for (int u : g.neighbors(cur.back()))
                if (std::find(cur.begin(), cur.end(), u) == cur.end()) {
                    cur.push_back(u);
                    dfs();
                    cur.pop_back();
                }
        };
        dfs();
        auto paths = enumerate_paths(g);
        EXPECT_EQ(paths.size(), static_cast<std::size_t>(n));
        EXPECT_EQ(found.size(), paths.size());
        for (const auto& p : paths) EXPECT_TRUE(found.count(p.path)) << "n=" << n;
    }
}

TEST(Projection, IdealClusterAlwaysLocalizesABellPair) {
    std::mt19937_64 rng(5);
    for (int n = 2; n <= 4; ++n) {
        LadderGraph g(n);
        auto mpo = ideal_cluster_mpo(g);
        for (const auto& plan : enumerate_paths(g))
            for (int t = 0; t < 8; ++t) {
                std::vector<int> o(static_cast<std::size_t>(2 * n - 2));
                for (auto& x : o) x = static_cast<int>(rng() & 1);
                auto r = project_and_reduce(mpo, plan, o);
                ASSERT_TRUE(r.valid);
                EXPECT_NEAR(negativity(r.rdm), 0.5, 1e-9);
            }
    }
}

TEST(Projection, DephasedStateHasNoNegativity) {
    LadderGraph g(3);
    DensityMatrix rho = ideal_cluster_mpo(g).to_dense();
    Matrix diag = rho.data().diagonal().asDiagonal();
    auto mpo = Mpo::from_dense(DensityMatrix(rho.sites(), diag));
    for (const auto& plan : enumerate_paths(g)) {
        for (std::size_t s = 0; s < 16; ++s) {
            std::vector<int> o(4);
            for (std::size_t i = 0; i < 4; ++i) o[i] = static_cast<int>((s >> i) & 1);
            auto r = project_and_reduce(mpo, plan, o);
            if (r.valid) EXPECT_EQ(negativity(r.rdm), 0.0);
        }
    }
}

TEST(Projection, MpoMatchesDenseOracle) {
    auto mpo = noisy_state(2, 1.0);
    auto dense = mpo.to_dense();
    for (const auto& plan : enumerate_paths(LadderGraph(2)))
        for (std::size_t s = 0; s < 4; ++s) {
            std::vector<int> o = {static_cast<int>(s & 1), static_cast<int>(s >> 1)};
            auto r = project_and_reduce(mpo, plan, o);
            auto [d, p] = dense_projection(dense, plan, o);
            EXPECT_NEAR(r.probability, p / dense.data().trace().real(), 1e-9);
            EXPECT_LT((r.rdm.data() - d.data()).norm(), 1e-9);
        }
    EXPECT_THROW(project_and_reduce(mpo, enumerate_paths(LadderGraph(2))[0], {0}), ConfigError);
}

TEST(LocalizableEntanglement, IdealIsHalfOnEveryPath) {
    for (int n : {2, 3, 5, 8}) {
        LEOptions o;
        o.samples = 64;
        auto r = localizable_entanglement(ideal_cluster_mpo(LadderGraph(n)), o);
        EXPECT_NEAR(r.mean, 0.5, 1e-9) << "n=" << n;
        double m = 0, v = 0;
        for (const auto& p : r.paths) m += p.mean / static_cast<double>(r.paths.size());
        for (const auto& p : r.paths) v += (p.mean - m) * (p.mean - m) / static_cast<double>(r.paths.size());
        EXPECT_LT(v, 1e-12);
    }
}

TEST(LocalizableEntanglement, ExhaustiveProbabilitiesSumToOne) {
    auto mpo = noisy_state(3, 1.0);
    LEOptions o;
    o.exhaustive = true;
    auto r = localizable_entanglement(mpo, o);
    EXPECT_TRUE(r.exhaustive);
    for (const auto& p : r.paths) EXPECT_NEAR(p.probability_sum, 1.0, 1e-9);
    EXPECT_GT(r.mean, 0.0);
    EXPECT_LT(r.mean, 0.5);
}

TEST(LocalizableEntanglement, SampledAgreesWithExhaustiveAtSixPhotons) {
    auto mpo = noisy_state(3, 1.0);
    LEOptions ex;
    ex.exhaustive = true;
    LEOptions sa;
    sa.auto_exhaustive = false;
    sa.samples = 1024;
    sa.seed = 11;
    const double e = localizable_entanglement(mpo, ex).mean;
    auto s = localizable_entanglement(mpo, sa);
    EXPECT_FALSE(s.exhaustive);
    EXPECT_NEAR(s.mean, e, 2 * s.stderr_);
    sa.sampling = OutcomeSampling::Uniform;
    auto u = localizable_entanglement(mpo, sa);
    EXPECT_NEAR(u.mean, e, 3 * u.stderr_);
}

TEST(LocalizableEntanglement, SamplingIsUnbiasedOnRandomNoisyStates) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> scale(0.5, 2.0);
    int outside = 0;
    for (int t = 0; t < 20; ++t) {
        auto mpo = noisy_state(4, scale(rng));
        LEOptions ex;
        ex.exhaustive = true;
        LEOptions sa;
        sa.auto_exhaustive = false;
        sa.samples = 1024;
        sa.seed = 100 + static_cast<std::uint64_t>(t);
        const double e = localizable_entanglement(mpo, ex).mean;
        auto s = localizable_entanglement(mpo, sa);
        if (std::abs(s.mean - e) > 3 * s.stderr_) ++outside;
    }
    EXPECT_EQ(outside, 0);
}

TEST(LocalizableEntanglement, DeterministicAndJobIndependent) {
    auto mpo = noisy_state(3, 1.0);
    LEOptions o;
    o.auto_exhaustive = false;
    o.samples = 128;
    o.seed = 4;
    auto a = localizable_entanglement(mpo, o);
    o.jobs = 3;
    auto b = localizable_entanglement(mpo, o);
    EXPECT_EQ(a.mean, b.mean);
    EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
}

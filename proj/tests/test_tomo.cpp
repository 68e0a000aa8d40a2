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
#include "ladder/tomo.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace ladder;

namespace {

DensityMatrix bell() {
    Vector v = Vector::Zero(4);
    v(0) = v(3) = 1.0 / std::sqrt(2.0);
    return DensityMatrix::from_pure(PureState(photon_sites(2), v));
}

MomentTable exact_table(const DensityMatrix& rho) {
    DetectionConfig c;
    c.mode = DetectionMode::AnalyticMoments;
    return measure_moments(rho, c);
}

DensityMatrix random_state(std::size_t n, std::uint64_t seed, Index rank) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    const Index d = Index(1) << n;
    Matrix a(d, rank);
    for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < rank; ++j) a(i, j) = cplx(g(rng), g(rng));
    Matrix r = a * a.adjoint();
    return {photon_sites(static_cast<int>(n)), r / r.trace()};
}

}  // namespace

TEST(Simplex, ProjectionMatchesBruteForce) {
    RealVector v(3);
    v << 0.9, 0.4, -0.3;
    RealVector p = project_simplex(v);
    EXPECT_NEAR(p.sum(), 1.0, 1e-15);
    // Closest simplex point: shift by 0.15 then clip.
    EXPECT_NEAR(p(0), 0.75, 1e-15);
    EXPECT_NEAR(p(1), 0.25, 1e-15);
    EXPECT_EQ(p(2), 0.0);
}

TEST(Mle, ExactBellMoments) {
    auto r = mle_from_moments(exact_table(bell()));
    EXPECT_GE(fidelity(r.rho, bell()), 1.0 - 1e-8);
    EXPECT_LT(r.objective, 1e-12);
}

TEST(Mle, ExactMaximallyMixed) {
    DensityMatrix mm(photon_sites(2), Matrix::Identity(4, 4) / 4.0);
    auto r = mle_from_moments(exact_table(mm));
    EXPECT_LT((r.rho.data() - mm.data()).norm(), 1e-8);
}

TEST(Mle, PhaseConventionMakesCoherencesReal) {
    Vector v(2);
    v << 1.0 / std::sqrt(2.0), cplx(0.0, 1.0 / std::sqrt(2.0));
    auto rho = DensityMatrix::from_pure(PureState({SiteLabel::photon(1)}, v));
    auto r = mle_from_moments(exact_table(rho));
    EXPECT_NEAR(r.rho.data()(0, 1).real(), 0.5, 1e-8);
    EXPECT_NEAR(r.rho.data()(0, 1).imag(), 0.0, 1e-12);
}

TEST(Mle, RejectsIncompleteTable) {
    auto t = exact_table(bell());
    t.entries.erase(MomentKey{1, 0, 0, 0});
    EXPECT_THROW(mle_from_moments(t), ConfigError);
}

TEST(Mle, RefitIsIdempotent) {
    for (std::uint64_t seed : {1, 2, 3}) {
        auto rho = random_state(2, seed, 2);
        auto first = mle_from_moments(exact_table(rho));
        auto second = mle_from_moments(exact_table(first.rho));
        EXPECT_GE(fidelity(first.rho, second.rho), 1.0 - 1e-8);
    }
}

TEST(Mle, SampledBellPairFromSimulation) {
    auto sim = simulate_dense(ProtocolSpec::bell_cnot(1, NoiseParams::all_errors()));
    DetectionConfig c;
    c.eta = 0.25;
    c.shots = 100000;
    c.seed = 7;
    auto r = mle_from_moments(measure_moments(sim, c));
    EXPECT_GE(fidelity(r.rho, sim), 0.95);
}

TEST(Rdms, SupportsCoverEveryVertex) {
    for (int n = 1; n <= 5; ++n) {
        LadderGraph g(n);
        auto s = rdm_supports(g);
        ASSERT_EQ(s.size(), static_cast<std::size_t>(2 * n));
        for (int v = 1; v <= 2 * n; ++v) {
            EXPECT_EQ(s[static_cast<std::size_t>(v - 1)].size(), static_cast<std::size_t>(std::min(4, 2 * n)));
            for (int u : g.closed_neighborhood(v))
                EXPECT_NE(std::find(s[static_cast<std::size_t>(v - 1)].begin(), s[static_cast<std::size_t>(v - 1)].end(),
                                    SiteLabel::photon(u)),
                          s[static_cast<std::size_t>(v - 1)].end());
        }
    }
}

TEST(Rdms, MpoAndDensePathsAgree) {
    LadderGraph g(2);
    auto psi = ideal_cluster_state(g);
    auto dense = local_rdms_from_state(DensityMatrix::from_pure(psi), g);
    auto mpo = local_rdms_from_state(ideal_cluster_mpo(g), g);
    for (std::size_t i = 0; i < dense.size(); ++i) {
        const Matrix& a = dense[i].rdm.data();
        EXPECT_NEAR((a * a).trace().real(), (mpo[i].rdm.data() * mpo[i].rdm.data()).trace().real(), 1e-12);
        EXPECT_LT((a - mpo[i].rdm.data()).norm(), 1e-12);
    }
}

TEST(Rdms, ProductStateGivesProductRdms) {
    LadderGraph g(3);
    Vector plus(2);
    plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    std::vector<Matrix> f(6, Matrix(plus * plus.adjoint()));
    DensityMatrix rho(g.sites(), kron_le(f));
    for (const auto& r : local_rdms_from_state(rho, g)) {
        std::vector<Matrix> g4(4, Matrix(plus * plus.adjoint()));
        EXPECT_LT((r.rdm.data() - kron_le(g4)).norm(), 1e-12);
    }
}

TEST(Reconstruct, SingleRungPassesThrough) {
    LadderGraph g(1);
    auto rho = random_state(2, 5, 4);
    auto rep = reconstruct_mpo(local_rdms_from_state(rho, g), g);
    EXPECT_LT((rep.mpo.to_dense().data() - rho.data()).norm(), 1e-10);
}

TEST(Reconstruct, IdealThreeRungClusterIsUnique) {
    LadderGraph g(3);
    auto rdms = local_rdms_from_state(ideal_cluster_mpo(g), g);
    auto rep = reconstruct_mpo(rdms, g);
    EXPECT_GE(rep.mpo.fidelity(ideal_cluster_mps(g)), 0.99);
    for (std::size_t i = 1; i < rep.log_likelihood.size(); ++i)
        EXPECT_GE(rep.log_likelihood[i], rep.log_likelihood[i - 1]);
    for (const auto& r : rdms)
        EXPECT_LE(trace_distance(rep.mpo.reduced(r.support).data(), r.rdm.data()), 0.05);
    EXPECT_TRUE(rep.warnings.empty());
}

TEST(Reconstruct, ProductStateIsRecovered) {
    LadderGraph g(3);
    Vector plus(2);
    plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    std::vector<Matrix> f(6, Matrix(plus * plus.adjoint()));
    DensityMatrix rho(g.sites(), kron_le(f));
    auto rep = reconstruct_mpo(local_rdms_from_state(rho, g), g);
    EXPECT_GE(fidelity(rep.mpo.to_dense(), rho), 0.99);
}

TEST(Reconstruct, NoisyStateRdmsAreConsistent) {
    auto spec = ProtocolSpec::full(3, NoiseParams::all_errors());
    auto rho = simulate_dense(spec);
    LadderGraph g(3);
    auto rdms = local_rdms_from_state(rho, g);
    auto rep = reconstruct_mpo(rdms, g);
    EXPECT_NEAR(rep.mpo.trace(), 1.0, 1e-10);
    for (const auto& r : rdms)
        EXPECT_LE(trace_distance(rep.mpo.reduced(r.support).data(), r.rdm.data()), 0.05);
}

TEST(Reconstruct, IncompatibleRdmsWarn) {
    LadderGraph g(2);
    auto rdms = local_rdms_from_state(ideal_cluster_mpo(g), g);
    rdms[0].rdm = DensityMatrix(rdms[0].support, Matrix::Identity(16, 16) / 16.0);
    auto rep = reconstruct_mpo(rdms, g);
    EXPECT_FALSE(rep.warnings.empty());
}

TEST(Reconstruct, ReportJson) {
    LadderGraph g(3);
    auto rdms = local_rdms_from_state(ideal_cluster_mpo(g), g);
    auto back = rdm_set_from_json(to_json(rdms));
    ASSERT_EQ(back.size(), rdms.size());
    EXPECT_EQ(back[1].support, rdms[1].support);
    ReconstructionOptions o;
    o.max_iter = 3;
    auto j = to_json(reconstruct_mpo(rdms, g, o));
    EXPECT_EQ(j.at("iterations").get<int>(), 3);
    EXPECT_TRUE(j.contains("residuals"));
}

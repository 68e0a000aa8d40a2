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

#include "ladder/measure.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <random>

using namespace ladder;

namespace {

DensityMatrix fock1() { return DensityMatrix::from_pure(PureState::basis({SiteLabel::photon(1)}, 1)); }

DensityMatrix vacuum1() { return DensityMatrix::from_pure(PureState::basis({SiteLabel::photon(1)}, 0)); }

DensityMatrix random_modes(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    const Index d = Index(1) << n;
    Matrix a(d, d);
    for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < d; ++j) a(i, j) = cplx(g(rng), g(rng));
    Matrix r = a * a.adjoint();
    return {photon_sites(static_cast<int>(n)), r / r.trace()};
}

struct Stats {
    double mean, sem;
};

Stats abs2_stats(const ShotRecord& rec, std::size_t mode) {
    double s = 0, s2 = 0;
    const double n = static_cast<double>(rec.shots());
    for (std::size_t i = 0; i < rec.shots(); ++i) {
        double v = std::norm(rec.at(i, mode));
        s += v;
        s2 += v * v;
    }
    double mean = s / n;
    return {mean, std::sqrt((s2 / n - mean * mean) / n)};
}

DetectionConfig cfg_with(double eta, std::size_t shots, std::uint64_t seed, int order = 1) {
    DetectionConfig c;
    c.eta = eta;
    c.shots = shots;
    c.seed = seed;
    c.order = order;
    return c;
}

}  // namespace

TEST(Heterodyne, VacuumQFunction) {
    auto rec = sample_heterodyne(vacuum1(), cfg_with(1.0, 100000, 1));
    auto st = abs2_stats(rec, 0);
    EXPECT_NEAR(st.mean, 1.0, 3 * st.sem);
}

TEST(Heterodyne, SinglePhotonQFunction) {
    auto rec = sample_heterodyne(fock1(), cfg_with(1.0, 100000, 2));
    auto st = abs2_stats(rec, 0);
    EXPECT_NEAR(st.mean, 2.0, 3 * st.sem);
}

TEST(Heterodyne, AddedNoiseScalesVariance) {
    auto rec = sample_heterodyne(vacuum1(), cfg_with(0.25, 100000, 3));
    auto st = abs2_stats(rec, 0);
    EXPECT_NEAR(st.mean, 4.0, 3 * st.sem);
}

TEST(Heterodyne, DeterministicAndJobIndependent) {
    auto c = cfg_with(0.5, 10000, 9);
    auto a = sample_heterodyne(random_modes(2, 4), c);
    c.jobs = 3;
    auto b = sample_heterodyne(random_modes(2, 4), c);
    EXPECT_EQ(a.data, b.data);
    c.seed = 10;
    EXPECT_NE(sample_heterodyne(random_modes(2, 4), c).data, a.data);
}

TEST(Heterodyne, RejectsTooManyModes) {
    EXPECT_THROW(sample_heterodyne(random_modes(5, 1), cfg_with(1.0, 10, 1)), CapacityError);
    DetectionConfig bad;
    bad.eta = 0.0;
    EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(Deconvolution, ClosedFormSingleModeCoefficients) {
    const double sigma = 4.0;
    Deconvolver dc(1, 2, NoiseReference::thermal({sigma}));
    // Inverse of the thermal binomial system: sum_k C(s,k) C(t,k) k! (-sigma)^k m(t-k, s-k).
    const auto& keys = dc.keys();
    for (std::size_t i = 0; i < keys.size(); ++i) {
        const int t = keys[i][0], s = keys[i][1];
        std::map<std::size_t, cplx> want;
        for (int k = 0; k <= std::min(t, s); ++k) {
            double c = 1.0;
            for (int q = 0; q < k; ++q) c *= static_cast<double>((s - q) * (t - q)) / (q + 1);
            MomentKey sub = {t - k, s - k};
            std::size_t j = std::find(keys.begin(), keys.end(), sub) - keys.begin();
            want[j] = c * std::pow(-sigma, k);
        }
        ASSERT_EQ(dc.coefficients(i).size(), want.size());
        for (const auto& [j, v] : want) EXPECT_NEAR(std::abs(dc.coefficients(i).at(j) - v), 0.0, 1e-12);
    }
}

TEST(Deconvolution, AnalyticModeIsExact) {
    for (double eta : {1.0, 0.5, 0.25}) {
        for (std::size_t nm = 1; nm <= 3; ++nm) {
            auto rho = random_modes(nm, 20 + nm);
            auto cfg = cfg_with(eta, 1, 1, nm == 1 ? 2 : 1);
            cfg.mode = DetectionMode::AnalyticMoments;
            auto t = measure_moments(rho, cfg);
            for (const auto& [k, e] : t.entries)
                EXPECT_NEAR(std::abs(e.mean - normal_moment(rho, k)), 0.0, 1e-12) << key_string(k) << " eta=" << eta;
        }
    }
}

TEST(Deconvolution, SinglePhotonAnalytic) {
    auto cfg = cfg_with(1.0, 1, 1, 2);
    cfg.mode = DetectionMode::AnalyticMoments;
    auto t = measure_moments(fock1(), cfg);
    EXPECT_NEAR(std::abs(t.mean({1, 1}) - 1.0), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(t.mean({0, 1})), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(t.mean({2, 2})), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(t.mean({0, 0}) - 1.0), 0.0, 1e-15);
}

TEST(Deconvolution, PreparationAngleSweep) {
    auto cfg = cfg_with(0.25, 1, 1);
    cfg.mode = DetectionMode::AnalyticMoments;
    for (int i = 0; i <= 8; ++i) {
        const double th = kPi * i / 8.0;
        auto t = measure_moments(prepared_photon(th), cfg);
        EXPECT_NEAR(t.mean({0, 1}).real(), std::sin(th) / 2, 1e-12);
        EXPECT_NEAR(t.mean({1, 1}).real(), std::sin(th / 2) * std::sin(th / 2), 1e-12);
    }
}

TEST(Deconvolution, SampledTwoModeMomentsWithinErrors) {
    Vector v = Vector::Zero(4);
    v(1) = v(2) = 1.0 / std::sqrt(2.0);  // photon in one of two modes
    auto rho = DensityMatrix::from_pure(PureState(photon_sites(2), v));
    auto cfg = cfg_with(0.5, 100000, 31);
    auto t = measure_moments(rho, cfg);
    EXPECT_NEAR(std::abs(t.mean({0, 0, 0, 0}) - 1.0), 0.0, 1e-12);
    for (const auto& [k, e] : t.entries) {
        const cplx want = normal_moment(rho, k);
        EXPECT_LE(std::abs(e.mean - want), 4.0 * std::sqrt(e.variance) + 1e-12) << key_string(k);
        // Conjugation symmetry of the table.
        MomentKey swapped = k;
        for (std::size_t m = 0; m < 2; ++m) std::swap(swapped[2 * m], swapped[2 * m + 1]);
        EXPECT_NEAR(std::abs(t.mean(swapped) - std::conj(e.mean)), 0.0, 1e-12);
    }
}

TEST(Deconvolution, EmpiricalNoiseReferenceAgreesWithThermal) {
    auto cfg = cfg_with(0.25, 200000, 41);
    auto rec = sample_heterodyne(fock1(), cfg);
    auto cfg_v = cfg;
    cfg_v.seed = 42;
    auto vac = sample_vacuum({SiteLabel::photon(1)}, cfg_v);
    auto thermal = extract_moments(rec, NoiseReference::thermal({4.0}), 1);
    auto empirical = extract_moments(rec, NoiseReference::empirical(vac, 1), 1);
    const double sd = std::sqrt(thermal.at({1, 1}).variance * 2.0);
    EXPECT_NEAR(empirical.mean({1, 1}).real(), thermal.mean({1, 1}).real(), 4 * sd);
    EXPECT_NEAR(thermal.mean({1, 1}).real(), 1.0, 4 * std::sqrt(thermal.at({1, 1}).variance));
}

TEST(Deconvolution, PerShotVarianceMatchesPrediction) {
    // Var(|x|^2) for Fock 1 with sigma = 1/eta: m22 - m11^2 = 4 sigma + 2 sigma^2 - (1 + sigma)^2.
    for (double eta : {1.0, 0.5, 0.25}) {
        const double s = 1.0 / eta;
        const double want = 4 * s + 2 * s * s - (1 + s) * (1 + s);
        auto t = measure_moments(fock1(), cfg_with(eta, 200000, 50));
        EXPECT_NEAR(t.at({1, 1}).variance * 200000.0 / want, 1.0, 0.05) << "eta=" << eta;
    }
}

TEST(Deconvolution, EstimatorVarianceShrinksWithShots) {
    auto spread = [](std::size_t shots) {
        std::vector<double> v;
        for (std::uint64_t r = 0; r < 10; ++r)
            v.push_back(measure_moments(fock1(), cfg_with(0.5, shots, 100 + r)).mean({1, 1}).real());
        double m = 0;
        for (double x : v) m += x / 10;
        double var = 0;
        for (double x : v) var += (x - m) * (x - m) / 9;
        return var;
    };
    const double ratio = spread(2000) / spread(16000);
    EXPECT_GT(ratio, 2.0);
    EXPECT_LT(ratio, 32.0);
}

TEST(Calibration, RecoversInjectedGain) {
    for (double gain : {1.0, 2.0}) {
        for (double eta : {1.0, 0.25}) {
            auto cfg = cfg_with(eta, 400000, 60);
            cfg.scale = gain;
            auto ref = sample_heterodyne(fock1(), cfg);
            cfg.seed = 61;
            auto vac = sample_vacuum({SiteLabel::photon(1)}, cfg);
            EXPECT_NEAR(calibrate_scale(ref, vac).real() / gain, 1.0, 0.01) << "gain " << gain << " eta " << eta;
        }
    }
    auto vac = sample_vacuum({SiteLabel::photon(1)}, cfg_with(1.0, 1000, 1));
    EXPECT_THROW(calibrate_scale(vac, vac), NumericalError);
}

TEST(Io, ShotsAndMomentTablesRoundTrip) {
    auto rec = sample_heterodyne(random_modes(2, 3), cfg_with(0.5, 100, 5));
    auto dir = std::filesystem::temp_directory_path() / "ladder_measure_io";
    std::filesystem::create_directories(dir);
    const std::string path = (dir / "shots.bin").string();
    write_shots(path, rec);
    auto back = read_shots(path);
    EXPECT_EQ(back.data, rec.data);
    EXPECT_EQ(back.modes, rec.modes);
    EXPECT_EQ(back.eta, rec.eta);
    auto t = extract_moments(rec, NoiseReference::thermal({2.0, 2.0}), 1);
    auto t2 = moment_table_from_json(to_json(t));
    EXPECT_EQ(t2.entries.size(), t.entries.size());
    EXPECT_EQ(t2.mean({1, 0, 0, 1}), t.mean({1, 0, 0, 1}));
    std::filesystem::remove_all(dir);
}

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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <random>
#include <string>
#include <thread>
#include <vector>

namespace ladder {

inline constexpr std::size_t kMaxModes = 4;

enum class DetectionMode { ShotSampling, AnalyticMoments };

/// Heterodyne detection chain. All added noise is folded into one thermal
/// mode of 1/eta - 1 photons referenced to the signal plane.
struct DetectionConfig {
    double eta = 1.0;
    cplx scale = 1.0;
    std::size_t shots = 100000;
    std::uint64_t seed = 1;
    DetectionMode mode = DetectionMode::ShotSampling;
    double snr = 0.0;  // analytic mode: variance = |mean|^2 / snr when > 0
    int order = 1;     // per-mode moment order (1 joint, 2 single-mode)
    unsigned jobs = 1;

    double noise_photons() const { return 1.0 / eta - 1.0; }
    /// <h h^dagger> of the effective noise mode (vacuum unit included).
    double sigma() const { return 1.0 / eta; }

    void validate() const {
        if (!(eta > 0.0 && eta <= 1.0)) throw ConfigError("eta must lie in (0, 1]");
        if (shots < 1) throw ConfigError("shots must be >= 1");
        if (std::abs(scale) == 0.0) throw ConfigError("scale must be nonzero");
        if (order < 1 || order > 2) throw ConfigError("moment order must be 1 or 2");
        if (snr < 0.0) throw ConfigError("snr must be >= 0");
    }
};

/// Complex heterodyne outcomes, one row per shot and one column per mode.
struct ShotRecord {
    SiteList modes;
    std::vector<cplx> data;  // shot-major
    double eta = 1.0;
    cplx scale = 1.0;
    std::uint64_t seed = 0;

    std::size_t num_modes() const { return modes.size(); }
    std::size_t shots() const { return modes.empty() ? 0 : data.size() / modes.size(); }
    cplx at(std::size_t shot, std::size_t mode) const { return data[shot * modes.size() + mode]; }
};

namespace detail {

inline constexpr std::size_t kShotBlock = 4096;

inline std::mt19937_64 block_rng(std::uint64_t seed, std::uint64_t block) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32), 0x6d656173u};
    return std::mt19937_64(seq);
}

inline void check_modes(const DensityMatrix& rdm) {
    if (rdm.sites().empty()) throw ConfigError("no modes to measure");
    if (rdm.sites().size() > kMaxModes)
        throw CapacityError("heterodyne sampling supports at most " + std::to_string(kMaxModes) + " modes, got " +
                            std::to_string(rdm.sites().size()));
    for (const auto& s : rdm.sites())
        if (s.dim() != 2) throw ConfigError("mode " + s.str() + " is not a single-photon-truncated photon");
}

template <class F>
void for_blocks(std::size_t shots, unsigned jobs, F&& body) {
    const std::size_t nblocks = (shots + kShotBlock - 1) / kShotBlock;
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(nblocks)));
    if (jobs == 1) {
        for (std::size_t b = 0; b < nblocks; ++b) body(b);
        return;
    }
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j)
        pool.emplace_back([&, j] {
            for (std::size_t b = j; b < nblocks; b += jobs) body(b);
        });
    for (auto& t : pool) t.join();
}

}  // namespace detail

/// Draw heterodyne outcomes scale * (alpha + xi), alpha from the Husimi Q
/// function of `rdm` and xi circular Gaussian with 1/eta - 1 photons.
inline ShotRecord sample_heterodyne(const DensityMatrix& rdm, const DetectionConfig& cfg) {
    cfg.validate();
    detail::check_modes(rdm);
    const std::size_t nm = rdm.sites().size();
    const Index dim = rdm.dim();
    // Q(alpha) = pi^-N exp(-|alpha|^2) u^dagger rho u with u_n = prod alpha_m^{n_m}.
    // Proposal per mode: (1/2pi) exp(-|a|^2) (1 + |a|^2), i.e. |a|^2 from an
    // equal mixture of Exp(1) and Gamma(2, 1). The acceptance ratio is
    // u^dagger rho u / (lambda_max prod (1 + |a_m|^2)) <= 1.
    const Matrix& rho = rdm.data();
    const double lmax = std::max(rdm.eigenvalues().maxCoeff(), 1e-300);
    const double noise_sd = std::sqrt(cfg.noise_photons() / 2.0);

    ShotRecord rec;
    rec.modes = rdm.sites();
    rec.data.resize(cfg.shots * nm);
    rec.eta = cfg.eta;
    rec.scale = cfg.scale;
    rec.seed = cfg.seed;

    detail::for_blocks(cfg.shots, cfg.jobs, [&](std::size_t block) {
        auto rng = detail::block_rng(cfg.seed, block);
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        std::exponential_distribution<double> ex(1.0);
        std::gamma_distribution<double> ga(2.0, 1.0);
        std::normal_distribution<double> gauss(0.0, 1.0);
        std::vector<cplx> alpha(nm);
        Vector u(dim);
        const std::size_t begin = block * detail::kShotBlock;
        const std::size_t end = std::min(cfg.shots, begin + detail::kShotBlock);
        for (std::size_t s = begin; s < end; ++s) {
            for (;;) {
                double env = 1.0;
                for (std::size_t m = 0; m < nm; ++m) {
                    const double r2 = uni(rng) < 0.5 ? ex(rng) : ga(rng);
                    const double ph = 2.0 * kPi * uni(rng);
                    alpha[m] = std::polar(std::sqrt(r2), ph);
                    env *= 1.0 + r2;
                }
                for (Index n = 0; n < dim; ++n) {
                    cplx v = 1.0;
                    for (std::size_t m = 0; m < nm; ++m)
                        if ((n >> m) & 1) v *= alpha[m];
                    u(n) = v;
                }
                const double f = (u.adjoint() * rho * u)(0, 0).real();
                if (uni(rng) * lmax * env <= f) break;
            }
            for (std::size_t m = 0; m < nm; ++m) {
                cplx xi = noise_sd > 0 ? cplx(noise_sd * gauss(rng), noise_sd * gauss(rng)) : cplx(0.0);
                rec.data[s * nm + m] = cfg.scale * (alpha[m] + xi);
            }
        }
    });
    return rec;
}

/// Outcomes of a vacuum (noise-reference) run on `modes`.
inline ShotRecord sample_vacuum(const SiteList& modes, const DetectionConfig& cfg) {
    std::vector<Matrix> locals(modes.size(), Matrix::Zero(2, 2));
    for (auto& l : locals) l(0, 0) = 1.0;
    return sample_heterodyne(product_state(modes, locals), cfg);
}

// ---------------------------------------------------------------------------
// Moments.

/// Multi-index [t1, s1, t2, s2, ...]: <prod a_m^dagger^{t_m} a_m^{s_m}>.
using MomentKey = std::vector<int>;

struct MomentEntry {
    cplx mean = 0.0;
    double variance = 0.0;
};

/// Normally ordered photonic moments with their estimator variances.
struct MomentTable {
    SiteList modes;
    int order = 1;
    std::map<MomentKey, MomentEntry> entries;

    const MomentEntry& at(const MomentKey& k) const {
        auto it = entries.find(k);
        if (it == entries.end()) throw ConfigError("moment not in table");
        return it->second;
    }
    cplx mean(const MomentKey& k) const { return at(k).mean; }
};

/// All keys with entries in [0, order] over `modes` modes.
inline std::vector<MomentKey> moment_keys(std::size_t modes, int order) {
    std::vector<MomentKey> keys;
    MomentKey k(2 * modes, 0);
    for (;;) {
        keys.push_back(k);
        std::size_t i = 0;
        while (i < k.size() && k[i] == order) k[i++] = 0;
        if (i == k.size()) break;
        ++k[i];
    }
    return keys;
}

inline std::string key_string(const MomentKey& k) {
    std::string s;
    for (std::size_t m = 0; m < k.size() / 2; ++m) {
        if (!s.empty()) s += " ";
        s += "a" + std::to_string(m + 1) + "^+" + std::to_string(k[2 * m]) + " a" + std::to_string(m + 1) + "^" +
             std::to_string(k[2 * m + 1]);
    }
    return s;
}

/// Exact <prod a^dagger^t a^s> of a single-photon-truncated state.
inline cplx normal_moment(const DensityMatrix& rdm, const MomentKey& key) {
    const std::size_t nm = rdm.sites().size();
    std::vector<Matrix> ops;
    for (std::size_t m = 0; m < nm; ++m) {
        Matrix a = Matrix::Zero(2, 2);
        a(0, 1) = 1.0;
        Matrix op = Matrix::Identity(2, 2);
        for (int i = 0; i < key[2 * m]; ++i) op = op * a.adjoint();
        for (int i = 0; i < key[2 * m + 1]; ++i) op = op * a;
        ops.push_back(op);
    }
    return (rdm.data() * kron_le(ops)).trace();
}

namespace detail {

inline double binom(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

inline double factorial(int n) {
    double r = 1.0;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

/// conj(x)^t x^s summed over modes of one shot.
inline cplx monomial(const cplx* x, const MomentKey& k) {
    cplx v = 1.0;
    for (std::size_t m = 0; m < k.size() / 2; ++m) {
        const cplx c = std::conj(x[m]);
        for (int i = 0; i < k[2 * m]; ++i) v *= c;
        for (int i = 0; i < k[2 * m + 1]; ++i) v *= x[m];
    }
    return v;
}

inline std::size_t key_index(const MomentKey& k, int order) {
    std::size_t idx = 0, mul = 1;
    for (int v : k) {
        idx += static_cast<std::size_t>(v) * mul;
        mul *= static_cast<std::size_t>(order + 1);
    }
    return idx;
}

}  // namespace detail

/// Moments <prod h^k h^dagger^l> of the added noise, keyed like MomentKey
/// with (k, l) in place of (t, s).
class NoiseReference {
public:
    /// Thermal noise with <h h^dagger> = sigma per mode.
    static NoiseReference thermal(std::vector<double> sigmas) {
        NoiseReference r;
        r.sigmas_ = std::move(sigmas);
        return r;
    }
    /// Empirical noise moments from a vacuum run (already divided by scale).
    static NoiseReference empirical(const ShotRecord& vacuum, int order, cplx scale = 1.0) {
        NoiseReference r;
        r.order_ = order;
        const std::size_t nm = vacuum.num_modes();
        auto keys = moment_keys(nm, order);
        r.table_.assign(keys.size(), 0.0);
        std::vector<cplx> x(nm);
        for (std::size_t s = 0; s < vacuum.shots(); ++s) {
            for (std::size_t m = 0; m < nm; ++m) x[m] = vacuum.at(s, m) / scale;
            for (std::size_t i = 0; i < keys.size(); ++i) r.table_[i] += detail::monomial(x.data(), keys[i]);
        }
        for (auto& v : r.table_) v /= static_cast<double>(vacuum.shots());
        r.modes_ = nm;
        return r;
    }

    cplx moment(const MomentKey& kl) const {
        if (!sigmas_.empty()) {
            cplx v = 1.0;
            for (std::size_t m = 0; m < kl.size() / 2; ++m) {
                if (kl[2 * m] != kl[2 * m + 1]) return 0.0;
                v *= detail::factorial(kl[2 * m]) * std::pow(sigmas_.at(m), kl[2 * m]);
            }
            return v;
        }
        return table_.at(detail::key_index(kl, order_));
    }

    bool is_thermal() const { return !sigmas_.empty(); }

private:
    std::vector<double> sigmas_;
    std::vector<cplx> table_;
    int order_ = 1;
    std::size_t modes_ = 0;
};

/// Coefficients c with <a^+ ... a ...>(key) = sum_j c_j m(keys_j), obtained by
/// solving the triangular binomial system
///   m(T, S) = sum_{I <= T, J <= S} prod C(t,i) C(s,j) A(I, J) N(T - I, S - J).
class Deconvolver {
public:
    Deconvolver(std::size_t modes, int order, const NoiseReference& noise)
        : modes_(modes), order_(order), keys_(moment_keys(modes, order)) {
        coeffs_.resize(keys_.size());
        // Keys sorted by total degree so that every sub-key is solved first.
        std::vector<std::size_t> idx(keys_.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        auto deg = [&](std::size_t i) {
            int d = 0;
            for (int v : keys_[i]) d += v;
            return d;
        };
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return deg(a) < deg(b); });
        const cplx n0 = noise.moment(MomentKey(2 * modes, 0));
        if (std::abs(n0) < 1e-300) throw NumericalError("singular deconvolution system");
        for (std::size_t i : idx) {
            const MomentKey& ts = keys_[i];
            std::map<std::size_t, cplx> c;
            c[i] = 1.0;
            for (const MomentKey& ij : sub_keys(ts)) {
                if (ij == ts) continue;
                MomentKey diff(ts.size());
                double w = 1.0;
                for (std::size_t q = 0; q < ts.size(); ++q) {
                    diff[q] = ts[q] - ij[q];
                    w *= detail::binom(ts[q], ij[q]);
                }
                const cplx nz = noise.moment(diff);
                if (nz == cplx(0.0)) continue;
                for (const auto& [j, v] : coeffs_[detail::key_index(ij, order_)]) c[j] -= w * nz * v;
            }
            for (auto& [j, v] : c) v /= n0;
            coeffs_[i] = std::move(c);
        }
    }

    const std::vector<MomentKey>& keys() const { return keys_; }
    const std::map<std::size_t, cplx>& coefficients(std::size_t key) const { return coeffs_[key]; }

    /// Normally ordered moments from measured (antinormal + noise) ones.
    std::vector<cplx> solve(const std::vector<cplx>& measured) const {
        std::vector<cplx> out(keys_.size(), 0.0);
        for (std::size_t i = 0; i < keys_.size(); ++i)
            for (const auto& [j, v] : coeffs_[i]) out[i] += v * measured[j];
        return out;
    }

private:
    std::vector<MomentKey> sub_keys(const MomentKey& k) const {
        std::vector<MomentKey> out;
        MomentKey cur(k.size(), 0);
        for (;;) {
            out.push_back(cur);
            std::size_t i = 0;
            while (i < cur.size() && cur[i] == k[i]) cur[i++] = 0;
            if (i == cur.size()) break;
            ++cur[i];
        }
        return out;
    }

    std::size_t modes_;
    int order_;
    std::vector<MomentKey> keys_;
    std::vector<std::map<std::size_t, cplx>> coeffs_;
};

/// Deconvolve shot records into normally ordered photonic moments. Variances
/// are the per-shot estimator variances divided by the shot count (noise
/// reference treated as exact).
inline MomentTable extract_moments(const ShotRecord& shots, const NoiseReference& noise, int order,
                                   cplx scale = 1.0) {
    if (shots.shots() < 1) throw ConfigError("empty shot record");
    const std::size_t nm = shots.num_modes();
    Deconvolver dc(nm, order, noise);
    const auto& keys = dc.keys();
    const std::size_t nk = keys.size();
    std::vector<cplx> sum(nk, 0.0);
    std::vector<double> sum2(nk, 0.0);
    std::vector<cplx> mono(nk), x(nm);
    for (std::size_t s = 0; s < shots.shots(); ++s) {
        for (std::size_t m = 0; m < nm; ++m) x[m] = shots.at(s, m) / scale;
        for (std::size_t i = 0; i < nk; ++i) mono[i] = detail::monomial(x.data(), keys[i]);
        for (std::size_t i = 0; i < nk; ++i) {
            cplx a = 0.0;
            for (const auto& [j, v] : dc.coefficients(i)) a += v * mono[j];
            sum[i] += a;
            sum2[i] += std::norm(a);
        }
    }
    const double n = static_cast<double>(shots.shots());
    MomentTable t;
    t.modes = shots.modes;
    t.order = order;
    for (std::size_t i = 0; i < nk; ++i) {
        const cplx mean = sum[i] / n;
        const double var = n > 1 ? std::max(0.0, (sum2[i] - n * std::norm(mean)) / (n - 1)) : 0.0;
        t.entries[keys[i]] = {mean, var / n};
    }
    return t;
}

/// Measured moments E[conj(x)^t x^s] (x in signal units) predicted exactly:
/// antinormally ordered moments in a Fock space large enough for the order,
/// convolved with the excess thermal noise.
inline std::vector<cplx> predicted_measured_moments(const DensityMatrix& rdm, double eta, int order) {
    detail::check_modes(rdm);
    const std::size_t nm = rdm.sites().size();
    const Index d = 2 + order;  // a^s a^+^t on |1> reaches |1 + t>
    std::vector<Index> dims(nm, d);
    // Embed rho into the larger per-mode Fock space.
    Index big = 1;
    for (std::size_t m = 0; m < nm; ++m) big *= d;
    Matrix rho = Matrix::Zero(big, big);
    auto embed = [&](Index n) {
        Index r = 0, mul = 1;
        for (std::size_t m = 0; m < nm; ++m) {
            r += ((n >> m) & 1) * mul;
            mul *= d;
        }
        return r;
    };
    for (Index i = 0; i < rdm.dim(); ++i)
        for (Index j = 0; j < rdm.dim(); ++j) rho(embed(i), embed(j)) = rdm.data()(i, j);
    Matrix a = Matrix::Zero(d, d);
    for (Index n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));

    auto keys = moment_keys(nm, order);
    std::vector<cplx> anti(keys.size());
    for (std::size_t i = 0; i < keys.size(); ++i) {
        std::vector<Matrix> ops;
        for (std::size_t m = 0; m < nm; ++m) {
            Matrix op = Matrix::Identity(d, d);
            for (int q = 0; q < keys[i][2 * m + 1]; ++q) op = op * a;
            for (int q = 0; q < keys[i][2 * m]; ++q) op = op * a.adjoint();
            ops.push_back(op);
        }
        anti[i] = (rho * kron_le(ops)).trace();
    }
    const double nbar = 1.0 / eta - 1.0;
    std::vector<cplx> out(keys.size(), 0.0);
    for (std::size_t i = 0; i < keys.size(); ++i) {
        const MomentKey& ts = keys[i];
        for (std::size_t j = 0; j < keys.size(); ++j) {
            const MomentKey& ij = keys[j];
            double w = 1.0;
            for (std::size_t m = 0; m < nm && w != 0.0; ++m) {
                const int kt = ts[2 * m] - ij[2 * m], ks = ts[2 * m + 1] - ij[2 * m + 1];
                if (kt < 0 || ks < 0 || kt != ks) {
                    w = 0.0;
                    break;
                }
                w *= detail::binom(ts[2 * m], ij[2 * m]) * detail::binom(ts[2 * m + 1], ij[2 * m + 1]) *
                     detail::factorial(kt) * std::pow(nbar, kt);
            }
            if (w != 0.0) out[i] += w * anti[j];
        }
    }
    return out;
}

/// Analytic-mode moment table: exact measured moments deconvolved with the
/// thermal reference of the same eta.
inline MomentTable analytic_moments(const DensityMatrix& rdm, const DetectionConfig& cfg) {
    cfg.validate();
    const std::size_t nm = rdm.sites().size();
    auto measured = predicted_measured_moments(rdm, cfg.eta, cfg.order);
    Deconvolver dc(nm, cfg.order, NoiseReference::thermal(std::vector<double>(nm, cfg.sigma())));
    auto a = dc.solve(measured);
    MomentTable t;
    t.modes = rdm.sites();
    t.order = cfg.order;
    for (std::size_t i = 0; i < a.size(); ++i)
        t.entries[dc.keys()[i]] = {a[i], cfg.snr > 0 ? std::norm(a[i]) / cfg.snr : 0.0};
    return t;
}

/// Moments of `rdm` under `cfg`, by sampling or analytically.
inline MomentTable measure_moments(const DensityMatrix& rdm, const DetectionConfig& cfg) {
    if (cfg.mode == DetectionMode::AnalyticMoments) return analytic_moments(rdm, cfg);
    auto rec = sample_heterodyne(rdm, cfg);
    return extract_moments(rec, NoiseReference::thermal(std::vector<double>(rdm.sites().size(), cfg.sigma())),
                           cfg.order, cfg.scale);
}

/// Gain magnitude from a nominal single-photon reference and a vacuum run
/// recorded through the same chain: sqrt of the raw <a^+ a>.
inline cplx calibrate_scale(const ShotRecord& reference, const ShotRecord& vacuum) {
    if (reference.num_modes() != 1 || vacuum.num_modes() != 1)
        throw ConfigError("scale calibration uses single-mode records");
    auto noise = NoiseReference::empirical(vacuum, 1);
    auto t = extract_moments(reference, noise, 1);
    const double n = t.mean({1, 1}).real();
    if (!(n > 3.0 * std::sqrt(t.at({1, 1}).variance)) || !(n > 0.0))
        throw NumericalError("reference carries no power above the noise floor");
    return std::sqrt(n);
}

/// Second-order correlation <a^+2 a^2> / <a^+ a>^2 from an order-2 table.
inline double g2(const MomentTable& t) {
    if (t.order < 2 || t.modes.size() != 1) throw ConfigError("g2 needs a single-mode order-2 table");
    const double n = t.mean({1, 1}).real();
    if (!(std::abs(n) > 0)) throw NumericalError("g2 undefined for zero photon number");
    return t.mean({2, 2}).real() / (n * n);
}

/// State of a photon emitted from a qubit prepared at polar angle theta.
inline DensityMatrix prepared_photon(double theta, const SiteLabel& mode = SiteLabel::photon(1)) {
    Vector v(2);
    v << std::cos(theta / 2), std::sin(theta / 2);
    return DensityMatrix::from_pure(PureState({mode}, v));
}

// ---------------------------------------------------------------------------
// Serialization.

inline json to_json(const MomentTable& t) {
    json entries = json::array();
    for (const auto& [k, e] : t.entries)
        entries.push_back({{"key", k}, {"mean", complex_to_json(e.mean)}, {"variance", e.variance}});
    return {{"modes", sites_to_json(t.modes)}, {"order", t.order}, {"moments", entries}};
}

inline MomentTable moment_table_from_json(const json& j) {
    MomentTable t;
    t.modes = sites_from_json(j.at("modes"));
    t.order = j.at("order").get<int>();
    for (const auto& e : j.at("moments"))
        t.entries[e.at("key").get<MomentKey>()] = {complex_from_json(e.at("mean")), e.at("variance").get<double>()};
    return t;
}

/// Writes `<path>` (interleaved little-endian f64 I/Q per mode and shot) and
/// `<path>.json` (header).
inline void write_shots(const std::string& path, const ShotRecord& rec) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    for (const cplx& c : rec.data) {
        const double iq[2] = {c.real(), c.imag()};
        out.write(reinterpret_cast<const char*>(iq), sizeof(iq));
    }
    json head = {{"format", "f64-iq-interleaved"}, {"modes", sites_to_json(rec.modes)},
                 {"shots", rec.shots()},           {"eta", rec.eta},
                 {"scale", complex_to_json(rec.scale)}, {"seed", rec.seed}};
    write_json_file(path + ".json", head);
}

inline ShotRecord read_shots(const std::string& path) {
    json head = read_json_file(path + ".json");
    if (head.value("format", "") != "f64-iq-interleaved") throw ConfigError(path + ".json: unknown shot format");
    ShotRecord rec;
    rec.modes = sites_from_json(head.at("modes"));
    rec.eta = head.at("eta").get<double>();
    rec.scale = complex_from_json(head.at("scale"));
    rec.seed = head.at("seed").get<std::uint64_t>();
    const std::size_t n = head.at("shots").get<std::size_t>() * rec.modes.size();
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + path);
    rec.data.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double iq[2];
        if (!in.read(reinterpret_cast<char*>(iq), sizeof(iq))) throw ConfigError(path + ": truncated shot file");
        rec.data[i] = {iq[0], iq[1]};
    }
    return rec;
}

}  // namespace ladder

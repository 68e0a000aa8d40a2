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

// Experiment configs, run manifests and the figure pipelines behind the CLI.

#pragma once

#include "ladder/emitter.hpp"
#include "ladder/entangle.hpp"
#include "ladder/graphstate.hpp"
#include "ladder/measure.hpp"
#include "ladder/noise.hpp"
#include "ladder/ptomo.hpp"
#include "ladder/tomo.hpp"

#include <cctype>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

extern char** environ;

namespace ladder {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kEnvPrefix = "LADDER_";
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct ExperimentConfig {
    std::string name = "run";
    ProtocolSpec protocol = ProtocolSpec::full(2, NoiseParams::all_errors());
    NoiseParams noise = NoiseParams::all_errors();
    DetectionConfig detection;
    ReconstructionOptions reconstruction;
    std::string rdm_source = "exact";  // exact | sampled
    int reconstruct_max_photons = 0;   // fig4: reconstructed column up to this N
    LEOptions entanglement;
    std::vector<int> photons = {4, 6, 8, 10, 12, 14, 16, 18, 20};
    bool process_maps = true;
    std::string output_dir = "out";
    std::uint64_t seed = 1;
    unsigned jobs = 1;
    Index max_bond = 4096;  // direct MPO simulation
};

namespace detail {

template <class T>
T field(const json& j, const char* key, const std::string& where) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        const char* what = std::is_same_v<T, std::string> ? "a string"
                           : std::is_same_v<T, bool>      ? "a boolean"
                           : std::is_integral_v<T>        ? "an integer"
                                                          : "a number";
        throw ConfigError(where + "." + key + ": expected " + what);
    }
}

template <class T>
void maybe(const json& j, const char* key, const std::string& where, T& dst) {
    if (j.contains(key)) dst = field<T>(j, key, where);
}

inline std::uint64_t unsigned_field(const json& j, const char* key, const std::string& where) {
    if (!j.at(key).is_number_integer() || j.at(key).get<long long>() < 0)
        throw ConfigError(where + "." + key + ": expected a non-negative integer");
    return j.at(key).get<std::uint64_t>();
}

inline std::string lower(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

}  // namespace detail

inline json to_json(const ExperimentConfig& c) {
    json proto = {{"n", c.protocol.n}, {"variant", to_string(c.protocol.variant)}};
    if (c.protocol.variant == Variant::BellCNOT) {
        proto["bell_source"] = c.protocol.bell_source;
    } else {
        std::vector<bool> cz = c.protocol.cphase, cn = c.protocol.cnot;
        proto["cphase"] = cz;
        proto["cnot"] = cn;
    }
    return {
        {"name", c.name},
        {"seed", c.seed},
        {"jobs", c.jobs},
        {"output_dir", c.output_dir},
        {"max_bond", c.max_bond},
        {"protocol", proto},
        {"noise", to_json(c.noise)},
        {"detection",
         {{"eta", c.detection.eta},
          {"scale", complex_to_json(c.detection.scale)},
          {"shots", c.detection.shots},
          {"seed", c.detection.seed},
          {"mode", c.detection.mode == DetectionMode::AnalyticMoments ? "analytic" : "sampled"},
          {"order", c.detection.order},
          {"snr", c.detection.snr}}},
        {"reconstruction",
         {{"max_bond", c.reconstruction.max_bond},
          {"eps", c.reconstruction.eps},
          {"max_iter", c.reconstruction.max_iter},
          {"purification_bond", c.reconstruction.purification_bond},
          {"tol", c.reconstruction.tol},
          {"compat_tol", c.reconstruction.compat_tol},
          {"rdm_source", c.rdm_source},
          {"max_photons", c.reconstruct_max_photons}}},
        {"entanglement",
         {{"samples", c.entanglement.samples},
          {"seed", c.entanglement.seed},
          {"sampling", c.entanglement.sampling == OutcomeSampling::Born ? "born" : "uniform"},
          {"exhaustive", c.entanglement.exhaustive},
          {"auto_exhaustive", c.entanglement.auto_exhaustive}}},
        {"photons", c.photons},
        {"process_maps", c.process_maps},
    };
}

/// Build a config from parsed JSON. Unknown keys and wrong types raise
/// ConfigError naming the offending field.
inline ExperimentConfig config_from_json(const json& j) {
    using detail::maybe;
    using detail::reject_unknown;
    ExperimentConfig c;
    reject_unknown(j,
                   {"name", "seed", "jobs", "output_dir", "max_bond", "protocol", "noise", "detection", "reconstruction",
                    "entanglement", "photons", "process_maps"},
                   "config");
    maybe(j, "name", "config", c.name);
    if (j.contains("seed")) c.seed = detail::unsigned_field(j, "seed", "config");
    if (j.contains("jobs")) c.jobs = static_cast<unsigned>(detail::unsigned_field(j, "jobs", "config"));
    maybe(j, "output_dir", "config", c.output_dir);
    if (j.contains("max_bond")) c.max_bond = static_cast<Index>(detail::unsigned_field(j, "max_bond", "config"));
    if (c.max_bond < 1) throw ConfigError("config.max_bond: must be >= 1");
    c.detection.seed = c.seed;
    c.entanglement.seed = c.seed;

    if (j.contains("noise")) {
        const json& n = j["noise"];
        c.noise = n.is_string() ? NoiseParams::preset(n.get<std::string>()) : noise_from_json(n);
    }

    int n = 2;
    Variant variant = Variant::FullCluster;
    std::vector<bool> cphase, cnot;
    int source = 1;
    if (j.contains("protocol")) {
        const json& p = j["protocol"];
        reject_unknown(p, {"n", "variant", "cphase", "cnot", "bell_source"}, "protocol");
        maybe(p, "n", "protocol", n);
        if (p.contains("variant")) variant = variant_from_string(detail::field<std::string>(p, "variant", "protocol"));
        maybe(p, "cphase", "protocol", cphase);
        maybe(p, "cnot", "protocol", cnot);
        maybe(p, "bell_source", "protocol", source);
    }
    switch (variant) {
        case Variant::FullCluster: c.protocol = ProtocolSpec::full(n, c.noise); break;
        case Variant::PartialEntanglers: c.protocol = ProtocolSpec::partial(n, cphase, cnot, c.noise); break;
        case Variant::BellCNOT: c.protocol = ProtocolSpec::bell_cnot(source, c.noise); break;
        case Variant::BellCPHASE: c.protocol = ProtocolSpec::bell_cphase(c.noise); break;
    }

    if (j.contains("detection")) {
        const json& d = j["detection"];
        reject_unknown(d, {"eta", "scale", "shots", "seed", "mode", "order", "snr"}, "detection");
        maybe(d, "eta", "detection", c.detection.eta);
        if (d.contains("scale")) c.detection.scale = complex_from_json(d["scale"]);
        if (d.contains("shots")) c.detection.shots = detail::unsigned_field(d, "shots", "detection");
        if (d.contains("seed")) c.detection.seed = detail::unsigned_field(d, "seed", "detection");
        if (d.contains("mode")) {
            auto m = detail::field<std::string>(d, "mode", "detection");
            if (m == "sampled") c.detection.mode = DetectionMode::ShotSampling;
            else if (m == "analytic") c.detection.mode = DetectionMode::AnalyticMoments;
            else throw ConfigError("detection.mode: expected 'sampled' or 'analytic'");
        }
        maybe(d, "order", "detection", c.detection.order);
        maybe(d, "snr", "detection", c.detection.snr);
        c.detection.validate();
    }

    if (j.contains("reconstruction")) {
        const json& r = j["reconstruction"];
        reject_unknown(r,
                       {"max_bond", "eps", "max_iter", "purification_bond", "tol", "compat_tol", "rdm_source",
                        "max_photons"},
                       "reconstruction");
        auto& o = c.reconstruction;
        if (r.contains("max_bond")) o.max_bond = static_cast<Index>(detail::unsigned_field(r, "max_bond", "reconstruction"));
        maybe(r, "eps", "reconstruction", o.eps);
        maybe(r, "max_iter", "reconstruction", o.max_iter);
        if (r.contains("purification_bond"))
            o.purification_bond = static_cast<Index>(detail::unsigned_field(r, "purification_bond", "reconstruction"));
        maybe(r, "tol", "reconstruction", o.tol);
        maybe(r, "compat_tol", "reconstruction", o.compat_tol);
        maybe(r, "rdm_source", "reconstruction", c.rdm_source);
        maybe(r, "max_photons", "reconstruction", c.reconstruct_max_photons);
        if (c.rdm_source != "exact" && c.rdm_source != "sampled")
            throw ConfigError("reconstruction.rdm_source: expected 'exact' or 'sampled'");
        if (o.max_iter < 1) throw ConfigError("reconstruction.max_iter: must be >= 1");
    }

    if (j.contains("entanglement")) {
        const json& e = j["entanglement"];
        reject_unknown(e, {"samples", "seed", "sampling", "exhaustive", "auto_exhaustive"}, "entanglement");
        auto& o = c.entanglement;
        if (e.contains("samples")) o.samples = detail::unsigned_field(e, "samples", "entanglement");
        if (e.contains("seed")) o.seed = detail::unsigned_field(e, "seed", "entanglement");
        if (e.contains("sampling")) {
            auto s = detail::field<std::string>(e, "sampling", "entanglement");
            if (s == "born") o.sampling = OutcomeSampling::Born;
            else if (s == "uniform") o.sampling = OutcomeSampling::Uniform;
            else throw ConfigError("entanglement.sampling: expected 'born' or 'uniform'");
        }
        maybe(e, "exhaustive", "entanglement", o.exhaustive);
        maybe(e, "auto_exhaustive", "entanglement", o.auto_exhaustive);
        if (o.samples < 1) throw ConfigError("entanglement.samples: must be >= 1");
    }

    if (j.contains("photons")) c.photons = detail::field<std::vector<int>>(j, "photons", "config");
    for (int N : c.photons)
        if (N < 4 || N > 20 || N % 2 != 0)
            throw ConfigError("config.photons: " + std::to_string(N) + " is not an even count in [4, 20]");
    maybe(j, "process_maps", "config", c.process_maps);
    c.entanglement.jobs = c.jobs;
    c.detection.jobs = c.jobs;
    return c;
}

// ---------------------------------------------------------------------------
// Environment overrides: LADDER_SECTION__KEY=value sets config.section.key.
// Keys match case-insensitively; values parse as JSON, else as strings.

inline std::map<std::string, std::string> ladder_environment() {
    std::map<std::string, std::string> env;
    for (char** e = environ; e && *e; ++e) {
        std::string kv(*e);
        if (kv.rfind(kEnvPrefix, 0) != 0) continue;
        auto eq = kv.find('=');
        if (eq == std::string::npos) continue;
        env[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
    return env;
}

inline void apply_env_overrides(json& target, const std::map<std::string, std::string>& env) {
    const json schema = to_json(ExperimentConfig{});
    json raw = target;
    for (const auto& [var, value] : env) {
        if (var.rfind(kEnvPrefix, 0) != 0) continue;
        std::vector<std::string> path;
        std::string rest = var.substr(std::string(kEnvPrefix).size());
        for (std::size_t pos; (pos = rest.find("__")) != std::string::npos; rest.erase(0, pos + 2))
            path.push_back(rest.substr(0, pos));
        path.push_back(rest);

        json* node = &raw;
        const json* shape = &schema;
        for (std::size_t i = 0; i < path.size(); ++i) {
            if (node->is_string() && shape->is_object()) *node = json{{"preset", node->get<std::string>()}};
            if (node->is_null()) *node = json::object();
            if (!node->is_object()) throw ConfigError(var + ": cannot descend into a non-object field");
            std::string key;
            for (const json* src : {static_cast<const json*>(node), shape}) {
                if (!key.empty() || !src->is_object()) continue;
                for (auto it = src->begin(); it != src->end(); ++it)
                    if (detail::lower(it.key()) == detail::lower(path[i])) key = it.key();
            }
            if (key.empty() && detail::lower(path[i]) == "preset" && i > 0) key = "preset";
            if (key.empty()) throw ConfigError(var + ": unknown config field '" + path[i] + "'");
            static const json kNull;
            shape = (shape->is_object() && shape->contains(key)) ? &(*shape)[key] : &kNull;
            node = &(*node)[key];
        }
        json v = json::parse(value, nullptr, false);
        *node = v.is_discarded() ? json(value) : v;
    }
    target = std::move(raw);
}

/// Parse config text; syntax errors report line and column.
inline json parse_config_text(const std::string& text, const std::string& origin) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ConfigError(origin + ":" + std::to_string(line) + ":" + std::to_string(col) + ": invalid JSON");
    }
}

inline ExperimentConfig load_config(const std::string& path, const std::map<std::string, std::string>& env) {
    json raw = json::object();
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config '" + path + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        raw = parse_config_text(ss.str(), path);
    }
    apply_env_overrides(raw, env);
    return config_from_json(raw);
}

// ---------------------------------------------------------------------------
// Manifests.

inline std::uint64_t fnv1a(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << v;
    return os.str();
}

struct RunManifest {
    std::string command;
    std::string config_hash;
    std::uint64_t seed = 0;
    double wall_seconds = 0.0;
    std::map<std::string, std::string> files;  // name -> fnv1a digest
};

inline json to_json(const RunManifest& m) {
    return {{"command", m.command},     {"version", kVersion},           {"config_hash", m.config_hash},
            {"seed", m.seed},           {"wall_seconds", m.wall_seconds}, {"files", m.files}};
}

/// Collects output files, writes them under one directory together with
/// manifest.json.
class RunWriter {
public:
    RunWriter(std::string command, const ExperimentConfig& cfg)
        : start_(std::chrono::steady_clock::now()), dir_(cfg.output_dir) {
        manifest_.command = std::move(command);
        manifest_.config_hash = hex64(fnv1a(to_json(cfg).dump()));
        manifest_.seed = cfg.seed;
    }

    void add(const std::string& name, const std::string& content) { files_[name] = content; }

    RunManifest finish() {
        std::filesystem::create_directories(dir_);
        for (const auto& [name, content] : files_) {
            std::ofstream out(std::filesystem::path(dir_) / name, std::ios::binary);
            out << content;
            if (!out) throw ConfigError("cannot write " + (std::filesystem::path(dir_) / name).string());
            manifest_.files[name] = hex64(fnv1a(content));
        }
        manifest_.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        write_json_file((std::filesystem::path(dir_) / "manifest.json").string(), to_json(manifest_), 2);
        return manifest_;
    }

private:
    std::chrono::steady_clock::time_point start_;
    std::string dir_;
    std::map<std::string, std::string> files_;
    RunManifest manifest_;
};

inline std::string format_double(double v) {
    if (std::isnan(v)) return "";
    std::ostringstream os;
    os << std::setprecision(10) << v;
    return os.str();
}

/// gamma = L = 0 with the configured lifetimes and durations.
inline NoiseParams decoherence_part(NoiseParams p) {
    p.gamma_H = p.gamma_pi = p.gamma_CZ = 0.0;
    p.L_CZ = p.L_pi = 0.0;
    return p;
}

// ---------------------------------------------------------------------------
// Localizable entanglement versus photon number.

struct Fig4Row {
    int N = 0;
    double all_errors = kNaN, decoherence_only = kNaN, process_maps = kNaN, reconstructed = kNaN, ideal = kNaN;
    std::vector<std::string> errors;
};

struct Fig4Result {
    std::vector<Fig4Row> rows;
    std::string to_csv() const {
        std::ostringstream os;
        os << "N,LE_direct_sim_all_errors,LE_decoherence_only,LE_from_process_maps,LE_reconstructed,LE_ideal,errors\n";
        for (const auto& r : rows) {
            std::string err;
            for (const auto& e : r.errors) err += (err.empty() ? "" : "; ") + e;
            os << r.N << ',' << format_double(r.all_errors) << ',' << format_double(r.decoherence_only) << ','
               << format_double(r.process_maps) << ',' << format_double(r.reconstructed) << ','
               << format_double(r.ideal) << ",\"" << err << "\"\n";
        }
        return os.str();
    }
};

/// Local rdms of a state as tomography would deliver them.
inline RdmSet observed_rdms(const Mpo& state, const LadderGraph& g, const ExperimentConfig& cfg) {
    RdmSet rdms = local_rdms_from_state(state, g);
    if (cfg.rdm_source == "sampled") {
        for (std::size_t i = 0; i < rdms.size(); ++i) {
            DetectionConfig d = cfg.detection;
            d.seed = cfg.detection.seed * 7919ULL + i;
            rdms[i].rdm = mle_from_moments(measure_moments(rdms[i].rdm, d)).rho;
        }
    }
    return rdms;
}

inline Fig4Result pipeline_fig4(const ExperimentConfig& cfg) {
    Fig4Result res;
    MpoSimOptions sim;
    sim.max_bond = cfg.max_bond;
    std::optional<ProcessMap> p1, p2;
    std::string map_error;
    if (cfg.process_maps) {
        try {
            ProcessTomographyOptions o;
            o.jobs = cfg.jobs;
            p1 = run_process_tomography(Process::P1, cfg.noise, o);
            p2 = run_process_tomography(Process::P2, cfg.noise, o);
        } catch (const std::exception& e) {
            map_error = std::string("process_maps: ") + e.what();
        }
    }
    for (int N : cfg.photons) {
        if (N < 4 || N > 20 || N % 2 != 0) throw ConfigError("fig4: N must be even and in [4, 20]");
        Fig4Row row;
        row.N = N;
        const int n = N / 2;
        LadderGraph g(n);
        auto stage = [&](const char* name, double& dst, auto&& fn) {
            try {
                dst = fn();
            } catch (const std::exception& e) {
                row.errors.push_back(std::string(name) + ": " + e.what());
            }
        };
        stage("ideal", row.ideal, [&] { return localizable_entanglement(ideal_cluster_mpo(g), cfg.entanglement).mean; });
        stage("decoherence_only", row.decoherence_only, [&] {
            auto m = simulate_mpo(ProtocolSpec::full(n, decoherence_part(cfg.noise)), sim);
            return localizable_entanglement(m, cfg.entanglement).mean;
        });
        std::optional<Mpo> direct;
        stage("all_errors", row.all_errors, [&] {
            direct = simulate_mpo(ProtocolSpec::full(n, cfg.noise), sim);
            return localizable_entanglement(*direct, cfg.entanglement).mean;
        });
        if (cfg.process_maps) {
            if (p1 && p2) {
                stage("process_maps", row.process_maps, [&] {
                    return localizable_entanglement(chain_maps(*p1, *p2, n, cfg.max_bond), cfg.entanglement).mean;
                });
            } else {
                row.errors.push_back(map_error);
            }
        }
        if (N <= cfg.reconstruct_max_photons && direct) {
            stage("reconstructed", row.reconstructed, [&] {
                auto rep = reconstruct_mpo(observed_rdms(*direct, g, cfg), g, cfg.reconstruction);
                return localizable_entanglement(rep.mpo, cfg.entanglement).mean;
            });
        }
        res.rows.push_back(std::move(row));
    }
    return res;
}

// ---------------------------------------------------------------------------
// Six-photon build-up: one entangling gate, partial ladder, full ladder.

struct Fig2Variant {
    std::string label;
    ProtocolSpec spec;
    DensityMatrix state;
    double fidelity_to_target = kNaN;
    double fidelity_to_cluster = kNaN;
    std::vector<std::pair<std::pair<int, int>, double>> negativities;
};

inline std::vector<std::pair<std::string, ProtocolSpec>> fig2_specs(const NoiseParams& noise) {
    return {{"a", ProtocolSpec::partial(3, {true, false, false}, {false, false}, noise)},
            {"c", ProtocolSpec::partial(3, {true, true, false}, {true, false}, noise)},
            {"e", ProtocolSpec::full(3, noise)}};
}

/// Negativity of every photon pair's reduced state.
inline std::vector<std::pair<std::pair<int, int>, double>> pairwise_negativities(const DensityMatrix& rho) {
    std::vector<std::pair<std::pair<int, int>, double>> out;
    const int N = static_cast<int>(rho.sites().size());
    for (int a = 1; a <= N; ++a)
        for (int b = a + 1; b <= N; ++b)
            out.push_back({{a, b}, negativity(partial_trace(rho, {SiteLabel::photon(a), SiteLabel::photon(b)}))});
    return out;
}

inline std::vector<Fig2Variant> pipeline_fig2(const ExperimentConfig& cfg) {
    std::vector<Fig2Variant> out;
    const auto cluster = ideal_cluster_state(LadderGraph(3));
    for (auto& [label, spec] : fig2_specs(cfg.noise)) {
        Fig2Variant v{label, spec, simulate_dense(spec)};
        v.fidelity_to_target = fidelity(v.state, ideal_target(spec));
        v.fidelity_to_cluster = fidelity(v.state, cluster);
        v.negativities = pairwise_negativities(v.state);
        out.push_back(std::move(v));
    }
    return out;
}

inline json to_json(const std::vector<Fig2Variant>& vs) {
    json arr = json::array();
    for (const auto& v : vs) {
        json neg = json::array();
        for (const auto& [p, x] : v.negativities) neg.push_back({{"pair", {p.first, p.second}}, {"negativity", x}});
        arr.push_back({{"variant", v.label},
                       {"cphase", std::vector<bool>(v.spec.cphase)},
                       {"cnot", std::vector<bool>(v.spec.cnot)},
                       {"fidelity_to_target", v.fidelity_to_target},
                       {"fidelity_to_cluster", v.fidelity_to_cluster},
                       {"negativities", neg},
                       {"state", to_json(v.state)}});
    }
    return arr;
}

// ---------------------------------------------------------------------------
// Local energies per photon.

/// Photons of the first and last emitted pair.
inline bool is_edge_photon(int v, int N) { return v <= 2 || v > N - 2; }

struct EnergyRow {
    int N = 0;
    std::vector<double> energies;  // index v - 1
    double edge_mean() const { return mean_where(true); }
    double bulk_mean() const { return mean_where(false); }

private:
    double mean_where(bool edge) const {
        double s = 0.0;
        int k = 0;
        for (int v = 1; v <= N; ++v)
            if (is_edge_photon(v, N) == edge) {
                s += energies[static_cast<std::size_t>(v - 1)];
                ++k;
            }
        return k ? s / k : kNaN;
    }
};

struct EnergyResult {
    std::vector<EnergyRow> rows;
    std::vector<std::string> errors;

    /// Largest change of E_v across N, with v counted from the nearer end.
    double max_spread() const {
        std::map<int, std::pair<double, double>> range;
        for (const auto& r : rows)
            for (int v = 1; v <= r.N; ++v) {
                const int key = std::min(v, r.N + 1 - v) * 2 + (v % 2);
                const double e = r.energies[static_cast<std::size_t>(v - 1)];
                auto [it, fresh] = range.try_emplace(key, e, e);
                if (!fresh) it->second = {std::min(it->second.first, e), std::max(it->second.second, e)};
            }
        double s = 0.0;
        for (const auto& [k, lohi] : range) s = std::max(s, lohi.second - lohi.first);
        return s;
    }

    std::string to_csv() const {
        std::ostringstream os;
        os << "N,photon,class,E\n";
        for (const auto& r : rows)
            for (int v = 1; v <= r.N; ++v)
                os << r.N << ',' << v << ',' << (is_edge_photon(v, r.N) ? "edge" : "bulk") << ','
                   << format_double(r.energies[static_cast<std::size_t>(v - 1)]) << '\n';
        return os.str();
    }

    std::string summary_csv() const {
        std::ostringstream os;
        os << "N,edge_mean,bulk_mean\n";
        for (const auto& r : rows) os << r.N << ',' << format_double(r.edge_mean()) << ',' << format_double(r.bulk_mean()) << '\n';
        return os.str();
    }
};

inline EnergyResult pipeline_energies(const ExperimentConfig& cfg) {
    EnergyResult res;
    MpoSimOptions sim;
    sim.max_bond = cfg.max_bond;
    for (int N : cfg.photons) {
        try {
            LadderGraph g(N / 2);
            auto m = simulate_mpo(ProtocolSpec::full(N / 2, cfg.noise), sim);
            EnergyRow row;
            row.N = N;
            for (int v = 1; v <= N; ++v) row.energies.push_back(local_energy(m, g, v));
            res.rows.push_back(std::move(row));
        } catch (const std::exception& e) {
            res.errors.push_back("N=" + std::to_string(N) + ": " + e.what());
        }
    }
    return res;
}

}  // namespace ladder

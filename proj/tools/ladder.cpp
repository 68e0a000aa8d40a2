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

// ladder: command-line runner for simulation, tomography and the figure
// pipelines. Exit codes: 0 success, 2 config error, 3 numerical failure.

#include "ladder/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace ladder;

namespace {

struct Common {
    std::string config_path;
    std::string noise;
    int jobs = 0;
    long long seed = -1;
};

ExperimentConfig resolve(const Common& c) {
    ExperimentConfig cfg = load_config(c.config_path, ladder_environment());
    if (!c.noise.empty()) {
        cfg.noise = std::filesystem::exists(c.noise) ? noise_from_json(read_json_file(c.noise))
                                                     : NoiseParams::preset(c.noise);
        cfg.protocol.noise = cfg.noise;
    }
    if (c.jobs > 0) {
        cfg.jobs = static_cast<unsigned>(c.jobs);
        cfg.entanglement.jobs = cfg.jobs;
        cfg.detection.jobs = cfg.jobs;
    }
    if (c.seed >= 0) {
        cfg.seed = static_cast<std::uint64_t>(c.seed);
        cfg.detection.seed = cfg.seed;
        cfg.entanglement.seed = cfg.seed;
    }
    return cfg;
}

bool is_mpo_json(const json& j) { return j.contains("tensors"); }

Mpo load_state_as_mpo(const std::string& path) {
    json j = read_json_file(path);
    return is_mpo_json(j) ? mpo_from_json(j) : Mpo::from_dense(density_matrix_from_json(j));
}

void emit(const std::string& path, const json& j) {
    if (path.empty() || path == "-") {
        std::cout << j.dump(2) << '\n';
    } else {
        write_json_file(path, j, 2);
    }
}

void add_common(CLI::App* app, Common& c, bool with_noise = true) {
    app->add_option("--config", c.config_path, "Experiment config (JSON)");
    app->add_option("--jobs", c.jobs, "Worker threads");
    app->add_option("--seed", c.seed, "Master seed");
    if (with_noise) app->add_option("--noise", c.noise, "Preset (ideal|decoherence_only|all_errors) or noise JSON file");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ladder: 2xn photonic cluster-state emission toolkit"};
    app.require_subcommand(1);
    Common common;

    // simulate
    auto* sim = app.add_subcommand("simulate", "Simulate an emission protocol");
    add_common(sim, common);
    int sim_n = 0;
    std::string variant, backend = "dense", sim_out;
    std::size_t traj_shots = 100000;
    long long sim_bond = -1;
    bool strict = false;
    sim->add_option("--n", sim_n, "Number of emission cycles (ladder columns)");
    sim->add_option("--variant", variant, "full|partial|bell_cnot|bell_cphase");
    sim->add_option("--backend", backend, "dense|mpo|trajectories")->check(CLI::IsMember({"dense", "mpo", "trajectories"}));
    sim->add_option("--shots", traj_shots, "Trajectory count");
    sim->add_option("--max-bond", sim_bond, "MPO bond cap");
    sim->add_flag("--strict", strict, "Fail instead of truncating past the bond cap");
    sim->add_option("--out", sim_out, "Output state JSON");

    // measure
    auto* meas = app.add_subcommand("measure", "Heterodyne moments of photonic modes");
    add_common(meas, common, false);
    std::string meas_state, meas_out;
    std::vector<int> meas_modes;
    double eta = -1;
    long long shots = -1;
    bool analytic = false, mle = false;
    meas->add_option("--state", meas_state, "Density-matrix JSON")->required();
    meas->add_option("--modes", meas_modes, "Photon indices to keep (at most 4)");
    meas->add_option("--eta", eta, "Quantum efficiency");
    meas->add_option("--shots", shots, "Shots");
    meas->add_flag("--analytic", analytic, "Exact moments instead of sampling");
    meas->add_flag("--mle", mle, "Also fit a density matrix to the moments");
    meas->add_option("--out", meas_out, "Output JSON");

    // reconstruct
    auto* rec = app.add_subcommand("reconstruct", "MPO reconstruction from local rdms");
    add_common(rec, common, false);
    std::string rec_state, rec_rdms, rec_out, rec_report;
    int rec_iter = 0;
    rec->add_option("--state", rec_state, "State JSON (dense or MPO) to take exact rdms from");
    rec->add_option("--rdms", rec_rdms, "Local rdm set JSON");
    rec->add_option("--max-iter", rec_iter, "Iteration cap");
    rec->add_option("--out", rec_out, "Output MPO JSON")->required();
    rec->add_option("--report", rec_report, "Reconstruction report JSON");

    // entanglement
    auto* ent = app.add_subcommand("entanglement", "Localizable entanglement between the end photons");
    add_common(ent, common, false);
    std::string ent_state, ent_out, sampling;
    long long samples = -1;
    bool exhaustive = false;
    ent->add_option("--state", ent_state, "State JSON (dense or MPO)")->required();
    ent->add_option("--samples", samples, "Outcome samples per path");
    ent->add_option("--sampling", sampling, "born|uniform")->check(CLI::IsMember({"born", "uniform"}));
    ent->add_flag("--exhaustive", exhaustive, "Enumerate every outcome");
    ent->add_option("--out", ent_out, "Output JSON");

    // processtomo
    auto* pt = app.add_subcommand("processtomo", "Process tomography of one emission cycle");
    add_common(pt, common);
    std::string process = "p1", measurement = "exact", pt_out;
    bool discard_f = false;
    pt->add_option("--process", process, "p1|p2")->check(CLI::IsMember({"p1", "p2"}));
    pt->add_option("--measurement", measurement, "exact|sampled")->check(CLI::IsMember({"exact", "sampled"}));
    pt->add_flag("--discard-f", discard_f, "Discard f-level source readouts");
    pt->add_option("--out", pt_out, "Output chi JSON");

    // chain
    auto* ch = app.add_subcommand("chain", "Chain process maps into a predicted MPO");
    add_common(ch, common, false);
    std::string chi1, chi2, ch_out;
    int ch_n = 2;
    ch->add_option("--p1", chi1, "chi JSON of p1")->required();
    ch->add_option("--p2", chi2, "chi JSON of p2")->required();
    ch->add_option("--n", ch_n, "Ladder columns");
    ch->add_option("--out", ch_out, "Output MPO JSON")->required();

    // figure pipelines
    std::string fig_out;
    auto* f2 = app.add_subcommand("fig2", "Six-photon build-up variants");
    auto* f4 = app.add_subcommand("fig4", "Localizable entanglement versus N");
    auto* en = app.add_subcommand("energies", "Per-photon local energies");
    for (auto* s : {f2, f4, en}) {
        add_common(s, common);
        s->add_option("--out", fig_out, "Output directory");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        ExperimentConfig cfg = resolve(common);
        if (!fig_out.empty()) cfg.output_dir = fig_out;

        if (*sim) {
            ProtocolSpec spec = cfg.protocol;
            spec.noise = cfg.noise;
            if (sim_n > 0 || !variant.empty()) {
                const int n = sim_n > 0 ? sim_n : spec.n;
                const Variant v = variant.empty() ? spec.variant : variant_from_string(variant);
                if (v == Variant::FullCluster) spec = ProtocolSpec::full(n, cfg.noise);
                else if (v == Variant::BellCNOT) spec = ProtocolSpec::bell_cnot(spec.bell_source, cfg.noise);
                else if (v == Variant::BellCPHASE) spec = ProtocolSpec::bell_cphase(cfg.noise);
                else throw ConfigError("the partial variant needs its gate flags from --config");
            }
            json summary = {{"photons", spec.num_photons()}, {"variant", to_string(spec.variant)}, {"backend", backend}};
            if (backend == "dense") {
                auto rho = simulate_dense(spec);
                summary["fidelity"] = fidelity(rho, ideal_target(spec));
                if (!sim_out.empty()) write_json_file(sim_out, to_json(rho));
            } else if (backend == "mpo") {
                MpoSimOptions o;
                o.max_bond = sim_bond > 0 ? static_cast<Index>(sim_bond) : cfg.max_bond;
                o.strict = strict;
                auto m = simulate_mpo(spec, o);
                summary["largest_bond"] = m.largest_bond();
                summary["truncation_error"] = m.truncation_error();
                if (spec.variant == Variant::FullCluster) summary["fidelity"] = m.fidelity(ideal_cluster_mps(LadderGraph(spec.n)));
                if (!sim_out.empty()) write_json_file(sim_out, to_json(m));
            } else {
                const auto target = ideal_target(spec);
                auto est = estimate_trajectories(
                    spec, traj_shots, cfg.seed,
                    [&](const Trajectory& t) { return trajectory_fidelity(t, target); }, cfg.jobs);
                summary["fidelity"] = est.mean;
                summary["stderr"] = est.stderr_;
                summary["shots"] = traj_shots;
            }
            std::cout << summary.dump(2) << '\n';
        } else if (*meas) {
            auto rho = density_matrix_from_json(read_json_file(meas_state));
            if (!meas_modes.empty()) {
                SiteList keep;
                for (int m : meas_modes) keep.push_back(SiteLabel::photon(m));
                rho = partial_trace(rho, keep);
            }
            DetectionConfig d = cfg.detection;
            if (eta > 0) d.eta = eta;
            if (shots > 0) d.shots = static_cast<std::size_t>(shots);
            if (analytic) d.mode = DetectionMode::AnalyticMoments;
            auto table = measure_moments(rho, d);
            json out = {{"moments", to_json(table)}};
            if (mle) {
                auto fit = mle_from_moments(table);
                out["mle"] = {{"state", to_json(fit.rho)}, {"objective", fit.objective}, {"iterations", fit.iterations},
                              {"converged", fit.converged}, {"fidelity_to_input", fidelity(fit.rho, rho)}};
            }
            emit(meas_out, out);
        } else if (*rec) {
            if (rec_state.empty() == rec_rdms.empty()) throw ConfigError("reconstruct needs exactly one of --state, --rdms");
            RdmSet rdms;
            int photons = 0;
            if (!rec_state.empty()) {
                auto m = load_state_as_mpo(rec_state);
                photons = static_cast<int>(m.sites().size());
                if (photons % 2 != 0) throw ConfigError("state must hold an even number of photons");
                rdms = local_rdms_from_state(m, LadderGraph(photons / 2));
            } else {
                rdms = rdm_set_from_json(read_json_file(rec_rdms));
                for (const auto& r : rdms)
                    for (const auto& s : r.support) photons = std::max(photons, s.index);
                if (photons % 2 != 0) throw ConfigError("rdm supports must cover an even number of photons");
            }
            ReconstructionOptions o = cfg.reconstruction;
            if (rec_iter > 0) o.max_iter = rec_iter;
            auto rep = reconstruct_mpo(rdms, LadderGraph(photons / 2), o);
            write_json_file(rec_out, to_json(rep.mpo));
            if (!rec_report.empty()) write_json_file(rec_report, to_json(rep), 2);
            for (const auto& w : rep.warnings) std::cerr << "warning: " << w << '\n';
            std::cout << json{{"iterations", rep.iterations}, {"converged", rep.converged},
                              {"log_likelihood", rep.log_likelihood.empty() ? 0.0 : rep.log_likelihood.back()}}
                             .dump(2)
                      << '\n';
        } else if (*ent) {
            LEOptions o = cfg.entanglement;
            if (samples > 0) o.samples = static_cast<std::size_t>(samples);
            if (sampling == "uniform") o.sampling = OutcomeSampling::Uniform;
            if (sampling == "born") o.sampling = OutcomeSampling::Born;
            if (exhaustive) o.exhaustive = true;
            emit(ent_out, to_json(localizable_entanglement(load_state_as_mpo(ent_state), o)));
        } else if (*pt) {
            ProcessTomographyOptions o;
            o.photons = measurement == "sampled" ? PhotonReadout::Sampled : PhotonReadout::Exact;
            o.detection = cfg.detection;
            o.discard_f = discard_f;
            o.jobs = cfg.jobs;
            const Process p = process_from_string(process);
            auto m = run_process_tomography(p, cfg.noise, o);
            Matrix c = choi_from_chi(m);
            json out = to_json(m);
            out["process_fidelity"] = process_fidelity(m, ideal_process_map(p));
            out["trace_preservation_residual"] = check_trace_preserving(c);
            out["min_choi_eigenvalue"] = min_choi_eigenvalue(c);
            emit(pt_out, out);
            std::cerr << to_string(p) << " process fidelity " << out["process_fidelity"].get<double>() << '\n';
        } else if (*ch) {
            auto m = chain_maps(process_map_from_json(read_json_file(chi1)), process_map_from_json(read_json_file(chi2)),
                                ch_n, cfg.reconstruction.max_bond);
            write_json_file(ch_out, to_json(m));
            std::cout << json{{"photons", 2 * ch_n},
                              {"largest_bond", m.largest_bond()},
                              {"fidelity_to_cluster", m.fidelity(ideal_cluster_mps(LadderGraph(ch_n)))}}
                             .dump(2)
                      << '\n';
        } else if (*f2) {
            RunWriter w("fig2", cfg);
            w.add("fig2.json", to_json(pipeline_fig2(cfg)).dump(1) + "\n");
            w.add("config.json", to_json(cfg).dump(2) + "\n");
            w.finish();
        } else if (*f4) {
            RunWriter w("fig4", cfg);
            auto r = pipeline_fig4(cfg);
            w.add("fig4.csv", r.to_csv());
            w.add("config.json", to_json(cfg).dump(2) + "\n");
            w.finish();
            std::cout << r.to_csv();
        } else if (*en) {
            RunWriter w("energies", cfg);
            auto r = pipeline_energies(cfg);
            w.add("energies.csv", r.to_csv());
            w.add("energies_summary.csv", r.summary_csv());
            w.add("config.json", to_json(cfg).dump(2) + "\n");
            w.finish();
            std::cout << r.summary_csv() << "max spread across N: " << r.max_spread() << '\n';
            for (const auto& e : r.errors) std::cerr << "error: " << e << '\n';
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    }
    return 0;
}

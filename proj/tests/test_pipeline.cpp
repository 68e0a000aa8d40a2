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

#include "ladder/pipeline.hpp"

#include <gtest/gtest.h>

using namespace ladder;

namespace {

std::string error_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ExperimentConfig quick_config() {
    ExperimentConfig c;
    c.photons = {4, 6};
    c.entanglement.samples = 64;
    return c;
}

}  // namespace

TEST(Config, DefaultsRoundTrip) {
    ExperimentConfig c;
    EXPECT_EQ(to_json(config_from_json(to_json(c))).dump(), to_json(c).dump());
    auto empty = config_from_json(json::object());
    EXPECT_EQ(to_json(empty).dump(), to_json(c).dump());
}

TEST(Config, UnknownKeysAreRejectedWithTheirPath) {
    EXPECT_NE(error_of([] { config_from_json({{"nosie", "ideal"}}); }).find("config: unknown key 'nosie'"),
              std::string::npos);
    EXPECT_NE(error_of([] { config_from_json({{"entanglement", {{"sample", 3}}}}); }).find("entanglement"),
              std::string::npos);
    EXPECT_NE(error_of([] { config_from_json({{"noise", {{"S1", {{"T1", 3}}}}}}); }).find("noise.S1"),
              std::string::npos);
}

TEST(Config, TypeAndRangeErrorsNameTheField) {
    EXPECT_NE(error_of([] { config_from_json({{"seed", "abc"}}); }).find("config.seed"), std::string::npos);
    EXPECT_NE(error_of([] { config_from_json({{"protocol", {{"n", "two"}}}}); }).find("protocol.n"),
              std::string::npos);
    EXPECT_NE(error_of([] { config_from_json({{"photons", {4, 5}}}); }).find("config.photons"), std::string::npos);
    EXPECT_NE(error_of([] { config_from_json({{"detection", {{"eta", 2.0}}}}); }).find("eta"), std::string::npos);
    EXPECT_THROW(config_from_json({{"noise", "noisy"}}), ConfigError);
}

TEST(Config, SyntaxErrorsReportLineAndColumn) {
    const std::string text = "{\n  \"seed\": 3,\n  \"name\" \"x\"\n}\n";
    auto msg = error_of([&] { parse_config_text(text, "cfg.json"); });
    EXPECT_EQ(msg.rfind("cfg.json:3:", 0), 0u) << msg;
}

TEST(Config, SeedPropagatesUnlessOverridden) {
    auto c = config_from_json({{"seed", 42}});
    EXPECT_EQ(c.detection.seed, 42u);
    EXPECT_EQ(c.entanglement.seed, 42u);
    auto d = config_from_json({{"seed", 42}, {"entanglement", {{"seed", 7}}}});
    EXPECT_EQ(d.entanglement.seed, 7u);
}

TEST(Env, OverridesNestedFieldsCaseInsensitively) {
    json raw = {{"noise", "decoherence_only"}};
    apply_env_overrides(raw, {{"LADDER_NOISE__L_CZ", "0.03"},
                              {"LADDER_ENTANGLEMENT__SAMPLES", "128"},
                              {"LADDER_NAME", "from-env"},
                              {"LADDER_NOISE__S2__T1_E_US", "\"inf\""}});
    auto c = config_from_json(raw);
    EXPECT_DOUBLE_EQ(c.noise.L_CZ, 0.03);
    EXPECT_EQ(c.noise.gamma_CZ, 0.0);  // preset kept as the base
    EXPECT_TRUE(std::isinf(c.noise.source[1].T1_e));
    EXPECT_EQ(c.entanglement.samples, 128u);
    EXPECT_EQ(c.name, "from-env");
}

TEST(Env, UnknownFieldsAreRejected) {
    json raw = json::object();
    EXPECT_THROW(apply_env_overrides(raw, {{"LADDER_NOISE__LCZ", "1"}}), ConfigError);
    EXPECT_THROW(apply_env_overrides(raw, {{"LADDER_BOGUS", "1"}}), ConfigError);
    apply_env_overrides(raw, {{"OTHER_SEED", "3"}});
    EXPECT_TRUE(raw.empty());
}

TEST(Manifest, FnvMatchesReferenceVectors) {
    EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ULL);
    EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cULL);
    EXPECT_EQ(fnv1a("foobar"), 0x85944171f73967e8ULL);
    EXPECT_EQ(hex64(0xabcULL), "0000000000000abc");
}

TEST(Manifest, RecordsDigestsAndConfigHash) {
    ExperimentConfig c;
    c.output_dir = (std::filesystem::temp_directory_path() / "ladder_manifest_test").string();
    std::filesystem::remove_all(c.output_dir);
    RunWriter w("test", c);
    w.add("a.csv", "x,y\n1,2\n");
    auto m = w.finish();
    EXPECT_EQ(m.files.at("a.csv"), hex64(fnv1a("x,y\n1,2\n")));
    EXPECT_EQ(slurp(std::filesystem::path(c.output_dir) / "a.csv"), "x,y\n1,2\n");
    auto j = read_json_file((std::filesystem::path(c.output_dir) / "manifest.json").string());
    EXPECT_EQ(j.at("config_hash"), hex64(fnv1a(to_json(c).dump())));
    EXPECT_EQ(j.at("version"), kVersion);
}

TEST(Fig2, SingleGateVariantHasOneEntangledPair) {
    for (const auto& noise : {NoiseParams::ideal(), NoiseParams::all_errors()}) {
        ExperimentConfig c;
        c.noise = noise;
        auto vs = pipeline_fig2(c);
        ASSERT_EQ(vs.size(), 3u);
        int nonzero = 0;
        for (const auto& [p, x] : vs[0].negativities)
            if (x > 0) {
                ++nonzero;
                EXPECT_EQ(p, std::make_pair(1, 2));
            }
        EXPECT_EQ(nonzero, 1);
    }
}

TEST(Fig2, FullVariantFidelities) {
    ExperimentConfig c;
    c.noise = NoiseParams::ideal();
    auto ideal = pipeline_fig2(c);
    EXPECT_NEAR(ideal[2].fidelity_to_cluster, 1.0, 1e-9);
    for (const auto& v : ideal) EXPECT_NEAR(v.fidelity_to_target, 1.0, 1e-9) << v.label;
    c.noise = NoiseParams::all_errors();
    auto noisy = pipeline_fig2(c);
    EXPECT_GT(noisy[2].fidelity_to_cluster, 0.5);
    EXPECT_LT(noisy[2].fidelity_to_cluster, 1.0);
}

TEST(Fig2, OutputIsDeterministic) {
    ExperimentConfig c;
    EXPECT_EQ(to_json(pipeline_fig2(c)).dump(), to_json(pipeline_fig2(c)).dump());
}

TEST(Fig4, SmallRunOrderingAndColumns) {
    auto c = quick_config();
    c.reconstruct_max_photons = 4;
    auto r = pipeline_fig4(c);
    ASSERT_EQ(r.rows.size(), 2u);
    for (const auto& row : r.rows) {
        EXPECT_TRUE(row.errors.empty());
        EXPECT_NEAR(row.ideal, 0.5, 1e-9);
        EXPECT_GE(row.decoherence_only, row.all_errors);
        EXPECT_GT(row.all_errors, 0.0);
        EXPECT_NEAR(row.process_maps, row.all_errors, 0.05);
    }
    EXPECT_FALSE(std::isnan(r.rows[0].reconstructed));
    EXPECT_TRUE(std::isnan(r.rows[1].reconstructed));
    auto csv = r.to_csv();
    EXPECT_EQ(csv.rfind("N,LE_direct_sim_all_errors,LE_decoherence_only,LE_from_process_maps,LE_reconstructed,LE_ideal", 0),
              0u);
    EXPECT_EQ(csv, pipeline_fig4(c).to_csv());
}

TEST(Fig4, StageFailuresAreRecordedPerRow) {
    auto c = quick_config();
    c.process_maps = false;
    c.reconstruct_max_photons = 6;
    c.reconstruction.max_iter = 0;  // rejected inside reconstruct_mpo
    auto r = pipeline_fig4(c);
    ASSERT_EQ(r.rows.size(), 2u);
    for (const auto& row : r.rows) {
        EXPECT_TRUE(std::isnan(row.reconstructed));
        ASSERT_EQ(row.errors.size(), 1u);
        EXPECT_EQ(row.errors[0].rfind("reconstructed:", 0), 0u);
        EXPECT_NEAR(row.ideal, 0.5, 1e-9);
    }
}

TEST(Energies, IdealIsZeroAndNoisyEdgesAreLower) {
    ExperimentConfig c;
    c.photons = {4, 6, 8, 10};
    c.noise = NoiseParams::ideal();
    for (const auto& row : pipeline_energies(c).rows)
        for (double e : row.energies) EXPECT_NEAR(e, 0.0, 1e-10);
    c.noise = NoiseParams::all_errors();
    auto r = pipeline_energies(c);
    EXPECT_TRUE(r.errors.empty());
    EXPECT_TRUE(std::isnan(r.rows[0].bulk_mean()));
    for (std::size_t i = 1; i < r.rows.size(); ++i) EXPECT_LT(r.rows[i].edge_mean(), r.rows[i].bulk_mean());
    EXPECT_LT(r.max_spread(), 0.05);
    EXPECT_NE(r.to_csv().find("6,3,bulk,"), std::string::npos);
}

// SPDX-License-Identifier: Apache-2.0
//
// cfad - grant-free activity detection for cell-free massive MIMO
// Copyright (C) 2026 The cfad authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "cfad/experiment.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace cfad;

namespace {

const std::filesystem::path source_dir = CFAD_SOURCE_DIR;

std::string slurp(const std::filesystem::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

const char* minimal = R"(
system:
  num_aps: 3
  antennas_per_ap: 2
  num_devices: 6
  pilot_len: 4
  cluster_size: 2
  activity_prob: 0.3
experiment:
  test_samples: 10
  seed: 4
)";

std::string error_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_CASE("shipped default configuration") {
    const auto cfg = parse_config_file(source_dir / "configs" / "paper_default.yaml");
    const SystemConfig& s = cfg.system;
    CHECK(s.num_aps == 20);
    CHECK(s.antennas_per_ap == 2);
    CHECK(s.num_devices == 100);
    CHECK(s.pilot_len == 40);
    CHECK(s.cluster_size == 4);
    CHECK(s.area_side == 1000.0);
    CHECK(s.activity_prob == 0.1);
    CHECK(s.noise_power == doctest::Approx(1.2589254e-14).epsilon(1e-6));
    CHECK(s.coherence_symbols == 200);
    CHECK(s.placement_margin == 50.0);
    CHECK(s.min_ap_spacing == 15.0);
    CHECK(s.min_device_ap_spacing == 10.0);
    CHECK(cfg.mlp.hidden_layers == 2);
    CHECK(cfg.mlp.neurons == 512);
    CHECK(cfg.train_samples == 50000);
    CHECK(cfg.validation_samples == 20000);
    CHECK(cfg.test_samples == 20000);
    CHECK(cfg.detector == DetectorSelection::both);

    for (const auto& entry : std::filesystem::directory_iterator(source_dir / "configs"))
        CHECK_NOTHROW(parse_config_file(entry.path()));
}

TEST_CASE("serialization round trip") {
    auto cfg = parse_config(minimal);
    cfg.impairments.theta = 0.1234567890123;
    cfg.impairments.beta_format = parse_fixed_point("16_8_bits");
    cfg.system.noise_power = dbm_to_watts(-109.0);
    cfg.axis = SweepAxis::fixed_point;
    cfg.sweep_values = {"8_4_bits", "none"};
    cfg.mlp.tied_branches = false;
    const std::string text = serialize_config(cfg);
    const auto back = parse_config(text);
    CHECK(back == cfg);
    CHECK(serialize_config(back) == text);

    const auto paper = parse_config_file(source_dir / "configs" / "paper_default.yaml");
    CHECK(parse_config(serialize_config(paper)) == paper);
}

TEST_CASE("configuration errors") {
    const std::string empty = error_of("");
    for (const auto& key : required_config_keys()) CHECK(empty.find(key) != std::string::npos);

    CHECK(error_of(std::string(minimal) + "  bogus: 1\n").find("line 12") != std::string::npos);
    CHECK(error_of(std::string(minimal) + "  bogus: 1\n").find("experiment.bogus") != std::string::npos);
    CHECK(error_of(std::string(minimal) + "extra:\n  x: 1\n").find("unknown section") != std::string::npos);
    CHECK(error_of("system: [1, 2\n").find("line") != std::string::npos);
    CHECK(error_of(std::string(minimal) + "  threads: many\n").find("experiment.threads") != std::string::npos);
    CHECK_FALSE(error_of(std::string(minimal) + "  sweep_axis: pilot_len\n  sweep_values: [4, 300]\n").empty());
    CHECK_FALSE(error_of(std::string(minimal) + "  sweep_axis: theta\n  sweep_values: [0.1, 2]\n").empty());
    CHECK_FALSE(error_of(std::string(minimal) + "  sweep_axis: fixed_point\n  sweep_values: [16_16]\n").empty());
    CHECK_FALSE(error_of(std::string(minimal) + "  test_samples: 0\n").empty());
    CHECK_FALSE(error_of(std::string(minimal) + "  detector: svm\n").empty());
    std::string both_units = minimal;
    both_units.insert(both_units.find("experiment:"), "  tx_power_w: 0.1\n  tx_power_dbm: 20\n");
    CHECK(error_of(both_units).find("tx_power") != std::string::npos);
    std::string dbm = minimal;
    dbm.insert(dbm.find("experiment:"), "  tx_power_dbm: 23\n");
    CHECK(parse_config(dbm).system.tx_power == doctest::Approx(0.19952623).epsilon(1e-6));
}

TEST_CASE("trend checks") {
    ResultBundle b;
    b.config.axis = SweepAxis::pilot_len;
    auto point = [](const std::string& v, double ml, double dmlp) {
        PointResult p;
        p.value = v;
        p.ml = DetectorOutcome{};
        p.ml->roc.auc = ml;
        p.dmlp = DetectorOutcome{};
        p.dmlp->roc.auc = dmlp;
        return p;
    };
    b.points = {point("20", 0.9, 0.8), point("40", 0.95, 0.85)};
    CHECK(check_trends(b).empty());
    b.points[1].dmlp->roc.auc = 0.7;
    CHECK(check_trends(b).size() == 1);

    b.config.axis = SweepAxis::activity_prob;
    b.points = {point("0.05", 0.95, 0.9), point("0.2", 0.9, 0.85)};
    CHECK(check_trends(b).empty());

    b.config.axis = SweepAxis::theta;
    b.points = {point("0", 0.95, 0.9), point("0.2", 0.7, 0.88)};
    CHECK(check_trends(b).empty());
    b.points[1].ml->roc.auc = 0.94;
    CHECK(check_trends(b).size() == 1);

    b.points[1].error = "boom";
    CHECK_FALSE(check_trends(b).empty());
}

TEST_CASE("small sweep end to end") {
    auto cfg = parse_config(minimal);
    cfg.train_samples = 64;
    cfg.validation_samples = 16;
    cfg.test_samples = 40;
    cfg.mlp.neurons = 8;
    cfg.mlp.max_epochs = 2;
    cfg.mlp.batch_size = 16;
    cfg.axis = SweepAxis::theta;
    cfg.sweep_values = {"0", "0.3"};
    cfg.threads = 2;

    const auto tmp = std::filesystem::temp_directory_path() / "cfad_test_sweep";
    std::filesystem::remove_all(tmp);
    const auto bundle = run_sweep(cfg);
    REQUIRE(bundle.points.size() == 2);
    for (const auto& p : bundle.points) {
        REQUIRE(p.ok());
        REQUIRE(p.ml);
        REQUIRE(p.dmlp);
        CHECK(p.ml->labels == p.dmlp->labels);
        CHECK(p.ml->scores.size() == 40u * 6);
    }
    // Identical realizations at every point: only the fading estimate changes.
    CHECK(bundle.points[0].ml->labels == bundle.points[1].ml->labels);

    emit_report(bundle, tmp / "a");
    cfg.threads = 1;
    emit_report(run_sweep(cfg), tmp / "b");
    for (const char* f : {"roc_ml_theta_0.csv", "roc_dmlp_theta_0.3.csv", "summary.json", "roc.svg"}) {
        REQUIRE(std::filesystem::exists(tmp / "a" / f));
        CHECK(slurp(tmp / "a" / f) == slurp(tmp / "b" / f));
    }
    // The resolved config differs only in the thread count.
    REQUIRE(std::filesystem::exists(tmp / "a" / "config.resolved.yaml"));
    CHECK(parse_config_file(tmp / "b" / "config.resolved.yaml").threads == 1);
    CHECK(slurp(tmp / "a" / "roc_ml_theta_0.csv").starts_with("threshold,pfa,pd\n"));
    CHECK(parse_config(slurp(tmp / "a" / "config.resolved.yaml")).seed == 4);

    SUBCASE("score files") {
        std::stringstream ss;
        write_scores_csv(ss, *bundle.points[0].ml, 6);
        std::vector<double> s;
        std::vector<std::uint8_t> l;
        read_scores_csv(ss, s, l);
        CHECK(s == bundle.points[0].ml->scores);
        CHECK(l == bundle.points[0].ml->labels);

        std::stringstream bad("trial,device,score,label\n0,0,0.5,7\n");
        CHECK_THROWS_WITH_AS(read_scores_csv(bad, s, l), doctest::Contains("line 2"), std::runtime_error);
    }
    SUBCASE("failed points are recorded") {
        auto broken = cfg;
        broken.detector = DetectorSelection::ml;
        broken.system.min_ap_spacing = 900;  // beyond the largest torus distance
        const auto r = run_sweep(broken);
        REQUIRE(r.points.size() == 2);
        CHECK_FALSE(r.points[0].ok());
        CHECK_FALSE(check_trends(r).empty());
    }
    std::filesystem::remove_all(tmp);
}

TEST_CASE("svg rendering") {
    const auto roc = compute_roc(std::vector<double>{0.1, 0.4, 0.35, 0.8}, std::vector<std::uint8_t>{0, 0, 1, 1});
    const std::string svg = render_roc_svg({{"ML", &roc}}, "title");
    CHECK(svg.starts_with("<svg"));
    CHECK(svg.find("<polyline") != std::string::npos);
    CHECK(svg.find("AUC 0.7500") != std::string::npos);
}

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

// cfad command-line driver.
//
//   cfad generate --config C --out DIR        dataset container + JSON sidecar
//   cfad train    --config C --out DIR        DMLP checkpoint + loss curves
//   cfad evaluate --config C --out DIR        one operating point, ROC + scores
//   cfad sweep    --config C --out DIR        the configured sweep, ROC per value
//   cfad roc      --scores F.csv --out DIR    ROC/AUC from saved scores
//
// Exit codes: 0 ok, 1 configuration error, 2 runtime failure, 3 trend
// violation in a sweep.

#include "cfad/experiment.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include <chrono>
#include <fstream>
#include <iostream>

namespace {

enum Exit { ok = 0, config_error = 1, runtime_failure = 2, trend_violation = 3 };

struct Overrides {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    std::string detector;
    std::optional<double> theta;
    std::string fixed_point;
    std::optional<double> target_pfa;
    std::string model;
    bool fresh_geometry = false;
    int threads = -1;
};

void add_common(CLI::App* sub, Overrides& o, bool detector_flags) {
    sub->add_option("--config", o.config_path, "experiment configuration (YAML)")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "root seed (overrides experiment.seed)");
    sub->add_option("--out", o.out_dir, "output directory (overrides experiment.output_dir)");
    sub->add_option("--threads", o.threads, "worker threads, 0 = all cores");
    sub->add_flag("--fresh-geometry-test", o.fresh_geometry, "draw an unseen deployment for the test split");
    if (!detector_flags) return;
    sub->add_option("--detector", o.detector, "ml, dmlp or both")->check(CLI::IsMember({"ml", "dmlp", "both"}));
    sub->add_option("--theta", o.theta, "large-scale fading perturbation strength");
    sub->add_option("--fixed-point", o.fixed_point, "quantize beta with format b_q_bits (or 'none')");
    sub->add_option("--target-pfa", o.target_pfa, "false-alarm rate for the reported operating point");
    sub->add_option("--model", o.model, "pretrained DMLP checkpoint");
}

cfad::ExperimentConfig load(const Overrides& o) {
    auto cfg = cfad::parse_config_file(o.config_path);
    if (o.seed) cfg.seed = *o.seed;
    if (!o.out_dir.empty()) cfg.output_dir = o.out_dir;
    if (!o.detector.empty()) cfg.detector = cfad::parse_detector(o.detector);
    if (o.theta) cfg.impairments.theta = *o.theta;
    if (!o.fixed_point.empty()) {
        try {
            cfg.impairments.beta_format = o.fixed_point == "none"
                                              ? std::nullopt
                                              : std::optional(cfad::parse_fixed_point(o.fixed_point));
        } catch (const std::invalid_argument& e) {
            throw cfad::ConfigError(e.what());
        }
    }
    if (o.target_pfa) cfg.target_pfa = *o.target_pfa;
    if (!o.model.empty()) cfg.model_path = o.model;
    if (o.fresh_geometry) cfg.fresh_test_geometry = true;
    if (o.threads >= 0) cfg.threads = o.threads;
    cfg.validate();
    return cfg;
}

void log(const std::string& msg) { std::cerr << msg << std::endl; }

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int run_generate(const Overrides& o) {
    const auto cfg = load(o);
    const std::filesystem::path dir = cfg.output_dir;
    std::filesystem::create_directories(dir);
    cfad::DatasetOptions opts;
    opts.fresh_test_geometry = cfg.fresh_test_geometry;
    opts.unit_norm_pilots = cfg.unit_norm_pilots;
    const auto t0 = std::chrono::steady_clock::now();
    const auto ds = cfad::generate_dataset(cfg.system, {cfg.train_samples, cfg.validation_samples, cfg.test_samples},
                                           cfg.seed, opts);
    cfad::write_dataset(dir / "dataset.cfad", ds);

    nlohmann::ordered_json side;
    side["container"] = "dataset.cfad";
    side["seed"] = cfg.seed;
    side["counts"] = {{"train", ds.train.size()}, {"validation", ds.validation.size()}, {"test", ds.test.size()}};
    side["fresh_test_geometry"] = cfg.fresh_test_geometry;
    side["config_yaml"] = cfad::serialize_config(cfg);
    std::ofstream(dir / "dataset.json") << side.dump(2) << "\n";
    log(fmt::format("wrote {} samples to {} in {:.1f} s", ds.train.size() + ds.validation.size() + ds.test.size(),
                    (dir / "dataset.cfad").string(), seconds_since(t0)));
    return ok;
}

int run_train(const Overrides& o, const std::string& dataset_path) {
    const auto cfg = load(o);
    const std::filesystem::path dir = cfg.output_dir;
    std::filesystem::create_directories(dir);
    const auto t0 = std::chrono::steady_clock::now();
    const cfad::Dataset ds =
        dataset_path.empty() ? cfad::make_training_data(cfg, cfg.system) : cfad::read_dataset(dataset_path);
    if (!dataset_path.empty() && (ds.num_aps != cfg.system.num_aps || ds.num_devices != cfg.system.num_devices ||
                                  ds.pilot_len != cfg.system.pilot_len || ds.cluster_size != cfg.system.cluster_size ||
                                  ds.antennas != cfg.system.antennas_per_ap))
        throw cfad::ConfigError("dataset dimensions do not match the configuration");
    cfad::TrainingReport rep;
    const auto model = cfad::train(ds, cfg.mlp, &rep);
    cfad::save_checkpoint(dir / "model.cfdm", model);

    nlohmann::ordered_json j;
    j["seed"] = cfg.seed;
    j["best_epoch"] = rep.best_epoch;
    j["train_loss"] = rep.train_loss;
    j["val_loss"] = rep.val_loss;
    std::ofstream(dir / "training.json") << j.dump(2) << "\n";
    std::ofstream(dir / "config.resolved.yaml") << cfad::serialize_config(cfg);
    log(fmt::format("trained {} epochs (best {}) in {:.1f} s -> {}", rep.train_loss.size(), rep.best_epoch,
                    seconds_since(t0), (dir / "model.cfdm").string()));
    return ok;
}

int finish_sweep(const cfad::ResultBundle& bundle, const std::filesystem::path& dir) {
    cfad::emit_report(bundle, dir);
    for (const auto& p : bundle.points) {
        std::string line = fmt::format("{}={}:", cfad::to_string(bundle.config.axis), p.value);
        if (p.ml) line += fmt::format(" ml AUC {:.4f}", p.ml->roc.auc);
        if (p.dmlp) line += fmt::format(" dmlp AUC {:.4f}", p.dmlp->roc.auc);
        if (!p.ok()) line += " FAILED: " + p.error;
        std::cout << line << "\n";
    }
    bool failed = false;
    for (const auto& p : bundle.points) failed |= !p.ok();
    if (failed) return runtime_failure;
    const auto violations = cfad::check_trends(bundle);
    for (const auto& v : violations) std::cout << "trend violation: " << v << "\n";
    return violations.empty() ? ok : trend_violation;
}

int run_evaluate(const Overrides& o) {
    auto cfg = load(o);
    cfg.axis = cfad::SweepAxis::none;
    cfg.sweep_values.clear();
    const auto bundle = cfad::run_sweep(cfg, log);
    const std::filesystem::path dir = cfg.output_dir;
    const int rc = finish_sweep(bundle, dir);
    const auto& p = bundle.points.front();
    for (const auto& [name, outcome] : {std::pair{"ml", &p.ml}, std::pair{"dmlp", &p.dmlp}}) {
        if (!*outcome) continue;
        std::ofstream os(dir / fmt::format("scores_{}.csv", name), std::ios::binary);
        cfad::write_scores_csv(os, **outcome, p.system.num_devices);
    }
    return rc;
}

int run_sweep_cmd(const Overrides& o) {
    const auto cfg = load(o);
    if (cfg.axis == cfad::SweepAxis::none) log("note: sweep_axis is none, evaluating a single point");
    return finish_sweep(cfad::run_sweep(cfg, log), cfg.output_dir);
}

int run_roc(const std::vector<std::string>& inputs, const std::string& out, double target_pfa) {
    const std::filesystem::path dir = out.empty() ? "." : out;
    std::filesystem::create_directories(dir);
    std::vector<cfad::RocCurve> curves(inputs.size());
    std::vector<std::pair<std::string, const cfad::RocCurve*>> overlay;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        std::ifstream is(inputs[i]);
        if (!is) throw std::runtime_error("cannot open " + inputs[i]);
        std::vector<double> scores;
        std::vector<std::uint8_t> labels;
        cfad::read_scores_csv(is, scores, labels);
        curves[i] = cfad::compute_roc(scores, labels);
        const auto cal = cfad::calibrate_threshold(scores, labels, target_pfa);
        const std::string stem = std::filesystem::path(inputs[i]).stem().string();
        std::ofstream os(dir / ("roc_" + stem + ".csv"), std::ios::binary);
        cfad::write_roc_csv(os, curves[i]);
        overlay.emplace_back(stem, &curves[i]);
        std::cout << fmt::format("{}: AUC {:.6f}, tau {:.6g} -> P_FA {:.4f}, P_D {:.4f}{}\n", stem, curves[i].auc,
                                 cal.threshold, cal.pfa, cal.pd, cal.unreachable ? " (target unreachable)" : "");
    }
    std::ofstream(dir / "roc.svg") << cfad::render_roc_svg(overlay, "ROC");
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cfad: grant-free activity detection experiments (ML vs DMLP)"};
    app.require_subcommand(1);

    Overrides gen_o, train_o, eval_o, sweep_o;
    std::string dataset_path;
    add_common(app.add_subcommand("generate", "generate and persist a dataset"), gen_o, false);
    auto* train_cmd = app.add_subcommand("train", "train the DMLP detector");
    add_common(train_cmd, train_o, false);
    train_cmd->add_option("--dataset", dataset_path, "train on an existing dataset container")
        ->check(CLI::ExistingFile);
    add_common(app.add_subcommand("evaluate", "evaluate the detectors at one operating point"), eval_o, true);
    add_common(app.add_subcommand("sweep", "run the configured parameter sweep"), sweep_o, true);

    auto* roc_cmd = app.add_subcommand("roc", "ROC and AUC from saved score files");
    std::vector<std::string> score_files;
    std::string roc_out;
    double roc_pfa = 0.1;
    roc_cmd->add_option("--scores", score_files, "trial,device,score,label CSV (repeatable)")
        ->required()
        ->check(CLI::ExistingFile);
    roc_cmd->add_option("--out", roc_out, "output directory");
    roc_cmd->add_option("--target-pfa", roc_pfa, "false-alarm rate for the reported threshold")
        ->check(CLI::Range(0.0, 1.0));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? ok : config_error;
    }

    try {
        if (app.got_subcommand("generate")) return run_generate(gen_o);
        if (app.got_subcommand("train")) return run_train(train_o, dataset_path);
        if (app.got_subcommand("evaluate")) return run_evaluate(eval_o);
        if (app.got_subcommand("sweep")) return run_sweep_cmd(sweep_o);
        if (app.got_subcommand("roc")) return run_roc(score_files, roc_out, roc_pfa);
    } catch (const cfad::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return config_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return runtime_failure;
    }
    return ok;
}

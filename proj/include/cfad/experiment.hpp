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

#ifndef CFAD_EXPERIMENT_HPP
#define CFAD_EXPERIMENT_HPP

#include "cfad/config.hpp"
#include "cfad/dataset.hpp"
#include "cfad/dmlp.hpp"
#include "cfad/eval.hpp"
#include "cfad/impairments.hpp"
#include "cfad/ml_detector.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cfad {

// Malformed or invalid experiment configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class DetectorSelection { ml, dmlp, both };
enum class SweepAxis { none, pilot_len, activity_prob, theta, fixed_point };

struct ImpairmentConfig {
    double theta = 0.0;
    FadingDomain perturbation_domain = FadingDomain::db;
    std::optional<FixedPointFormat> beta_format;
    FadingDomain beta_quant_domain = FadingDomain::db;
    std::optional<FixedPointFormat> signal_format;
    // Received samples are divided by signal_full_scale * sigma before
    // quantization, so 1.0 on the fixed-point grid is this many noise
    // standard deviations.
    double signal_full_scale = 1.0;

    bool operator==(const ImpairmentConfig&) const = default;
};

struct ExperimentConfig {
    SystemConfig system;
    bool unit_norm_pilots = false;
    MlpHyperparams mlp;
    MlOptions ml;
    bool ml_cluster_restricted = false;
    ImpairmentConfig impairments;
    DetectorSelection detector = DetectorSelection::both;
    SweepAxis axis = SweepAxis::none;
    std::vector<std::string> sweep_values;
    std::size_t train_samples = 50000;
    std::size_t validation_samples = 20000;
    std::size_t test_samples = 20000;  // Monte-Carlo slots per evaluation point
    std::uint64_t seed = 1;
    double target_pfa = 0.1;
    std::string output_dir = "results";
    bool fresh_test_geometry = false;
    int threads = 1;
    std::string model_path;  // pretrained checkpoint; empty means train

    void validate() const;
    bool operator==(const ExperimentConfig& o) const;
};

const char* to_string(SweepAxis axis);
const char* to_string(DetectorSelection d);
SweepAxis parse_sweep_axis(const std::string& text);
DetectorSelection parse_detector(const std::string& text);

// YAML configuration with sections system, mlp, ml, impairments and
// experiment. Unknown keys and missing required keys raise ConfigError with
// the offending line.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig parse_config_file(const std::filesystem::path& path);
std::string serialize_config(const ExperimentConfig& cfg);

// Keys that must be present in every configuration file.
const std::vector<std::string>& required_config_keys();

bool uses_ml(DetectorSelection d);
bool uses_dmlp(DetectorSelection d);

// The training set of an experiment: one deployment drawn from the seed,
// train and validation samples, and (with fresh_test_geometry) a second
// geometry for testing.
Dataset make_training_data(const ExperimentConfig& exp, const SystemConfig& sys);

MlpModel train_detector(const ExperimentConfig& exp, const SystemConfig& sys, TrainingReport* report = nullptr);

struct DetectorOutcome {
    RocCurve roc;
    Calibration operating_point;
    std::vector<double> scores;        // [trial][device]
    std::vector<std::uint8_t> labels;  // [trial][device]
};

struct PointResult {
    std::string value;  // sweep value as written in the config, or "base"
    SystemConfig system;
    ImpairmentConfig impairments;
    std::optional<DetectorOutcome> ml;
    std::optional<DetectorOutcome> dmlp;
    std::string error;  // empty on success

    bool ok() const { return error.empty(); }
};

struct ResultBundle {
    ExperimentConfig config;
    std::vector<PointResult> points;
};

// Runs both detectors on identical realizations: trial i draws activity,
// fading and noise from stream (seed, trial, i); estimation errors come from
// (seed, perturbation, i). The DMLP sees only the cluster selection derived
// from the impaired coefficients; the ML detector uses them in its model.
PointResult evaluate_point(const ExperimentConfig& exp, const SystemConfig& sys, const ImpairmentConfig& imp,
                           const Dataset& geometry_source, const MlpModel* model);

using ProgressFn = std::function<void(const std::string&)>;

// One point per sweep value (or a single "base" point). DMLP models are
// trained once per distinct system configuration. Failures are recorded
// per point and the sweep continues.
ResultBundle run_sweep(const ExperimentConfig& exp, const ProgressFn& progress = {});

// Expected monotone trends along the sweep axis; returns human-readable
// violations (empty when the trend holds or the axis has none).
std::vector<std::string> check_trends(const ResultBundle& bundle);

// Writes config.resolved.yaml, summary.json, one ROC CSV per point and
// detector, and roc.svg into dir.
void emit_report(const ResultBundle& bundle, const std::filesystem::path& dir);

// Per-(trial, device) scores as "trial,device,score,label" with 17 significant digits.
void write_scores_csv(std::ostream& os, const DetectorOutcome& outcome, int num_devices);
// Reads the score and label columns back; throws std::runtime_error with the line number.
void read_scores_csv(std::istream& is, std::vector<double>& scores, std::vector<std::uint8_t>& labels);

// Standalone SVG of the given ROC curves.
std::string render_roc_svg(const std::vector<std::pair<std::string, const RocCurve*>>& curves,
                           const std::string& title);

}  // namespace cfad

#endif

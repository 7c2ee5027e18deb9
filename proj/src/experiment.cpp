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

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

namespace cfad {

const char* to_string(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::none: return "none";
        case SweepAxis::pilot_len: return "pilot_len";
        case SweepAxis::activity_prob: return "activity_prob";
        case SweepAxis::theta: return "theta";
        case SweepAxis::fixed_point: return "fixed_point";
    }
    return "none";
}

const char* to_string(DetectorSelection d) {
    switch (d) {
        case DetectorSelection::ml: return "ml";
        case DetectorSelection::dmlp: return "dmlp";
        case DetectorSelection::both: return "both";
    }
    return "both";
}

SweepAxis parse_sweep_axis(const std::string& text) {
    for (auto axis : {SweepAxis::none, SweepAxis::pilot_len, SweepAxis::activity_prob, SweepAxis::theta,
                      SweepAxis::fixed_point})
        if (text == to_string(axis)) return axis;
    throw ConfigError("unknown sweep axis '" + text + "' (expected none, pilot_len, activity_prob, theta, fixed_point)");
}

DetectorSelection parse_detector(const std::string& text) {
    for (auto d : {DetectorSelection::ml, DetectorSelection::dmlp, DetectorSelection::both})
        if (text == to_string(d)) return d;
    throw ConfigError("unknown detector '" + text + "' (expected ml, dmlp or both)");
}

bool uses_ml(DetectorSelection d) { return d != DetectorSelection::dmlp; }
bool uses_dmlp(DetectorSelection d) { return d != DetectorSelection::ml; }

namespace {

const char* to_string(FadingDomain d) { return d == FadingDomain::db ? "db" : "linear"; }

FadingDomain parse_domain(const std::string& text) {
    if (text == "db") return FadingDomain::db;
    if (text == "linear") return FadingDomain::linear;
    throw ConfigError("unknown fading domain '" + text + "' (expected db or linear)");
}

std::optional<FixedPointFormat> parse_optional_format(const std::string& text) {
    if (text == "none" || text.empty()) return std::nullopt;
    try {
        return parse_fixed_point(text);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

std::string format_label(const std::optional<FixedPointFormat>& f) { return f ? f->label() : "none"; }

// One configurable key: how to read it from a YAML scalar and how to write it.
struct Binding {
    std::function<void(ExperimentConfig&, const YAML::Node&)> read;
    std::function<void(const ExperimentConfig&, YAML::Emitter&)> write;
};

template <typename T>
T scalar(const YAML::Node& node) {
    return node.as<T>();
}

#define CFAD_FIELD(expr, type)                                                            \
    Binding {                                                                             \
        [](ExperimentConfig& c, const YAML::Node& n) { c.expr = scalar<type>(n); },      \
            [](const ExperimentConfig& c, YAML::Emitter& e) { e << YAML::Value << c.expr; } \
    }

using Section = std::vector<std::pair<std::string, Binding>>;

const std::vector<std::pair<std::string, Section>>& schema() {
    static const std::vector<std::pair<std::string, Section>> s = {
        {"system",
         {
             {"num_aps", CFAD_FIELD(system.num_aps, int)},
             {"antennas_per_ap", CFAD_FIELD(system.antennas_per_ap, int)},
             {"num_devices", CFAD_FIELD(system.num_devices, int)},
             {"pilot_len", CFAD_FIELD(system.pilot_len, int)},
             {"cluster_size", CFAD_FIELD(system.cluster_size, int)},
             {"area_side_m", CFAD_FIELD(system.area_side, double)},
             {"activity_prob", CFAD_FIELD(system.activity_prob, double)},
             {"tx_power_w", CFAD_FIELD(system.tx_power, double)},
             {"noise_power_w", CFAD_FIELD(system.noise_power, double)},
             // dBm spellings are accepted on input; output is always watts.
             {"tx_power_dbm",
              {[](ExperimentConfig& c, const YAML::Node& n) { c.system.tx_power = dbm_to_watts(n.as<double>()); },
               nullptr}},
             {"noise_power_dbm",
              {[](ExperimentConfig& c, const YAML::Node& n) { c.system.noise_power = dbm_to_watts(n.as<double>()); },
               nullptr}},
             {"shadow_std_db", CFAD_FIELD(system.shadow_std_db, double)},
             {"coherence_symbols", CFAD_FIELD(system.coherence_symbols, int)},
             {"placement_margin_m", CFAD_FIELD(system.placement_margin, double)},
             {"min_ap_spacing_m", CFAD_FIELD(system.min_ap_spacing, double)},
             {"min_device_ap_spacing_m", CFAD_FIELD(system.min_device_ap_spacing, double)},
             {"unit_norm_pilots", CFAD_FIELD(unit_norm_pilots, bool)},
         }},
        {"mlp",
         {
             {"hidden_layers", CFAD_FIELD(mlp.hidden_layers, int)},
             {"neurons", CFAD_FIELD(mlp.neurons, int)},
             {"learning_rate", CFAD_FIELD(mlp.learning_rate, double)},
             {"batch_size", CFAD_FIELD(mlp.batch_size, int)},
             {"max_epochs", CFAD_FIELD(mlp.max_epochs, int)},
             {"patience", CFAD_FIELD(mlp.patience, int)},
             {"seed", CFAD_FIELD(mlp.seed, std::uint64_t)},
             {"tied_branches", CFAD_FIELD(mlp.tied_branches, bool)},
             {"positive_weight", CFAD_FIELD(mlp.positive_weight, double)},
         }},
        {"ml",
         {
             {"max_sweeps", CFAD_FIELD(ml.max_sweeps, int)},
             {"tolerance", CFAD_FIELD(ml.tolerance, double)},
             {"cluster_restricted", CFAD_FIELD(ml_cluster_restricted, bool)},
         }},
        {"impairments",
         {
             {"theta", CFAD_FIELD(impairments.theta, double)},
             {"perturbation_domain",
              {[](ExperimentConfig& c, const YAML::Node& n) {
                   c.impairments.perturbation_domain = parse_domain(n.as<std::string>());
               },
               [](const ExperimentConfig& c, YAML::Emitter& e) {
                   e << YAML::Value << to_string(c.impairments.perturbation_domain);
               }}},
             {"beta_format",
              {[](ExperimentConfig& c, const YAML::Node& n) {
                   c.impairments.beta_format = parse_optional_format(n.as<std::string>());
               },
               [](const ExperimentConfig& c, YAML::Emitter& e) {
                   e << YAML::Value << format_label(c.impairments.beta_format);
               }}},
             {"beta_quant_domain",
              {[](ExperimentConfig& c, const YAML::Node& n) {
                   c.impairments.beta_quant_domain = parse_domain(n.as<std::string>());
               },
               [](const ExperimentConfig& c, YAML::Emitter& e) {
                   e << YAML::Value << to_string(c.impairments.beta_quant_domain);
               }}},
             {"signal_format",
              {[](ExperimentConfig& c, const YAML::Node& n) {
                   c.impairments.signal_format = parse_optional_format(n.as<std::string>());
               },
               [](const ExperimentConfig& c, YAML::Emitter& e) {
                   e << YAML::Value << format_label(c.impairments.signal_format);
               }}},
             {"signal_full_scale", CFAD_FIELD(impairments.signal_full_scale, double)},
         }},
        {"experiment",
         {
             {"detector",
              {[](ExperimentConfig& c, const YAML::Node& n) { c.detector = parse_detector(n.as<std::string>()); },
               [](const ExperimentConfig& c, YAML::Emitter& e) { e << YAML::Value << to_string(c.detector); }}},
             {"sweep_axis",
              {[](ExperimentConfig& c, const YAML::Node& n) { c.axis = parse_sweep_axis(n.as<std::string>()); },
               [](const ExperimentConfig& c, YAML::Emitter& e) { e << YAML::Value << to_string(c.axis); }}},
             {"sweep_values",
              {[](ExperimentConfig& c, const YAML::Node& n) {
                   if (!n.IsSequence()) throw YAML::TypedBadConversion<std::vector<std::string>>(n.Mark());
                   c.sweep_values = n.as<std::vector<std::string>>();
               },
               [](const ExperimentConfig& c, YAML::Emitter& e) {
                   e << YAML::Value << YAML::Flow << YAML::BeginSeq;
                   for (const auto& v : c.sweep_values) e << v;
                   e << YAML::EndSeq;
               }}},
             {"train_samples", CFAD_FIELD(train_samples, std::size_t)},
             {"validation_samples", CFAD_FIELD(validation_samples, std::size_t)},
             {"test_samples", CFAD_FIELD(test_samples, std::size_t)},
             {"seed", CFAD_FIELD(seed, std::uint64_t)},
             {"target_pfa", CFAD_FIELD(target_pfa, double)},
             {"output_dir", CFAD_FIELD(output_dir, std::string)},
             {"fresh_test_geometry", CFAD_FIELD(fresh_test_geometry, bool)},
             {"threads", CFAD_FIELD(threads, int)},
             {"model_path", CFAD_FIELD(model_path, std::string)},
         }},
    };
    return s;
}

#undef CFAD_FIELD

std::string where(const YAML::Mark& mark) {
    return mark.is_null() ? std::string("config") : "line " + std::to_string(mark.line + 1);
}

}  // namespace

const std::vector<std::string>& required_config_keys() {
    static const std::vector<std::string> keys = {
        "system.num_aps",     "system.antennas_per_ap", "system.num_devices",
        "system.pilot_len",   "system.cluster_size",    "system.activity_prob",
        "experiment.test_samples", "experiment.seed",
    };
    return keys;
}

void ExperimentConfig::validate() const {
    try {
        system.validate();
        mlp.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (ml.max_sweeps < 1) throw ConfigError("ml.max_sweeps must be >= 1");
    if (!(ml.tolerance >= 0.0)) throw ConfigError("ml.tolerance must be >= 0");
    if (!(impairments.theta >= 0.0 && impairments.theta <= 1.0)) throw ConfigError("impairments.theta must be in [0, 1]");
    if (!(impairments.signal_full_scale > 0.0)) throw ConfigError("impairments.signal_full_scale must be > 0");
    if (test_samples < 1) throw ConfigError("experiment.test_samples must be >= 1");
    if (!(target_pfa > 0.0 && target_pfa <= 1.0)) throw ConfigError("experiment.target_pfa must be in (0, 1]");
    if (threads < 0) throw ConfigError("experiment.threads must be >= 0");
    if (uses_dmlp(detector) && model_path.empty() && (train_samples < 1 || validation_samples < 1))
        throw ConfigError("experiment.train_samples and validation_samples must be >= 1 to train the DMLP");
    if (axis == SweepAxis::none && !sweep_values.empty())
        throw ConfigError("experiment.sweep_values given but sweep_axis is none");
    if (axis != SweepAxis::none && sweep_values.empty()) throw ConfigError("experiment.sweep_values is empty");
    for (const auto& v : sweep_values) {
        try {
            switch (axis) {
                case SweepAxis::pilot_len: {
                    SystemConfig s = system;
                    std::size_t used = 0;
                    s.pilot_len = std::stoi(v, &used);
                    if (used != v.size()) throw std::invalid_argument("trailing characters");
                    s.validate();
                    break;
                }
                case SweepAxis::activity_prob: {
                    SystemConfig s = system;
                    std::size_t used = 0;
                    s.activity_prob = std::stod(v, &used);
                    if (used != v.size()) throw std::invalid_argument("trailing characters");
                    s.validate();
                    break;
                }
                case SweepAxis::theta: {
                    std::size_t used = 0;
                    const double t = std::stod(v, &used);
                    if (used != v.size() || !(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("theta outside [0, 1]");
                    break;
                }
                case SweepAxis::fixed_point:
                    if (v != "none") parse_fixed_point(v);
                    break;
                case SweepAxis::none: break;
            }
        } catch (const std::exception& e) {
            throw ConfigError(std::string("invalid sweep value '") + v + "' for axis " + to_string(axis) + ": " +
                              e.what());
        }
    }
}

bool ExperimentConfig::operator==(const ExperimentConfig& o) const {
    return system == o.system && unit_norm_pilots == o.unit_norm_pilots && mlp == o.mlp &&
           ml.max_sweeps == o.ml.max_sweeps && ml.tolerance == o.ml.tolerance &&
           ml_cluster_restricted == o.ml_cluster_restricted && impairments == o.impairments &&
           detector == o.detector && axis == o.axis && sweep_values == o.sweep_values &&
           train_samples == o.train_samples && validation_samples == o.validation_samples &&
           test_samples == o.test_samples && seed == o.seed && target_pfa == o.target_pfa &&
           output_dir == o.output_dir && fresh_test_geometry == o.fresh_test_geometry && threads == o.threads &&
           model_path == o.model_path;
}

ExperimentConfig parse_config(const std::string& text) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError("malformed YAML at " + where(e.mark) + ": " + e.msg);
    }

    std::set<std::string> seen;
    ExperimentConfig cfg;
    if (root.IsNull()) {
        // fall through to the required-key report
    } else if (!root.IsMap()) {
        throw ConfigError("configuration must be a mapping of sections (" + where(root.Mark()) + ")");
    } else {
        for (const auto& section : root) {
            const auto name = section.first.as<std::string>();
            const auto it = std::ranges::find(schema(), name, &std::pair<std::string, Section>::first);
            if (it == schema().end()) throw ConfigError(where(section.first.Mark()) + ": unknown section '" + name + "'");
            if (section.second.IsNull()) continue;
            if (!section.second.IsMap())
                throw ConfigError(where(section.second.Mark()) + ": section '" + name + "' must be a mapping");
            for (const auto& entry : section.second) {
                const auto key = entry.first.as<std::string>();
                const auto field = std::ranges::find(it->second, key, &std::pair<std::string, Binding>::first);
                if (field == it->second.end())
                    throw ConfigError(where(entry.first.Mark()) + ": unknown key '" + name + "." + key + "'");
                try {
                    field->second.read(cfg, entry.second);
                } catch (const YAML::Exception& e) {
                    throw ConfigError(where(entry.second.Mark()) + ": invalid value for '" + name + "." + key + "'");
                } catch (const ConfigError& e) {
                    throw ConfigError(where(entry.second.Mark()) + ": " + name + "." + key + ": " + e.what());
                }
                seen.insert(name + "." + key);
            }
        }
    }

    for (const char* q : {"system.tx_power", "system.noise_power"})
        if (seen.contains(std::string(q) + "_w") && seen.contains(std::string(q) + "_dbm"))
            throw ConfigError(std::string("both ") + q + "_w and " + q + "_dbm given");

    std::vector<std::string> missing;
    for (const auto& k : required_config_keys())
        if (!seen.contains(k)) missing.push_back(k);
    if (!missing.empty()) {
        std::string msg = "missing required keys:";
        for (const auto& k : missing) msg += " " + k;
        throw ConfigError(msg);
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig parse_config_file(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file " + path.string());
    std::stringstream ss;
    ss << is.rdbuf();
    try {
        return parse_config(ss.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

std::string serialize_config(const ExperimentConfig& cfg) {
    YAML::Emitter e;
    e.SetDoublePrecision(17);
    e << YAML::BeginMap;
    for (const auto& [name, section] : schema()) {
        e << YAML::Key << name << YAML::Value << YAML::BeginMap;
        for (const auto& [key, binding] : section) {
            if (!binding.write) continue;
            e << YAML::Key << key;
            binding.write(cfg, e);
        }
        e << YAML::EndMap;
    }
    e << YAML::EndMap;
    return std::string(e.c_str()) + "\n";
}

// ---------------------------------------------------------------------------

Dataset make_training_data(const ExperimentConfig& exp, const SystemConfig& sys) {
    DatasetOptions opts;
    opts.fresh_test_geometry = exp.fresh_test_geometry;
    opts.unit_norm_pilots = exp.unit_norm_pilots;
    return generate_dataset(sys, {exp.train_samples, exp.validation_samples, 0}, exp.seed, opts);
}

MlpModel train_detector(const ExperimentConfig& exp, const SystemConfig& sys, TrainingReport* report) {
    return train(make_training_data(exp, sys), exp.mlp, report);
}

namespace {

DetectorOutcome summarize(std::vector<double> scores, std::vector<std::uint8_t> labels, double target_pfa) {
    DetectorOutcome out;
    out.roc = compute_roc(scores, labels);
    out.operating_point = calibrate_threshold(scores, labels, target_pfa);
    out.scores = std::move(scores);
    out.labels = std::move(labels);
    return out;
}

int worker_count(int requested) {
    if (requested > 0) return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace

PointResult evaluate_point(const ExperimentConfig& exp, const SystemConfig& sys, const ImpairmentConfig& imp,
                           const Dataset& geometry_source, const MlpModel* model) {
    const bool run_ml = uses_ml(exp.detector);
    const bool run_dmlp = uses_dmlp(exp.detector);
    if (run_dmlp && model == nullptr) throw std::invalid_argument("evaluate_point: DMLP requested without a model");

    const Geometry& geo = geometry_source.geometry(Split::test);
    const LargeScaleFading truth = fading_from_db(geo.beta_db);
    const PilotBook& pilots = geometry_source.pilots;
    const std::size_t trials = exp.test_samples;
    const auto devices = static_cast<std::size_t>(sys.num_devices);

    std::vector<double> ml_scores(run_ml ? trials * devices : 0);
    std::vector<double> dmlp_scores(run_dmlp ? trials * devices : 0);
    std::vector<std::uint8_t> labels(trials * devices);

    MlOptions ml_opts = exp.ml;
    ml_opts.record_costs = false;
    ml_opts.check_descent = false;
    const double signal_scale = imp.signal_full_scale * std::sqrt(sys.noise_power);

    auto run_trial = [&](std::size_t i) {
        Rng rng = make_stream(exp.seed, Stream::trial, i);
        const ActivityVector a = sample_activity(sys.activity_prob, sys.num_devices, rng);
        ReceivedSignal y = simulate_received(truth.beta_lin, pilots, a, sys, rng);
        if (imp.signal_format) y = quantize_signal(y, *imp.signal_format, signal_scale);

        LargeScaleFading estimate = truth;
        if (imp.theta > 0.0) {
            Rng perturb_rng = make_stream(exp.seed, Stream::perturbation, i);
            estimate = perturb_beta(estimate, {imp.theta, imp.perturbation_domain}, perturb_rng);
        }
        if (imp.beta_format) estimate = quantize_beta(estimate, *imp.beta_format, imp.beta_quant_domain);
        const bool impaired = imp.theta > 0.0 || imp.beta_format.has_value();
        const ClusterAssignment clusters =
            impaired ? select_clusters(estimate.beta_db, sys.cluster_size) : geo.clusters;

        std::copy(a.begin(), a.end(), labels.begin() + static_cast<std::ptrdiff_t>(i * devices));
        if (run_ml) {
            const MlProblem prob =
                build_ml_problem(y, pilots, estimate.beta_lin, sys, clusters, exp.ml_cluster_restricted);
            const SoftScores s = ml_coordinate_descent(prob, ml_opts);
            std::copy(s.score.begin(), s.score.end(), ml_scores.begin() + static_cast<std::ptrdiff_t>(i * devices));
        }
        if (run_dmlp) {
            const Eigen::VectorXd p = predict_all(*model, y, pilots, clusters);
            std::copy(p.begin(), p.end(), dmlp_scores.begin() + static_cast<std::ptrdiff_t>(i * devices));
        }
    };

    // Trials are independent and write disjoint slices, so the result does
    // not depend on the worker count.
    const int workers = std::min<int>(worker_count(exp.threads), static_cast<int>(trials));
    if (workers <= 1) {
        for (std::size_t i = 0; i < trials; ++i) run_trial(i);
    } else {
        std::vector<std::exception_ptr> errors(workers);
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t i = w; i < trials; i += workers) run_trial(i);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        for (auto& t : pool) t.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }

    PointResult result;
    result.system = sys;
    result.impairments = imp;
    if (run_ml) result.ml = summarize(std::move(ml_scores), labels, exp.target_pfa);
    if (run_dmlp) result.dmlp = summarize(std::move(dmlp_scores), std::move(labels), exp.target_pfa);
    return result;
}

ResultBundle run_sweep(const ExperimentConfig& exp, const ProgressFn& progress) {
    exp.validate();
    auto log = [&](const std::string& msg) {
        if (progress) progress(msg);
    };

    ResultBundle bundle;
    bundle.config = exp;
    std::vector<std::string> values = exp.sweep_values;
    if (exp.axis == SweepAxis::none) values = {"base"};

    std::optional<MlpModel> pretrained;
    if (uses_dmlp(exp.detector) && !exp.model_path.empty()) pretrained = load_checkpoint(exp.model_path);

    // Keyed by (L, epsilon): the only system parameters a sweep changes.
    std::map<std::pair<int, double>, MlpModel> models;

    for (const auto& value : values) {
        SystemConfig sys = exp.system;
        ImpairmentConfig imp = exp.impairments;
        switch (exp.axis) {
            case SweepAxis::pilot_len: sys.pilot_len = std::stoi(value); break;
            case SweepAxis::activity_prob: sys.activity_prob = std::stod(value); break;
            case SweepAxis::theta: imp.theta = std::stod(value); break;
            case SweepAxis::fixed_point:
                imp.beta_format = value == "none" ? std::nullopt : std::optional(parse_fixed_point(value));
                break;
            case SweepAxis::none: break;
        }
        PointResult point;
        try {
            log(std::string("point ") + to_string(exp.axis) + "=" + value + ": preparing geometry");
            // Geometry only, unless a model has to be trained here.
            ExperimentConfig geo_only = exp;
            if (!uses_dmlp(exp.detector) || pretrained) geo_only.train_samples = geo_only.validation_samples = 0;
            const Dataset data = make_training_data(geo_only, sys);
            const MlpModel* model = nullptr;
            if (uses_dmlp(exp.detector)) {
                if (pretrained) {
                    model = &*pretrained;
                } else {
                    const auto key = std::make_pair(sys.pilot_len, sys.activity_prob);
                    auto it = models.find(key);
                    if (it == models.end()) {
                        log("  training DMLP");
                        TrainingReport rep;
                        it = models.emplace(key, train(data, exp.mlp, &rep)).first;
                        log("  trained " + std::to_string(rep.train_loss.size()) + " epochs, best epoch " +
                            std::to_string(rep.best_epoch));
                    }
                    model = &it->second;
                }
            }
            log("  evaluating " + std::to_string(exp.test_samples) + " slots");
            point = evaluate_point(exp, sys, imp, data, model);
        } catch (const std::exception& e) {
            point.system = sys;
            point.impairments = imp;
            point.error = e.what();
            log("  failed: " + point.error);
        }
        point.value = value;
        bundle.points.push_back(std::move(point));
    }
    return bundle;
}

std::vector<std::string> check_trends(const ResultBundle& bundle) {
    std::vector<std::string> violations;
    const auto& pts = bundle.points;
    auto auc = [](const std::optional<DetectorOutcome>& d) { return d ? d->roc.auc : std::nan(""); };
    auto check_pair = [&](const char* name, auto get, bool increasing) {
        for (std::size_t i = 1; i < pts.size(); ++i) {
            if (!pts[i - 1].ok() || !pts[i].ok()) continue;
            const double a = auc(get(pts[i - 1]));
            const double b = auc(get(pts[i]));
            if (std::isnan(a) || std::isnan(b)) continue;
            if (increasing ? !(b > a) : !(b < a))
                violations.push_back(std::string(name) + ": AUC " + (increasing ? "did not increase" : "did not decrease") +
                                     " from " + pts[i - 1].value + " to " + pts[i].value);
        }
    };
    auto ml = [](const PointResult& p) -> const std::optional<DetectorOutcome>& { return p.ml; };
    auto dmlp = [](const PointResult& p) -> const std::optional<DetectorOutcome>& { return p.dmlp; };

    // Trends are checked in the order the values are listed.
    switch (bundle.config.axis) {
        case SweepAxis::pilot_len:
            check_pair("ml", ml, true);
            check_pair("dmlp", dmlp, true);
            break;
        case SweepAxis::activity_prob:
            check_pair("ml", ml, false);
            check_pair("dmlp", dmlp, false);
            break;
        case SweepAxis::theta:
            if (pts.size() >= 2 && pts.front().ok() && pts.back().ok() && pts.front().ml && pts.front().dmlp) {
                const double ml_drop = auc(pts.front().ml) - auc(pts.back().ml);
                const double dmlp_drop = auc(pts.front().dmlp) - auc(pts.back().dmlp);
                if (!(ml_drop > dmlp_drop))
                    violations.push_back("theta: ML AUC drop does not exceed DMLP AUC drop");
            }
            break;
        case SweepAxis::fixed_point:
        case SweepAxis::none: break;
    }
    for (const auto& p : pts)
        if (!p.ok()) violations.push_back("point " + p.value + " failed: " + p.error);
    return violations;
}

}  // namespace cfad

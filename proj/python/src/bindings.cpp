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

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace cfad;

namespace {

using namespace py::literals;

py::array_t<double> roc_array(const RocCurve& roc) {
    py::array_t<double> out({static_cast<py::ssize_t>(roc.points.size()), py::ssize_t{3}});
    auto v = out.mutable_unchecked<2>();
    for (std::size_t i = 0; i < roc.points.size(); ++i) {
        v(i, 0) = roc.points[i].threshold;
        v(i, 1) = roc.points[i].pfa;
        v(i, 2) = roc.points[i].pd;
    }
    return out;
}

py::dict outcome_dict(const DetectorOutcome& o, int num_devices) {
    const auto trials = static_cast<py::ssize_t>(o.scores.size() / num_devices);
    py::array_t<double> scores({trials, py::ssize_t{num_devices}});
    py::array_t<std::uint8_t> labels({trials, py::ssize_t{num_devices}});
    std::copy(o.scores.begin(), o.scores.end(), scores.mutable_data());
    std::copy(o.labels.begin(), o.labels.end(), labels.mutable_data());
    return py::dict("auc"_a = o.roc.auc, "roc"_a = roc_array(o.roc), "threshold"_a = o.operating_point.threshold,
                    "pfa"_a = o.operating_point.pfa, "pd"_a = o.operating_point.pd,
                    "target_unreachable"_a = o.operating_point.unreachable, "scores"_a = scores, "labels"_a = labels);
}

ExperimentConfig config_from(const py::object& cfg) {
    if (py::isinstance<ExperimentConfig>(cfg)) return cfg.cast<ExperimentConfig>();
    return parse_config(cfg.cast<std::string>());
}

std::vector<std::uint8_t> to_labels(const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& a) {
    return {a.data(), a.data() + a.size()};
}

std::vector<double> to_scores(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    return {a.data(), a.data() + a.size()};
}

py::array_t<std::complex<double>> signals_array(const std::vector<Sample>& samples, const Dataset& ds) {
    py::array_t<std::complex<double>> y({static_cast<py::ssize_t>(samples.size()), py::ssize_t{ds.num_aps},
                                         py::ssize_t{ds.antennas}, py::ssize_t{ds.pilot_len}});
    auto* out = y.mutable_data();
    for (const auto& s : samples)
        for (const auto& v : s.y) *out++ = std::complex<double>(v);
    return y;
}

py::array_t<std::uint8_t> labels_array(const std::vector<Sample>& samples, int num_devices) {
    py::array_t<std::uint8_t> a({static_cast<py::ssize_t>(samples.size()), py::ssize_t{num_devices}});
    auto* out = a.mutable_data();
    for (const auto& s : samples) out = std::copy(s.labels.begin(), s.labels.end(), out);
    return a;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Activity detection in cell-free massive MIMO: simulator, ML and DMLP detectors, evaluation.";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    py::class_<ExperimentConfig>(m, "Config")
        .def_static("from_yaml", &parse_config, "text"_a)
        .def_static("from_file", [](const std::string& path) { return parse_config_file(path); }, "path"_a)
        .def("to_yaml", &serialize_config)
        .def_readwrite("seed", &ExperimentConfig::seed)
        .def_readwrite("test_samples", &ExperimentConfig::test_samples)
        .def_readwrite("train_samples", &ExperimentConfig::train_samples)
        .def_readwrite("validation_samples", &ExperimentConfig::validation_samples)
        .def_readwrite("threads", &ExperimentConfig::threads)
        .def_readwrite("target_pfa", &ExperimentConfig::target_pfa)
        .def_readwrite("model_path", &ExperimentConfig::model_path)
        .def_property(
            "detector", [](const ExperimentConfig& c) { return std::string(to_string(c.detector)); },
            [](ExperimentConfig& c, const std::string& d) { c.detector = parse_detector(d); })
        .def_property(
            "pilot_len", [](const ExperimentConfig& c) { return c.system.pilot_len; },
            [](ExperimentConfig& c, int v) { c.system.pilot_len = v; })
        .def_property(
            "activity_prob", [](const ExperimentConfig& c) { return c.system.activity_prob; },
            [](ExperimentConfig& c, double v) { c.system.activity_prob = v; })
        .def_property(
            "theta", [](const ExperimentConfig& c) { return c.impairments.theta; },
            [](ExperimentConfig& c, double v) { c.impairments.theta = v; })
        .def("validate", &ExperimentConfig::validate)
        .def("__eq__", [](const ExperimentConfig& a, const ExperimentConfig& b) { return a == b; })
        .def("__repr__", [](const ExperimentConfig& c) { return "Config(\n" + serialize_config(c) + ")"; });

    m.def(
        "run",
        [](const py::object& cfg, const std::string& output_dir) {
            const ExperimentConfig exp = config_from(cfg);
            exp.validate();
            ResultBundle bundle;
            {
                py::gil_scoped_release release;
                bundle = run_sweep(exp);
                if (!output_dir.empty()) emit_report(bundle, output_dir);
            }
            py::list points;
            for (const auto& p : bundle.points) {
                py::dict d("value"_a = p.value, "error"_a = p.error);
                d["ml"] = p.ml ? py::object(outcome_dict(*p.ml, p.system.num_devices)) : py::none();
                d["dmlp"] = p.dmlp ? py::object(outcome_dict(*p.dmlp, p.system.num_devices)) : py::none();
                points.append(d);
            }
            return py::dict("axis"_a = to_string(exp.axis), "points"_a = points,
                            "trend_violations"_a = check_trends(bundle));
        },
        "config"_a, "output_dir"_a = "",
        "Runs every sweep point of a config (Config or YAML text). Writes the report files when output_dir is set.");

    m.def(
        "generate",
        [](const py::object& cfg, std::size_t train, std::size_t validation, std::size_t test) {
            const ExperimentConfig exp = config_from(cfg);
            Dataset ds;
            {
                py::gil_scoped_release release;
                ds = generate_dataset(exp.system, {train, validation, test}, exp.seed,
                                      {exp.fresh_test_geometry, exp.unit_norm_pilots});
            }
            // Eigen lvalues would be exposed as views into ds; hand numpy owned copies.
            py::list geometries;
            for (const auto& g : ds.geometries) {
                py::array_t<int> clusters({py::ssize_t{ds.num_devices}, py::ssize_t{ds.cluster_size}});
                std::copy(g.clusters.indices().begin(), g.clusters.indices().end(), clusters.mutable_data());
                geometries.append(py::dict("beta_db"_a = Eigen::MatrixXd(g.beta_db), "clusters"_a = clusters));
            }
            py::dict splits;
            for (auto [name, samples] : {std::pair{"train", &ds.train}, std::pair{"validation", &ds.validation},
                                         std::pair{"test", &ds.test}})
                splits[name] = py::dict("y"_a = signals_array(*samples, ds), "labels"_a = labels_array(*samples, ds.num_devices));
            return py::dict("pilots"_a = Eigen::MatrixXcd(ds.pilots.pilots), "geometries"_a = geometries, "splits"_a = splits);
        },
        "config"_a, "train"_a = 0, "validation"_a = 0, "test"_a = 0,
        "Draws one deployment and the requested number of slots per split. Signals are [slot, m, n, l].");

    m.def(
        "roc",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& scores,
           const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& labels) {
            const RocCurve roc = compute_roc(to_scores(scores), to_labels(labels));
            return py::make_tuple(roc.auc, roc_array(roc));
        },
        "scores"_a, "labels"_a, "Returns (auc, [threshold, pfa, pd] rows).");

    m.def(
        "calibrate",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& scores,
           const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& labels, double target_pfa) {
            const Calibration c = calibrate_threshold(to_scores(scores), to_labels(labels), target_pfa);
            return py::dict("threshold"_a = c.threshold, "pfa"_a = c.pfa, "pd"_a = c.pd,
                            "target_unreachable"_a = c.unreachable);
        },
        "scores"_a, "labels"_a, "target_pfa"_a);

    m.def(
        "quantize",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& x, const std::string& format) {
            const FixedPointFormat f = parse_fixed_point(format);
            py::array_t<double> out(x.request().shape);
            std::transform(x.data(), x.data() + x.size(), out.mutable_data(),
                           [&](double v) { return quantize(v, f); });
            return out;
        },
        "x"_a, "format"_a, "Rounds to the nearest b_q_bits fixed-point value, ties to even, saturating.");

    m.def("select_clusters", [](const Eigen::MatrixXd& beta, int cluster_size) {
        const ClusterAssignment c = select_clusters(beta, cluster_size);
        py::array_t<int> out({py::ssize_t{c.num_devices()}, py::ssize_t{c.cluster_size()}});
        std::copy(c.indices().begin(), c.indices().end(), out.mutable_data());
        return out;
    }, "beta"_a, "cluster_size"_a, "Rows list each device's T strongest APs.");
}

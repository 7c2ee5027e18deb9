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

#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cfad {

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
    os << content;
    if (!os) throw std::runtime_error("write failed for " + path.string());
}

// File-name safe version of a sweep value ("0.05" stays, "16_8_bits" stays).
std::string slug(const std::string& value) {
    std::string out;
    for (char c : value) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-') ? c : '_';
    return out;
}

std::string curve_stem(const ResultBundle& b, const PointResult& p, const char* detector) {
    return fmt::format("roc_{}_{}_{}", detector, to_string(b.config.axis), slug(p.value));
}

nlohmann::ordered_json outcome_json(const DetectorOutcome& d) {
    nlohmann::ordered_json j;
    j["auc"] = d.roc.auc;
    j["threshold"] = d.operating_point.threshold;
    j["pfa"] = d.operating_point.pfa;
    j["pd"] = d.operating_point.pd;
    j["target_unreachable"] = d.operating_point.unreachable;
    return j;
}

}  // namespace

void write_scores_csv(std::ostream& os, const DetectorOutcome& outcome, int num_devices) {
    if (num_devices < 1 || outcome.scores.size() % static_cast<std::size_t>(num_devices) != 0)
        throw std::invalid_argument("write_scores_csv: score count is not a multiple of the device count");
    os << "trial,device,score,label\n";
    const auto k = static_cast<std::size_t>(num_devices);
    for (std::size_t i = 0; i < outcome.scores.size(); ++i)
        os << fmt::format("{},{},{:.17g},{}\n", i / k, i % k, outcome.scores[i], int(outcome.labels[i]));
}

void read_scores_csv(std::istream& is, std::vector<double>& scores, std::vector<std::uint8_t>& labels) {
    std::string line;
    std::size_t lineno = 0;
    int score_col = -1, label_col = -1;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cols;
        std::stringstream ss(line);
        for (std::string c; std::getline(ss, c, ',');) cols.push_back(c);
        if (score_col < 0) {
            for (std::size_t c = 0; c < cols.size(); ++c) {
                if (cols[c] == "score") score_col = static_cast<int>(c);
                if (cols[c] == "label") label_col = static_cast<int>(c);
            }
            if (score_col < 0 || label_col < 0)
                throw std::runtime_error("scores csv: header must contain 'score' and 'label' columns");
            continue;
        }
        const auto need = static_cast<std::size_t>(std::max(score_col, label_col));
        if (cols.size() <= need) throw std::runtime_error(fmt::format("scores csv: line {}: too few columns", lineno));
        try {
            std::size_t used = 0;
            const double s = std::stod(cols[score_col], &used);
            const int l = std::stoi(cols[label_col]);
            if (l != 0 && l != 1) throw std::invalid_argument("label");
            scores.push_back(s);
            labels.push_back(static_cast<std::uint8_t>(l));
        } catch (const std::exception&) {
            throw std::runtime_error(fmt::format("scores csv: line {}: cannot parse score/label", lineno));
        }
    }
}

std::string render_roc_svg(const std::vector<std::pair<std::string, const RocCurve*>>& curves,
                           const std::string& title) {
    constexpr double width = 520, height = 460, left = 60, top = 40, plot = 380;
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                   "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
    auto px = [&](double pfa) { return left + pfa * plot; };
    auto py = [&](double pd) { return top + (1.0 - pd) * plot; };

    std::string svg = fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" font-family=\"sans-serif\" "
        "font-size=\"12\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
        width, height, left + plot / 2, title);
    for (int i = 0; i <= 10; ++i) {
        const double v = i / 10.0;
        svg += fmt::format("<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" stroke=\"#e0e0e0\"/>\n",
                           px(v), py(0), px(v), py(1));
        svg += fmt::format("<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" stroke=\"#e0e0e0\"/>\n",
                           px(0), py(v), px(1), py(v));
        svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{:.1f}</text>\n", px(v),
                           py(0) + 16, v);
        svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"end\">{:.1f}</text>\n", px(0) - 6,
                           py(v) + 4, v);
    }
    svg += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n", left,
                       top, plot, plot);
    svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">P_FA</text>\n", px(0.5),
                       py(0) + 34);
    svg += fmt::format(
        "<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\" transform=\"rotate(-90 {:.1f} {:.1f})\">P_D</text>\n",
        left - 38, py(0.5), left - 38, py(0.5));

    for (std::size_t c = 0; c < curves.size(); ++c) {
        const auto& [name, roc] = curves[c];
        const char* color = colors[c % std::size(colors)];
        std::string pts;
        double last_x = -1, last_y = -1;
        const auto& p = roc->points;
        for (std::size_t i = 0; i < p.size(); ++i) {
            const double x = px(p[i].pfa), y = py(p[i].pd);
            // Thin out sub-pixel steps; always keep the endpoints.
            if (i != 0 && i + 1 != p.size() && std::abs(x - last_x) < 0.5 && std::abs(y - last_y) < 0.5) continue;
            pts += fmt::format("{:.2f},{:.2f} ", x, y);
            last_x = x;
            last_y = y;
        }
        svg += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n", color, pts);
        const double ly = top + 16 + 16.0 * static_cast<double>(c);
        svg += fmt::format("<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" stroke=\"{}\" stroke-width=\"2\"/>\n",
                           px(0.55), ly - 4, px(0.62), ly - 4, color);
        svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\">{} (AUC {:.4f})</text>\n", px(0.64), ly, name, roc->auc);
    }
    svg += "</svg>\n";
    return svg;
}

void emit_report(const ResultBundle& bundle, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    write_file(dir / "config.resolved.yaml", serialize_config(bundle.config));

    nlohmann::ordered_json summary;
    summary["seed"] = bundle.config.seed;
    summary["sweep_axis"] = to_string(bundle.config.axis);
    summary["detector"] = to_string(bundle.config.detector);
    summary["target_pfa"] = bundle.config.target_pfa;
    summary["test_samples"] = bundle.config.test_samples;
    summary["points"] = nlohmann::ordered_json::array();

    std::vector<std::pair<std::string, const RocCurve*>> overlay;
    for (const auto& p : bundle.points) {
        nlohmann::ordered_json jp;
        jp["value"] = p.value;
        jp["pilot_len"] = p.system.pilot_len;
        jp["activity_prob"] = p.system.activity_prob;
        jp["theta"] = p.impairments.theta;
        jp["beta_format"] = p.impairments.beta_format ? p.impairments.beta_format->label() : "none";
        jp["signal_format"] = p.impairments.signal_format ? p.impairments.signal_format->label() : "none";
        if (!p.ok()) jp["error"] = p.error;
        const std::string label = bundle.config.axis == SweepAxis::none
                                      ? std::string()
                                      : fmt::format(" {}={}", to_string(bundle.config.axis), p.value);
        for (const auto& [name, outcome] : {std::pair{"ml", &p.ml}, std::pair{"dmlp", &p.dmlp}}) {
            if (!*outcome) continue;
            const std::string stem = curve_stem(bundle, p, name);
            std::ofstream os(dir / (stem + ".csv"), std::ios::binary | std::ios::trunc);
            if (!os) throw std::runtime_error("cannot open " + (dir / (stem + ".csv")).string() + " for writing");
            write_roc_csv(os, (*outcome)->roc);
            auto j = outcome_json(**outcome);
            j["roc_csv"] = stem + ".csv";
            jp[name] = j;
            overlay.emplace_back(std::string(name == std::string("ml") ? "ML" : "DMLP") + label, &(*outcome)->roc);
        }
        summary["points"].push_back(jp);
    }
    summary["trend_violations"] = check_trends(bundle);
    write_file(dir / "summary.json", summary.dump(2) + "\n");
    if (!overlay.empty())
        write_file(dir / "roc.svg", render_roc_svg(overlay, fmt::format("ROC, sweep over {}", to_string(bundle.config.axis))));
}

}  // namespace cfad

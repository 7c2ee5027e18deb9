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

#include "cfad/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

namespace cfad {

namespace {

struct ClassCounts {
    std::int64_t positives = 0;
    std::int64_t negatives = 0;
};

ClassCounts count_classes(std::span<const double> scores, std::span<const std::uint8_t> labels) {
    if (scores.size() != labels.size()) throw std::invalid_argument("scores and labels differ in length");
    ClassCounts c;
    for (auto l : labels) (l ? c.positives : c.negatives)++;
    return c;
}

std::vector<std::size_t> descending_order(std::span<const double> scores) {
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    return order;
}

}  // namespace

RocCurve compute_roc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
    const auto counts = count_classes(scores, labels);
    if (counts.positives == 0 || counts.negatives == 0)
        throw std::invalid_argument("compute_roc: need at least one positive and one negative label");
    for (double s : scores)
        if (std::isnan(s)) throw std::invalid_argument("compute_roc: NaN score");

    const auto order = descending_order(scores);
    RocCurve roc;
    roc.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    for (std::size_t i = 0; i < order.size();) {
        const double s = scores[order[i]];
        // All tied scores cross the threshold together.
        while (i < order.size() && scores[order[i]] == s) {
            (labels[order[i]] ? tp : fp)++;
            ++i;
        }
        roc.points.push_back({s, static_cast<double>(fp) / counts.negatives,
                              static_cast<double>(tp) / counts.positives});
    }
    for (std::size_t i = 1; i < roc.points.size(); ++i) {
        const auto& a = roc.points[i - 1];
        const auto& b = roc.points[i];
        roc.auc += (b.pfa - a.pfa) * 0.5 * (a.pd + b.pd);
    }
    return roc;
}

Calibration calibrate_threshold(std::span<const double> scores, std::span<const std::uint8_t> labels,
                                double target_pfa) {
    if (!(target_pfa > 0.0 && target_pfa <= 1.0))
        throw std::invalid_argument("calibrate_threshold: target P_FA must be in (0, 1]");
    const auto counts = count_classes(scores, labels);
    if (counts.negatives == 0) throw std::invalid_argument("calibrate_threshold: no negative labels");

    // Candidate thresholds are the distinct scores plus 0: the rule
    // "score > tau" changes only at those values. Walk them from the top and
    // keep the last one that still meets the target.
    const auto order = descending_order(scores);
    const auto positives = std::max<std::int64_t>(counts.positives, 1);
    Calibration best;
    best.threshold = order.empty() ? 0.0 : std::max(0.0, scores[order.front()]);
    best.unreachable = true;
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        const double s = scores[order[i]];
        // Scores at or below zero cannot be declared active by any tau >= 0.
        if (s <= 0.0) break;
        while (i < order.size() && scores[order[i]] == s) {
            (labels[order[i]] ? tp : fp)++;
            ++i;
        }
        // Everything at or above s is now declared active: tau is the next
        // lower distinct score (or 0 when nothing remains).
        const double tau = i < order.size() ? std::max(0.0, scores[order[i]]) : 0.0;
        const double pfa = static_cast<double>(fp) / counts.negatives;
        if (pfa > target_pfa) break;
        best = {tau, pfa, static_cast<double>(tp) / positives, false};
        if (tau == 0.0) break;
    }
    if (best.unreachable) {
        best.pfa = 0.0;
        best.pd = 0.0;
    }
    return best;
}

ErrorRates error_rates(std::span<const std::uint8_t> decided, std::span<const std::uint8_t> truth) {
    if (decided.size() != truth.size()) throw std::invalid_argument("error_rates: length mismatch");
    std::int64_t tp = 0, fn = 0, fp = 0, tn = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i]) (decided[i] ? tp : fn)++;
        else (decided[i] ? fp : tn)++;
    }
    ErrorRates r;
    r.pd = tp + fn > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
    r.pfa = fp + tn > 0 ? static_cast<double>(fp) / (fp + tn) : 0.0;
    r.miss_rate = tp + fn > 0 ? 1.0 - r.pd : 0.0;
    r.false_alarms = fp;
    return r;
}

void write_roc_csv(std::ostream& os, const RocCurve& roc) {
    os << "threshold,pfa,pd\n";
    for (const auto& p : roc.points) os << fmt::format("{:.17g},{:.17g},{:.17g}\n", p.threshold, p.pfa, p.pd);
}

}  // namespace cfad

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

#ifndef CFAD_EVAL_HPP
#define CFAD_EVAL_HPP

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace cfad {

struct RocPoint {
    double threshold = 0.0;
    double pfa = 0.0;
    double pd = 0.0;
};

// Stepwise-exact ROC. Point i is the operating point of the rule
// "active iff score >= threshold"; the first point has threshold +inf
// (nothing declared active) and the last has the smallest score.
struct RocCurve {
    std::vector<RocPoint> points;
    double auc = 0.0;
};

// Micro-averaged over all (trial, device) pairs. Throws std::invalid_argument
// unless both classes are present.
RocCurve compute_roc(std::span<const double> scores, std::span<const std::uint8_t> labels);

struct Calibration {
    double threshold = 0.0;  // declare active iff score > threshold
    double pfa = 0.0;
    double pd = 0.0;
    bool unreachable = false;  // target only met by declaring nothing active
};

// Smallest threshold tau whose rule "score > tau" has empirical P_FA <= target.
Calibration calibrate_threshold(std::span<const double> scores, std::span<const std::uint8_t> labels,
                                double target_pfa);

struct ErrorRates {
    double pd = 0.0;
    double pfa = 0.0;
    double miss_rate = 0.0;
    std::int64_t false_alarms = 0;
};

ErrorRates error_rates(std::span<const std::uint8_t> decided, std::span<const std::uint8_t> truth);

// "threshold,pfa,pd" with a header line; thresholds of +inf are written as inf.
void write_roc_csv(std::ostream& os, const RocCurve& roc);

}  // namespace cfad

#endif

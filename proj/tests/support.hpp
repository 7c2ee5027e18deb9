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

// Shared fixtures and independent reference computations for the tests.

#ifndef CFAD_TESTS_SUPPORT_HPP
#define CFAD_TESTS_SUPPORT_HPP

#include "cfad/ml_detector.hpp"
#include "cfad/simcore.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

namespace cfad::testing {

struct TinyInstance {
    SystemConfig cfg;
    PilotBook pilots;
    LargeScaleFading fading;
    ActivityVector activity;
    ReceivedSignal y;
};

// Small random network with moderate per-link SNR.
inline TinyInstance make_tiny_instance(std::uint64_t seed, int num_aps, int antennas, int num_devices,
                                       int pilot_len, double activity_prob = 0.3) {
    TinyInstance inst;
    SystemConfig& cfg = inst.cfg;
    cfg.num_aps = num_aps;
    cfg.antennas_per_ap = antennas;
    cfg.num_devices = num_devices;
    cfg.pilot_len = pilot_len;
    cfg.cluster_size = 1;
    cfg.activity_prob = activity_prob;
    cfg.area_side = 200;
    cfg.placement_margin = 0;
    Rng rng(seed);
    const Deployment dep = place_network(cfg, rng);
    inst.fading = compute_beta(dep, cfg, rng);
    inst.pilots = generate_pilots(pilot_len, num_devices, rng);
    inst.activity = sample_activity(activity_prob, num_devices, rng);
    inst.y = simulate_received(inst.fading.beta_lin, inst.pilots, inst.activity, cfg, rng);
    return inst;
}

// f(gamma) through an LU determinant and an explicit inverse, in watts.
inline double reference_cost(const MlProblem& prob, const Eigen::VectorXd& gamma) {
    const Eigen::MatrixXd gains = prob.normalized_gains();
    double total = 0.0;
    for (int m = 0; m < prob.num_aps(); ++m) {
        Eigen::MatrixXcd sigma = prob.noise_power * Eigen::MatrixXcd::Identity(prob.pilot_len(), prob.pilot_len());
        for (int k = 0; k < prob.num_devices(); ++k)
            sigma += gamma[k] * gains(m, k) * prob.noise_power * prob.pilots.col(k) * prob.pilots.col(k).adjoint();
        Eigen::FullPivLU<Eigen::MatrixXcd> lu(sigma);
        // log|det| accumulated from the pivots to avoid underflow at sigma^2 ~ 1e-14.
        double log_det = 0.0;
        for (Eigen::Index i = 0; i < sigma.rows(); ++i) log_det += std::log(std::abs(lu.matrixLU()(i, i)));
        total += log_det + (lu.inverse() * prob.sample_cov[m]).trace().real();
    }
    return total;
}

// Minimum of f over gamma in {0, 1}^K by enumeration.
inline double binary_minimum(const MlProblem& prob, Eigen::VectorXd* argmin = nullptr) {
    const int k = prob.num_devices();
    double best = std::numeric_limits<double>::infinity();
    for (std::uint32_t mask = 0; mask < (1u << k); ++mask) {
        Eigen::VectorXd g(k);
        for (int i = 0; i < k; ++i) g[i] = (mask >> i) & 1u;
        const double f = reference_cost(prob, g);
        if (f < best) {
            best = f;
            if (argmin) *argmin = g;
        }
    }
    return best;
}

// Mann-Whitney U / (n_pos n_neg) with midranks for ties.
inline double rank_statistic_auc(const std::vector<double>& scores, const std::vector<std::uint8_t>& labels) {
    const std::size_t n = scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    std::vector<double> rank(n);
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) ++j;
        const double mid = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
        for (std::size_t t = i; t < j; ++t) rank[order[t]] = mid;
        i = j;
    }
    double pos = 0, rank_sum = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (labels[i]) {
            pos += 1;
            rank_sum += rank[i];
        }
    const double neg = static_cast<double>(n) - pos;
    return (rank_sum - pos * (pos + 1) / 2) / (pos * neg);
}

}  // namespace cfad::testing

#endif

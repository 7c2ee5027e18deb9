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

#ifndef CFAD_ML_DETECTOR_HPP
#define CFAD_ML_DETECTOR_HPP

#include "cfad/clustering.hpp"
#include "cfad/simcore.hpp"

#include <Eigen/Dense>

#include <vector>

namespace cfad {

// Covariance-based maximum-likelihood activity detection.
//
// The per-AP model is Sigma_m(gamma) = sigma^2 I + sum_k gamma_k rho beta_mk s_k s_k^H
// and the detector minimizes
//
//   f(gamma) = sum_m [ log det Sigma_m(gamma) + tr(Sigma_m(gamma)^-1 SampleCov_m) ],  gamma >= 0.
//
// With cluster_restricted set, device k is modeled only at the APs of its
// cluster (beta_mk treated as zero elsewhere).
struct MlProblem {
    std::vector<Eigen::MatrixXcd> sample_cov;  // per AP, L x L, Hermitian PSD
    std::vector<Eigen::MatrixXcd> snapshots;   // per AP, L x N, Y_m^T / sqrt(N); optional
    Eigen::MatrixXcd pilots;                   // L x K
    Eigen::MatrixXd beta_est;                  // M x K, linear
    double noise_power = 1.0;
    double tx_power = 1.0;
    ClusterAssignment clusters;
    bool cluster_restricted = false;

    int num_aps() const { return static_cast<int>(beta_est.rows()); }
    int num_devices() const { return static_cast<int>(beta_est.cols()); }
    int pilot_len() const { return static_cast<int>(pilots.rows()); }

    // rho * beta_mk / sigma^2, or zero when the device is not modeled at AP m.
    Eigen::MatrixXd normalized_gains() const;
};

MlProblem build_ml_problem(const ReceivedSignal& y, const PilotBook& pilots, const Eigen::MatrixXd& beta_est,
                           const SystemConfig& cfg, ClusterAssignment clusters, bool cluster_restricted = false);

// Sigma_m(gamma) in watts.
Eigen::MatrixXcd model_covariance(const MlProblem& prob, const Eigen::VectorXd& gamma, int ap);

// f(gamma) evaluated from scratch through a Cholesky factor of each Sigma_m.
double ml_cost(const MlProblem& prob, const Eigen::VectorXd& gamma);

struct MlOptions {
    int max_sweeps = 15;
    double tolerance = 1e-6;    // stop when max |delta gamma| in a sweep is below this
    bool record_costs = false;  // from-scratch cost at start and after every sweep
    bool check_descent = false; // recompute the cost after every accepted update
};

struct SoftScores {
    Eigen::VectorXd gamma;
    Eigen::VectorXd score;
    std::vector<double> cost_trace;
    int sweeps = 0;
};

// Coordinate-descent state. Holds sigma^2 Sigma_m^-1 for every AP and keeps
// them current with rank-one updates.
class MlSolver {
public:
    explicit MlSolver(const MlProblem& prob, MlOptions opts = {});

    // Minimizes f over gamma_k with the other coordinates fixed. Returns the
    // applied change.
    double update(int device);

    // Recomputes the inverses and the objective from gamma.
    void refresh();

    // One pass over all devices in index order; returns max |delta gamma|.
    double sweep();

    const Eigen::VectorXd& gamma() const { return gamma_; }
    const Eigen::MatrixXcd& normalized_inverse(int ap) const { return inverse_[ap]; }

    // Incrementally tracked objective, same units as ml_cost.
    double cost() const { return tracked_cost_ + offset_; }

private:
    double quadratic_form(int ap, const Eigen::VectorXcd& q) const;

    const MlProblem& prob_;
    MlOptions opts_;
    Eigen::MatrixXd gains_;
    Eigen::VectorXd gamma_;
    std::vector<Eigen::MatrixXcd> inverse_;
    double tracked_cost_ = 0.0;
    double offset_ = 0.0;
};

SoftScores ml_coordinate_descent(const MlProblem& prob, const MlOptions& opts = {});

}  // namespace cfad

#endif

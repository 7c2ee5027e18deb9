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

#ifndef CFAD_SIMCORE_HPP
#define CFAD_SIMCORE_HPP

#include "cfad/config.hpp"

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace cfad {

using cdouble = std::complex<double>;
using RowMatrixXcd = Eigen::Matrix<cdouble, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Point {
    double x = 0.0;
    double y = 0.0;
};

// Euclidean distance on the D x D torus (edges wrapped around).
double torus_distance(Point a, Point b, double side);

struct Deployment {
    std::vector<Point> aps;
    std::vector<Point> devices;
};

// Rejection-samples AP positions, then device positions, uniformly in
// [margin, D - margin)^2 until the spacing constraints hold. Throws
// std::runtime_error when a point cannot be placed within max_draws draws.
Deployment place_network(const SystemConfig& cfg, Rng& rng, int max_draws = 100000);

// Micro-cell path loss in dB at horizontal distance d (meters).
inline double path_loss_db(double distance_m) { return -30.5 - 36.7 * std::log10(distance_m); }

// M x K large-scale fading.
struct LargeScaleFading {
    Eigen::MatrixXd beta_db;
    Eigen::MatrixXd beta_lin;
    Eigen::MatrixXd shadow_db;

    int num_aps() const { return static_cast<int>(beta_db.rows()); }
    int num_devices() const { return static_cast<int>(beta_db.cols()); }
};

LargeScaleFading compute_beta(const Deployment& dep, const SystemConfig& cfg, Rng& rng);

// Rebuilds the linear matrix from dB values (shadow left empty). Used for
// perturbed or quantized coefficients.
LargeScaleFading fading_from_db(const Eigen::MatrixXd& beta_db);

// L x K pilot matrix; column k is s_k.
struct PilotBook {
    Eigen::MatrixXcd pilots;

    int length() const { return static_cast<int>(pilots.rows()); }
    int num_devices() const { return static_cast<int>(pilots.cols()); }
};

PilotBook generate_pilots(int pilot_len, int num_devices, Rng& rng, bool unit_norm = false);

using ActivityVector = std::vector<std::uint8_t>;

ActivityVector sample_activity(double activity_prob, int num_devices, Rng& rng);

// Received pilot-phase samples for one slot, laid out [m][n][l]. The block of
// AP m is an N x L row-major matrix whose row n is y_mn^T.
class ReceivedSignal {
public:
    ReceivedSignal() = default;
    ReceivedSignal(int num_aps, int antennas, int pilot_len);

    int num_aps() const { return num_aps_; }
    int antennas() const { return antennas_; }
    int pilot_len() const { return pilot_len_; }

    cdouble& at(int m, int n, int l) { return data_[index(m, n, l)]; }
    cdouble at(int m, int n, int l) const { return data_[index(m, n, l)]; }

    Eigen::Map<RowMatrixXcd> block(int m);
    Eigen::Map<const RowMatrixXcd> block(int m) const;

    std::span<cdouble> data() { return data_; }
    std::span<const cdouble> data() const { return data_; }

    bool operator==(const ReceivedSignal&) const = default;

private:
    std::size_t index(int m, int n, int l) const {
        return (static_cast<std::size_t>(m) * antennas_ + n) * pilot_len_ + l;
    }

    int num_aps_ = 0;
    int antennas_ = 0;
    int pilot_len_ = 0;
    std::vector<cdouble> data_;
};

// y_mn = sum_k sqrt(rho beta_mk) a_k h_mnk s_k + w_mn with fresh Rayleigh
// fading h and noise w ~ CN(0, sigma^2 I). When small_scale is non-null it
// receives h laid out [m][n][k].
ReceivedSignal simulate_received(const Eigen::MatrixXd& beta_lin, const PilotBook& pilots,
                                 const ActivityVector& activity, const SystemConfig& cfg, Rng& rng,
                                 std::vector<cdouble>* small_scale = nullptr);

}  // namespace cfad

#endif

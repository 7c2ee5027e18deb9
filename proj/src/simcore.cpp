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

#include "cfad/simcore.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace cfad {

double torus_distance(Point a, Point b, double side) {
    auto wrap = [side](double delta) {
        delta = std::abs(delta);
        return std::min(delta, side - delta);
    };
    return std::hypot(wrap(a.x - b.x), wrap(a.y - b.y));
}

Deployment place_network(const SystemConfig& cfg, Rng& rng, int max_draws) {
    cfg.validate();
    const double lo = cfg.placement_margin;
    const double hi = cfg.area_side - cfg.placement_margin;
    std::uniform_real_distribution<double> coord(lo, hi);

    auto draw_until = [&](auto&& acceptable, const char* what, std::size_t index) {
        for (int draw = 0; draw < max_draws; ++draw) {
            Point p{coord(rng), coord(rng)};
            if (acceptable(p)) return p;
        }
        throw std::runtime_error(std::string("place_network: could not place ") + what + " " +
                                 std::to_string(index) + " within " + std::to_string(max_draws) +
                                 " draws; spacing constraints are infeasible");
    };

    Deployment dep;
    dep.aps.reserve(cfg.num_aps);
    for (int m = 0; m < cfg.num_aps; ++m) {
        dep.aps.push_back(draw_until(
            [&](Point p) {
                return std::ranges::all_of(dep.aps, [&](Point q) {
                    return torus_distance(p, q, cfg.area_side) >= cfg.min_ap_spacing;
                });
            },
            "AP", m));
    }
    dep.devices.reserve(cfg.num_devices);
    for (int k = 0; k < cfg.num_devices; ++k) {
        dep.devices.push_back(draw_until(
            [&](Point p) {
                return std::ranges::all_of(dep.aps, [&](Point q) {
                    return torus_distance(p, q, cfg.area_side) >= cfg.min_device_ap_spacing;
                });
            },
            "device", k));
    }
    return dep;
}

LargeScaleFading compute_beta(const Deployment& dep, const SystemConfig& cfg, Rng& rng) {
    const auto num_aps = static_cast<Eigen::Index>(dep.aps.size());
    const auto num_devices = static_cast<Eigen::Index>(dep.devices.size());
    std::normal_distribution<double> gauss(0.0, 1.0);

    LargeScaleFading out;
    out.beta_db.resize(num_aps, num_devices);
    out.shadow_db.resize(num_aps, num_devices);
    for (Eigen::Index k = 0; k < num_devices; ++k) {
        for (Eigen::Index m = 0; m < num_aps; ++m) {
            const double d = torus_distance(dep.aps[m], dep.devices[k], cfg.area_side);
            if (!(d > 0.0))
                throw std::invalid_argument("compute_beta: zero AP-device distance (AP " + std::to_string(m) +
                                            ", device " + std::to_string(k) + ")");
            const double shadow = cfg.shadow_std_db * gauss(rng);
            out.shadow_db(m, k) = shadow;
            out.beta_db(m, k) = path_loss_db(d) + shadow;
        }
    }
    out.beta_lin = out.beta_db.unaryExpr([](double db) { return std::pow(10.0, db / 10.0); });
    return out;
}

LargeScaleFading fading_from_db(const Eigen::MatrixXd& beta_db) {
    LargeScaleFading out;
    out.beta_db = beta_db;
    out.beta_lin = beta_db.unaryExpr([](double db) { return std::pow(10.0, db / 10.0); });
    return out;
}

PilotBook generate_pilots(int pilot_len, int num_devices, Rng& rng, bool unit_norm) {
    if (pilot_len < 1 || num_devices < 1) throw std::invalid_argument("generate_pilots: L and K must be >= 1");
    std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
    PilotBook book;
    book.pilots.resize(pilot_len, num_devices);
    for (int k = 0; k < num_devices; ++k)
        for (int l = 0; l < pilot_len; ++l) {
            const double re = gauss(rng);
            const double im = gauss(rng);
            book.pilots(l, k) = {re, im};
        }
    if (unit_norm) {
        for (int k = 0; k < num_devices; ++k) {
            const double norm = book.pilots.col(k).norm();
            book.pilots.col(k) *= std::sqrt(static_cast<double>(pilot_len)) / norm;
        }
    }
    return book;
}

ActivityVector sample_activity(double activity_prob, int num_devices, Rng& rng) {
    if (!(activity_prob >= 0.0 && activity_prob <= 1.0))
        throw std::invalid_argument("sample_activity: probability must be in [0, 1]");
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    ActivityVector a(static_cast<std::size_t>(num_devices));
    for (auto& ak : a) ak = unif(rng) < activity_prob ? 1 : 0;
    return a;
}

ReceivedSignal::ReceivedSignal(int num_aps, int antennas, int pilot_len)
    : num_aps_(num_aps),
      antennas_(antennas),
      pilot_len_(pilot_len),
      data_(static_cast<std::size_t>(num_aps) * antennas * pilot_len) {}

Eigen::Map<RowMatrixXcd> ReceivedSignal::block(int m) {
    return {data_.data() + index(m, 0, 0), antennas_, pilot_len_};
}

Eigen::Map<const RowMatrixXcd> ReceivedSignal::block(int m) const {
    return {data_.data() + index(m, 0, 0), antennas_, pilot_len_};
}

ReceivedSignal simulate_received(const Eigen::MatrixXd& beta_lin, const PilotBook& pilots,
                                 const ActivityVector& activity, const SystemConfig& cfg, Rng& rng,
                                 std::vector<cdouble>* small_scale) {
    const int num_aps = static_cast<int>(beta_lin.rows());
    const int num_devices = static_cast<int>(beta_lin.cols());
    const int antennas = cfg.antennas_per_ap;
    const int pilot_len = pilots.length();
    if (pilots.num_devices() != num_devices || static_cast<int>(activity.size()) != num_devices)
        throw std::invalid_argument("simulate_received: device dimension mismatch");

    std::vector<int> active;
    for (int k = 0; k < num_devices; ++k)
        if (activity[k]) active.push_back(k);

    if (small_scale) small_scale->assign(static_cast<std::size_t>(num_aps) * antennas * num_devices, cdouble{});

    std::normal_distribution<double> unit(0.0, std::sqrt(0.5));
    const double noise_std = std::sqrt(cfg.noise_power);
    const double amp = std::sqrt(cfg.tx_power);

    ReceivedSignal y(num_aps, antennas, pilot_len);
    Eigen::VectorXcd gain(pilot_len);
    for (int m = 0; m < num_aps; ++m) {
        auto block = y.block(m);
        for (int n = 0; n < antennas; ++n) {
            gain.setZero();
            for (int k : active) {
                const cdouble h{unit(rng), unit(rng)};
                if (small_scale) (*small_scale)[(static_cast<std::size_t>(m) * antennas + n) * num_devices + k] = h;
                gain += (amp * std::sqrt(beta_lin(m, k)) * h) * pilots.pilots.col(k);
            }
            for (int l = 0; l < pilot_len; ++l) {
                const double re = unit(rng);
                const double im = unit(rng);
                block(n, l) = gain(l) + noise_std * cdouble{re, im};
            }
        }
    }
    return y;
}

}  // namespace cfad

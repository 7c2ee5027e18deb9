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

#ifndef CFAD_CONFIG_HPP
#define CFAD_CONFIG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace cfad {

inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watts_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

// Scalar parameters of the network and the random-access slot.
// Defaults reproduce the reference simulation setup: 1 km torus, 20 APs
// with 2 antennas, 100 devices, clusters of 4 APs, 40-symbol pilots.
struct SystemConfig {
    int num_aps = 20;             // M
    int antennas_per_ap = 2;      // N
    int num_devices = 100;        // K
    int pilot_len = 40;           // L
    int cluster_size = 4;         // T
    double area_side = 1000.0;    // D [m]
    double activity_prob = 0.1;   // epsilon
    double tx_power = 0.1;        // rho [W], 20 dBm
    double noise_power = dbm_to_watts(-109.0);  // sigma^2 [W]
    double shadow_std_db = 4.0;   // sigma_sh [dB]
    int coherence_symbols = 200;  // T_c
    double placement_margin = 50.0;
    double min_ap_spacing = 15.0;
    double min_device_ap_spacing = 10.0;

    // Throws std::invalid_argument naming the first violated invariant.
    void validate() const;

    bool operator==(const SystemConfig&) const = default;
};

using Rng = std::mt19937_64;

// Stream tags for seed derivation. Every random quantity is drawn from its
// own substream so that changing e.g. the pilot length does not move the
// deployment.
enum class Stream : std::uint32_t {
    deployment = 1,
    shadowing = 2,
    pilots = 3,
    trial = 4,
    training = 5,
    perturbation = 6,
    dataset = 7,
    test_geometry = 8,
};

// Substream for (root seed, tag, index). Index is the trial or sample number.
Rng make_stream(std::uint64_t root_seed, Stream tag, std::uint64_t index = 0);

}  // namespace cfad

#endif

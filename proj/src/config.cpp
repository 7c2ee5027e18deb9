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

#include "cfad/config.hpp"

#include <stdexcept>
#include <string>

namespace cfad {

namespace {
void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument("SystemConfig: " + what);
}
}  // namespace

void SystemConfig::validate() const {
    require(num_aps >= 1, "num_aps must be >= 1");
    require(antennas_per_ap >= 1, "antennas_per_ap must be >= 1");
    require(num_devices >= 1, "num_devices must be >= 1");
    require(pilot_len >= 1, "pilot_len must be >= 1");
    require(cluster_size >= 1 && cluster_size <= num_aps, "cluster_size must be in [1, num_aps]");
    require(area_side > 0.0, "area_side must be > 0");
    require(activity_prob >= 0.0 && activity_prob <= 1.0, "activity_prob must be in [0, 1]");
    require(tx_power >= 0.0 && std::isfinite(tx_power), "tx_power must be >= 0");
    require(noise_power > 0.0 && std::isfinite(noise_power), "noise_power must be > 0");
    require(shadow_std_db >= 0.0, "shadow_std_db must be >= 0");
    require(coherence_symbols >= 1, "coherence_symbols must be >= 1");
    require(pilot_len <= coherence_symbols, "pilot_len must not exceed coherence_symbols");
    require(placement_margin >= 0.0 && 2.0 * placement_margin < area_side,
            "placement_margin must be in [0, area_side/2)");
    require(min_ap_spacing >= 0.0, "min_ap_spacing must be >= 0");
    require(min_device_ap_spacing >= 0.0, "min_device_ap_spacing must be >= 0");
}

Rng make_stream(std::uint64_t root_seed, Stream tag, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(root_seed), static_cast<std::uint32_t>(root_seed >> 32),
                      static_cast<std::uint32_t>(tag), static_cast<std::uint32_t>(index),
                      static_cast<std::uint32_t>(index >> 32)};
    return Rng(seq);
}

}  // namespace cfad

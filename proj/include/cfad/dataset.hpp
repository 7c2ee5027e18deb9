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

#ifndef CFAD_DATASET_HPP
#define CFAD_DATASET_HPP

#include "cfad/clustering.hpp"
#include "cfad/simcore.hpp"

#include <complex>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

namespace cfad {

// Large-scale fading and the clusters derived from it. Shared by all samples
// of a split.
struct Geometry {
    Eigen::MatrixXd beta_db;  // M x K
    ClusterAssignment clusters;

    Eigen::MatrixXd beta_lin() const;
    bool operator==(const Geometry& o) const { return beta_db == o.beta_db && clusters == o.clusters; }
};

struct Sample {
    std::vector<std::complex<float>> y;  // [m][n][l]
    ActivityVector labels;

    bool operator==(const Sample&) const = default;
};

enum class Split : std::uint8_t { train = 0, validation = 1, test = 2 };

struct SampleCounts {
    std::size_t train = 0;
    std::size_t validation = 0;
    std::size_t test = 0;
};

struct Dataset {
    int num_aps = 0;
    int antennas = 0;
    int pilot_len = 0;
    int num_devices = 0;
    int cluster_size = 0;
    PilotBook pilots;
    // geometries[0] serves train and validation; the test split uses
    // geometries.back() (a second entry exists only for fresh test geometry).
    std::vector<Geometry> geometries;
    std::vector<Sample> train;
    std::vector<Sample> validation;
    std::vector<Sample> test;

    const Geometry& geometry(Split split) const { return split == Split::test ? geometries.back() : geometries.front(); }
    const std::vector<Sample>& split(Split s) const;

    bool operator==(const Dataset& o) const;
};

ReceivedSignal to_received(const Sample& sample, int num_aps, int antennas, int pilot_len);

struct DatasetOptions {
    bool fresh_test_geometry = false;
    bool unit_norm_pilots = false;
};

// Draws one deployment (and pilot book) from the seed, then fresh activity,
// fading and noise for every sample.
Dataset generate_dataset(const SystemConfig& cfg, SampleCounts counts, std::uint64_t seed,
                         const DatasetOptions& opts = {});

// Little-endian container:
//   "CFAD", u32 version, u32 M, N, L, K, T, u64 train, validation, test counts,
//   u32 geometry count G, u32 pilot-book flag (reserved, 0)
//   pilots: K columns of L complex as interleaved f64
//   G times: beta_db as f64 [m][k], clusters as u32 [k][t]
//   records: u8 split tag, M*N*L complex as interleaved f32, K label bytes
void write_dataset(std::ostream& os, const Dataset& ds);
Dataset read_dataset(std::istream& is);
void write_dataset(const std::filesystem::path& path, const Dataset& ds);
Dataset read_dataset(const std::filesystem::path& path);

}  // namespace cfad

#endif

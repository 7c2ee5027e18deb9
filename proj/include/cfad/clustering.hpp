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

#ifndef CFAD_CLUSTERING_HPP
#define CFAD_CLUSTERING_HPP

#include "cfad/simcore.hpp"

#include <span>
#include <vector>

namespace cfad {

// Per-device serving clusters: row k lists T distinct AP indices ordered by
// decreasing large-scale fading.
class ClusterAssignment {
public:
    ClusterAssignment() = default;
    ClusterAssignment(int num_devices, int cluster_size, std::vector<int> indices);

    int num_devices() const { return num_devices_; }
    int cluster_size() const { return cluster_size_; }

    std::span<const int> row(int k) const {
        return {indices_.data() + static_cast<std::size_t>(k) * cluster_size_,
                static_cast<std::size_t>(cluster_size_)};
    }
    const std::vector<int>& indices() const { return indices_; }

    bool operator==(const ClusterAssignment&) const = default;

private:
    int num_devices_ = 0;
    int cluster_size_ = 0;
    std::vector<int> indices_;
};

// Picks the T largest entries of every column of beta. Any monotone
// representation works (linear, dB, perturbed, quantized). Ties resolve to
// the lower AP index.
ClusterAssignment select_clusters(const Eigen::MatrixXd& beta, int cluster_size);

// The T cluster blocks (each N x L) of device k, in cluster order.
std::vector<RowMatrixXcd> gather_cluster_signals(const ReceivedSignal& y, const ClusterAssignment& clusters,
                                                 int device);

}  // namespace cfad

#endif

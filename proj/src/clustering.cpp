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

#include "cfad/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace cfad {

ClusterAssignment::ClusterAssignment(int num_devices, int cluster_size, std::vector<int> indices)
    : num_devices_(num_devices), cluster_size_(cluster_size), indices_(std::move(indices)) {
    if (indices_.size() != static_cast<std::size_t>(num_devices) * cluster_size)
        throw std::invalid_argument("ClusterAssignment: index count does not match K x T");
}

ClusterAssignment select_clusters(const Eigen::MatrixXd& beta, int cluster_size) {
    const int num_aps = static_cast<int>(beta.rows());
    const int num_devices = static_cast<int>(beta.cols());
    if (cluster_size < 1 || cluster_size > num_aps)
        throw std::invalid_argument("select_clusters: cluster size " + std::to_string(cluster_size) +
                                    " not in [1, " + std::to_string(num_aps) + "]");
    if (!beta.allFinite()) throw std::invalid_argument("select_clusters: non-finite large-scale fading");

    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(num_devices) * cluster_size);
    std::vector<int> order(num_aps);
    for (int k = 0; k < num_devices; ++k) {
        std::iota(order.begin(), order.end(), 0);
        std::partial_sort(order.begin(), order.begin() + cluster_size, order.end(), [&](int a, int b) {
            if (beta(a, k) != beta(b, k)) return beta(a, k) > beta(b, k);
            return a < b;
        });
        out.insert(out.end(), order.begin(), order.begin() + cluster_size);
    }
    return {num_devices, cluster_size, std::move(out)};
}

std::vector<RowMatrixXcd> gather_cluster_signals(const ReceivedSignal& y, const ClusterAssignment& clusters,
                                                 int device) {
    if (device < 0 || device >= clusters.num_devices())
        throw std::out_of_range("gather_cluster_signals: device index " + std::to_string(device) + " out of range");
    std::vector<RowMatrixXcd> blocks;
    blocks.reserve(clusters.cluster_size());
    for (int m : clusters.row(device)) {
        if (m < 0 || m >= y.num_aps())
            throw std::out_of_range("gather_cluster_signals: AP index " + std::to_string(m) + " out of range");
        blocks.emplace_back(y.block(m));
    }
    return blocks;
}

}  // namespace cfad

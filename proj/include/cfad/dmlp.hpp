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

#ifndef CFAD_DMLP_HPP
#define CFAD_DMLP_HPP

#include "cfad/clustering.hpp"
#include "cfad/dataset.hpp"
#include "cfad/mlp_core.hpp"
#include "cfad/simcore.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

namespace cfad {

struct MlpHyperparams {
    int hidden_layers = 2;    // Z
    int neurons = 512;        // V
    double learning_rate = 1e-3;
    int batch_size = 256;     // slots per mini-batch; each slot yields K examples
    int max_epochs = 50;
    int patience = 5;
    std::uint64_t seed = 1;
    bool tied_branches = true;
    double positive_weight = 1.0;

    void validate() const;
    bool operator==(const MlpHyperparams&) const = default;
};

// Per-device detector: T branch inputs -> Z ReLU layers each -> concatenation
// -> affine head -> sigmoid. One model is shared by all K devices.
class MlpModel {
public:
    MlpModel() = default;
    MlpModel(MlpParams<float> params, double input_scale);

    // He-initialized hidden layers; the head bias starts at the logit of
    // positive_rate.
    static MlpModel initialize(const MlpShape& shape, double input_scale, Rng& rng, double positive_rate = 0.5);

    const MlpShape& shape() const { return params_.shape(); }
    double input_scale() const { return input_scale_; }
    const MlpParams<float>& params() const { return params_; }
    // Double-precision copy used for inference.
    const MlpParams<double>& inference_params() const { return inference_; }
    void set_params(MlpParams<float> params);

    bool operator==(const MlpModel& o) const { return input_scale_ == o.input_scale_ && params_ == o.params_; }

private:
    double input_scale_ = 1.0;
    MlpParams<float> params_;
    MlpParams<double> inference_;
};

// Branch inputs of device k: for each cluster AP m (in cluster order) the
// block conj(s_k) .* y_mn is flattened row-major over (n, l), real and
// imaginary parts interleaved, and multiplied by scale. Each vector has
// 2 N L entries.
std::vector<Eigen::VectorXd> featurize(const ReceivedSignal& y, const PilotBook& pilots,
                                       const ClusterAssignment& clusters, int device, double scale);

// Activity probability of one device from its T branch inputs.
double forward(const MlpModel& model, const std::vector<Eigen::VectorXd>& features);

// Activity probabilities of all K devices.
Eigen::VectorXd predict_all(const MlpModel& model, const ReceivedSignal& y, const PilotBook& pilots,
                            const ClusterAssignment& clusters);

// -sum_k [a_k log p_k + (1 - a_k) log(1 - p_k)], p clamped to [1e-12, 1 - 1e-12].
double bce_loss(std::span<const double> probs, std::span<const std::uint8_t> labels);

// a_k = 1 iff p_k > tau.
ActivityVector hard_decision(std::span<const double> probs, double tau);

struct TrainingReport {
    std::vector<double> train_loss;  // mean per-slot loss of each epoch
    std::vector<double> val_loss;
    int best_epoch = -1;
};

// Adam on the summed BCE with early stopping on validation loss; returns the
// best-validation model. Deterministic for a fixed seed.
MlpModel train(const Dataset& ds, const MlpHyperparams& hyper, TrainingReport* report = nullptr);

// Checkpoint layout (little-endian): "CFDM", u32 version, u32 Z, V, T,
// input_dim, u32 flags (bit 0: untied branches), f64 input scale, then the
// flat parameter buffer as f32 in declaration order.
void save_checkpoint(std::ostream& os, const MlpModel& model);
MlpModel load_checkpoint(std::istream& is);
void save_checkpoint(const std::filesystem::path& path, const MlpModel& model);
MlpModel load_checkpoint(const std::filesystem::path& path);

}  // namespace cfad

#endif

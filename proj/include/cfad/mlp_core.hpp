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

#ifndef CFAD_MLP_CORE_HPP
#define CFAD_MLP_CORE_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace cfad {

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using RowMat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Layer layout of the per-device network. Each of the T branches runs the
// same (tied) or its own (untied) stack of Z ReLU layers of width V; the T
// branch outputs are concatenated and mapped to one logit.
//
// Parameters live in one flat buffer in declaration order:
//   for each stack s, for each layer z: W[s][z] (V x in, row-major), b[s][z] (V)
//   head weights (T*V), head bias (1)
struct MlpShape {
    int input_dim = 0;
    int hidden_layers = 2;
    int neurons = 512;
    int branches = 4;
    bool tied = true;

    int stacks() const { return tied ? 1 : branches; }
    int layer_input(int z) const { return z == 0 ? input_dim : neurons; }
    int stack_of(int branch) const { return tied ? 0 : branch; }

    std::size_t stack_size() const {
        std::size_t n = 0;
        for (int z = 0; z < hidden_layers; ++z)
            n += static_cast<std::size_t>(neurons) * layer_input(z) + neurons;
        return n;
    }
    std::size_t weight_offset(int s, int z) const {
        std::size_t off = static_cast<std::size_t>(s) * stack_size();
        for (int i = 0; i < z; ++i) off += static_cast<std::size_t>(neurons) * layer_input(i) + neurons;
        return off;
    }
    std::size_t bias_offset(int s, int z) const {
        return weight_offset(s, z) + static_cast<std::size_t>(neurons) * layer_input(z);
    }
    std::size_t head_offset() const { return static_cast<std::size_t>(stacks()) * stack_size(); }
    std::size_t size() const { return head_offset() + static_cast<std::size_t>(branches) * neurons + 1; }

    bool operator==(const MlpShape&) const = default;
};

template <typename Scalar>
class MlpParams {
public:
    MlpParams() = default;
    explicit MlpParams(const MlpShape& shape) : shape_(shape), data_(shape.size(), Scalar(0)) {}

    const MlpShape& shape() const { return shape_; }
    std::span<Scalar> data() { return data_; }
    std::span<const Scalar> data() const { return data_; }

    Eigen::Map<RowMat<Scalar>> weight(int s, int z) {
        return {data_.data() + shape_.weight_offset(s, z), shape_.neurons, shape_.layer_input(z)};
    }
    Eigen::Map<const RowMat<Scalar>> weight(int s, int z) const {
        return {data_.data() + shape_.weight_offset(s, z), shape_.neurons, shape_.layer_input(z)};
    }
    Eigen::Map<Vec<Scalar>> bias(int s, int z) { return {data_.data() + shape_.bias_offset(s, z), shape_.neurons}; }
    Eigen::Map<const Vec<Scalar>> bias(int s, int z) const {
        return {data_.data() + shape_.bias_offset(s, z), shape_.neurons};
    }
    // Slice of the head weights that multiplies branch t.
    Eigen::Map<Vec<Scalar>> head(int t) {
        return {data_.data() + shape_.head_offset() + static_cast<std::size_t>(t) * shape_.neurons, shape_.neurons};
    }
    Eigen::Map<const Vec<Scalar>> head(int t) const {
        return {data_.data() + shape_.head_offset() + static_cast<std::size_t>(t) * shape_.neurons, shape_.neurons};
    }
    Scalar& head_bias() { return data_.back(); }
    Scalar head_bias() const { return data_.back(); }

    void set_zero() { std::fill(data_.begin(), data_.end(), Scalar(0)); }

    template <typename To>
    MlpParams<To> cast() const {
        MlpParams<To> out(shape_);
        std::transform(data_.begin(), data_.end(), out.data().begin(), [](Scalar v) { return static_cast<To>(v); });
        return out;
    }

    bool operator==(const MlpParams&) const = default;

private:
    MlpShape shape_;
    std::vector<Scalar> data_;
};

// Activations kept for backpropagation: hidden[t][z] is the post-ReLU output
// of layer z of branch t (rows x V).
template <typename Scalar>
struct ForwardCache {
    std::vector<std::vector<Mat<Scalar>>> hidden;
    Vec<Scalar> logits;
};

// inputs[t] is rows x input_dim. Returns the logits (rows).
template <typename Scalar>
Vec<Scalar> forward_logits(const MlpParams<Scalar>& params, const std::vector<Mat<Scalar>>& inputs,
                           ForwardCache<Scalar>* cache = nullptr) {
    const MlpShape& shape = params.shape();
    if (static_cast<int>(inputs.size()) != shape.branches)
        throw std::invalid_argument("forward: expected one input matrix per branch");
    const Eigen::Index rows = inputs.front().rows();
    Vec<Scalar> logits = Vec<Scalar>::Constant(rows, params.head_bias());
    if (cache) cache->hidden.assign(shape.branches, {});

    Mat<Scalar> ping;
    Mat<Scalar> pong;
    for (int t = 0; t < shape.branches; ++t) {
        if (inputs[t].cols() != shape.input_dim || inputs[t].rows() != rows)
            throw std::invalid_argument("forward: branch input has wrong shape");
        const int s = shape.stack_of(t);
        if (cache) cache->hidden[t].resize(shape.hidden_layers);
        const Mat<Scalar>* in = &inputs[t];
        for (int z = 0; z < shape.hidden_layers; ++z) {
            Mat<Scalar>& out = cache ? cache->hidden[t][z] : (z % 2 == 0 ? ping : pong);
            out.noalias() = (*in) * params.weight(s, z).transpose();
            out.rowwise() += params.bias(s, z).transpose();
            out = out.cwiseMax(Scalar(0));
            in = &out;
        }
        logits.noalias() += (*in) * params.head(t);
    }
    if (cache) cache->logits = logits;
    return logits;
}

template <typename Scalar>
Scalar sigmoid(Scalar z) {
    return z >= 0 ? Scalar(1) / (Scalar(1) + std::exp(-z)) : std::exp(z) / (Scalar(1) + std::exp(z));
}

// log(sigmoid(z)) without overflow.
template <typename Scalar>
Scalar log_sigmoid(Scalar z) {
    return z >= 0 ? -std::log1p(std::exp(-z)) : z - std::log1p(std::exp(z));
}

// Binary cross-entropy of one logit; each log term is floored at log(1e-12).
template <typename Scalar>
Scalar bce_from_logit(Scalar logit, bool label, Scalar positive_weight = Scalar(1)) {
    const Scalar floor = static_cast<Scalar>(std::log(1e-12));
    return label ? -positive_weight * std::max(log_sigmoid(logit), floor) : -std::max(log_sigmoid(-logit), floor);
}

// Sum of the per-row BCE times loss_scale; adds d(loss)/d(params) into grad.
template <typename Scalar>
Scalar backprop(const MlpParams<Scalar>& params, const std::vector<Mat<Scalar>>& inputs,
                std::span<const std::uint8_t> labels, Scalar loss_scale, MlpParams<Scalar>& grad,
                Scalar positive_weight = Scalar(1)) {
    const MlpShape& shape = params.shape();
    ForwardCache<Scalar> cache;
    const Vec<Scalar> logits = forward_logits(params, inputs, &cache);
    const Eigen::Index rows = logits.size();
    if (static_cast<Eigen::Index>(labels.size()) != rows) throw std::invalid_argument("backprop: label count mismatch");

    Scalar loss = 0;
    Vec<Scalar> dlogit(rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const bool y = labels[r] != 0;
        loss += bce_from_logit(logits[r], y, positive_weight);
        const Scalar p = sigmoid(logits[r]);
        dlogit[r] = loss_scale * (y ? positive_weight * (p - Scalar(1)) : p);
    }

    grad.head_bias() += dlogit.sum();
    Mat<Scalar> delta;
    Mat<Scalar> upstream;
    for (int t = 0; t < shape.branches; ++t) {
        const int s = shape.stack_of(t);
        const auto& hidden = cache.hidden[t];
        grad.head(t).noalias() += hidden.back().transpose() * dlogit;
        upstream.noalias() = dlogit * params.head(t).transpose();
        for (int z = shape.hidden_layers - 1; z >= 0; --z) {
            delta = (hidden[z].array() > Scalar(0)).select(upstream, Scalar(0));
            const Mat<Scalar>& below = z == 0 ? inputs[t] : hidden[z - 1];
            grad.weight(s, z).noalias() += delta.transpose() * below;
            grad.bias(s, z).noalias() += delta.colwise().sum().transpose();
            if (z > 0) upstream.noalias() = delta * params.weight(s, z);
        }
    }
    return loss * loss_scale;
}

}  // namespace cfad

#endif

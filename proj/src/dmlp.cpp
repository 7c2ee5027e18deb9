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

#include "cfad/dmlp.hpp"

#include "cfad/binary_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace cfad {

void MlpHyperparams::validate() const {
    if (hidden_layers < 2) throw std::invalid_argument("MlpHyperparams: need at least two hidden layers");
    if (neurons < 1) throw std::invalid_argument("MlpHyperparams: neurons must be >= 1");
    if (!(learning_rate > 0.0)) throw std::invalid_argument("MlpHyperparams: learning rate must be > 0");
    if (batch_size < 1) throw std::invalid_argument("MlpHyperparams: batch size must be >= 1");
    if (max_epochs < 1) throw std::invalid_argument("MlpHyperparams: max epochs must be >= 1");
    if (patience < 1) throw std::invalid_argument("MlpHyperparams: patience must be >= 1");
    if (!(positive_weight > 0.0)) throw std::invalid_argument("MlpHyperparams: positive weight must be > 0");
}

MlpModel::MlpModel(MlpParams<float> params, double input_scale)
    : input_scale_(input_scale), params_(std::move(params)), inference_(params_.cast<double>()) {}

void MlpModel::set_params(MlpParams<float> params) {
    params_ = std::move(params);
    inference_ = params_.cast<double>();
}

MlpModel MlpModel::initialize(const MlpShape& shape, double input_scale, Rng& rng, double positive_rate) {
    MlpParams<float> p(shape);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int s = 0; s < shape.stacks(); ++s)
        for (int z = 0; z < shape.hidden_layers; ++z) {
            const double std = std::sqrt(2.0 / shape.layer_input(z));
            auto w = p.weight(s, z);
            for (Eigen::Index i = 0; i < w.rows(); ++i)
                for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = static_cast<float>(std * gauss(rng));
        }
    const double head_std = std::sqrt(1.0 / (static_cast<double>(shape.branches) * shape.neurons));
    for (int t = 0; t < shape.branches; ++t)
        for (auto& v : p.head(t)) v = static_cast<float>(head_std * gauss(rng));
    const double rate = std::clamp(positive_rate, 1e-4, 1.0 - 1e-4);
    p.head_bias() = static_cast<float>(std::log(rate / (1.0 - rate)));
    return {std::move(p), input_scale};
}

namespace {

// Writes the T branch rows of one device into inputs[t].row(row).
template <typename S, typename C>
void fill_device_rows(const C* y, int antennas, int pilot_len, const Eigen::MatrixXcd& pilots,
                      const ClusterAssignment& clusters, int device, double scale, std::vector<Mat<S>>& inputs,
                      Eigen::Index row) {
    const auto cluster = clusters.row(device);
    const std::size_t ap_stride = static_cast<std::size_t>(antennas) * pilot_len;
    for (std::size_t t = 0; t < cluster.size(); ++t) {
        const C* block = y + static_cast<std::size_t>(cluster[t]) * ap_stride;
        auto dst = inputs[t].row(row);
        Eigen::Index col = 0;
        for (int n = 0; n < antennas; ++n)
            for (int l = 0; l < pilot_len; ++l) {
                const cdouble v = std::conj(pilots(l, device)) * cdouble(block[n * pilot_len + l]) * scale;
                dst(col++) = static_cast<S>(v.real());
                dst(col++) = static_cast<S>(v.imag());
            }
    }
}

void check_model_matches(const MlpShape& shape, int input_dim, int cluster_size) {
    if (shape.input_dim != input_dim) throw std::invalid_argument("model input dimension does not match 2 N L");
    if (shape.branches != cluster_size) throw std::invalid_argument("model branch count does not match cluster size");
}

}  // namespace

std::vector<Eigen::VectorXd> featurize(const ReceivedSignal& y, const PilotBook& pilots,
                                       const ClusterAssignment& clusters, int device, double scale) {
    if (device < 0 || device >= clusters.num_devices() || device >= pilots.num_devices())
        throw std::out_of_range("featurize: device index out of range");
    if (pilots.length() != y.pilot_len()) throw std::invalid_argument("featurize: pilot length mismatch");
    const int dim = 2 * y.antennas() * y.pilot_len();
    std::vector<Mat<double>> rows(clusters.cluster_size(), Mat<double>(1, dim));
    fill_device_rows<double>(y.data().data(), y.antennas(), y.pilot_len(), pilots.pilots, clusters, device, scale,
                             rows, 0);
    std::vector<Eigen::VectorXd> out;
    out.reserve(rows.size());
    for (auto& r : rows) out.emplace_back(r.row(0).transpose());
    return out;
}

double forward(const MlpModel& model, const std::vector<Eigen::VectorXd>& features) {
    const auto& shape = model.shape();
    if (static_cast<int>(features.size()) != shape.branches)
        throw std::invalid_argument("forward: expected one feature vector per branch");
    std::vector<Mat<double>> inputs;
    inputs.reserve(features.size());
    for (const auto& f : features) {
        if (f.size() != shape.input_dim) throw std::invalid_argument("forward: feature vector has wrong length");
        inputs.emplace_back(f.transpose());
    }
    const double logit = forward_logits(model.inference_params(), inputs)(0);
    if (!std::isfinite(logit)) throw std::runtime_error("forward: non-finite activation");
    return sigmoid(logit);
}

Eigen::VectorXd predict_all(const MlpModel& model, const ReceivedSignal& y, const PilotBook& pilots,
                            const ClusterAssignment& clusters) {
    const auto& shape = model.shape();
    check_model_matches(shape, 2 * y.antennas() * y.pilot_len(), clusters.cluster_size());
    const int devices = clusters.num_devices();
    std::vector<Mat<double>> inputs(shape.branches, Mat<double>(devices, shape.input_dim));
    for (int k = 0; k < devices; ++k)
        fill_device_rows<double>(y.data().data(), y.antennas(), y.pilot_len(), pilots.pilots, clusters, k,
                                 model.input_scale(), inputs, k);
    const Vec<double> logits = forward_logits(model.inference_params(), inputs);
    if (!logits.allFinite()) throw std::runtime_error("predict_all: non-finite activation");
    return logits.unaryExpr([](double z) { return sigmoid(z); });
}

double bce_loss(std::span<const double> probs, std::span<const std::uint8_t> labels) {
    if (probs.size() != labels.size()) throw std::invalid_argument("bce_loss: length mismatch");
    double loss = 0.0;
    for (std::size_t k = 0; k < probs.size(); ++k) {
        const double p = std::clamp(probs[k], 1e-12, 1.0 - 1e-12);
        loss -= labels[k] ? std::log(p) : std::log(1.0 - p);
    }
    return loss;
}

ActivityVector hard_decision(std::span<const double> probs, double tau) {
    if (!(tau >= 0.0)) throw std::invalid_argument("hard_decision: threshold must be >= 0");
    ActivityVector out(probs.size());
    std::ranges::transform(probs, out.begin(), [tau](double p) { return p > tau ? std::uint8_t{1} : std::uint8_t{0}; });
    return out;
}

namespace {

// Fills a mini-batch of slots; rows are ordered (slot, device).
void fill_batch(const Dataset& ds, const std::vector<Sample>& samples, std::span<const std::size_t> slots,
                const ClusterAssignment& clusters, double scale, std::vector<Mat<float>>& inputs,
                std::vector<std::uint8_t>& labels) {
    const int devices = ds.num_devices;
    const Eigen::Index rows = static_cast<Eigen::Index>(slots.size()) * devices;
    for (auto& m : inputs) m.resize(rows, 2 * ds.antennas * ds.pilot_len);
    labels.resize(static_cast<std::size_t>(rows));
    Eigen::Index row = 0;
    for (std::size_t idx : slots) {
        const Sample& s = samples[idx];
        for (int k = 0; k < devices; ++k, ++row) {
            fill_device_rows<float>(s.y.data(), ds.antennas, ds.pilot_len, ds.pilots.pilots, clusters, k, scale,
                                    inputs, row);
            labels[static_cast<std::size_t>(row)] = s.labels[k];
        }
    }
}

double feature_rms(const Dataset& ds, const ClusterAssignment& clusters) {
    // Mean square over all real feature entries of the training split.
    const auto pilot_power = ds.pilots.pilots.cwiseAbs2();
    const std::size_t ap_stride = static_cast<std::size_t>(ds.antennas) * ds.pilot_len;
    long double total = 0.0L;
    std::size_t count = 0;
    for (const auto& s : ds.train)
        for (int k = 0; k < ds.num_devices; ++k)
            for (int m : clusters.row(k)) {
                const auto* block = s.y.data() + static_cast<std::size_t>(m) * ap_stride;
                for (int n = 0; n < ds.antennas; ++n)
                    for (int l = 0; l < ds.pilot_len; ++l)
                        total += pilot_power(l, k) * std::norm(cdouble(block[n * ds.pilot_len + l]));
                count += 2 * ap_stride;
            }
    const double rms = std::sqrt(static_cast<double>(total / static_cast<long double>(count)));
    if (!(rms > 0.0) || !std::isfinite(rms)) throw std::invalid_argument("train: training features are all zero");
    return rms;
}

double mean_split_loss(const Dataset& ds, const std::vector<Sample>& samples, const ClusterAssignment& clusters,
                       const MlpParams<float>& params, double scale, double positive_weight) {
    constexpr std::size_t chunk = 64;
    std::vector<Mat<float>> inputs(params.shape().branches);
    std::vector<std::uint8_t> labels;
    std::vector<std::size_t> slots;
    double total = 0.0;
    for (std::size_t begin = 0; begin < samples.size(); begin += chunk) {
        slots.resize(std::min(chunk, samples.size() - begin));
        std::iota(slots.begin(), slots.end(), begin);
        fill_batch(ds, samples, slots, clusters, scale, inputs, labels);
        const Vec<float> logits = forward_logits(params, inputs);
        for (Eigen::Index r = 0; r < logits.size(); ++r)
            total += bce_from_logit<double>(logits[r], labels[r] != 0, positive_weight);
    }
    return total / static_cast<double>(samples.size());
}

struct Adam {
    explicit Adam(std::size_t n, double lr) : lr(lr), m(n, 0.0f), v(n, 0.0f) {}

    void step(std::span<float> params, std::span<const float> grad) {
        ++t;
        const double c1 = 1.0 - std::pow(beta1, t);
        const double c2 = 1.0 - std::pow(beta2, t);
        const float step_size = static_cast<float>(lr * std::sqrt(c2) / c1);
        const float eps_hat = static_cast<float>(eps * std::sqrt(c2));
        for (std::size_t i = 0; i < params.size(); ++i) {
            m[i] = static_cast<float>(beta1) * m[i] + static_cast<float>(1.0 - beta1) * grad[i];
            v[i] = static_cast<float>(beta2) * v[i] + static_cast<float>(1.0 - beta2) * grad[i] * grad[i];
            params[i] -= step_size * m[i] / (std::sqrt(v[i]) + eps_hat);
        }
    }

    double lr;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    int t = 0;
    std::vector<float> m;
    std::vector<float> v;
};

}  // namespace

MlpModel train(const Dataset& ds, const MlpHyperparams& hyper, TrainingReport* report) {
    hyper.validate();
    if (ds.train.empty() || ds.validation.empty())
        throw std::invalid_argument("train: need nonempty train and validation splits");

    const Geometry& geo = ds.geometry(Split::train);
    MlpShape shape;
    shape.input_dim = 2 * ds.antennas * ds.pilot_len;
    shape.hidden_layers = hyper.hidden_layers;
    shape.neurons = hyper.neurons;
    shape.branches = ds.cluster_size;
    shape.tied = hyper.tied_branches;

    const double scale = 1.0 / feature_rms(ds, geo.clusters);
    std::size_t positives = 0;
    for (const auto& s : ds.train) positives += static_cast<std::size_t>(std::ranges::count(s.labels, 1));
    const double positive_rate = static_cast<double>(positives) / (ds.train.size() * ds.num_devices);

    Rng rng = make_stream(hyper.seed, Stream::training);
    MlpModel model = MlpModel::initialize(shape, scale, rng, positive_rate);
    MlpParams<float> params = model.params();
    MlpParams<float> best = params;
    MlpParams<float> grad(shape);
    Adam adam(params.data().size(), hyper.learning_rate);

    std::vector<std::size_t> order(ds.train.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<Mat<float>> inputs(shape.branches);
    std::vector<std::uint8_t> labels;
    const auto batch = static_cast<std::size_t>(hyper.batch_size);
    const auto pw = static_cast<float>(hyper.positive_weight);

    double best_val = std::numeric_limits<double>::infinity();
    int since_best = 0;
    TrainingReport local;
    TrainingReport& rep = report ? *report : local;
    rep = {};
    for (int epoch = 0; epoch < hyper.max_epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double epoch_loss = 0.0;
        for (std::size_t begin = 0; begin < order.size(); begin += batch) {
            const std::span<const std::size_t> slots(order.data() + begin, std::min(batch, order.size() - begin));
            fill_batch(ds, ds.train, slots, geo.clusters, scale, inputs, labels);
            grad.set_zero();
            const float loss = backprop(params, inputs, labels, 1.0f / static_cast<float>(slots.size()), grad, pw);
            if (!std::isfinite(loss))
                throw std::runtime_error("train: loss diverged in epoch " + std::to_string(epoch));
            adam.step(params.data(), grad.data());
            epoch_loss += static_cast<double>(loss) * static_cast<double>(slots.size());
        }
        const double train_loss = epoch_loss / static_cast<double>(order.size());
        const double val_loss = mean_split_loss(ds, ds.validation, geo.clusters, params, scale, hyper.positive_weight);
        if (!std::isfinite(train_loss) || !std::isfinite(val_loss))
            throw std::runtime_error("train: loss diverged in epoch " + std::to_string(epoch));
        rep.train_loss.push_back(train_loss);
        rep.val_loss.push_back(val_loss);
        if (val_loss < best_val) {
            best_val = val_loss;
            best = params;
            rep.best_epoch = epoch;
            since_best = 0;
        } else if (++since_best >= hyper.patience) {
            break;
        }
    }
    model.set_params(std::move(best));
    return model;
}

namespace {
constexpr char kCheckpointMagic[4] = {'C', 'F', 'D', 'M'};
constexpr std::uint32_t kCheckpointVersion = 1;
}  // namespace

void save_checkpoint(std::ostream& os, const MlpModel& model) {
    const auto& shape = model.shape();
    BinaryWriter w(os);
    w.bytes(kCheckpointMagic, 4);
    w.u32(kCheckpointVersion);
    w.u32(static_cast<std::uint32_t>(shape.hidden_layers));
    w.u32(static_cast<std::uint32_t>(shape.neurons));
    w.u32(static_cast<std::uint32_t>(shape.branches));
    w.u32(static_cast<std::uint32_t>(shape.input_dim));
    w.u32(shape.tied ? 0u : 1u);
    w.f64(model.input_scale());
    for (float v : model.params().data()) w.f32(v);
    w.finish("save_checkpoint");
}

MlpModel load_checkpoint(std::istream& is) {
    BinaryReader r(is, "load_checkpoint");
    char magic[4];
    r.bytes(magic, 4);
    if (!std::equal(magic, magic + 4, kCheckpointMagic)) r.fail("bad magic, not a CFDM checkpoint");
    if (const auto version = r.u32(); version != kCheckpointVersion)
        r.fail("unsupported version " + std::to_string(version));
    MlpShape shape;
    shape.hidden_layers = static_cast<int>(r.u32());
    shape.neurons = static_cast<int>(r.u32());
    shape.branches = static_cast<int>(r.u32());
    shape.input_dim = static_cast<int>(r.u32());
    const auto flags = r.u32();
    if (flags > 1) r.fail("unknown flags");
    shape.tied = (flags & 1u) == 0;
    if (shape.hidden_layers < 1 || shape.neurons < 1 || shape.branches < 1 || shape.input_dim < 1 ||
        shape.hidden_layers > 64 || shape.neurons > (1 << 16) || shape.branches > 4096 || shape.input_dim > (1 << 20))
        r.fail("implausible layer dimensions");
    const double scale = r.f64();
    MlpParams<float> params(shape);
    for (auto& v : params.data()) v = r.f32();
    return {std::move(params), scale};
}

void save_checkpoint(const std::filesystem::path& path, const MlpModel& model) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("save_checkpoint: cannot open " + path.string());
    save_checkpoint(os, model);
}

MlpModel load_checkpoint(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("load_checkpoint: cannot open " + path.string());
    return load_checkpoint(is);
}

}  // namespace cfad

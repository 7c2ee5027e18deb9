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

#include "cfad/ml_detector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace cfad {

MlProblem build_ml_problem(const ReceivedSignal& y, const PilotBook& pilots, const Eigen::MatrixXd& beta_est,
                           const SystemConfig& cfg, ClusterAssignment clusters, bool cluster_restricted) {
    const int antennas = y.antennas();
    if (antennas == 0) throw std::invalid_argument("build_ml_problem: no antennas");
    if (y.pilot_len() != pilots.length() || beta_est.rows() != y.num_aps() ||
        beta_est.cols() != pilots.num_devices())
        throw std::invalid_argument("build_ml_problem: dimension mismatch");
    if (cluster_restricted && clusters.num_devices() != pilots.num_devices())
        throw std::invalid_argument("build_ml_problem: cluster assignment does not cover all devices");

    MlProblem prob;
    prob.pilots = pilots.pilots;
    prob.beta_est = beta_est;
    prob.noise_power = cfg.noise_power;
    prob.tx_power = cfg.tx_power;
    prob.clusters = std::move(clusters);
    prob.cluster_restricted = cluster_restricted;

    const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(antennas));
    prob.sample_cov.reserve(y.num_aps());
    prob.snapshots.reserve(y.num_aps());
    for (int m = 0; m < y.num_aps(); ++m) {
        Eigen::MatrixXcd snap = y.block(m).transpose() * inv_sqrt_n;
        Eigen::MatrixXcd cov = snap * snap.adjoint();
        cov = 0.5 * (cov + cov.adjoint()).eval();
        prob.sample_cov.push_back(std::move(cov));
        prob.snapshots.push_back(std::move(snap));
    }
    return prob;
}

Eigen::MatrixXd MlProblem::normalized_gains() const {
    Eigen::MatrixXd gains = beta_est * (tx_power / noise_power);
    if (cluster_restricted) {
        Eigen::MatrixXd masked = Eigen::MatrixXd::Zero(gains.rows(), gains.cols());
        for (int k = 0; k < num_devices(); ++k)
            for (int m : clusters.row(k)) masked(m, k) = gains(m, k);
        gains = std::move(masked);
    }
    return gains;
}

Eigen::MatrixXcd model_covariance(const MlProblem& prob, const Eigen::VectorXd& gamma, int ap) {
    const Eigen::MatrixXd gains = prob.normalized_gains();
    const int len = prob.pilot_len();
    Eigen::VectorXd weights = gamma.cwiseProduct(gains.row(ap).transpose());
    Eigen::MatrixXcd cov = prob.pilots * weights.cast<cdouble>().asDiagonal() * prob.pilots.adjoint();
    cov += Eigen::MatrixXcd::Identity(len, len);
    return cov * prob.noise_power;
}

double ml_cost(const MlProblem& prob, const Eigen::VectorXd& gamma) {
    if (gamma.size() != prob.num_devices()) throw std::invalid_argument("ml_cost: gamma has wrong length");
    if ((gamma.array() < 0.0).any()) throw std::invalid_argument("ml_cost: gamma must be nonnegative");

    // Work in units of sigma^2; the constant L log sigma^2 per AP is added back.
    const Eigen::MatrixXd gains = prob.normalized_gains();
    const int len = prob.pilot_len();
    const double log_noise = std::log(prob.noise_power);
    double total = 0.0;
    for (int m = 0; m < prob.num_aps(); ++m) {
        Eigen::VectorXd weights = gamma.cwiseProduct(gains.row(m).transpose());
        Eigen::MatrixXcd cov = prob.pilots * weights.cast<cdouble>().asDiagonal() * prob.pilots.adjoint();
        cov += Eigen::MatrixXcd::Identity(len, len);
        Eigen::LLT<Eigen::MatrixXcd> llt(cov);
        if (llt.info() != Eigen::Success)
            throw std::runtime_error("ml_cost: model covariance of AP " + std::to_string(m) + " not positive definite");
        const double log_det = 2.0 * llt.matrixLLT().diagonal().real().array().log().sum();
        const double trace = llt.solve(prob.sample_cov[m] / prob.noise_power).trace().real();
        total += len * log_noise + log_det + trace;
    }
    if (!std::isfinite(total)) throw std::runtime_error("ml_cost: non-finite objective");
    return total;
}

MlSolver::MlSolver(const MlProblem& prob, MlOptions opts)
    : prob_(prob), opts_(opts), gains_(prob.normalized_gains()) {
    const int len = prob.pilot_len();
    gamma_ = Eigen::VectorXd::Zero(prob.num_devices());
    inverse_.assign(prob.num_aps(), Eigen::MatrixXcd::Identity(len, len));
    offset_ = prob.num_aps() * len * std::log(prob.noise_power);
    for (int m = 0; m < prob.num_aps(); ++m) tracked_cost_ += prob.sample_cov[m].trace().real() / prob.noise_power;
}

double MlSolver::quadratic_form(int ap, const Eigen::VectorXcd& q) const {
    if (!prob_.snapshots.empty())
        return (prob_.snapshots[ap].adjoint() * q).squaredNorm() / prob_.noise_power;
    return q.dot(prob_.sample_cov[ap] * q).real() / prob_.noise_power;
}

namespace {

// Change in f when gamma_k moves by d:
//   g(d) = sum_m [ log(1 + a_m d) - b_m d / (1 + a_m d) ]
// with a_m = c_mk s^H C_m^-1 s and b_m = c_mk s^H C_m^-1 S_m C_m^-1 s.
struct LineProblem {
    std::vector<double> a;
    std::vector<double> b;

    double value(double d) const {
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double t = 1.0 + a[i] * d;
            s += std::log(t) - b[i] * d / t;
        }
        return s;
    }
    double slope(double d) const {
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double t = 1.0 + a[i] * d;
            s += (a[i] * t - b[i]) / (t * t);
        }
        return s;
    }
    double curvature(double d) const {
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double t = 1.0 + a[i] * d;
            s += a[i] * (2.0 * b[i] - a[i] * t) / (t * t * t);
        }
        return s;
    }
};

// Root of the slope in [lo, hi] where slope(lo) < 0 <= slope(hi); Newton steps
// that leave the bracket fall back to bisection.
double refine_root(const LineProblem& line, double lo, double hi) {
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 100; ++it) {
        const double s = line.slope(x);
        if (s < 0.0) lo = x;
        else hi = x;
        const double c = line.curvature(x);
        double next = (c > 0.0) ? x - s / c : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - x) <= 1e-14 * (1.0 + std::abs(x)) || hi - lo <= 1e-14 * (1.0 + std::abs(x)))
            return next;
        x = next;
    }
    return x;
}

// Minimizer of g over [lo, inf), lo <= 0. Stationary points of g lie between
// the per-AP stationary points (b_m - a_m) / a_m^2; the slope is negative left
// of that range and positive right of it.
double minimize_line(const LineProblem& line, double lo) {
    if (line.a.empty()) return 0.0;
    double left = std::numeric_limits<double>::infinity();
    double right = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < line.a.size(); ++i) {
        const double stationary = (line.b[i] - line.a[i]) / (line.a[i] * line.a[i]);
        left = std::min(left, stationary);
        right = std::max(right, stationary);
    }
    left = std::max(left, lo);
    right = std::max(right, lo);

    double best = 0.0;
    double best_value = 0.0;
    auto consider = [&](double d) {
        const double v = line.value(d);
        if (std::isfinite(v) && v < best_value) {
            best = d;
            best_value = v;
        }
    };
    consider(lo);
    if (right > left) {
        constexpr int grid = 16;
        double x0 = left;
        double s0 = line.slope(x0);
        for (int i = 1; i <= grid; ++i) {
            const double x1 = (i == grid) ? right : left + (right - left) * i / grid;
            const double s1 = line.slope(x1);
            if (s0 < 0.0 && s1 >= 0.0) consider(refine_root(line, x0, x1));
            x0 = x1;
            s0 = s1;
        }
        consider(right);
    }
    return best;
}

}  // namespace

double MlSolver::update(int device) {
    const Eigen::VectorXcd s = prob_.pilots.col(device);
    LineProblem line;
    std::vector<int> aps;
    std::vector<Eigen::VectorXcd> directions;
    for (int m = 0; m < prob_.num_aps(); ++m) {
        const double gain = gains_(m, device);
        if (gain <= 0.0) continue;
        Eigen::VectorXcd q = inverse_[m] * s;
        const double u = s.dot(q).real();
        const double v = quadratic_form(m, q);
        line.a.push_back(gain * u);
        line.b.push_back(gain * v);
        aps.push_back(m);
        directions.push_back(std::move(q));
    }

    const double delta = minimize_line(line, -gamma_[device]);
    if (delta == 0.0) return 0.0;

    const double change = line.value(delta);
    for (std::size_t i = 0; i < aps.size(); ++i) {
        const int m = aps[i];
        const double scaled = delta * gains_(m, device);
        const double denom = 1.0 + delta * line.a[i];
        inverse_[m].noalias() -= (scaled / denom) * directions[i] * directions[i].adjoint();
    }
    const double before = opts_.check_descent ? ml_cost(prob_, gamma_) : 0.0;
    gamma_[device] = std::max(0.0, gamma_[device] + delta);
    tracked_cost_ += change;
    if (!std::isfinite(tracked_cost_)) throw std::runtime_error("ml_coordinate_descent: non-finite objective");

    if (opts_.check_descent) {
        const double exact = ml_cost(prob_, gamma_);
        if (exact > before + 1e-9 * std::abs(before))
            throw std::logic_error("ml_coordinate_descent: cost increased on device " + std::to_string(device));
    }
    return delta;
}

void MlSolver::refresh() {
    const int len = prob_.pilot_len();
    const Eigen::MatrixXcd identity = Eigen::MatrixXcd::Identity(len, len);
    double total = 0.0;
    for (int m = 0; m < prob_.num_aps(); ++m) {
        const Eigen::VectorXd root = gamma_.cwiseProduct(gains_.row(m).transpose()).cwiseSqrt();
        const Eigen::MatrixXcd scaled = prob_.pilots * root.cast<cdouble>().asDiagonal();
        Eigen::MatrixXcd cov = identity;
        cov.selfadjointView<Eigen::Lower>().rankUpdate(scaled);
        Eigen::LLT<Eigen::MatrixXcd> llt(cov);
        if (llt.info() != Eigen::Success)
            throw std::runtime_error("ml_coordinate_descent: model covariance of AP " + std::to_string(m) +
                                     " not positive definite");
        inverse_[m] = llt.solve(identity);
        // tr(C^-1 S) with both Hermitian: sum of C^-1 .* conj(S).
        const double trace = (inverse_[m].cwiseProduct(prob_.sample_cov[m].conjugate())).sum().real();
        total += 2.0 * llt.matrixLLT().diagonal().real().array().log().sum() + trace / prob_.noise_power;
    }
    tracked_cost_ = total;
}

double MlSolver::sweep() {
    // Rank-one updates drift on ill-conditioned covariances; start each pass exact.
    if ((gamma_.array() != 0.0).any()) refresh();
    double max_change = 0.0;
    for (int k = 0; k < prob_.num_devices(); ++k) max_change = std::max(max_change, std::abs(update(k)));
    return max_change;
}

SoftScores ml_coordinate_descent(const MlProblem& prob, const MlOptions& opts) {
    if (opts.max_sweeps < 1) throw std::invalid_argument("ml_coordinate_descent: need at least one sweep");
    MlSolver solver(prob, opts);
    SoftScores out;
    if (opts.record_costs) out.cost_trace.push_back(ml_cost(prob, solver.gamma()));
    for (int it = 0; it < opts.max_sweeps; ++it) {
        const double change = solver.sweep();
        ++out.sweeps;
        if (opts.record_costs) out.cost_trace.push_back(ml_cost(prob, solver.gamma()));
        if (change < opts.tolerance) break;
    }
    out.gamma = solver.gamma();
    out.score = out.gamma;
    return out;
}

}  // namespace cfad

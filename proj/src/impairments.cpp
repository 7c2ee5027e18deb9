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

#include "cfad/impairments.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace cfad {

LargeScaleFading perturb_beta(const LargeScaleFading& beta, const PerturbationParams& params, Rng& rng) {
    if (!(params.theta >= 0.0 && params.theta <= 1.0))
        throw std::invalid_argument("perturb_beta: theta must be in [0, 1]");
    const double keep = std::sqrt(1.0 - params.theta * params.theta);
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto noise = [&] {
        Eigen::MatrixXd psi(beta.beta_db.rows(), beta.beta_db.cols());
        for (Eigen::Index j = 0; j < psi.cols(); ++j)
            for (Eigen::Index i = 0; i < psi.rows(); ++i) psi(i, j) = gauss(rng);
        return psi;
    };

    if (params.theta == 0.0) {
        LargeScaleFading out = beta;
        return out;
    }

    if (params.domain == FadingDomain::linear) {
        LargeScaleFading out;
        out.beta_lin = (keep * beta.beta_lin + params.theta * noise()).cwiseMax(1e-30);
        out.beta_db = out.beta_lin.unaryExpr([](double v) { return 10.0 * std::log10(v); });
        return out;
    }

    const double mean = beta.beta_db.mean();
    const double var = (beta.beta_db.array() - mean).square().mean();
    const double std = var > 0.0 ? std::sqrt(var) : 1.0;
    const Eigen::MatrixXd standardized = (beta.beta_db.array() - mean) / std;
    const Eigen::MatrixXd perturbed = keep * standardized + params.theta * noise();
    return fading_from_db((perturbed.array() * std + mean).matrix());
}

double FixedPointFormat::step() const { return std::ldexp(1.0, -fraction_bits); }
double FixedPointFormat::min_value() const { return -std::ldexp(1.0, integer_bits() - 1); }
double FixedPointFormat::max_value() const { return std::ldexp(1.0, integer_bits() - 1) - step(); }

void FixedPointFormat::validate() const {
    if (word_length < 2 || word_length > 64)
        throw std::invalid_argument("FixedPointFormat: word length must be in [2, 64]");
    if (fraction_bits < 0 || fraction_bits >= word_length)
        throw std::invalid_argument("FixedPointFormat: fraction bits must be in [0, word length)");
}

std::string FixedPointFormat::label() const {
    return std::to_string(word_length) + "_" + std::to_string(fraction_bits) + "_bits";
}

FixedPointFormat parse_fixed_point(std::string_view text) {
    auto fail = [&] {
        return std::invalid_argument("fixed-point format '" + std::string(text) + "' is not of the form b_q_bits");
    };
    std::string_view rest = text;
    if (rest.ends_with("_bits")) rest.remove_suffix(5);
    const auto sep = rest.find('_');
    if (sep == std::string_view::npos) throw fail();
    FixedPointFormat fmt;
    auto parse_int = [&](std::string_view s, int& out) {
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
        if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) throw fail();
    };
    parse_int(rest.substr(0, sep), fmt.word_length);
    parse_int(rest.substr(sep + 1), fmt.fraction_bits);
    fmt.validate();
    return fmt;
}

double quantize(double x, const FixedPointFormat& fmt) {
    if (std::isnan(x)) throw std::invalid_argument("quantize: NaN input");
    const double scaled = std::ldexp(x, fmt.fraction_bits);
    // std::nearbyint honours the default FE_TONEAREST mode: ties to even.
    double code = fmt.rounding == Rounding::nearest_even ? std::nearbyint(scaled) : std::floor(scaled);
    const double lo = -std::ldexp(1.0, fmt.word_length - 1);
    const double hi = std::ldexp(1.0, fmt.word_length - 1) - 1.0;
    if (!(code >= lo)) code = lo;
    if (!(code <= hi)) code = hi;
    return std::ldexp(code, -fmt.fraction_bits);
}

Eigen::MatrixXd quantize(const Eigen::MatrixXd& x, const FixedPointFormat& fmt) {
    return x.unaryExpr([&](double v) { return quantize(v, fmt); });
}

LargeScaleFading quantize_beta(const LargeScaleFading& beta, const FixedPointFormat& fmt, FadingDomain domain) {
    fmt.validate();
    if (domain == FadingDomain::db) return fading_from_db(quantize(beta.beta_db, fmt));
    LargeScaleFading out;
    // A linear coefficient that rounds to zero is floored so clustering and
    // the likelihood model stay defined.
    out.beta_lin = quantize(beta.beta_lin, fmt).cwiseMax(1e-30);
    out.beta_db = out.beta_lin.unaryExpr([](double v) { return 10.0 * std::log10(v); });
    return out;
}

ReceivedSignal quantize_signal(const ReceivedSignal& y, const FixedPointFormat& fmt, double full_scale) {
    fmt.validate();
    if (!(full_scale > 0.0)) throw std::invalid_argument("quantize_signal: full scale must be positive");
    ReceivedSignal out = y;
    for (auto& v : out.data())
        v = {quantize(v.real() / full_scale, fmt) * full_scale, quantize(v.imag() / full_scale, fmt) * full_scale};
    return out;
}

}  // namespace cfad

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

#ifndef CFAD_IMPAIRMENTS_HPP
#define CFAD_IMPAIRMENTS_HPP

#include "cfad/simcore.hpp"

#include <Eigen/Dense>

#include <string>
#include <string_view>

namespace cfad {

enum class FadingDomain { db, linear };

// Estimation error on the large-scale fading:
//   beta~ = sqrt(1 - theta^2) beta + theta psi,  psi ~ N(0, 1) i.i.d.
// In the dB domain beta is first standardized to zero mean and unit variance
// over the whole matrix, perturbed, then mapped back. The linear domain
// applies the formula to beta_lin directly and floors the result at 1e-30.
struct PerturbationParams {
    double theta = 0.0;
    FadingDomain domain = FadingDomain::db;
};

// Returns the perturbed coefficients (both dB and linear populated).
LargeScaleFading perturb_beta(const LargeScaleFading& beta, const PerturbationParams& params, Rng& rng);

enum class Rounding { nearest_even, truncate };

// Signed two's-complement fixed point with b bits of which q are fractional;
// p = b - q integer bits including the sign.
struct FixedPointFormat {
    int word_length = 32;
    int fraction_bits = 16;
    Rounding rounding = Rounding::nearest_even;

    int integer_bits() const { return word_length - fraction_bits; }
    double step() const;
    double min_value() const;
    double max_value() const;

    void validate() const;
    // "b_q_bits", e.g. "16_8_bits".
    std::string label() const;

    bool operator==(const FixedPointFormat&) const = default;
};

// Parses "b_q_bits" (the "_bits" suffix is optional). Throws std::invalid_argument.
FixedPointFormat parse_fixed_point(std::string_view text);

// Nearest representable value, saturating outside the range. NaN throws.
double quantize(double x, const FixedPointFormat& fmt);
Eigen::MatrixXd quantize(const Eigen::MatrixXd& x, const FixedPointFormat& fmt);

// Quantizes the fading coefficients in the given domain and returns the
// reconstructed coefficients.
LargeScaleFading quantize_beta(const LargeScaleFading& beta, const FixedPointFormat& fmt,
                               FadingDomain domain = FadingDomain::db);

// Quantizes real and imaginary parts independently after dividing by
// full_scale (the value that maps to 1.0); the result is rescaled back.
ReceivedSignal quantize_signal(const ReceivedSignal& y, const FixedPointFormat& fmt, double full_scale = 1.0);

}  // namespace cfad

#endif

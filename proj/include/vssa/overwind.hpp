/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The vssa-elastography Authors. All rights reserved.
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef VSSA_OVERWIND_HPP
#define VSSA_OVERWIND_HPP

#include <array>
#include <cmath>
#include <vector>

#include "vssa/geometry.hpp"

namespace vssa {

enum class TieRule { manual, tied_lf, tied_hf };

struct OverwindParams {
  double alpha1 = 5.0;
  double alpha2 = 10.0;
  double beta1 = 2.5;
  double beta2 = 5.0;
  /// Scale parameters of the four regularizers, in samples.
  std::array<double, 4> lambda{0.01, 0.01, 0.01, 0.01};
  double epsilon_a = 0.0;
  double epsilon_l = 0.0;
  int window_half_k = 5;  ///< axial window half-extent
  int window_half_r = 1;  ///< lateral window half-extent
  int irls_iterations = 3;
  TieRule tie_rule = TieRule::manual;

  /// beta = alpha / 2 in both directions.
  static OverwindParams tied_lf(double alpha1 = 5.0, double alpha2 = 10.0);
  /// Square grid: alpha2 = alpha1, beta = alpha / 2, lateral window as wide as the axial one.
  static OverwindParams tied_hf(double alpha1 = 5.0);

  /// Throws std::invalid_argument on negative weights, non-positive lambdas
  /// or a tie rule that the weights do not satisfy.
  void validate() const;
};

/// Smooth L1 surrogate 2 lambda sqrt(lambda^2 + s^2).
inline double smooth_l1(double lambda, double s) { return 2.0 * lambda * std::sqrt(lambda * lambda + s * s); }

/// Mean axial difference between vertically adjacent valid nodes of the
/// integer field; a cheap estimate of the axial strain in samples per sample.
double default_epsilon_a(const DisplacementField& integer_disp);

/// Exact value of the regularized window cost at `disp` (integer parts
/// select the I2 sample, sub-sample parts are the unknowns). Nodes outside
/// disp.valid contribute nothing, nor do regularizer pairs touching them.
double overwind_cost(const RfFrame& i1, const RfFrame& i2, const DisplacementField& disp,
                     const OverwindParams& params);

/// Gradient of overwind_cost with respect to the sub-sample parts.
/// Entries at invalid nodes are zero.
struct OverwindGradient {
  Field axial;
  Field lateral;
};
OverwindGradient overwind_gradient(const RfFrame& i1, const RfFrame& i2, const DisplacementField& disp,
                                   const OverwindParams& params);

struct OverwindResult {
  DisplacementField displacement;
  /// Cost at the start and after every iteration.
  std::vector<double> cost_history;
  /// Valid nodes whose sub-sample part exceeds one sample in magnitude.
  Eigen::Index large_subsample_nodes = 0;
};

/// Minimizes overwind_cost over the sub-sample parts by iteratively
/// reweighted least squares. Throws DegenerateInput when a normal-equation
/// system is singular.
OverwindResult overwind_solve(const RfFrame& i1, const RfFrame& i2, const DisplacementField& integer_disp,
                              const OverwindParams& params);

}  // namespace vssa

#endif  // VSSA_OVERWIND_HPP

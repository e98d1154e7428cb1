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

#ifndef VSSA_INTERP_HPP
#define VSSA_INTERP_HPP

#include "vssa/geometry.hpp"

namespace vssa {

/// Cubic spline through samples at unit-spaced knots 0, 1, ..., n-1.
/// End conditions prescribe the second derivative at both ends (zero for a
/// natural spline).
class CubicSpline {
 public:
  explicit CubicSpline(const Eigen::VectorXd& values, double left_curvature = 0.0, double right_curvature = 0.0);

  /// Value at knot coordinate t in [0, n-1]; t outside is clamped to the ends.
  double operator()(double t) const;
  const Eigen::VectorXd& second_derivatives() const { return m_; }

 private:
  Eigen::VectorXd y_;
  Eigen::VectorXd m_;
};

/// Lateral upsampling by a natural cubic spline per row. The result has
/// (nx - 1) * factor + 1 columns with spacing dx / factor and keeps the
/// original nodes. A new node is valid when both neighboring original nodes are.
RfFrame spline_upsample(const RfFrame& frame, int factor);

}  // namespace vssa

#endif  // VSSA_INTERP_HPP

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

#include "vssa/interp.hpp"

#include <algorithm>
#include <cmath>

#include "vssa/parallel.hpp"

namespace vssa {

CubicSpline::CubicSpline(const Eigen::VectorXd& values, double left_curvature, double right_curvature)
    : y_(values), m_(Eigen::VectorXd::Zero(values.size())) {
  const Eigen::Index n = values.size();
  if (n < 2) throw std::invalid_argument("CubicSpline: need at least two samples");
  m_[0] = left_curvature;
  m_[n - 1] = right_curvature;
  if (n == 2) return;
  // Interior curvatures: m[i-1] + 4 m[i] + m[i+1] = 6 (y[i+1] - 2 y[i] + y[i-1]),
  // solved by the Thomas algorithm.
  const Eigen::Index k = n - 2;
  Eigen::VectorXd c(k), d(k);
  for (Eigen::Index i = 0; i < k; ++i) d[i] = 6.0 * (y_[i + 2] - 2.0 * y_[i + 1] + y_[i]);
  d[0] -= left_curvature;
  d[k - 1] -= right_curvature;
  c[0] = 0.25;
  d[0] /= 4.0;
  for (Eigen::Index i = 1; i < k; ++i) {
    const double denom = 4.0 - c[i - 1];
    c[i] = 1.0 / denom;
    d[i] = (d[i] - d[i - 1]) / denom;
  }
  m_[k] = d[k - 1];
  for (Eigen::Index i = k - 2; i >= 0; --i) {
    d[i] -= c[i] * d[i + 1];
    m_[i + 1] = d[i];
  }
}

double CubicSpline::operator()(double t) const {
  const Eigen::Index n = y_.size();
  t = std::clamp(t, 0.0, static_cast<double>(n - 1));
  const Eigen::Index i = std::min<Eigen::Index>(static_cast<Eigen::Index>(t), n - 2);
  const double b = t - static_cast<double>(i);
  const double a = 1.0 - b;
  return a * y_[i] + b * y_[i + 1] + ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) / 6.0;
}

RfFrame spline_upsample(const RfFrame& frame, int factor) {
  frame.validate();
  if (factor < 1) throw std::invalid_argument("spline_upsample: factor must be >= 1");
  const int nx = frame.grid.nx;
  if (nx < 4) throw std::invalid_argument("spline_upsample: need at least 4 lateral samples");
  if (factor == 1) return frame;
  const ImageGrid g(frame.grid.x0, frame.grid.z0, frame.grid.dx / factor, frame.grid.dz, (nx - 1) * factor + 1,
                    frame.grid.nz);
  RfFrame out(g);
  parallel_for(frame.grid.nz, [&](int iz) {
    const CubicSpline s(frame.values.row(iz).transpose());
    for (int ix = 0; ix < g.nx; ++ix) {
      const int i = ix / factor, r = ix % factor;
      out.values(iz, ix) = r == 0 ? frame.values(iz, i) : s(i + static_cast<double>(r) / factor);
      out.valid(iz, ix) = frame.valid(iz, i) && (r == 0 || frame.valid(iz, i + 1));
    }
  });
  return out;
}

}  // namespace vssa

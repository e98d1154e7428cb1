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

#ifndef VSSA_TESTS_SUPPORT_HPP
#define VSSA_TESTS_SUPPORT_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "vssa/geometry.hpp"

namespace vssa::test {

/// RF-like speckle on a unit-spaced grid: Gaussian-windowed axial cosines
/// centered on random scatterers. Evaluated analytically, so a translated
/// copy is exact for any (fractional) shift.
struct Speckle {
  std::vector<double> z, x, amp;
  double period = 6.0;   ///< axial carrier period, samples
  double sigma_z = 2.0;  ///< axial envelope, samples
  double sigma_x = 1.5;  ///< lateral envelope, samples

  Speckle(int nz, int nx, std::uint64_t seed, double density = 1.0, int margin = 12) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uz(-margin, nz + margin), ux(-margin, nx + margin);
    std::normal_distribution<double> n01;
    const int count = static_cast<int>(density * (nz + 2 * margin) * (nx + 2 * margin));
    for (int s = 0; s < count; ++s) {
      z.push_back(uz(rng));
      x.push_back(ux(rng));
      amp.push_back(n01(rng));
    }
  }

  double operator()(double zq, double xq) const {
    double v = 0.0;
    for (std::size_t s = 0; s < z.size(); ++s) {
      const double dz = zq - z[s], dx = xq - x[s];
      if (std::abs(dz) > 5.0 * sigma_z || std::abs(dx) > 5.0 * sigma_x) continue;
      v += amp[s] * std::exp(-0.5 * (dz * dz / (sigma_z * sigma_z) + dx * dx / (sigma_x * sigma_x))) *
           std::cos(2.0 * std::numbers::pi * dz / period);
    }
    return v;
  }

  /// Frame whose content is this speckle translated by (shift_z, shift_x),
  /// i.e. frame(i, j) = speckle(i - shift_z, j - shift_x).
  RfFrame frame(int nz, int nx, double shift_z = 0.0, double shift_x = 0.0) const {
    RfFrame f(ImageGrid(0.0, 0.0, 1.0, 1.0, nx, nz));
    for (int j = 0; j < nx; ++j)
      for (int i = 0; i < nz; ++i) f.values(i, j) = (*this)(i - shift_z, j - shift_x);
    return f;
  }
};

inline Field random_field(int nz, int nx, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  Field f(nz, nx);
  for (Eigen::Index i = 0; i < f.size(); ++i) f.data()[i] = scale * n01(rng);
  return f;
}

inline double rel_diff(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

}  // namespace vssa::test

#endif  // VSSA_TESTS_SUPPORT_HPP

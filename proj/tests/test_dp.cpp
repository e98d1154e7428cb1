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

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "support.hpp"
#include "vssa/dp.hpp"

using namespace vssa;
using vssa::test::Speckle;

namespace {

int l1(int a, int b, const DpConfig& c) {
  return std::abs(c.axial_of(a) - c.axial_of(b)) + std::abs(c.lateral_of(a) - c.lateral_of(b));
}

// Plain Viterbi over all label pairs.
double brute_force_column(const ColumnCost& cost, const std::vector<int>& neighbor, const DpConfig& c) {
  const int nz = static_cast<int>(cost.unary.rows()), nl = c.label_count();
  const double w = c.smoothness_weight;
  std::vector<double> prev(nl), cur(nl);
  for (int i = 0; i < nz; ++i) {
    for (int lab = 0; lab < nl; ++lab) {
      double u = cost.unary(i, lab);
      if (!neighbor.empty()) u += w * l1(lab, neighbor[i], c);
      double best = i == 0 ? 0.0 : std::numeric_limits<double>::infinity();
      if (i > 0)
        for (int p = 0; p < nl; ++p) best = std::min(best, prev[p] + w * l1(lab, p, c));
      cur[lab] = u + best;
    }
    std::swap(prev, cur);
  }
  double best = std::numeric_limits<double>::infinity();
  for (double v : prev) best = std::min(best, v);
  return best;
}

// Label minimizing the patch SSD alone.
std::pair<int, int> exhaustive_label(const RfFrame& i1, const RfFrame& i2, int iz, int ix, const DpConfig& c) {
  double best = std::numeric_limits<double>::infinity();
  std::pair<int, int> arg{0, 0};
  const int h = c.patch_half;
  for (int a = -c.axial_range; a <= c.axial_range; ++a)
    for (int l = -c.lateral_range; l <= c.lateral_range; ++l) {
      if (ix + l < 0 || ix + l >= i1.grid.nx || iz - h + a < 0 || iz + h + a >= i1.grid.nz) continue;
      double s = 0.0;
      for (int q = iz - h; q <= iz + h; ++q) {
        const double d = i1.values(q, ix) - i2.values(q + a, ix + l);
        s += d * d;
      }
      if (s < best) {
        best = s;
        arg = {a, l};
      }
    }
  return arg;
}

DpConfig small_config() {
  DpConfig c;
  c.axial_range = 4;
  c.lateral_range = 2;
  c.smoothness_weight = 1.0;
  return c;
}

}  // namespace

TEST_CASE("identical frames give zero displacement") {
  const Speckle sp(40, 16, 1);
  const RfFrame f = sp.frame(40, 16);
  const DisplacementField d = dp_integer_displacement(f, f, small_config());
  REQUIRE(d.valid_count() > 0);
  for (int ix = 0; ix < 16; ++ix)
    for (int iz = 0; iz < 40; ++iz)
      if (d.valid(iz, ix)) {
        CHECK(d.axial_int(iz, ix) == 0.0);
        CHECK(d.lateral_int(iz, ix) == 0.0);
        CHECK(d.axial_sub(iz, ix) == 0.0);
      }
}

TEST_CASE("global shift matches the exhaustive window search") {
  const int nz = 48, nx = 20;
  const Speckle sp(nz, nx, 2);
  const RfFrame i1 = sp.frame(nz, nx);
  const RfFrame i2 = sp.frame(nz, nx, 2.0, 1.0);
  const DpConfig c = small_config();
  const DisplacementField d = dp_integer_displacement(i1, i2, c);
  int checked = 0;
  for (int ix = 1; ix < nx - 2; ++ix)
    for (int iz = c.patch_half + c.axial_range; iz < nz - c.patch_half - c.axial_range; ++iz) {
      const auto [a, l] = exhaustive_label(i1, i2, iz, ix, c);
      CHECK(a == 2);
      CHECK(l == 1);
      REQUIRE(d.valid(iz, ix));
      CHECK(d.axial_int(iz, ix) == 2.0);
      CHECK(d.lateral_int(iz, ix) == 1.0);
      ++checked;
    }
  CHECK(checked > 400);
}

TEST_CASE("solve_column is optimal against brute-force Viterbi") {
  const int nz = 32, nx = 8;
  std::mt19937 rng(3);
  for (int trial = 0; trial < 6; ++trial) {
    const Speckle sp(nz, nx, 100 + trial);
    RfFrame i1 = sp.frame(nz, nx);
    const RfFrame i2 = sp.frame(nz, nx, 2.0, 1.0);
    i1.values(nz / 2, nx / 2) += 5.0;  // one noisy node
    DpConfig c = small_config();
    c.lateral_range = 1;
    c.smoothness_weight = trial % 2 == 0 ? 0.3 : 50.0;
    std::uniform_int_distribution<int> pick(0, c.label_count() - 1);
    for (int col = 0; col < nx; ++col) {
      const ColumnCost cost = column_data_cost(i1, i2, col, c);
      std::vector<int> neighbor;
      if (col % 2 == 1)
        for (int i = 0; i < nz; ++i) neighbor.push_back(pick(rng));
      const std::vector<int> labels = solve_column(cost, neighbor, c);
      for (int lab : labels) {
        CHECK(lab >= 0);
        CHECK(lab < c.label_count());
      }
      const double got = column_labeling_cost(cost, labels, neighbor, c);
      const double want = brute_force_column(cost, neighbor, c);
      CHECK(got == doctest::Approx(want).epsilon(1e-12));
    }
  }
}

TEST_CASE("large smoothness keeps the field constant despite one noisy node") {
  const int nz = 32, nx = 8;
  const Speckle sp(nz, nx, 7);
  DpConfig c = small_config();
  c.lateral_range = 1;
  c.smoothness_weight = 1e4;
  for (const auto [sa, sl] : {std::pair{0, 1}, std::pair{2, 1}}) {
    RfFrame i1 = sp.frame(nz, nx);
    const RfFrame i2 = sp.frame(nz, nx, sa, sl);
    i1.values(16, 3) += 20.0;
    const DisplacementField d = dp_integer_displacement(i1, i2, c);
    REQUIRE(d.valid_count() > 100);
    double a0 = kInvalid, l0 = kInvalid;
    for (int ix = 0; ix < nx; ++ix)
      for (int iz = 0; iz < nz; ++iz) {
        if (!d.valid(iz, ix)) continue;
        if (std::isnan(a0)) {
          a0 = d.axial_int(iz, ix);
          l0 = d.lateral_int(iz, ix);
        }
        CHECK(d.axial_int(iz, ix) == a0);
        CHECK(d.lateral_int(iz, ix) == l0);
      }
    // A positive axial label is infeasible in the bottom rows with data, so
    // only the zero-axial shift can survive as a constant field.
    if (sa == 0) {
      CHECK(a0 == 0.0);
      CHECK(l0 == 1.0);
    }
  }
}

TEST_CASE("labels stay inside the search range") {
  const int nz = 40, nx = 12;
  const RfFrame i1(ImageGrid(0, 0, 1, 1, nx, nz), test::random_field(nz, nx, 5));
  const RfFrame i2(ImageGrid(0, 0, 1, 1, nx, nz), test::random_field(nz, nx, 6));
  for (double w : {0.0, 0.5, 10.0}) {
    DpConfig c = small_config();
    c.smoothness_weight = w;
    const DisplacementField d = dp_integer_displacement(i1, i2, c);
    for (int ix = 0; ix < nx; ++ix)
      for (int iz = 0; iz < nz; ++iz)
        if (d.valid(iz, ix)) {
          CHECK(std::abs(d.axial_int(iz, ix)) <= c.axial_range);
          CHECK(std::abs(d.lateral_int(iz, ix)) <= c.lateral_range);
        }
  }
}

TEST_CASE("shift covariance on the common interior") {
  const int nz = 48, nx = 18, sz = 3, sx = 2;
  const Speckle sp(nz + sz, nx + sx, 9);
  // Noise in content coordinates, so the shifted pair carries the same noise.
  Speckle noise(nz + sz, nx + sx, 10, 0.5);
  for (double& a : noise.amp) a *= 0.3;
  auto make = [&](double oz, double ox, double az, double ax) {
    RfFrame f(ImageGrid(0, 0, 1, 1, nx, nz));
    for (int j = 0; j < nx; ++j)
      for (int i = 0; i < nz; ++i)
        f.values(i, j) = sp(i - oz - az, j - ox - ax) + (az != 0.0 ? noise(i - oz, j - ox) : 0.0);
    return f;
  };
  // The sweep starts at the seed column, which moves with the content.
  DpConfig c0 = small_config(), c1 = small_config();
  c0.seed_column = 8;
  c1.seed_column = 8 + sx;
  const DisplacementField d0 = dp_integer_displacement(make(0, 0, 0, 0), make(0, 0, 2, 1), c0);
  const DisplacementField d1 = dp_integer_displacement(make(sz, sx, 0, 0), make(sz, sx, 2, 1), c1);
  int compared = 0;
  for (int ix = 4; ix < nx - sx - 4; ++ix)
    for (int iz = 10; iz < nz - sz - 10; ++iz) {
      if (!d0.valid(iz, ix) || !d1.valid(iz + sz, ix + sx)) continue;
      CHECK(d0.axial_int(iz, ix) == d1.axial_int(iz + sz, ix + sx));
      CHECK(d0.lateral_int(iz, ix) == d1.lateral_int(iz + sz, ix + sx));
      ++compared;
    }
  CHECK(compared > 100);
}

TEST_CASE("default search ranges follow the maximum strain") {
  const DpConfig c = DpConfig::for_frame(ImageGrid(0, 0, 1, 1, 20, 338), 0.05, 16);
  CHECK(c.axial_range == 34);
  CHECK(c.lateral_range == 1);
  CHECK(c.column_stride == 16);
}

TEST_CASE("invalid DP arguments") {
  const RfFrame a(ImageGrid(0, 0, 1, 1, 6, 20));
  const RfFrame b(ImageGrid(0, 0, 1, 1, 7, 20));
  CHECK_THROWS_AS(dp_integer_displacement(a, b, small_config()), std::invalid_argument);
  DpConfig c = small_config();
  c.axial_range = 40;
  CHECK_THROWS_AS(dp_integer_displacement(a, a, c), std::invalid_argument);
  c = small_config();
  c.lateral_range = -1;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = small_config();
  c.smoothness_weight = -1.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

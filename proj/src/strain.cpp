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

#include "vssa/strain.hpp"

#include <algorithm>
#include <cmath>

namespace vssa {

int lsq_window_length(double window_fraction, int extent) {
  if (!(window_fraction > 0.0) || !(window_fraction < 1.0))
    throw std::invalid_argument("lsq window fraction must lie in (0, 1)");
  int rho = static_cast<int>(std::lround(window_fraction * extent));
  if (rho % 2 == 0) ++rho;
  rho = std::max(rho, 3);
  if (rho > extent) throw std::invalid_argument("lsq window longer than the frame");
  return rho;
}

namespace {

void fill_component(const DisplacementField& disp, Direction dir, int rho, StrainField& out) {
  const Field u = dir == Direction::axial ? disp.axial() : disp.lateral();
  const int n_along = dir == Direction::axial ? disp.grid.nz : disp.grid.nx;
  const int half = rho / 2;
  const double sign = dir == Direction::axial ? -1.0 : 1.0;
  Field& s = out.component(dir);
  for (int ix = 0; ix < disp.grid.nx; ++ix)
    for (int iz = 0; iz < disp.grid.nz; ++iz) {
      s(iz, ix) = kInvalid;
      if (!disp.valid(iz, ix)) continue;
      const int c = dir == Direction::axial ? iz : ix;
      const int lo = std::max(0, c - half), hi = std::min(n_along - 1, c + half);
      // Centered OLS slope over valid samples.
      double st = 0.0, su = 0.0;
      int n = 0;
      for (int k = lo; k <= hi; ++k) {
        const int r = dir == Direction::axial ? k : iz, q = dir == Direction::axial ? ix : k;
        if (!disp.valid(r, q)) continue;
        st += k;
        su += u(r, q);
        ++n;
      }
      if (n < 3) continue;
      const double tm = st / n, um = su / n;
      double stt = 0.0, stu = 0.0;
      for (int k = lo; k <= hi; ++k) {
        const int r = dir == Direction::axial ? k : iz, q = dir == Direction::axial ? ix : k;
        if (!disp.valid(r, q)) continue;
        stt += (k - tm) * (k - tm);
        stu += (k - tm) * (u(r, q) - um);
      }
      s(iz, ix) = sign * stu / stt;
    }
}

}  // namespace

StrainField lsq_strain(const DisplacementField& disp, Direction direction, double window_fraction) {
  const int extent = direction == Direction::axial ? disp.grid.nz : disp.grid.nx;
  const int rho = lsq_window_length(window_fraction, extent);
  StrainField out(disp.grid);
  fill_component(disp, direction, rho, out);
  const Field& s = out.component(direction);
  for (Eigen::Index i = 0; i < s.size(); ++i) out.valid.data()[i] = std::isfinite(s.data()[i]);
  out.provenance = std::string("lsq ") + (direction == Direction::axial ? "axial" : "lateral") +
                   " window=" + std::to_string(rho);
  return out;
}

StrainField lsq_strain(const DisplacementField& disp, double window_fraction) {
  const int rho_a = lsq_window_length(window_fraction, disp.grid.nz);
  const int rho_l = lsq_window_length(window_fraction, disp.grid.nx);
  StrainField out(disp.grid);
  fill_component(disp, Direction::axial, rho_a, out);
  fill_component(disp, Direction::lateral, rho_l, out);
  for (Eigen::Index i = 0; i < out.axial_strain.size(); ++i)
    out.valid.data()[i] = std::isfinite(out.axial_strain.data()[i]) && std::isfinite(out.lateral_strain.data()[i]);
  out.provenance = "lsq axial window=" + std::to_string(rho_a) + " lateral window=" + std::to_string(rho_l);
  return out;
}

bool NodeRect::overlaps(const NodeRect& o) const {
  return iz0 < o.iz0 + o.nz && o.iz0 < iz0 + nz && ix0 < o.ix0 + o.nx && o.ix0 < ix0 + nx;
}

NodeRect rect_from_extent(const ImageGrid& grid, Extent x, Extent z) {
  const int ix0 = std::max(0, static_cast<int>(std::ceil((x[0] - grid.x0) / grid.dx - 1e-9)));
  const int ix1 = std::min(grid.nx - 1, static_cast<int>(std::floor((x[1] - grid.x0) / grid.dx + 1e-9)));
  const int iz0 = std::max(0, static_cast<int>(std::ceil((z[0] - grid.z0) / grid.dz - 1e-9)));
  const int iz1 = std::min(grid.nz - 1, static_cast<int>(std::floor((z[1] - grid.z0) / grid.dz + 1e-9)));
  if (ix1 < ix0 || iz1 < iz0) throw std::invalid_argument("rectangle contains no grid nodes");
  return NodeRect{iz0, ix0, iz1 - iz0 + 1, ix1 - ix0 + 1};
}

namespace {

struct Stats {
  double mean, var;
};

Stats rect_stats(const StrainField& strain, Direction dir, const NodeRect& r) {
  if (r.nz < 1 || r.nx < 1 || r.size() < 4) throw std::invalid_argument("cnr: rectangle needs at least 4 nodes");
  if (r.iz0 < 0 || r.ix0 < 0 || r.iz0 + r.nz > strain.grid.nz || r.ix0 + r.nx > strain.grid.nx)
    throw std::invalid_argument("cnr: rectangle outside the frame");
  const Field& s = strain.component(dir);
  double sum = 0.0;
  for (int ix = r.ix0; ix < r.ix0 + r.nx; ++ix)
    for (int iz = r.iz0; iz < r.iz0 + r.nz; ++iz) {
      if (!strain.valid(iz, ix) || !std::isfinite(s(iz, ix)))
        throw std::invalid_argument("cnr: rectangle touches invalid strain");
      sum += s(iz, ix);
    }
  const double n = static_cast<double>(r.size());
  const double mean = sum / n;
  double ss = 0.0;
  for (int ix = r.ix0; ix < r.ix0 + r.nx; ++ix)
    for (int iz = r.iz0; iz < r.iz0 + r.nz; ++iz) ss += (s(iz, ix) - mean) * (s(iz, ix) - mean);
  return {mean, ss / n};
}

}  // namespace

double cnr(const StrainField& strain, Direction direction, const NodeRect& target, const NodeRect& background) {
  if (target.overlaps(background)) throw std::invalid_argument("cnr: target and background overlap");
  const Stats t = rect_stats(strain, direction, target);
  const Stats b = rect_stats(strain, direction, background);
  const double denom = t.var + b.var;
  if (!(denom > 0.0)) throw DegenerateInput("cnr: both regions have zero variance");
  const double diff = b.mean - t.mean;
  if (diff == 0.0) return -std::numeric_limits<double>::infinity();
  return 20.0 * std::log10(2.0 * diff * diff / denom);
}

double ErrorMetrics::rmse() const {
  if (!rmse_percent) throw DegenerateInput("rmse: ground truth sums to zero");
  return *rmse_percent;
}

ErrorMetrics error_metrics(const StrainField& estimate, const StrainField& truth, Direction direction) {
  if (!(estimate.grid == truth.grid)) throw std::invalid_argument("error_metrics: strain fields differ in grid");
  const Field& se = estimate.component(direction);
  const Field& sg = truth.component(direction);
  ErrorMetrics m;
  double sum_d = 0.0, sum_d2 = 0.0, sum_g = 0.0;
  for (Eigen::Index i = 0; i < se.size(); ++i) {
    if (!estimate.valid.data()[i] || !truth.valid.data()[i]) continue;
    const double e = se.data()[i], g = sg.data()[i];
    if (!std::isfinite(e) || !std::isfinite(g)) continue;
    sum_d += e - g;
    sum_d2 += (e - g) * (e - g);
    sum_g += g;
    ++m.count;
  }
  if (m.count == 0) throw std::invalid_argument("error_metrics: no jointly valid nodes");
  const double n = static_cast<double>(m.count);
  m.me = sum_d / n;
  m.ve = std::max(0.0, sum_d2 / n - m.me * m.me);
  if (sum_g != 0.0) m.rmse_percent = 100.0 * std::sqrt(n * sum_d2) / sum_g;
  return m;
}

StrainProfile edge_spread(const StrainField& strain, Direction direction, LineOrientation orientation, int index) {
  const bool horizontal = orientation == LineOrientation::horizontal;
  const int limit = horizontal ? strain.grid.nz : strain.grid.nx;
  if (index < 0 || index >= limit) throw std::invalid_argument("edge_spread: line outside the frame");
  const Field& s = strain.component(direction);
  const int n = horizontal ? strain.grid.nx : strain.grid.nz;
  StrainProfile p;
  for (int k = 0; k < n; ++k) {
    const int iz = horizontal ? index : k, ix = horizontal ? k : index;
    p.position.push_back(horizontal ? strain.grid.x(ix) : strain.grid.z(iz));
    p.value.push_back(strain.valid(iz, ix) ? s(iz, ix) : kInvalid);
  }
  return p;
}

double profile_distance(const StrainProfile& profile, const StrainProfile& reference) {
  const auto& rx = reference.position;
  if (rx.size() < 2) throw std::invalid_argument("profile_distance: reference too short");
  double sum = 0.0;
  int n = 0;
  for (std::size_t k = 0; k < profile.position.size(); ++k) {
    const double x = profile.position[k];
    if (!std::isfinite(profile.value[k]) || x < rx.front() || x > rx.back()) continue;
    auto it = std::upper_bound(rx.begin(), rx.end(), x);
    std::size_t hi = std::min<std::size_t>(static_cast<std::size_t>(it - rx.begin()), rx.size() - 1);
    const std::size_t lo = hi - 1;
    const double f = (x - rx[lo]) / (rx[hi] - rx[lo]);
    const double r = reference.value[lo] + f * (reference.value[hi] - reference.value[lo]);
    if (!std::isfinite(r)) continue;
    sum += (profile.value[k] - r) * (profile.value[k] - r);
    ++n;
  }
  if (n == 0) throw std::invalid_argument("profile_distance: profiles share no valid positions");
  return sum / n;
}

}  // namespace vssa

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

#include "vssa/dp.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>

#include "vssa/parallel.hpp"

namespace vssa {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Strict ordering (cost, |da|, |dl|, da, dl).
bool better(double cost, int label, double best_cost, int best_label, const DpConfig& cfg) {
  if (cost != best_cost) return cost < best_cost;
  if (best_label < 0) return true;
  const int a = cfg.axial_of(label), l = cfg.lateral_of(label);
  const int ba = cfg.axial_of(best_label), bl = cfg.lateral_of(best_label);
  if (std::abs(a) != std::abs(ba)) return std::abs(a) < std::abs(ba);
  if (std::abs(l) != std::abs(bl)) return std::abs(l) < std::abs(bl);
  if (a != ba) return a < ba;
  return l < bl;
}

int label_distance(int p, int q, const DpConfig& cfg) {
  return std::abs(cfg.axial_of(p) - cfg.axial_of(q)) + std::abs(cfg.lateral_of(p) - cfg.lateral_of(q));
}

// One-dimensional L1 lower envelope with source tracking:
// f[k] = min_s g[s] + w |k - s| over a strided run of n entries.
void envelope_1d(double* val, int* src, int n, int stride, double w, const DpConfig& cfg) {
  for (int k = 1; k < n; ++k) {
    const double cand = val[(k - 1) * stride] + w;
    if (better(cand, src[(k - 1) * stride], val[k * stride], src[k * stride], cfg)) {
      val[k * stride] = cand;
      src[k * stride] = src[(k - 1) * stride];
    }
  }
  for (int k = n - 2; k >= 0; --k) {
    const double cand = val[(k + 1) * stride] + w;
    if (better(cand, src[(k + 1) * stride], val[k * stride], src[k * stride], cfg)) {
      val[k * stride] = cand;
      src[k * stride] = src[(k + 1) * stride];
    }
  }
}

}  // namespace

void DpConfig::validate() const {
  if (axial_range < 0 || lateral_range < 0) throw std::invalid_argument("DpConfig: search ranges must be >= 0");
  if (!(smoothness_weight >= 0.0)) throw std::invalid_argument("DpConfig: smoothness weight must be >= 0");
  if (patch_half < 0) throw std::invalid_argument("DpConfig: patch half-size must be >= 0");
  if (column_stride < 1) throw std::invalid_argument("DpConfig: column stride must be >= 1");
}

DpConfig DpConfig::for_frame(const ImageGrid& grid, double max_strain, int column_stride) {
  if (!(max_strain > 0.0)) throw std::invalid_argument("DpConfig: max strain must be positive");
  DpConfig cfg;
  cfg.axial_range = static_cast<int>(std::ceil(2.0 * max_strain * grid.nz));
  cfg.lateral_range = static_cast<int>(std::ceil(max_strain * grid.nx));
  cfg.column_stride = column_stride;
  return cfg;
}

ColumnCost column_data_cost(const RfFrame& i1, const RfFrame& i2, int column, const DpConfig& cfg) {
  const int nz = i1.grid.nz, nx = i1.grid.nx, h = cfg.patch_half;
  ColumnCost cost{Eigen::MatrixXd::Constant(nz, cfg.label_count(), kInf), std::vector<bool>(nz, false)};
  std::vector<char> has(nz, 0);
  parallel_for(nz, [&](int i) {
    if (i - h < 0 || i + h >= nz) return;
    for (int q = i - h; q <= i + h; ++q)
      if (!i1.valid(q, column)) return;
    bool any = false;
    for (int lab = 0; lab < cfg.label_count(); ++lab) {
      const int a = cfg.axial_of(lab), l = cfg.lateral_of(lab);
      const int c2 = column + l;
      if (c2 < 0 || c2 >= nx || i - h + a < 0 || i + h + a >= nz) continue;
      double ssd = 0.0;
      bool ok = true;
      for (int q = i - h; q <= i + h && ok; ++q) {
        ok = i2.valid(q + a, c2);
        const double d = i1.values(q, column) - i2.values(q + a, c2);
        ssd += d * d;
      }
      if (!ok) continue;
      cost.unary(i, lab) = ssd;
      any = true;
    }
    has[i] = any;
  });
  for (int i = 0; i < nz; ++i) {
    cost.row_has_data[i] = has[i] != 0;
    if (!has[i]) cost.unary.row(i).setZero();
  }
  return cost;
}

double column_labeling_cost(const ColumnCost& cost, const std::vector<int>& labels, const std::vector<int>& neighbor,
                            const DpConfig& cfg) {
  const double w = cfg.smoothness_weight;
  double total = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    total += cost.unary(static_cast<Eigen::Index>(i), labels[i]);
    if (!neighbor.empty()) total += w * label_distance(labels[i], neighbor[i], cfg);
    if (i > 0) total += w * label_distance(labels[i], labels[i - 1], cfg);
  }
  return total;
}

std::vector<int> solve_column(const ColumnCost& cost, const std::vector<int>& neighbor, const DpConfig& cfg) {
  const int nz = static_cast<int>(cost.unary.rows());
  const int nl = cfg.label_count();
  const int na = cfg.axial_labels(), nlat = cfg.lateral_labels();
  const double w = cfg.smoothness_weight;

  auto unary = [&](int i, int lab) {
    double u = cost.unary(i, lab);
    if (!neighbor.empty()) u += w * label_distance(lab, neighbor[i], cfg);
    return u;
  };

  // acc(i, d): best cost of rows 0..i ending in label d; from(i, d): label at row i-1.
  Eigen::MatrixXd acc(nl, nz);
  Eigen::MatrixXi from(nl, nz);
  std::vector<double> val(nl);
  std::vector<int> src(nl);
  for (int lab = 0; lab < nl; ++lab) acc(lab, 0) = unary(0, lab);
  for (int i = 1; i < nz; ++i) {
    for (int lab = 0; lab < nl; ++lab) {
      val[lab] = acc(lab, i - 1);
      src[lab] = lab;
    }
    // Labels are laid out axial-major: lab = ia * nlat + il.
    for (int il = 0; il < nlat; ++il) envelope_1d(val.data() + il, src.data() + il, na, nlat, w, cfg);
    for (int ia = 0; ia < na; ++ia) envelope_1d(val.data() + ia * nlat, src.data() + ia * nlat, nlat, 1, w, cfg);
    for (int lab = 0; lab < nl; ++lab) {
      acc(lab, i) = unary(i, lab) + val[lab];
      from(lab, i) = src[lab];
    }
  }

  std::vector<int> labels(nz);
  int best = -1;
  double best_cost = kInf;
  for (int lab = 0; lab < nl; ++lab)
    if (better(acc(lab, nz - 1), lab, best_cost, best, cfg)) {
      best = lab;
      best_cost = acc(lab, nz - 1);
    }
  if (best < 0) best = cfg.axial_range * nlat + cfg.lateral_range;
  labels[nz - 1] = best;
  for (int i = nz - 1; i > 0; --i) labels[i - 1] = from(labels[i], i);
  return labels;
}

DisplacementField dp_integer_displacement(const RfFrame& i1, const RfFrame& i2, const DpConfig& cfg) {
  cfg.validate();
  i1.validate();
  i2.validate();
  if (!(i1.grid == i2.grid)) throw std::invalid_argument("dp_integer_displacement: frames differ in dimensions");
  const int nz = i1.grid.nz, nx = i1.grid.nx;
  if (cfg.axial_labels() > nz || cfg.lateral_labels() > nx)
    throw std::invalid_argument("dp_integer_displacement: search range exceeds frame size");
  if (2 * cfg.patch_half + 1 > nz) throw std::invalid_argument("dp_integer_displacement: patch exceeds frame depth");

  const int k = cfg.column_stride;
  const int h = cfg.patch_half;
  const int seed = cfg.seed_column < 0 ? nx / 2 : cfg.seed_column;
  if (seed >= nx) throw std::invalid_argument("dp_integer_displacement: seed column outside frame");

  // Solved columns: seed, seed +- k, ... swept outward from the seed.
  std::vector<int> solved;
  for (int j = seed; j < nx; j += k) solved.push_back(j);
  for (int j = seed - k; j >= 0; j -= k) solved.push_back(j);

  std::vector<std::vector<int>> labels(nx);
  std::vector<std::vector<bool>> has_data(nx);
  for (std::size_t n = 0; n < solved.size(); ++n) {
    const int j = solved[n];
    const ColumnCost cost = column_data_cost(i1, i2, j, cfg);
    std::vector<int> neighbor;
    if (n > 0) neighbor = labels[j > seed ? j - k : j + k];
    labels[j] = solve_column(cost, neighbor, cfg);
    has_data[j] = cost.row_has_data;
  }

  DisplacementField out(i1.grid);
  for (int j = 0; j < nx; ++j) {
    // Nearest solved column, ties toward the seed.
    int src = j;
    if (labels[j].empty()) {
      const int off = ((j - seed) % k + k) % k;
      const int lo = j - off, hi = j - off + k;
      const bool lo_ok = lo >= 0, hi_ok = hi < nx;
      if (!hi_ok || (lo_ok && (off < k - off || (off == k - off && j > seed))))
        src = lo;
      else
        src = hi;
    }
    for (int i = 0; i < nz; ++i) {
      const int lab = labels[src][i];
      const int a = cfg.axial_of(lab), l = cfg.lateral_of(lab);
      const bool inside = i + a >= 0 && i + a < nz && j + l >= 0 && j + l < nx;
      // A label next to a search-range label that would leave the frame may be
      // clipped there rather than matched.
      auto fits = [&](int da, int dl) {
        if (std::abs(da) > cfg.axial_range || std::abs(dl) > cfg.lateral_range) return true;
        return i - h + da >= 0 && i + h + da < nz && j + dl >= 0 && j + dl < nx;
      };
      const bool pinned = !fits(a - 1, l) || !fits(a + 1, l) || !fits(a, l - 1) || !fits(a, l + 1);
      if (!has_data[src][i] || !inside || pinned || !i1.valid(i, j) || !i2.valid(i + a, j + l)) {
        out.invalidate(i, j);
        continue;
      }
      out.axial_int(i, j) = a;
      out.lateral_int(i, j) = l;
    }
  }
  return out;
}

}  // namespace vssa

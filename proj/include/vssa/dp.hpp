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

#ifndef VSSA_DP_HPP
#define VSSA_DP_HPP

#include <vector>

#include "vssa/geometry.hpp"

namespace vssa {

/// Integer displacement search by dynamic programming, one A-line at a time.
struct DpConfig {
  int axial_range = 8;    ///< A: axial labels in [-A, A] samples
  int lateral_range = 2;  ///< L: lateral labels in [-L, L] samples
  double smoothness_weight = 1.0;
  int patch_half = 3;    ///< SSD patch is 2 * patch_half + 1 axial samples
  int seed_column = -1;  ///< negative selects the middle column
  int column_stride = 1; ///< solve every k-th column, replicate to the rest

  void validate() const;
  int axial_labels() const { return 2 * axial_range + 1; }
  int lateral_labels() const { return 2 * lateral_range + 1; }
  int label_count() const { return axial_labels() * lateral_labels(); }
  int axial_of(int label) const { return label / lateral_labels() - axial_range; }
  int lateral_of(int label) const { return label % lateral_labels() - lateral_range; }

  /// A = ceil(2 max_strain nz), L = ceil(max_strain nx); stride as given.
  static DpConfig for_frame(const ImageGrid& grid, double max_strain = 0.05, int column_stride = 1);
};

/// Data term of one column: unary(i, label) = SSD of the axial patch at row i
/// of column `column` against I2 shifted by the label. Infeasible labels hold
/// +inf. Rows without usable data hold 0 for every label.
struct ColumnCost {
  Eigen::MatrixXd unary;          ///< nz x label_count
  std::vector<bool> row_has_data;
};

ColumnCost column_data_cost(const RfFrame& i1, const RfFrame& i2, int column, const DpConfig& config);

/// Total cost of a labeling of one column: sum of unary terms plus
/// w * L1 label jumps between consecutive rows plus w * L1 distance to the
/// neighbor column labels (skipped when `neighbor` is empty).
double column_labeling_cost(const ColumnCost& cost, const std::vector<int>& labels,
                            const std::vector<int>& neighbor, const DpConfig& config);

/// Minimizes column_labeling_cost exactly with an L1 distance transform
/// in the forward pass. Ties go to the smaller |axial|, then |lateral|.
std::vector<int> solve_column(const ColumnCost& cost, const std::vector<int>& neighbor, const DpConfig& config);

/// Integer (axial, lateral) shifts such that I1(i, j) ~ I2(i + a, j + l).
/// Sub-sample parts of the result are zero. A node is invalid when its row has
/// no usable data, when its shifted sample leaves the frame or is masked, or
/// when an adjacent label of the search range would move its patch out of the
/// frame (the estimate may be clipped by the frame edge).
DisplacementField dp_integer_displacement(const RfFrame& i1, const RfFrame& i2, const DpConfig& config);

}  // namespace vssa

#endif  // VSSA_DP_HPP

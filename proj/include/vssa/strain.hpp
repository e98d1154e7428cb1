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

#ifndef VSSA_STRAIN_HPP
#define VSSA_STRAIN_HPP

#include <optional>
#include <string>
#include <vector>

#include "vssa/geometry.hpp"

namespace vssa {

/// LSQ window length for a fraction of `extent` nodes: rounded, forced odd, at least 3.
int lsq_window_length(double window_fraction, int extent);

/// Least-squares strain along one direction. Each node takes the OLS slope of
/// the displacement over a centered window of lsq_window_length nodes, clipped
/// at the frame edges; fits with fewer than 3 valid samples are invalid.
/// Signs are chosen so that compression gives positive axial strain and the
/// accompanying lateral expansion gives positive lateral strain.
/// Only the requested component of the result is filled.
StrainField lsq_strain(const DisplacementField& disp, Direction direction, double window_fraction);

/// Both components with the same window fraction.
StrainField lsq_strain(const DisplacementField& disp, double window_fraction);

/// Node rectangle [iz0, iz0 + nz) x [ix0, ix0 + nx).
struct NodeRect {
  int iz0 = 0;
  int ix0 = 0;
  int nz = 0;
  int nx = 0;

  Eigen::Index size() const { return static_cast<Eigen::Index>(nz) * nx; }
  bool overlaps(const NodeRect& o) const;
};

/// Rectangle of nodes whose centers lie within the physical box [x0, x1] x [z0, z1].
NodeRect rect_from_extent(const ImageGrid& grid, Extent x, Extent z);

/// Contrast-to-noise ratio in dB, 20 log10(2 (mb - mt)^2 / (vb + vt)), with
/// means and population variances over the rectangle nodes. Returns -inf when
/// the means coincide; throws DegenerateInput when both variances vanish.
double cnr(const StrainField& strain, Direction direction, const NodeRect& target, const NodeRect& background);

struct ErrorMetrics {
  /// 100 * RMS error / mean ground truth; empty when the ground truth sums to zero.
  std::optional<double> rmse_percent;
  double me = 0.0;
  double ve = 0.0;
  Eigen::Index count = 0;

  /// rmse_percent, or DegenerateInput when it is undefined.
  double rmse() const;
};

/// Error statistics of `estimate` against `truth` over nodes valid in both.
ErrorMetrics error_metrics(const StrainField& estimate, const StrainField& truth, Direction direction);

enum class LineOrientation { horizontal, vertical };

struct StrainProfile {
  std::vector<double> position;  ///< x (horizontal) or z (vertical), m
  std::vector<double> value;     ///< NaN where the strain is invalid
};

/// Strain along one grid row (horizontal, index = row) or column (vertical, index = column).
StrainProfile edge_spread(const StrainField& strain, Direction direction, LineOrientation orientation, int index);

/// Mean squared difference between two profiles over positions where both are finite.
/// `reference` is linearly interpolated onto the positions of `profile`.
double profile_distance(const StrainProfile& profile, const StrainProfile& reference);

struct MetricsReport {
  std::string label;
  Direction direction = Direction::axial;
  int window_length = 0;
  NodeRect target;
  NodeRect background;
  double cnr_db = 0.0;  ///< NaN when both rectangles have zero variance
  bool cnr_contrast_zero = false;
  ErrorMetrics errors;
};

}  // namespace vssa

#endif  // VSSA_STRAIN_HPP

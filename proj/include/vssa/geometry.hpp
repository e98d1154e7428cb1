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

#ifndef VSSA_GEOMETRY_HPP
#define VSSA_GEOMETRY_HPP

#include <array>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace vssa {

/// Dense 2-D field indexed (row = depth index iz, col = lateral index ix).
/// Column-major, so each A-line is contiguous.
using Field = Eigen::MatrixXd;
using IntField = Eigen::MatrixXi;
using Mask = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

inline constexpr double kDefaultSoundSpeed = 1540.0;
inline constexpr double kInvalid = std::numeric_limits<double>::quiet_NaN();

/// Raised when an input is well-formed but numerically degenerate
/// (singular system, zero denominator in a metric, ...).
class DegenerateInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Closed interval [first, second] in meters.
using Extent = std::array<double, 2>;

/**
 * Linear array geometry. Element positions are centered on x = 0 and the
 * probe face sits at z = 0 with depth increasing downward.
 */
class ProbeGeometry {
 public:
  ProbeGeometry(int element_count, double pitch, double center_frequency,
                double sampling_frequency, double sound_speed = kDefaultSoundSpeed);

  int element_count() const { return element_count_; }
  double pitch() const { return pitch_; }
  double center_frequency() const { return center_frequency_; }
  double sampling_frequency() const { return sampling_frequency_; }
  double sound_speed() const { return sound_speed_; }
  double wavelength() const { return sound_speed_ / center_frequency_; }

  /// Lateral position of element idx: (idx - (e-1)/2) * pitch.
  double element_x(int idx) const {
    return (static_cast<double>(idx) - 0.5 * (element_count_ - 1)) * pitch_;
  }
  Eigen::VectorXd element_x_positions() const;

  /// Node spacing of the high-density grid, c / (2 fs).
  double hf_spacing() const { return sound_speed_ / (2.0 * sampling_frequency_); }

  bool operator==(const ProbeGeometry&) const = default;

 private:
  int element_count_;
  double pitch_;
  double center_frequency_;
  double sampling_frequency_;
  double sound_speed_;
};

/// Regular beamforming grid. Node (iz, ix) sits at (x0 + ix*dx, z0 + iz*dz).
struct ImageGrid {
  double x0 = 0.0;
  double z0 = 0.0;
  double dx = 1.0;
  double dz = 1.0;
  int nx = 1;
  int nz = 1;

  ImageGrid() = default;
  ImageGrid(double x0_, double z0_, double dx_, double dz_, int nx_, int nz_);

  double x(int ix) const { return x0 + ix * dx; }
  double z(int iz) const { return z0 + iz * dz; }
  double x_end() const { return x(nx - 1); }
  double z_end() const { return z(nz - 1); }
  /// Nearest node index; may fall outside [0, n).
  int nearest_ix(double xm) const;
  int nearest_iz(double zm) const;
  bool operator==(const ImageGrid&) const = default;
};

ImageGrid make_hf_grid(const ProbeGeometry& geometry, Extent x_extent, Extent z_extent);
ImageGrid make_lf_grid(const ProbeGeometry& geometry, Extent z_extent);

/// Sub-grid of `grid` restricted to columns [ix0, ix0+nx) and rows [iz0, iz0+nz).
ImageGrid crop_grid(const ImageGrid& grid, int iz0, int ix0, int nz, int nx);

struct SingleElement {
  int element = 0;
};

struct FocusedAperture {
  std::vector<int> elements;
  double focus_x = 0.0;
  double focus_z = 0.0;
};

struct TransmitEvent {
  std::variant<SingleElement, FocusedAperture> kind;
  /// One weight per transmitting element (size 1 for SingleElement).
  std::vector<double> apodization;

  bool is_focused() const { return std::holds_alternative<FocusedAperture>(kind); }
  const FocusedAperture& focused() const { return std::get<FocusedAperture>(kind); }
  const SingleElement& single() const { return std::get<SingleElement>(kind); }
  /// Throws std::invalid_argument if indices or focal depth are illegal.
  void validate(const ProbeGeometry& geometry) const;
};

TransmitEvent make_single_element_event(int element);
/// Focused transmit centered on `focus_x` using the `aperture_elements` elements
/// closest to it (clipped at the array ends), rectangular apodization.
TransmitEvent make_focused_event(const ProbeGeometry& geometry, double focus_x, double focus_z,
                                 int aperture_elements);
/// One focused event per element, focal point on the element axis.
std::vector<TransmitEvent> make_focused_sweep(const ProbeGeometry& geometry, double focus_z,
                                              int aperture_elements);
std::vector<TransmitEvent> make_sa_sweep(const ProbeGeometry& geometry);

/// Raw per-channel RF. samples[event] is an (n_t x element_count) matrix,
/// so each receive channel is a contiguous column.
struct ChannelDataSet {
  ProbeGeometry geometry;
  std::vector<TransmitEvent> events;
  std::vector<Field> samples;
  double t0 = 0.0;

  int event_count() const { return static_cast<int>(events.size()); }
  int sample_count() const { return samples.empty() ? 0 : static_cast<int>(samples.front().rows()); }
  void validate() const;
};

struct RfFrame {
  ImageGrid grid;
  Field values;
  /// Nodes usable for displacement estimation; all true unless a beamformer
  /// region policy rejected some.
  Mask valid;

  RfFrame() = default;
  explicit RfFrame(const ImageGrid& g)
      : grid(g), values(Field::Zero(g.nz, g.nx)), valid(Mask::Constant(g.nz, g.nx, true)) {}
  RfFrame(const ImageGrid& g, Field v);
  void validate() const;
};

/// Integer + sub-sample displacement in sample units of the frame grid
/// (axial in dz, lateral in dx). Invalid nodes carry NaN in every entry.
struct DisplacementField {
  ImageGrid grid;
  Field axial_int;
  Field lateral_int;
  Field axial_sub;
  Field lateral_sub;
  Mask valid;

  DisplacementField() = default;
  explicit DisplacementField(const ImageGrid& g);

  Field axial() const { return axial_int + axial_sub; }
  Field lateral() const { return lateral_int + lateral_sub; }
  void invalidate(int iz, int ix);
  /// Re-applies the NaN sentinel everywhere the mask is false.
  void apply_mask();
  Eigen::Index valid_count() const { return valid.count(); }
};

/// Rows [iz0, iz0+nz) and columns [ix0, ix0+nx) of `disp`, on the matching sub-grid.
DisplacementField crop_displacement(const DisplacementField& disp, int iz0, int ix0, int nz, int nx);

enum class Direction { axial, lateral };

struct StrainField {
  ImageGrid grid;
  Field axial_strain;
  Field lateral_strain;
  Mask valid;
  std::string provenance;

  StrainField() = default;
  explicit StrainField(const ImageGrid& g);
  const Field& component(Direction d) const {
    return d == Direction::axial ? axial_strain : lateral_strain;
  }
  Field& component(Direction d) { return d == Direction::axial ? axial_strain : lateral_strain; }
};

}  // namespace vssa

#endif  // VSSA_GEOMETRY_HPP

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

#ifndef VSSA_SIMULATOR_HPP
#define VSSA_SIMULATOR_HPP

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "vssa/geometry.hpp"

namespace vssa {

/// Point scatterers in the imaging plane.
struct ScattererPhantom {
  Eigen::VectorXd x;
  Eigen::VectorXd z;
  Eigen::VectorXd amplitude;
  std::uint64_t rng_seed = 0;
  double density_per_cell = 0.0;

  Eigen::Index size() const { return x.size(); }
  void validate() const;
  /// Concatenation, used to check superposition.
  static ScattererPhantom merge(const ScattererPhantom& a, const ScattererPhantom& b);
};

/// Gaussian-windowed sine at the carrier, with -6 dB fractional bandwidth.
struct PulseModel {
  double center_frequency = 5e6;
  double fractional_bandwidth = 0.6;
  /// Half-length of the pulse support in seconds; 0 selects 3.5 sigma.
  double duration_cutoff = 0.0;

  /// Standard deviation of the Gaussian envelope (s).
  double sigma() const;
  double half_duration() const;
  double operator()(double t) const;
  void validate() const;
};

struct UniformCompression {
  double axial_strain = 0.01;
  double poisson = 0.5;
};

/// Strain equals background outside radius + transition, background * ratio
/// inside radius, with a cosine taper in between.
struct CircularInclusion {
  double center_x = 0.0;
  double center_z = 15e-3;
  double radius = 1.5e-3;
  double background_strain = 0.01;
  double inclusion_strain_ratio = 0.1;
  double poisson = 0.5;
  /// Negative selects radius / 4.
  double transition_width = -1.0;

  double taper() const { return transition_width < 0.0 ? radius / 4.0 : transition_width; }
};

/// Analytic deformation under compression from the plane z = 0. Axial
/// displacement is the depth integral of the axial strain; lateral
/// displacement integrates poisson * strain outward from x = 0.
struct DeformationModel {
  std::variant<UniformCompression, CircularInclusion> kind;

  void validate() const;
  double poisson() const;
  /// Axial compressive strain at (x, z), positive under compression.
  double axial_strain(double x, double z) const;
  double lateral_strain(double x, double z) const { return poisson() * axial_strain(x, z); }
  /// Displacement (meters) of the tissue point initially at (x, z).
  Eigen::Vector2d displacement(double x, double z) const;
};

struct PhantomRegion {
  Extent x;
  Extent z;
};

struct PhantomOptions {
  double fractional_bandwidth = 0.6;
  double focal_depth = 30e-3;
  /// Lateral resolution aperture in meters; 0 selects the full array width.
  double aperture = 0.0;
};

/// Resolution cell area (m^2) used for scatterer density.
double resolution_cell_area(const ProbeGeometry& geometry, const PhantomOptions& options = {});

ScattererPhantom generate_phantom(const PhantomRegion& region, const ProbeGeometry& geometry,
                                  double density_per_cell, std::uint64_t seed,
                                  const PhantomOptions& options = {});

ScattererPhantom displace(const ScattererPhantom& phantom, const DeformationModel& model);

struct GroundTruth {
  DisplacementField displacement;
  StrainField strain;
};

/// Analytic displacement in sample units of `grid` (axial / dz, lateral / dx).
GroundTruth ground_truth_displacement(const DeformationModel& model, const ImageGrid& grid);

struct SimulationOptions {
  double t0 = 0.0;
  int sample_count = 2000;
  std::optional<double> noise_snr_db;
  std::uint64_t noise_seed = 0;
};

struct SimulationStats {
  /// Scatterer/element pairs at zero distance, left out of the sum.
  long skipped_paths = 0;
};

/// Receive window [t0, t0 + n/fs) covering echoes from depths [z_min, z_max]
/// for the given transmit plan, padded by the pulse support.
SimulationOptions record_window(const ProbeGeometry& geometry, const std::vector<TransmitEvent>& events,
                                const PulseModel& pulse, double z_min, double z_max);

ChannelDataSet simulate_channel_data(const ScattererPhantom& phantom, const ProbeGeometry& geometry,
                                     const std::vector<TransmitEvent>& events, const PulseModel& pulse,
                                     const SimulationOptions& options, SimulationStats* stats = nullptr);

/// Firing time of each aperture element so all wavefronts reach the focus at
/// time focus_z / c (the virtual-source time origin).
Eigen::VectorXd focusing_delays(const ProbeGeometry& geometry, const FocusedAperture& aperture);

}  // namespace vssa

#endif  // VSSA_SIMULATOR_HPP

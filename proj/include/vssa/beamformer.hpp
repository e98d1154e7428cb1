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

#ifndef VSSA_BEAMFORMER_HPP
#define VSSA_BEAMFORMER_HPP

#include <cmath>

#include "vssa/geometry.hpp"

namespace vssa {

enum class BeamformMode { SA, LineByLine, VSSA };
enum class Apodization { rectangular, hann };
enum class SampleInterpolation { linear };
enum class RegionPolicy { above_only, below_only, both_with_crop };

struct BeamformConfig {
  BeamformMode mode = BeamformMode::VSSA;
  Apodization receive_apodization = Apodization::hann;
  double f_number = 1.5;
  SampleInterpolation interpolation = SampleInterpolation::linear;
  RegionPolicy vssa_region_policy = RegionPolicy::below_only;
  /// Half-height (m) of the band around the focal depth excluded by the policy.
  double crop_margin = 1e-3;
  /// VSSA only: an event contributes to a node only inside its virtual-source
  /// cone, |x_p - x_f| <= |z_p - z_f| * tan(theta) + s / 2, where tan(theta)
  /// is half the transmit aperture width over the focal depth and s is the
  /// smallest lateral spacing between focal points of the transmit sweep
  /// (the pitch for a single event).
  bool transmit_cone = true;

  void validate() const;
};

/// Two-way synthetic-aperture travel time: transmitter at (x_tx, 0),
/// receiver at (x_rx, 0), focusing point (x_p, z_p).
template <typename Scalar>
Scalar sa_delay(Scalar x_tx, Scalar x_rx, Scalar x_p, Scalar z_p, Scalar c) {
  using std::sqrt;
  const Scalar dt = x_p - x_tx;
  const Scalar dr = x_p - x_rx;
  return (sqrt(dt * dt + z_p * z_p) + sqrt(dr * dr + z_p * z_p)) / c;
}

/// Virtual-source travel time with the focal point (x_f, z_f) as the emitter.
/// Points shallower than the focus take the "-" branch; z_p >= z_f takes "+".
template <typename Scalar>
Scalar vssa_delay(Scalar x_f, Scalar z_f, Scalar x_rx, Scalar x_p, Scalar z_p, Scalar c) {
  using std::sqrt;
  const Scalar dfx = x_p - x_f;
  const Scalar dfz = z_f - z_p;
  const Scalar r_virtual = sqrt(dfx * dfx + dfz * dfz);
  const Scalar dr = x_rx - x_p;
  const Scalar r_receive = sqrt(dr * dr + z_p * z_p);
  const Scalar tx = z_p < z_f ? z_f - r_virtual : z_f + r_virtual;
  return (tx + r_receive) / c;
}

double sa_delay(const ProbeGeometry& geometry, int tx_element, int rx_element, const Eigen::Vector2d& p);
double vssa_delay(const ProbeGeometry& geometry, const Eigen::Vector2d& focus, int rx_element,
                  const Eigen::Vector2d& p);

/// Delay-and-sum of channel samples at the mode's geometric delays.
/// Samples are read with linear interpolation and are zero outside the record.
/// In VSSA mode the frame's valid mask excludes nodes rejected by the region
/// policy; those nodes are set to zero.
RfFrame das_beamform(const ChannelDataSet& data, const ImageGrid& grid, const BeamformConfig& config);

/// Per-column magnitude of the analytic signal (FFT Hilbert transform along depth).
RfFrame envelope(const RfFrame& frame);

/// Log-compressed envelope in dB relative to its maximum, clipped at -dynamic_range_db.
Field log_compress(const RfFrame& envelope_frame, double dynamic_range_db = 60.0);

/// Full width at half maximum of a sampled profile around its global maximum,
/// with half-maximum crossings located by linear interpolation.
double fwhm(const Eigen::VectorXd& profile, double spacing);

}  // namespace vssa

#endif  // VSSA_BEAMFORMER_HPP

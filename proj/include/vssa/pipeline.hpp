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

#ifndef VSSA_PIPELINE_HPP
#define VSSA_PIPELINE_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "vssa/beamformer.hpp"
#include "vssa/dp.hpp"
#include "vssa/overwind.hpp"
#include "vssa/simulator.hpp"
#include "vssa/strain.hpp"

namespace vssa {

/// Invalid or inconsistent configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Failure inside one pipeline stage; `stage()` names it.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& what)
      : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

struct RegionSpec {
  Extent x;
  Extent z;
};

struct PipelineConfig {
  // Probe
  int elements = 64;
  double pitch = 3.08e-4;
  double center_frequency = 5e6;
  double sampling_frequency = 40e6;
  double sound_speed = 1540.0;
  double fractional_bandwidth = 0.6;
  // Transmit plan: focused events centered on the elements
  double focal_depth = 10e-3;
  int aperture_elements = 32;
  // Region of interest (below the focal band)
  RegionSpec roi{{-3.08e-3, 3.08e-3}, {12.5e-3, 17.5e-3}};
  // Phantom and deformation
  double density_per_cell = 10.0;
  double phantom_margin = 2e-3;
  std::string deformation = "inclusion";  ///< inclusion | uniform | none
  CircularInclusion inclusion;
  double uniform_strain = 0.01;
  std::optional<double> noise_snr_db;
  // Beamforming
  double f_number = 1.5;
  double crop_margin = 1e-3;
  /// Frames extend this far above and below the ROI so that displaced
  /// patches near its edges stay inside the frame.
  double depth_padding = 0.75e-3;
  // Displacement estimation
  double dp_max_strain = 0.05;
  double dp_smoothness = 1.0;
  int dp_patch_half = 3;
  double lf_alpha1 = 5.0;
  double lf_alpha2 = 10.0;
  double hf_alpha1 = 5.0;
  double lambda = 0.01;
  int window_half_k = 5;
  int irls_iterations = 3;
  /// When positive, the lateral strain offset is tied to the axial one as
  /// epsilon_l = -ratio * epsilon_a (both per node, so grid spacing drops out);
  /// zero keeps epsilon_l at 0.
  double lateral_offset_ratio = 0.0;
  // Strain and metrics
  double lsq_window_fraction = 0.05;
  int interp_factor = 16;
  RegionSpec target{{-0.75e-3, 0.75e-3}, {14.25e-3, 15.75e-3}};
  RegionSpec background{{-0.75e-3, 0.75e-3}, {12.7e-3, 13.2e-3}};
  double esf_depth = 15e-3;
  double esf_lateral = 0.0;
  // Run
  std::uint64_t seed = 1;
  std::string output_dir = "vssa_out";

  /// Throws ConfigError when the configuration is inconsistent.
  void validate() const;

  nlohmann::json to_json() const;
  /// Keys absent from `j` keep their defaults; unknown keys are rejected.
  static PipelineConfig from_json(const nlohmann::json& j);
  static PipelineConfig load(const std::filesystem::path& path);
  /// Applies "section.key=value" overrides (value parsed as JSON, else as a string).
  static PipelineConfig with_overrides(const PipelineConfig& base, const std::vector<std::string>& assignments);
  /// Provenance notes for settings that are desk-scale choices rather than published values.
  static nlohmann::json provenance();
};

ProbeGeometry make_geometry(const PipelineConfig& cfg);
/// Focused sweep with one event per element, keeping only events whose
/// transmit cone reaches the depth-padded ROI.
std::vector<TransmitEvent> make_transmit_plan(const PipelineConfig& cfg);
DeformationModel make_deformation(const PipelineConfig& cfg);
/// LF grid: one column per element inside the ROI.
ImageGrid make_roi_lf_grid(const PipelineConfig& cfg);
/// HF grid over the same lateral span as the LF grid, starting at its first column.
ImageGrid make_roi_hf_grid(const PipelineConfig& cfg);
BeamformConfig make_beamform_config(const PipelineConfig& cfg);
/// Whole rows of depth padding on a grid with the spacing of `grid`.
int padding_rows(const ImageGrid& grid, const PipelineConfig& cfg);
/// `roi_grid` extended by padding_rows on both sides.
ImageGrid pad_depth(const ImageGrid& roi_grid, const PipelineConfig& cfg);

struct ChannelPair {
  ChannelDataSet pre;
  ChannelDataSet post;
};
/// Pre- and post-deformation acquisitions of one phantom.
ChannelPair simulate_pair(const PipelineConfig& cfg);

enum class Method { lf, inter, hf };
const char* method_name(Method m);

/// Beamformed pre/post frames for a method, scaled by the RMS of the pre frame.
struct FramePair {
  RfFrame pre;
  RfFrame post;
};
FramePair form_frames(const ChannelPair& channels, Method method, const PipelineConfig& cfg);
/// Divides both frames by the RMS of the valid part of the pre frame.
/// The regularization weights assume this scale.
void normalize_frames(FramePair& frames);

struct TdeResult {
  DisplacementField integer;
  DisplacementField displacement;
  std::vector<double> cost_history;
};
/// DP followed by OVERWIND on depth-padded frames; both fields in the result
/// are cropped to the unpadded rows.
TdeResult estimate_displacement(const FramePair& frames, Method method, const PipelineConfig& cfg);

/// Axial and lateral reports (CNR over the configured rectangles, error
/// statistics against `truth`).
std::vector<MetricsReport> measure_strain(const StrainField& strain, const StrainField& truth, const std::string& label,
                                          const PipelineConfig& cfg);

struct MethodResult {
  Method method = Method::lf;
  FramePair frames;  ///< depth-padded
  TdeResult tde;
  StrainField strain;
  StrainField truth;
  std::vector<MetricsReport> reports;  ///< axial, lateral
  StrainProfile esf_lateral;            ///< horizontal line, lateral strain
  StrainProfile esf_axial;              ///< vertical line, axial strain
  StrainProfile esf_lateral_truth;
  StrainProfile esf_axial_truth;
};

MethodResult evaluate_method(const ChannelPair& channels, Method method, const PipelineConfig& cfg);

struct PipelineReport {
  std::vector<MethodResult> methods;
  const MethodResult& get(Method m) const;
};

/// Runs LF, Inter. and HF on one simulated acquisition. When `write_outputs`
/// is set, every artifact goes under cfg.output_dir.
PipelineReport run_pipeline(const PipelineConfig& cfg, bool write_outputs = true);

/// Writes frames, fields, images, profiles and the summary tables.
void emit_outputs(const PipelineReport& report, const PipelineConfig& cfg, const ChannelPair* channels);

}  // namespace vssa

#endif  // VSSA_PIPELINE_HPP

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

#ifndef VSSA_IO_HPP
#define VSSA_IO_HPP

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "vssa/geometry.hpp"
#include "vssa/strain.hpp"

namespace vssa {

/// Malformed, truncated or version-mismatched file.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kChannelFormat = "VSSA-CD-1";
inline constexpr const char* kFrameFormat = "VSSA-RF-1";
inline constexpr const char* kDisplacementFormat = "VSSA-DISP-1";
inline constexpr const char* kStrainFormat = "VSSA-STRAIN-1";

/// Every dataset is a pair `<stem>.bin` (little-endian float32 payload,
/// masks as one byte per node) and `<stem>.json` (metadata). Paths passed
/// here are stems; a trailing .bin or .json is ignored.
/// Channel payload order is [event][receiver][time]; 2-D fields are row-major [nz][nx].
void save_channel_data(const std::filesystem::path& stem, const ChannelDataSet& data);
ChannelDataSet load_channel_data(const std::filesystem::path& stem);

void save_frame(const std::filesystem::path& stem, const RfFrame& frame);
RfFrame load_frame(const std::filesystem::path& stem);

void save_displacement(const std::filesystem::path& stem, const DisplacementField& disp);
DisplacementField load_displacement(const std::filesystem::path& stem);

void save_strain(const std::filesystem::path& stem, const StrainField& strain);
StrainField load_strain(const std::filesystem::path& stem);

/// 16-bit binary PGM of `values` scaled from [lo, hi] to [0, 65535]; masked
/// or non-finite nodes are written as 0. Range defaults to the valid min/max.
/// A `<path>.json` sidecar records the range.
void write_pgm(const std::filesystem::path& path, const Field& values, const Mask& valid);
void write_pgm(const std::filesystem::path& path, const Field& values, const Mask& valid, double lo, double hi);

/// Log-compressed envelope (60 dB) of an RF frame as a PGM image.
void write_bmode(const std::filesystem::path& path, const RfFrame& frame);

/// Two-column CSV: position in meters, strain value (empty when invalid).
void write_profile_csv(const std::filesystem::path& path, const StrainProfile& profile);

/// One row per report with label, direction, window, CNR, RMSE%, ME, VE, N.
void write_metrics_csv(const std::filesystem::path& path, const std::vector<MetricsReport>& reports);

/// One `key=value` line per field of the report.
std::string metrics_key_values(const MetricsReport& report);

}  // namespace vssa

#endif  // VSSA_IO_HPP

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

#include "vssa/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace vssa {

ProbeGeometry::ProbeGeometry(int element_count, double pitch, double center_frequency,
                             double sampling_frequency, double sound_speed)
    : element_count_(element_count),
      pitch_(pitch),
      center_frequency_(center_frequency),
      sampling_frequency_(sampling_frequency),
      sound_speed_(sound_speed) {
  if (element_count < 2) throw std::invalid_argument("ProbeGeometry: element_count must be >= 2");
  if (!(pitch > 0.0)) throw std::invalid_argument("ProbeGeometry: pitch must be positive");
  if (!(center_frequency > 0.0))
    throw std::invalid_argument("ProbeGeometry: center frequency must be positive");
  if (!(sampling_frequency > 2.0 * center_frequency))
    throw std::invalid_argument("ProbeGeometry: sampling frequency must exceed 2 * center frequency");
  if (!(sound_speed > 0.0)) throw std::invalid_argument("ProbeGeometry: sound speed must be positive");
}

Eigen::VectorXd ProbeGeometry::element_x_positions() const {
  Eigen::VectorXd x(element_count_);
  for (int i = 0; i < element_count_; ++i) x[i] = element_x(i);
  return x;
}

ImageGrid::ImageGrid(double x0_, double z0_, double dx_, double dz_, int nx_, int nz_)
    : x0(x0_), z0(z0_), dx(dx_), dz(dz_), nx(nx_), nz(nz_) {
  if (!(dx > 0.0) || !(dz > 0.0)) throw std::invalid_argument("ImageGrid: spacing must be positive");
  if (nx < 1 || nz < 1) throw std::invalid_argument("ImageGrid: node counts must be >= 1");
}

int ImageGrid::nearest_ix(double xm) const {
  return static_cast<int>(std::lround((xm - x0) / dx));
}

int ImageGrid::nearest_iz(double zm) const {
  return static_cast<int>(std::lround((zm - z0) / dz));
}

namespace {

void check_extent(Extent e, const char* what) {
  if (!std::isfinite(e[0]) || !std::isfinite(e[1]) || !(e[1] > e[0]))
    throw std::invalid_argument(std::string("empty or inverted ") + what + " extent");
}

void check_depth(Extent z) {
  check_extent(z, "depth");
  if (z[0] < 0.0) throw std::invalid_argument("depth extent must lie at z >= 0");
}

// Smallest node count whose last node reaches at least `end - spacing`.
int node_count(double begin, double end, double spacing) {
  const double span = (end - begin) / spacing;
  return static_cast<int>(std::floor(span + 1e-9)) + 1;
}

}  // namespace

ImageGrid make_hf_grid(const ProbeGeometry& geometry, Extent x_extent, Extent z_extent) {
  check_extent(x_extent, "lateral");
  check_depth(z_extent);
  const double p = geometry.hf_spacing();
  return ImageGrid(x_extent[0], z_extent[0], p, p, node_count(x_extent[0], x_extent[1], p),
                   node_count(z_extent[0], z_extent[1], p));
}

ImageGrid make_lf_grid(const ProbeGeometry& geometry, Extent z_extent) {
  check_depth(z_extent);
  const double p = geometry.hf_spacing();
  return ImageGrid(geometry.element_x(0), z_extent[0], geometry.pitch(), p, geometry.element_count(),
                   node_count(z_extent[0], z_extent[1], p));
}

ImageGrid crop_grid(const ImageGrid& grid, int iz0, int ix0, int nz, int nx) {
  if (iz0 < 0 || ix0 < 0 || nz < 1 || nx < 1 || iz0 + nz > grid.nz || ix0 + nx > grid.nx)
    throw std::invalid_argument("crop_grid: window outside grid");
  return ImageGrid(grid.x(ix0), grid.z(iz0), grid.dx, grid.dz, nx, nz);
}

void TransmitEvent::validate(const ProbeGeometry& geometry) const {
  const int e = geometry.element_count();
  if (const auto* s = std::get_if<SingleElement>(&kind)) {
    if (s->element < 0 || s->element >= e)
      throw std::invalid_argument("SingleElement index out of range");
    if (apodization.size() != 1) throw std::invalid_argument("SingleElement needs one apodization weight");
    return;
  }
  const auto& f = focused();
  if (f.elements.empty()) throw std::invalid_argument("FocusedAperture needs at least one element");
  if (!(f.focus_z > 0.0)) throw std::invalid_argument("FocusedAperture focal depth must be positive");
  for (int idx : f.elements)
    if (idx < 0 || idx >= e) throw std::invalid_argument("FocusedAperture element out of range");
  if (apodization.size() != f.elements.size())
    throw std::invalid_argument("FocusedAperture apodization size mismatch");
}

TransmitEvent make_single_element_event(int element) {
  return TransmitEvent{SingleElement{element}, {1.0}};
}

TransmitEvent make_focused_event(const ProbeGeometry& geometry, double focus_x, double focus_z,
                                 int aperture_elements) {
  const int e = geometry.element_count();
  if (aperture_elements < 1) throw std::invalid_argument("aperture must contain at least one element");
  aperture_elements = std::min(aperture_elements, e);
  // Leftmost element of a window of `aperture_elements` centered on focus_x.
  const double center = focus_x / geometry.pitch() + 0.5 * (e - 1);
  int first = static_cast<int>(std::lround(center - 0.5 * (aperture_elements - 1)));
  first = std::clamp(first, 0, e - aperture_elements);
  FocusedAperture f;
  f.focus_x = focus_x;
  f.focus_z = focus_z;
  for (int i = 0; i < aperture_elements; ++i) f.elements.push_back(first + i);
  TransmitEvent ev{f, std::vector<double>(f.elements.size(), 1.0)};
  ev.validate(geometry);
  return ev;
}

std::vector<TransmitEvent> make_focused_sweep(const ProbeGeometry& geometry, double focus_z,
                                              int aperture_elements) {
  std::vector<TransmitEvent> events;
  for (int i = 0; i < geometry.element_count(); ++i)
    events.push_back(make_focused_event(geometry, geometry.element_x(i), focus_z, aperture_elements));
  return events;
}

std::vector<TransmitEvent> make_sa_sweep(const ProbeGeometry& geometry) {
  std::vector<TransmitEvent> events;
  for (int i = 0; i < geometry.element_count(); ++i) events.push_back(make_single_element_event(i));
  return events;
}

void ChannelDataSet::validate() const {
  if (events.size() != samples.size())
    throw std::invalid_argument("ChannelDataSet: one sample block per event required");
  const Eigen::Index nt = samples.empty() ? 0 : samples.front().rows();
  for (std::size_t k = 0; k < events.size(); ++k) {
    events[k].validate(geometry);
    if (samples[k].rows() != nt || nt < 1 || samples[k].cols() != geometry.element_count())
      throw std::invalid_argument("ChannelDataSet: inconsistent sample dimensions");
    if (!samples[k].allFinite()) throw std::invalid_argument("ChannelDataSet: non-finite samples");
  }
}

RfFrame::RfFrame(const ImageGrid& g, Field v)
    : grid(g), values(std::move(v)), valid(Mask::Constant(g.nz, g.nx, true)) {
  validate();
}

void RfFrame::validate() const {
  if (values.rows() != grid.nz || values.cols() != grid.nx)
    throw std::invalid_argument("RfFrame: value dimensions do not match grid");
  if (valid.rows() != grid.nz || valid.cols() != grid.nx)
    throw std::invalid_argument("RfFrame: mask dimensions do not match grid");
  if (!values.allFinite()) throw std::invalid_argument("RfFrame: non-finite values");
}

DisplacementField::DisplacementField(const ImageGrid& g)
    : grid(g),
      axial_int(Field::Zero(g.nz, g.nx)),
      lateral_int(Field::Zero(g.nz, g.nx)),
      axial_sub(Field::Zero(g.nz, g.nx)),
      lateral_sub(Field::Zero(g.nz, g.nx)),
      valid(Mask::Constant(g.nz, g.nx, true)) {}

void DisplacementField::invalidate(int iz, int ix) {
  valid(iz, ix) = false;
  axial_int(iz, ix) = lateral_int(iz, ix) = kInvalid;
  axial_sub(iz, ix) = lateral_sub(iz, ix) = kInvalid;
}

void DisplacementField::apply_mask() {
  for (int ix = 0; ix < grid.nx; ++ix)
    for (int iz = 0; iz < grid.nz; ++iz)
      if (!valid(iz, ix)) invalidate(iz, ix);
}

DisplacementField crop_displacement(const DisplacementField& d, int iz0, int ix0, int nz, int nx) {
  DisplacementField out(crop_grid(d.grid, iz0, ix0, nz, nx));
  out.axial_int = d.axial_int.block(iz0, ix0, nz, nx);
  out.lateral_int = d.lateral_int.block(iz0, ix0, nz, nx);
  out.axial_sub = d.axial_sub.block(iz0, ix0, nz, nx);
  out.lateral_sub = d.lateral_sub.block(iz0, ix0, nz, nx);
  out.valid = d.valid.block(iz0, ix0, nz, nx);
  return out;
}

StrainField::StrainField(const ImageGrid& g)
    : grid(g),
      axial_strain(Field::Constant(g.nz, g.nx, kInvalid)),
      lateral_strain(Field::Constant(g.nz, g.nx, kInvalid)),
      valid(Mask::Constant(g.nz, g.nx, false)) {}

}  // namespace vssa

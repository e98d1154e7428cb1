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

#include "vssa/beamformer.hpp"

#include <algorithm>
#include <complex>
#include <numbers>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "vssa/parallel.hpp"

namespace vssa {

void BeamformConfig::validate() const {
  if (!(f_number > 0.0)) throw std::invalid_argument("BeamformConfig: f_number must be positive");
  if (!(crop_margin >= 0.0)) throw std::invalid_argument("BeamformConfig: crop margin must be >= 0");
}

double sa_delay(const ProbeGeometry& geometry, int tx_element, int rx_element, const Eigen::Vector2d& p) {
  return sa_delay(geometry.element_x(tx_element), geometry.element_x(rx_element), p.x(), p.y(),
                  geometry.sound_speed());
}

double vssa_delay(const ProbeGeometry& geometry, const Eigen::Vector2d& focus, int rx_element,
                  const Eigen::Vector2d& p) {
  return vssa_delay(focus.x(), focus.y(), geometry.element_x(rx_element), p.x(), p.y(), geometry.sound_speed());
}

namespace {

bool policy_accepts(RegionPolicy policy, double margin, double z_p, double z_f) {
  switch (policy) {
    case RegionPolicy::above_only:
      return z_p <= z_f - margin;
    case RegionPolicy::below_only:
      return z_p >= z_f + margin;
    case RegionPolicy::both_with_crop:
      return std::abs(z_p - z_f) >= margin;
  }
  return true;
}

void check_mode(const ChannelDataSet& data, BeamformMode mode) {
  for (const auto& ev : data.events) {
    const bool focused = ev.is_focused();
    if (mode == BeamformMode::SA && focused)
      throw std::invalid_argument("das_beamform: SA mode requires single-element transmits");
    if (mode != BeamformMode::SA && !focused)
      throw std::invalid_argument("das_beamform: VSSA and line-by-line modes require focused transmits");
  }
}

// Receive weights for a node at (x_p, z_p); zero outside the f-number aperture.
void receive_weights(const Eigen::VectorXd& rx_x, double x_p, double z_p, const BeamformConfig& cfg,
                     std::vector<double>& w) {
  const double half = 0.5 * z_p / cfg.f_number;
  for (Eigen::Index j = 0; j < rx_x.size(); ++j) {
    const double d = rx_x[j] - x_p;
    if (std::abs(d) > half || half <= 0.0) {
      w[j] = 0.0;
      continue;
    }
    w[j] = cfg.receive_apodization == Apodization::hann
               ? 0.5 * (1.0 + std::cos(std::numbers::pi * d / half))
               : 1.0;
  }
}

class ChannelReader {
 public:
  ChannelReader(const ChannelDataSet& data)
      : data_(data), fs_(data.geometry.sampling_frequency()), last_(data.sample_count() - 1) {}

  double operator()(int event, int rx, double t) const {
    const double u = (t - data_.t0) * fs_;
    if (!(u >= 0.0) || u > last_) return 0.0;
    const auto i = static_cast<Eigen::Index>(u);
    const double f = u - static_cast<double>(i);
    const double* col = data_.samples[event].col(rx).data();
    if (i >= last_) return col[i];
    return col[i] + f * (col[i + 1] - col[i]);
  }

 private:
  const ChannelDataSet& data_;
  double fs_;
  Eigen::Index last_;
};

// Smallest nonzero lateral distance between focal points; the pitch when
// there is only one distinct focal point.
double focal_spacing(const ChannelDataSet& data) {
  std::vector<double> xs;
  for (const auto& ev : data.events)
    if (ev.is_focused()) xs.push_back(ev.focused().focus_x);
  std::sort(xs.begin(), xs.end());
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (xs[i] > xs[i - 1]) best = std::min(best, xs[i] - xs[i - 1]);
  return std::isfinite(best) ? best : data.geometry.pitch();
}

}  // namespace

RfFrame das_beamform(const ChannelDataSet& data, const ImageGrid& grid, const BeamformConfig& config) {
  config.validate();
  data.validate();
  check_mode(data, config.mode);

  const ProbeGeometry& g = data.geometry;
  const double c = g.sound_speed();
  const Eigen::VectorXd rx_x = g.element_x_positions();
  const int ne = g.element_count();
  const ChannelReader read(data);
  RfFrame frame(grid);

  if (config.mode == BeamformMode::LineByLine) {
    // Each focused transmit reconstructs only the column nearest its axis.
    std::vector<std::vector<int>> column_events(grid.nx);
    for (int e = 0; e < data.event_count(); ++e) {
      const int ix = grid.nearest_ix(data.events[e].focused().focus_x);
      if (ix >= 0 && ix < grid.nx) column_events[ix].push_back(e);
    }
    parallel_for(grid.nx, [&](int ix) {
      std::vector<double> w(ne), rx_t(ne);
      const double x_p = grid.x(ix);
      for (int iz = 0; iz < grid.nz; ++iz) {
        const double z_p = grid.z(iz);
        receive_weights(rx_x, x_p, z_p, config, w);
        for (int j = 0; j < ne; ++j) rx_t[j] = std::hypot(rx_x[j] - x_p, z_p) / c;
        double acc = 0.0;
        for (int e : column_events[ix]) {
          const auto& f = data.events[e].focused();
          const double r = std::hypot(x_p - f.focus_x, f.focus_z - z_p);
          const double tx = (z_p < f.focus_z ? f.focus_z - r : f.focus_z + r) / c;
          for (int j = 0; j < ne; ++j)
            if (w[j] != 0.0) acc += w[j] * read(e, j, tx + rx_t[j]);
        }
        frame.values(iz, ix) = acc;
      }
    });
    return frame;
  }

  const double cone_margin = config.mode == BeamformMode::VSSA ? 0.5 * focal_spacing(data) : 0.0;
  parallel_for(grid.nx, [&](int ix) {
    std::vector<double> w(ne), rx_t(ne);
    const double x_p = grid.x(ix);
    for (int iz = 0; iz < grid.nz; ++iz) {
      const double z_p = grid.z(iz);
      receive_weights(rx_x, x_p, z_p, config, w);
      for (int j = 0; j < ne; ++j) rx_t[j] = std::hypot(rx_x[j] - x_p, z_p) / c;
      bool accepted = true;
      double acc = 0.0;
      for (int e = 0; e < data.event_count(); ++e) {
        const auto& ev = data.events[e];
        double tx;
        if (config.mode == BeamformMode::SA) {
          tx = std::hypot(x_p - g.element_x(ev.single().element), z_p) / c;
        } else {
          const auto& f = ev.focused();
          if (!policy_accepts(config.vssa_region_policy, config.crop_margin, z_p, f.focus_z)) {
            accepted = false;
            break;
          }
          if (config.transmit_cone) {
            const double tan_half = 0.5 * static_cast<double>(f.elements.size()) * g.pitch() / f.focus_z;
            if (std::abs(x_p - f.focus_x) > std::abs(z_p - f.focus_z) * tan_half + cone_margin) continue;
          }
          const double r = std::hypot(x_p - f.focus_x, f.focus_z - z_p);
          tx = (z_p < f.focus_z ? f.focus_z - r : f.focus_z + r) / c;
        }
        for (int j = 0; j < ne; ++j)
          if (w[j] != 0.0) acc += w[j] * read(e, j, tx + rx_t[j]);
      }
      if (accepted) {
        frame.values(iz, ix) = acc;
      } else {
        frame.values(iz, ix) = 0.0;
        frame.valid(iz, ix) = false;
      }
    }
  });
  return frame;
}

RfFrame envelope(const RfFrame& frame) {
  frame.validate();
  const int n = frame.grid.nz;
  if (n < 4) throw std::invalid_argument("envelope: need at least 4 axial samples");
  RfFrame out(frame.grid);
  out.valid = frame.valid;
  parallel_for(frame.grid.nx, [&](int ix) {
    Eigen::FFT<double> fft;
    std::vector<double> column(frame.values.col(ix).data(), frame.values.col(ix).data() + n);
    std::vector<std::complex<double>> spectrum;
    fft.fwd(spectrum, column);
    // Analytic signal: keep DC (and Nyquist), double positive frequencies.
    for (int k = 1; k < n; ++k) {
      if (2 * k < n)
        spectrum[k] *= 2.0;
      else if (2 * k > n)
        spectrum[k] = 0.0;
    }
    std::vector<std::complex<double>> analytic;
    fft.inv(analytic, spectrum);
    for (int iz = 0; iz < n; ++iz) out.values(iz, ix) = std::abs(analytic[iz]);
  });
  return out;
}

Field log_compress(const RfFrame& envelope_frame, double dynamic_range_db) {
  const double peak = envelope_frame.values.maxCoeff();
  Field db = Field::Constant(envelope_frame.grid.nz, envelope_frame.grid.nx, -dynamic_range_db);
  if (!(peak > 0.0)) return db;
  for (Eigen::Index i = 0; i < db.size(); ++i) {
    const double v = envelope_frame.values.data()[i];
    if (v > 0.0) db.data()[i] = std::max(-dynamic_range_db, 20.0 * std::log10(v / peak));
  }
  return db;
}

double fwhm(const Eigen::VectorXd& profile, double spacing) {
  if (profile.size() < 3) throw std::invalid_argument("fwhm: profile too short");
  Eigen::Index peak;
  const double top = profile.maxCoeff(&peak);
  if (!(top > 0.0)) throw DegenerateInput("fwhm: profile has no positive peak");
  const double half = 0.5 * top;
  double left = 0.0;
  double right = static_cast<double>(profile.size() - 1);
  for (Eigen::Index i = peak; i > 0; --i) {
    if (profile[i - 1] < half) {
      left = static_cast<double>(i - 1) + (half - profile[i - 1]) / (profile[i] - profile[i - 1]);
      break;
    }
  }
  for (Eigen::Index i = peak; i + 1 < profile.size(); ++i) {
    if (profile[i + 1] < half) {
      right = static_cast<double>(i) + (profile[i] - half) / (profile[i] - profile[i + 1]);
      break;
    }
  }
  return (right - left) * spacing;
}

}  // namespace vssa

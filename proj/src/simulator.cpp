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

#include "vssa/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <random>

#include "vssa/parallel.hpp"

namespace vssa {

void ScattererPhantom::validate() const {
  if (x.size() != z.size() || x.size() != amplitude.size())
    throw std::invalid_argument("ScattererPhantom: array lengths differ");
  for (Eigen::Index i = 0; i < z.size(); ++i)
    if (!(z[i] > 0.0)) throw std::invalid_argument("ScattererPhantom: scatterers must lie at z > 0");
}

ScattererPhantom ScattererPhantom::merge(const ScattererPhantom& a, const ScattererPhantom& b) {
  ScattererPhantom out;
  out.x.resize(a.size() + b.size());
  out.z.resize(out.x.size());
  out.amplitude.resize(out.x.size());
  out.x << a.x, b.x;
  out.z << a.z, b.z;
  out.amplitude << a.amplitude, b.amplitude;
  out.rng_seed = a.rng_seed;
  out.density_per_cell = a.density_per_cell;
  return out;
}

double PulseModel::sigma() const {
  return std::sqrt(2.0 * std::numbers::ln2) / (std::numbers::pi * fractional_bandwidth * center_frequency);
}

double PulseModel::half_duration() const {
  return duration_cutoff > 0.0 ? duration_cutoff : 3.5 * sigma();
}

double PulseModel::operator()(double t) const {
  if (std::abs(t) > half_duration()) return 0.0;
  const double s = sigma();
  return std::exp(-0.5 * t * t / (s * s)) * std::sin(2.0 * std::numbers::pi * center_frequency * t);
}

void PulseModel::validate() const {
  if (!(center_frequency > 0.0)) throw std::invalid_argument("PulseModel: center frequency must be positive");
  if (!(fractional_bandwidth > 0.0 && fractional_bandwidth < 2.0))
    throw std::invalid_argument("PulseModel: fractional bandwidth must be in (0, 2)");
  if (duration_cutoff < 0.0) throw std::invalid_argument("PulseModel: negative duration cutoff");
}

// ---------------------------------------------------------------------------
// Deformation

namespace {

// Gauss-Legendre 8-point nodes/weights on [-1, 1].
constexpr std::array<double, 8> kGlNodes = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
    0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kGlWeights = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
    0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};

double inclusion_strain(const CircularInclusion& inc, double x, double z) {
  const double r = std::hypot(x - inc.center_x, z - inc.center_z);
  const double inner = inc.background_strain * inc.inclusion_strain_ratio;
  const double t = inc.taper();
  if (r <= inc.radius) return inner;
  if (r >= inc.radius + t) return inc.background_strain;
  // Raised-cosine blend from inner (at radius) to background (at radius + t).
  const double w = 0.5 * (1.0 - std::cos(std::numbers::pi * (r - inc.radius) / t));
  return inner + w * (inc.background_strain - inc.inclusion_strain_ratio * inc.background_strain);
}

// Integral of f over [a, b] split at the given breakpoints, each piece
// integrated with composite Gauss-Legendre.
template <typename F>
double integrate(F&& f, double a, double b, std::vector<double> breaks) {
  if (a == b) return 0.0;
  const double sign = b > a ? 1.0 : -1.0;
  if (b < a) std::swap(a, b);
  breaks.push_back(a);
  breaks.push_back(b);
  std::sort(breaks.begin(), breaks.end());
  double total = 0.0;
  constexpr int kPanels = 6;
  for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
    const double lo = std::max(a, breaks[p]);
    const double hi = std::min(b, breaks[p + 1]);
    if (!(hi > lo)) continue;
    const double h = (hi - lo) / kPanels;
    for (int q = 0; q < kPanels; ++q) {
      const double mid = lo + (q + 0.5) * h;
      for (std::size_t g = 0; g < kGlNodes.size(); ++g) total += kGlWeights[g] * 0.5 * h * f(mid + 0.5 * h * kGlNodes[g]);
    }
  }
  return sign * total;
}

// Parameters along a line where the distance to the inclusion center equals
// one of the shell radii; these are the non-smooth points of the integrand.
std::vector<double> shell_crossings(double offset, double center, const CircularInclusion& inc) {
  std::vector<double> out;
  for (double rad : {inc.radius, inc.radius + inc.taper()}) {
    const double d2 = rad * rad - offset * offset;
    if (d2 > 0.0) {
      out.push_back(center - std::sqrt(d2));
      out.push_back(center + std::sqrt(d2));
    }
  }
  return out;
}

}  // namespace

void DeformationModel::validate() const {
  auto check_common = [](double strain, double nu) {
    if (!(strain >= 0.0 && strain < 0.1)) throw std::invalid_argument("DeformationModel: strain outside [0, 0.1)");
    if (!(nu >= 0.0 && nu <= 0.5)) throw std::invalid_argument("DeformationModel: poisson ratio outside [0, 0.5]");
  };
  if (const auto* u = std::get_if<UniformCompression>(&kind)) {
    check_common(u->axial_strain, u->poisson);
    return;
  }
  const auto& c = std::get<CircularInclusion>(kind);
  check_common(c.background_strain, c.poisson);
  if (!(c.radius > 0.0)) throw std::invalid_argument("CircularInclusion: radius must be positive");
  if (!(c.inclusion_strain_ratio >= 0.0)) throw std::invalid_argument("CircularInclusion: negative strain ratio");
}

double DeformationModel::poisson() const {
  return std::visit([](const auto& k) { return k.poisson; }, kind);
}

double DeformationModel::axial_strain(double x, double z) const {
  if (const auto* u = std::get_if<UniformCompression>(&kind)) return u->axial_strain;
  return inclusion_strain(std::get<CircularInclusion>(kind), x, z);
}

Eigen::Vector2d DeformationModel::displacement(double x, double z) const {
  if (const auto* u = std::get_if<UniformCompression>(&kind))
    return {u->poisson * u->axial_strain * x, -u->axial_strain * z};
  const auto& inc = std::get<CircularInclusion>(kind);
  const double uz = -integrate([&](double zz) { return inclusion_strain(inc, x, zz); }, 0.0, z,
                               shell_crossings(x - inc.center_x, inc.center_z, inc));
  const double ux = inc.poisson * integrate([&](double xx) { return inclusion_strain(inc, xx, z); }, 0.0, x,
                                            shell_crossings(z - inc.center_z, inc.center_x, inc));
  return {ux, uz};
}

// ---------------------------------------------------------------------------
// Phantom

double resolution_cell_area(const ProbeGeometry& geometry, const PhantomOptions& options) {
  const double axial = geometry.sound_speed() / (2.0 * geometry.center_frequency() * options.fractional_bandwidth);
  const double aperture = options.aperture > 0.0 ? options.aperture : geometry.element_count() * geometry.pitch();
  const double lateral = geometry.wavelength() * options.focal_depth / aperture;
  return axial * lateral;
}

ScattererPhantom generate_phantom(const PhantomRegion& region, const ProbeGeometry& geometry,
                                  double density_per_cell, std::uint64_t seed, const PhantomOptions& options) {
  if (!(density_per_cell > 0.0)) throw std::invalid_argument("generate_phantom: density must be positive");
  if (!(region.x[1] > region.x[0]) || !(region.z[1] > region.z[0]))
    throw std::invalid_argument("generate_phantom: empty region");
  if (!(region.z[0] > 0.0)) throw std::invalid_argument("generate_phantom: region must lie at z > 0");
  const double area = (region.x[1] - region.x[0]) * (region.z[1] - region.z[0]);
  const double expected = density_per_cell * area / resolution_cell_area(geometry, options);

  std::mt19937_64 rng(seed);
  std::poisson_distribution<long> count_dist(expected);
  const long n = count_dist(rng);
  std::uniform_real_distribution<double> ux(region.x[0], region.x[1]);
  std::uniform_real_distribution<double> uz(region.z[0], region.z[1]);
  std::normal_distribution<double> amp;

  ScattererPhantom p;
  p.x.resize(n);
  p.z.resize(n);
  p.amplitude.resize(n);
  for (long i = 0; i < n; ++i) {
    p.x[i] = ux(rng);
    p.z[i] = uz(rng);
    p.amplitude[i] = amp(rng);
  }
  p.rng_seed = seed;
  p.density_per_cell = density_per_cell;
  return p;
}

ScattererPhantom displace(const ScattererPhantom& phantom, const DeformationModel& model) {
  model.validate();
  ScattererPhantom out = phantom;
  for (Eigen::Index i = 0; i < phantom.size(); ++i) {
    const Eigen::Vector2d u = model.displacement(phantom.x[i], phantom.z[i]);
    out.x[i] += u[0];
    out.z[i] += u[1];
  }
  return out;
}

GroundTruth ground_truth_displacement(const DeformationModel& model, const ImageGrid& grid) {
  model.validate();
  GroundTruth gt{DisplacementField(grid), StrainField(grid)};
  parallel_for(grid.nx, [&](int ix) {
    for (int iz = 0; iz < grid.nz; ++iz) {
      const double x = grid.x(ix);
      const double z = grid.z(iz);
      const Eigen::Vector2d u = model.displacement(x, z);
      const double a = u[1] / grid.dz;
      const double l = u[0] / grid.dx;
      gt.displacement.axial_int(iz, ix) = std::round(a);
      gt.displacement.axial_sub(iz, ix) = a - std::round(a);
      gt.displacement.lateral_int(iz, ix) = std::round(l);
      gt.displacement.lateral_sub(iz, ix) = l - std::round(l);
      gt.strain.axial_strain(iz, ix) = model.axial_strain(x, z);
      gt.strain.lateral_strain(iz, ix) = model.lateral_strain(x, z);
    }
  });
  gt.strain.valid.setConstant(true);
  gt.strain.provenance = "ground-truth";
  return gt;
}

// ---------------------------------------------------------------------------
// Channel data

Eigen::VectorXd focusing_delays(const ProbeGeometry& geometry, const FocusedAperture& aperture) {
  Eigen::VectorXd tau(static_cast<Eigen::Index>(aperture.elements.size()));
  for (std::size_t k = 0; k < aperture.elements.size(); ++k) {
    const double dist = std::hypot(geometry.element_x(aperture.elements[k]) - aperture.focus_x, aperture.focus_z);
    tau[static_cast<Eigen::Index>(k)] = (aperture.focus_z - dist) / geometry.sound_speed();
  }
  return tau;
}

namespace {

struct TxPath {
  double x;
  double delay;
  double weight;
};

std::vector<TxPath> transmit_paths(const ProbeGeometry& g, const TransmitEvent& ev) {
  std::vector<TxPath> out;
  if (!ev.is_focused()) {
    out.push_back({g.element_x(ev.single().element), 0.0, ev.apodization[0]});
    return out;
  }
  const auto& f = ev.focused();
  const Eigen::VectorXd tau = focusing_delays(g, f);
  for (std::size_t k = 0; k < f.elements.size(); ++k)
    out.push_back({g.element_x(f.elements[k]), tau[static_cast<Eigen::Index>(k)], ev.apodization[k]});
  return out;
}

// Pulse tabulated finely; linear lookup between table nodes.
class PulseTable {
 public:
  PulseTable(const PulseModel& pulse, double step) : step_(step), half_(pulse.half_duration()) {
    const int n = static_cast<int>(std::ceil(2.0 * half_ / step_)) + 2;
    table_.resize(n);
    for (int i = 0; i < n; ++i) table_[i] = pulse(-half_ + i * step_);
  }
  double half() const { return half_; }
  double operator()(double t) const {
    const double u = (t + half_) / step_;
    if (u < 0.0) return 0.0;
    const auto i = static_cast<std::size_t>(u);
    if (i + 1 >= table_.size()) return 0.0;
    const double f = u - static_cast<double>(i);
    return table_[i] + f * (table_[i + 1] - table_[i]);
  }

 private:
  double step_;
  double half_;
  std::vector<double> table_;
};

constexpr int kTableOversample = 256;
constexpr int kWaveOversample = 4;

// Cubic Lagrange read of a uniformly sampled waveform at fractional index u.
double lagrange4(const std::vector<double>& w, double u) {
  const auto i = static_cast<long>(std::floor(u));
  if (i < 1 || i + 2 >= static_cast<long>(w.size())) {
    if (i < 0 || i + 1 >= static_cast<long>(w.size())) return 0.0;
    const double f = u - static_cast<double>(i);
    return w[i] + f * (w[i + 1] - w[i]);
  }
  const double f = u - static_cast<double>(i);
  const double wm = -f * (f - 1.0) * (f - 2.0) / 6.0;
  const double w0 = (f + 1.0) * (f - 1.0) * (f - 2.0) / 2.0;
  const double w1 = -(f + 1.0) * f * (f - 2.0) / 2.0;
  const double w2 = (f + 1.0) * f * (f - 1.0) / 6.0;
  return wm * w[i - 1] + w0 * w[i] + w1 * w[i + 1] + w2 * w[i + 2];
}

}  // namespace

SimulationOptions record_window(const ProbeGeometry& geometry, const std::vector<TransmitEvent>& events,
                                const PulseModel& pulse, double z_min, double z_max) {
  if (!(z_max > z_min) || !(z_min >= 0.0)) throw std::invalid_argument("record_window: invalid depth range");
  const double c = geometry.sound_speed();
  const double half_width = 0.5 * geometry.element_count() * geometry.pitch();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  constexpr int kProbe = 9;
  for (const auto& ev : events) {
    const auto paths = transmit_paths(geometry, ev);
    for (int a = 0; a < kProbe; ++a) {
      for (int b = 0; b < kProbe; ++b) {
        const double px = -half_width + 2.0 * half_width * a / (kProbe - 1);
        const double pz = z_min + (z_max - z_min) * b / (kProbe - 1);
        double tx_lo = std::numeric_limits<double>::infinity();
        double tx_hi = -tx_lo;
        for (const auto& p : paths) {
          const double t = p.delay + std::hypot(pz, px - p.x) / c;
          tx_lo = std::min(tx_lo, t);
          tx_hi = std::max(tx_hi, t);
        }
        for (int j = 0; j < geometry.element_count(); ++j) {
          const double rx = std::hypot(pz, px - geometry.element_x(j)) / c;
          lo = std::min(lo, tx_lo + rx);
          hi = std::max(hi, tx_hi + rx);
        }
      }
    }
  }
  const double fs = geometry.sampling_frequency();
  SimulationOptions opt;
  opt.t0 = std::floor((lo - pulse.half_duration()) * fs) / fs;
  opt.sample_count = static_cast<int>(std::ceil((hi + pulse.half_duration() - opt.t0) * fs)) + 1;
  return opt;
}

ChannelDataSet simulate_channel_data(const ScattererPhantom& phantom, const ProbeGeometry& geometry,
                                     const std::vector<TransmitEvent>& events, const PulseModel& pulse,
                                     const SimulationOptions& options, SimulationStats* stats) {
  if (events.empty()) throw std::invalid_argument("simulate_channel_data: no transmit events");
  if (options.sample_count < 1) throw std::invalid_argument("simulate_channel_data: sample_count must be >= 1");
  phantom.validate();
  pulse.validate();
  for (const auto& ev : events) ev.validate(geometry);

  const int ne = geometry.element_count();
  const int nt = options.sample_count;
  const double fs = geometry.sampling_frequency();
  const double c = geometry.sound_speed();
  const PulseTable table(pulse, 1.0 / (fs * kTableOversample));
  const double half = table.half();
  const double wave_step = 1.0 / (fs * kWaveOversample);
  const Eigen::VectorXd rx_x = geometry.element_x_positions();

  ChannelDataSet data{geometry, events, std::vector<Field>(events.size(), Field::Zero(nt, ne)), options.t0};
  std::atomic<long> skipped{0};

  parallel_for(static_cast<int>(events.size()), [&](int e) {
    Field& out = data.samples[e];
    const auto paths = transmit_paths(geometry, events[e]);
    std::vector<double> rx_dist(ne);
    std::vector<double> tx_time(paths.size());
    std::vector<double> tx_amp(paths.size());
    std::vector<double> wave;
    long local_skipped = 0;

    for (Eigen::Index s = 0; s < phantom.size(); ++s) {
      const double sx = phantom.x[s];
      const double sz = phantom.z[s];
      double t_first = std::numeric_limits<double>::infinity();
      double t_last = -t_first;
      bool any_tx = false;
      for (std::size_t k = 0; k < paths.size(); ++k) {
        const double r = std::hypot(sx - paths[k].x, sz);
        if (r == 0.0) {
          ++local_skipped;
          tx_amp[k] = 0.0;
          tx_time[k] = 0.0;
          continue;
        }
        tx_time[k] = paths[k].delay + r / c;
        tx_amp[k] = paths[k].weight / r;
        t_first = std::min(t_first, tx_time[k]);
        t_last = std::max(t_last, tx_time[k]);
        any_tx = true;
      }
      if (!any_tx) continue;
      double rx_min = std::numeric_limits<double>::infinity();
      double rx_max = 0.0;
      for (int j = 0; j < ne; ++j) {
        rx_dist[j] = std::hypot(sx - rx_x[j], sz);
        rx_min = std::min(rx_min, rx_dist[j]);
        rx_max = std::max(rx_max, rx_dist[j]);
      }
      // Whole echo falls outside the record.
      const double t_end = options.t0 + (nt - 1) / fs;
      if (t_first + rx_min / c - half > t_end || t_last + rx_max / c + half < options.t0) continue;

      const double amp = phantom.amplitude[s];
      if (paths.size() == 1) {
        // Single transmitter: evaluate the pulse directly per receiver.
        for (int j = 0; j < ne; ++j) {
          if (rx_dist[j] == 0.0) {
            ++local_skipped;
            continue;
          }
          const double arrival = tx_time[0] + rx_dist[j] / c;
          const double a = amp * tx_amp[0] / rx_dist[j];
          const int n0 = std::max(0, static_cast<int>(std::ceil((arrival - half - options.t0) * fs)));
          const int n1 = std::min(nt - 1, static_cast<int>(std::floor((arrival + half - options.t0) * fs)));
          for (int n = n0; n <= n1; ++n) out(n, j) += a * table(options.t0 + n / fs - arrival);
        }
        continue;
      }

      // Transmit waveform at the scatterer, sampled finely, then read back
      // once per receiver at its own propagation delay.
      const double w0 = t_first - half;
      const int nw = static_cast<int>(std::ceil((t_last - t_first + 2.0 * half) / wave_step)) + 4;
      wave.assign(nw, 0.0);
      for (std::size_t k = 0; k < paths.size(); ++k) {
        if (tx_amp[k] == 0.0) continue;
        const int m0 = std::max(0, static_cast<int>(std::ceil((tx_time[k] - half - w0) / wave_step)));
        const int m1 = std::min(nw - 1, static_cast<int>(std::floor((tx_time[k] + half - w0) / wave_step)));
        for (int m = m0; m <= m1; ++m) wave[m] += tx_amp[k] * table(w0 + m * wave_step - tx_time[k]);
      }
      for (int j = 0; j < ne; ++j) {
        if (rx_dist[j] == 0.0) {
          ++local_skipped;
          continue;
        }
        const double shift = rx_dist[j] / c;
        const double a = amp / rx_dist[j];
        const int n0 = std::max(0, static_cast<int>(std::ceil((w0 + shift - options.t0) * fs)));
        const int n1 = std::min(nt - 1, static_cast<int>(std::floor((w0 + shift + (nw - 1) * wave_step - options.t0) * fs)));
        if (n0 > n1) continue;
        // u advances by exactly kWaveOversample per output sample, so the
        // interpolation phase (and hence the weights) is fixed per receiver.
        const double u0 = (options.t0 + n0 / fs - shift - w0) / wave_step;
        const auto i0 = static_cast<long>(std::floor(u0));
        const double f = u0 - static_cast<double>(i0);
        const double cm = -f * (f - 1.0) * (f - 2.0) / 6.0;
        const double c0 = (f + 1.0) * (f - 1.0) * (f - 2.0) / 2.0;
        const double c1 = -(f + 1.0) * f * (f - 2.0) / 2.0;
        const double c2 = (f + 1.0) * f * (f - 1.0) / 6.0;
        const long nwl = static_cast<long>(wave.size());
        for (int n = n0; n <= n1; ++n) {
          const long i = i0 + static_cast<long>(n - n0) * kWaveOversample;
          if (i >= 1 && i + 2 < nwl)
            out(n, j) += a * (cm * wave[i - 1] + c0 * wave[i] + c1 * wave[i + 1] + c2 * wave[i + 2]);
          else
            out(n, j) += a * lagrange4(wave, static_cast<double>(i) + f);
        }
      }
    }
    skipped += local_skipped;
  });

  if (options.noise_snr_db) {
    double energy = 0.0;
    long count = 0;
    for (const auto& block : data.samples) {
      energy += block.squaredNorm();
      count += block.size();
    }
    const double rms = std::sqrt(energy / static_cast<double>(std::max(1L, count)));
    const double sigma = rms * std::pow(10.0, -*options.noise_snr_db / 20.0);
    std::mt19937_64 rng(options.noise_seed);
    std::normal_distribution<double> noise(0.0, sigma);
    for (auto& block : data.samples)
      for (Eigen::Index i = 0; i < block.size(); ++i) block.data()[i] += noise(rng);
  }
  if (stats) stats->skipped_paths = skipped.load();
  return data;
}

}  // namespace vssa

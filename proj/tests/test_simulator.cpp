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

#include <doctest.h>

#include <cmath>

#include "vssa/simulator.hpp"

using namespace vssa;

namespace {

const ProbeGeometry kProbe(64, 3.08e-4, 5e6, 40e6);

ScattererPhantom points(std::initializer_list<std::array<double, 3>> xs) {
  ScattererPhantom p;
  p.x.resize(static_cast<Eigen::Index>(xs.size()));
  p.z.resize(p.x.size());
  p.amplitude.resize(p.x.size());
  Eigen::Index k = 0;
  for (const auto& s : xs) {
    p.x[k] = s[0];
    p.z[k] = s[1];
    p.amplitude[k] = s[2];
    ++k;
  }
  return p;
}

double max_abs(const ChannelDataSet& d) {
  double m = 0.0;
  for (const auto& s : d.samples) m = std::max(m, s.cwiseAbs().maxCoeff());
  return m;
}

// Sample index of the largest |value| in one receive channel.
int peak_index(const Field& samples, int channel) {
  Eigen::Index r = 0;
  samples.col(channel).cwiseAbs().maxCoeff(&r);
  return static_cast<int>(r);
}

}  // namespace

TEST_CASE("phantom generation is deterministic and scales with density") {
  const PhantomRegion region{{-1e-3, 1e-3}, {10e-3, 12e-3}};
  const ScattererPhantom a = generate_phantom(region, kProbe, 10.0, 42);
  const ScattererPhantom b = generate_phantom(region, kProbe, 10.0, 42);
  CHECK(a.x == b.x);
  CHECK(a.z == b.z);
  CHECK(a.amplitude == b.amplitude);
  CHECK(a.rng_seed == 42);
  CHECK(a.density_per_cell == 10.0);
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    CHECK(a.x[i] >= region.x[0]);
    CHECK(a.x[i] <= region.x[1]);
    CHECK(a.z[i] >= region.z[0]);
    CHECK(a.z[i] <= region.z[1]);
  }

  // Resolution cell: axial c / (2 fc B) times lateral lambda F / D.
  const double cell = (1540.0 / (2 * 5e6 * 0.6)) * ((1540.0 / 5e6) * 30e-3 / (64 * 3.08e-4));
  CHECK(resolution_cell_area(kProbe) == doctest::Approx(cell).epsilon(1e-12));
  const double area = 2e-3 * 2e-3;
  for (double density : {2.0, 4.0}) {
    const double expected = density * area / cell;
    double sum = 0.0;
    const int seeds = 40;
    for (int s = 0; s < seeds; ++s) sum += static_cast<double>(generate_phantom(region, kProbe, density, s).size());
    // Poisson counts: the mean over the seeds has standard deviation sqrt(expected / seeds).
    CHECK(std::abs(sum / seeds - expected) < 4.0 * std::sqrt(expected / seeds));
  }

  CHECK_THROWS_AS(generate_phantom({{0.0, 0.0}, {10e-3, 12e-3}}, kProbe, 10.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(generate_phantom(region, kProbe, 0.0, 1), std::invalid_argument);
}

TEST_CASE("uniform compression moves points by the closed form") {
  const DeformationModel m{UniformCompression{0.01, 0.5}};
  const ScattererPhantom moved = displace(points({{1e-3, 10e-3, 1.0}}), m);
  CHECK(moved.x[0] == doctest::Approx(1.005e-3).epsilon(1e-12));
  CHECK(moved.z[0] == doctest::Approx(9.9e-3).epsilon(1e-12));

  const ScattererPhantom p = points({{-2e-3, 5e-3, 1.0}, {0.7e-3, 20e-3, -0.3}});
  const ScattererPhantom same = displace(p, DeformationModel{UniformCompression{0.0, 0.3}});
  CHECK(same.x == p.x);
  CHECK(same.z == p.z);

  CHECK_THROWS(DeformationModel{UniformCompression{0.2, 0.5}}.validate());
  CHECK_THROWS(DeformationModel{UniformCompression{0.01, 0.7}}.validate());
}

TEST_CASE("ground truth of simple deformations") {
  const ImageGrid g(-2e-3, 10e-3, 1e-4, 2e-5, 41, 60);
  const GroundTruth zero = ground_truth_displacement(DeformationModel{UniformCompression{0.0, 0.5}}, g);
  CHECK(zero.displacement.axial().cwiseAbs().maxCoeff() == 0.0);
  CHECK(zero.displacement.lateral().cwiseAbs().maxCoeff() == 0.0);
  CHECK(zero.strain.axial_strain.cwiseAbs().maxCoeff() == 0.0);

  const GroundTruth u = ground_truth_displacement(DeformationModel{UniformCompression{0.02, 0.5}}, g);
  CHECK((u.strain.axial_strain.array() == 0.02).all());
  CHECK((u.strain.lateral_strain.array() == 0.01).all());
  // Sample units: axial meters / dz.
  CHECK(u.displacement.axial()(5, 3) == doctest::Approx(-0.02 * g.z(5) / g.dz).epsilon(1e-12));
  CHECK(u.displacement.lateral()(5, 3) == doctest::Approx(0.01 * g.x(3) / g.dx).epsilon(1e-12));
}

TEST_CASE("inclusion strain and displacement") {
  CircularInclusion inc;
  const DeformationModel m{inc};
  CHECK(m.axial_strain(0.0, 15e-3) == doctest::Approx(0.001));
  CHECK(m.axial_strain(3e-3, 15e-3) == doctest::Approx(0.01));
  CHECK(m.axial_strain(0.0, 5e-3) == doctest::Approx(0.01));

  // Numerical derivative of the ground-truth axial displacement inside the inclusion.
  const double dz = 5e-6;
  const ImageGrid g(-1e-3, 14e-3, 1e-4, dz, 21, 401);
  const GroundTruth gt = ground_truth_displacement(m, g);
  const Field a = gt.displacement.axial();
  double sum = 0.0;
  int n = 0;
  for (int j = 0; j < g.nx; ++j)
    for (int i = 1; i + 1 < g.nz; ++i) {
      if (std::hypot(g.x(j), g.z(i) - inc.center_z) > inc.radius - 0.05e-3) continue;
      sum += -(a(i + 1, j) - a(i - 1, j)) / 2.0;
      ++n;
    }
  REQUIRE(n > 100);
  CHECK(sum / n == doctest::Approx(0.1 * inc.background_strain).epsilon(1e-3));

  // Above the inclusion the displacement is the uniform-compression value.
  CHECK(m.displacement(0.0, 10e-3)[1] == doctest::Approx(-0.01 * 10e-3).epsilon(1e-12));
  // Displacement of a scatterer equals the ground truth at its position.
  const ScattererPhantom moved = displace(points({{0.4e-3, 15.3e-3, 1.0}}), m);
  CHECK(moved.z[0] - 15.3e-3 == doctest::Approx(m.displacement(0.4e-3, 15.3e-3)[1]).epsilon(1e-14));

  const ImageGrid line(-3e-3, 15e-3, 0.05e-3, 1e-4, 121, 1);
  const GroundTruth sym = ground_truth_displacement(m, line);
  for (int k = 0; k <= 60; ++k) {
    CHECK(std::abs(sym.strain.axial_strain(0, 60 - k) - sym.strain.axial_strain(0, 60 + k)) < 1e-12);
    CHECK(std::abs(sym.strain.lateral_strain(0, 60 - k) - sym.strain.lateral_strain(0, 60 + k)) < 1e-12);
  }
}

TEST_CASE("single-element echo arrives after the round trip") {
  const int el = 31;
  const double z = 8e-3;
  const PulseModel pulse;
  SimulationOptions opt;
  opt.sample_count = 600;
  SimulationStats stats;
  const ChannelDataSet d = simulate_channel_data(points({{kProbe.element_x(el), z, 1.0}}), kProbe,
                                                 {make_single_element_event(el)}, pulse, opt, &stats);
  const double t_peak = opt.t0 + peak_index(d.samples[0], el) / kProbe.sampling_frequency();
  CHECK(std::abs(t_peak - 2 * z / kProbe.sound_speed()) <= pulse.half_duration());
  // The peak of |pulse| lies within a quarter carrier period of its center.
  CHECK(std::abs(t_peak - 2 * z / kProbe.sound_speed()) <= 0.25 / 5e6 + 0.5 / kProbe.sampling_frequency());
  CHECK(stats.skipped_paths == 0);
}

TEST_CASE("echoes shift with the scatterer") {
  const int el = 20;
  const double dz = 0.37e-3;
  const PulseModel pulse;
  SimulationOptions opt;
  opt.sample_count = 800;
  const auto events = std::vector<TransmitEvent>{make_single_element_event(el)};
  const double x = kProbe.element_x(el);
  const ChannelDataSet a = simulate_channel_data(points({{x, 8e-3, 1.0}}), kProbe, events, pulse, opt);
  const ChannelDataSet b = simulate_channel_data(points({{x, 8e-3 + dz, 1.0}}), kProbe, events, pulse, opt);
  const double fs = kProbe.sampling_frequency();
  const double shift = (peak_index(b.samples[0], el) - peak_index(a.samples[0], el)) / fs;
  CHECK(std::abs(shift - 2 * dz / kProbe.sound_speed()) <= 1.0 / fs);
}

TEST_CASE("superposition") {
  const auto events = make_focused_sweep(kProbe, 10e-3, 16);
  const std::vector<TransmitEvent> some(events.begin() + 20, events.begin() + 24);
  const PulseModel pulse;
  const SimulationOptions opt = record_window(kProbe, some, pulse, 5e-3, 15e-3);

  const ChannelDataSet none = simulate_channel_data(points({}), kProbe, some, pulse, opt);
  CHECK(max_abs(none) == 0.0);

  const ScattererPhantom one = points({{0.2e-3, 9e-3, 0.8}});
  const ChannelDataSet single = simulate_channel_data(one, kProbe, some, pulse, opt);
  const ChannelDataSet twice = simulate_channel_data(ScattererPhantom::merge(one, one), kProbe, some, pulse, opt);
  REQUIRE(max_abs(single) > 0.0);
  for (std::size_t e = 0; e < some.size(); ++e)
    CHECK((twice.samples[e] - 2.0 * single.samples[e]).cwiseAbs().maxCoeff() <= 1e-12 * max_abs(single));

  const ScattererPhantom pa = points({{-1e-3, 7e-3, 1.0}, {0.5e-3, 12e-3, -0.4}});
  const ScattererPhantom pb = points({{0.3e-3, 10e-3, 0.6}, {2e-3, 13.5e-3, 1.3}});
  const ChannelDataSet sa = simulate_channel_data(pa, kProbe, some, pulse, opt);
  const ChannelDataSet sb = simulate_channel_data(pb, kProbe, some, pulse, opt);
  const ChannelDataSet sab = simulate_channel_data(ScattererPhantom::merge(pa, pb), kProbe, some, pulse, opt);
  const double scale = max_abs(sab);
  for (std::size_t e = 0; e < some.size(); ++e)
    CHECK((sab.samples[e] - sa.samples[e] - sb.samples[e]).cwiseAbs().maxCoeff() <= 1e-9 * scale);
}

TEST_CASE("simulation input validation") {
  const PulseModel pulse;
  SimulationOptions opt;
  CHECK_THROWS_AS(simulate_channel_data(points({{0, 5e-3, 1}}), kProbe, {}, pulse, opt), std::invalid_argument);
  CHECK_THROWS_AS(simulate_channel_data(points({{0, 0.0, 1}}), kProbe, {make_single_element_event(0)}, pulse, opt),
                  std::invalid_argument);
  PulseModel wide;
  wide.fractional_bandwidth = 2.5;
  CHECK_THROWS_AS(wide.validate(), std::invalid_argument);
}

TEST_CASE("focusing delays align the wavefronts at the focus") {
  const TransmitEvent ev = make_focused_event(kProbe, kProbe.element_x(30), 10e-3, 16);
  const FocusedAperture& f = ev.focused();
  const Eigen::VectorXd d = focusing_delays(kProbe, f);
  for (std::size_t k = 0; k < f.elements.size(); ++k) {
    const double path = std::hypot(kProbe.element_x(f.elements[k]) - f.focus_x, f.focus_z);
    CHECK(d[static_cast<Eigen::Index>(k)] + path / kProbe.sound_speed() ==
          doctest::Approx(f.focus_z / kProbe.sound_speed()).epsilon(1e-12));
  }
}

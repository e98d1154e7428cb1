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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>

#include "support.hpp"
#include "vssa/io.hpp"
#include "vssa/parallel.hpp"
#include "vssa/pipeline.hpp"

using namespace vssa;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("vssa_test_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

// Values that survive the float32 payload unchanged.
Field float_field(int nz, int nx, std::uint64_t seed) {
  Field f = test::random_field(nz, nx, seed);
  for (Eigen::Index i = 0; i < f.size(); ++i) f.data()[i] = static_cast<float>(f.data()[i]);
  return f;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

PipelineConfig small_config() {
  PipelineConfig c;
  c.elements = 32;
  c.aperture_elements = 16;
  c.density_per_cell = 2.0;
  c.roi = {{-1.54e-3, 1.54e-3}, {13.5e-3, 16.5e-3}};
  c.target = {{-0.5e-3, 0.5e-3}, {14.5e-3, 15.5e-3}};
  c.background = {{-0.5e-3, 0.5e-3}, {13.6e-3, 14.0e-3}};
  return c;
}

}  // namespace

TEST_CASE("channel data round-trip is bit-exact") {
  TempDir dir("channels");
  const ProbeGeometry g(8, 3e-4, 5e6, 40e6);
  ChannelDataSet d{g, make_focused_sweep(g, 10e-3, 4), {}, 1.25e-6};
  for (int e = 0; e < d.event_count(); ++e) d.samples.push_back(float_field(50, 8, e));
  save_channel_data(dir.path / "ch", d);
  const ChannelDataSet back = load_channel_data(dir.path / "ch.bin");
  CHECK(back.geometry == g);
  CHECK(back.t0 == d.t0);
  REQUIRE(back.event_count() == d.event_count());
  for (int e = 0; e < d.event_count(); ++e) {
    CHECK(back.samples[e] == d.samples[e]);
    CHECK(back.events[e].focused().elements == d.events[e].focused().elements);
    CHECK(back.events[e].focused().focus_x == d.events[e].focused().focus_x);
  }
  save_channel_data(dir.path / "again", back);
  CHECK(slurp(dir.path / "again.bin") == slurp(dir.path / "ch.bin"));
}

TEST_CASE("frame, displacement and strain round-trips are bit-exact") {
  TempDir dir("fields");
  const ImageGrid grid(-1.1e-3, 12.3e-3, 1.925e-5, 1.925e-5, 7, 11);
  RfFrame f(grid, float_field(11, 7, 1));
  f.valid(3, 4) = false;
  save_frame(dir.path / "frame", f);
  const RfFrame fb = load_frame(dir.path / "frame");
  CHECK(fb.grid == grid);
  CHECK(fb.values == f.values);
  CHECK(fb.valid == f.valid);

  DisplacementField d(grid);
  d.axial_int = float_field(11, 7, 2).array().round();
  d.lateral_int = float_field(11, 7, 3).array().round();
  d.axial_sub = float_field(11, 7, 4);
  d.lateral_sub = float_field(11, 7, 5);
  d.valid(0, 0) = false;
  d.apply_mask();
  save_displacement(dir.path / "disp", d);
  const DisplacementField db = load_displacement(dir.path / "disp");
  CHECK(db.grid == grid);
  CHECK(db.valid == d.valid);
  CHECK(std::isnan(db.axial_sub(0, 0)));
  for (int j = 0; j < 7; ++j)
    for (int i = 0; i < 11; ++i)
      if (d.valid(i, j)) {
        CHECK(db.axial_int(i, j) == d.axial_int(i, j));
        CHECK(db.lateral_int(i, j) == d.lateral_int(i, j));
        CHECK(db.axial_sub(i, j) == d.axial_sub(i, j));
        CHECK(db.lateral_sub(i, j) == d.lateral_sub(i, j));
      }

  StrainField s(grid);
  s.axial_strain = float_field(11, 7, 6);
  s.lateral_strain = float_field(11, 7, 7);
  s.valid.setConstant(true);
  s.provenance = "unit";
  save_strain(dir.path / "strain", s);
  const StrainField sb = load_strain(dir.path / "strain.json");
  CHECK(sb.axial_strain == s.axial_strain);
  CHECK(sb.lateral_strain == s.lateral_strain);
  CHECK(sb.provenance == "unit");
  save_strain(dir.path / "strain2", sb);
  CHECK(slurp(dir.path / "strain2.bin") == slurp(dir.path / "strain.bin"));
}

TEST_CASE("format errors are typed") {
  TempDir dir("errors");
  const RfFrame f(ImageGrid(0, 0, 1, 1, 4, 5), float_field(5, 4, 1));
  save_frame(dir.path / "frame", f);

  // Wrong loader for the format.
  CHECK_THROWS_AS(load_strain(dir.path / "frame"), FormatError);

  // Version mismatch.
  {
    std::string meta = slurp(dir.path / "frame.json");
    const auto at = meta.find(kFrameFormat);
    REQUIRE(at != std::string::npos);
    meta.replace(at, std::string(kFrameFormat).size(), "VSSA-RF-9");
    std::ofstream(dir.path / "frame.json", std::ios::binary) << meta;
    CHECK_THROWS_AS(load_frame(dir.path / "frame"), FormatError);
  }

  // Truncated payload.
  save_frame(dir.path / "frame", f);
  fs::resize_file(dir.path / "frame.bin", fs::file_size(dir.path / "frame.bin") - 3);
  CHECK_THROWS_AS(load_frame(dir.path / "frame"), FormatError);

  CHECK_THROWS_AS(load_frame(dir.path / "missing"), FormatError);
}

TEST_CASE("PGM output") {
  TempDir dir("pgm");
  Field v(2, 3);
  v << 0.0, 0.5, 1.0, 0.25, 2.0, -1.0;
  Mask m = Mask::Constant(2, 3, true);
  m(1, 1) = false;
  write_pgm(dir.path / "img.pgm", v, m);
  const std::string bytes = slurp(dir.path / "img.pgm");
  const std::string header = "P5\n3 2\n65535\n";
  REQUIRE(bytes.size() == header.size() + 12);
  CHECK(bytes.substr(0, header.size()) == header);
  auto px = [&](int k) {
    const auto hi = static_cast<unsigned char>(bytes[header.size() + 2 * k]);
    const auto lo = static_cast<unsigned char>(bytes[header.size() + 2 * k + 1]);
    return hi * 256 + lo;
  };
  // Range is the valid [-1, 1]; masked nodes are 0.
  CHECK(px(0) == 32768);
  CHECK(px(2) == 65535);
  CHECK(px(4) == 0);
  CHECK(px(5) == 0);
  CHECK(fs::exists(dir.path / "img.pgm.json"));
}

TEST_CASE("metrics key-value output") {
  MetricsReport r;
  r.label = "hf";
  r.direction = Direction::lateral;
  r.window_length = 15;
  r.target = {1, 2, 3, 4};
  r.background = {10, 2, 3, 4};
  r.cnr_db = 12.5;
  r.errors.me = 0.001;
  r.errors.count = 99;
  const std::string kv = metrics_key_values(r);
  CHECK(kv.find("label=hf\n") != std::string::npos);
  CHECK(kv.find("direction=lateral\n") != std::string::npos);
  CHECK(kv.find("target.nx=4\n") != std::string::npos);
  CHECK(kv.find("cnr_db=12.5\n") != std::string::npos);
  CHECK(kv.find("rmse_percent=undefined\n") != std::string::npos);
  CHECK(kv.find("nodes=99\n") != std::string::npos);
  r.cnr_contrast_zero = true;
  r.errors.rmse_percent = 3.0;
  const std::string kv2 = metrics_key_values(r);
  CHECK(kv2.find("cnr_db=-inf\n") != std::string::npos);
  CHECK(kv2.find("rmse_percent=3\n") != std::string::npos);
  r.cnr_contrast_zero = false;
  r.cnr_db = kInvalid;
  CHECK(metrics_key_values(r).find("cnr_db=undefined\n") != std::string::npos);
}

TEST_CASE("configuration JSON round-trip, overrides and validation") {
  PipelineConfig c;
  c.seed = 77;
  c.noise_snr_db = 30.0;
  c.interp_factor = 8;
  const PipelineConfig back = PipelineConfig::from_json(c.to_json());
  CHECK(back.to_json() == c.to_json());
  CHECK(back.seed == 77);
  CHECK(back.noise_snr_db.value() == 30.0);

  CHECK(PipelineConfig::from_json(nlohmann::json::object()).to_json() == PipelineConfig{}.to_json());
  CHECK_THROWS_AS(PipelineConfig::from_json({{"probe", {{"elemnts", 10}}}}), ConfigError);

  const PipelineConfig o =
      PipelineConfig::with_overrides(c, {"dp.smoothness_weight=0.5", "output_dir=out/x", "deformation.kind=\"none\""});
  CHECK(o.dp_smoothness == 0.5);
  CHECK(o.output_dir == "out/x");
  CHECK(o.deformation == "none");
  CHECK_THROWS_AS(PipelineConfig::with_overrides(c, {"dp.unknown=1"}), ConfigError);
  CHECK_THROWS_AS(PipelineConfig::with_overrides(c, {"novalue"}), ConfigError);

  CHECK_NOTHROW(PipelineConfig{}.validate());
  PipelineConfig bad;
  bad.elements = 1;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = PipelineConfig{};
  bad.lsq_window_fraction = 1.5;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = PipelineConfig{};
  bad.depth_padding = 20e-3;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = PipelineConfig{};
  bad.deformation = "twist";
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  const nlohmann::json prov = PipelineConfig::provenance();
  CHECK(prov.is_object());
  CHECK(!prov.empty());
}

TEST_CASE("simulation and beamforming do not depend on the thread count") {
  PipelineConfig c = small_config();
  c.density_per_cell = 1.0;
  set_thread_count(1);
  const ChannelPair a = simulate_pair(c);
  const FramePair fa = form_frames(a, Method::hf, c);
  set_thread_count(3);
  const ChannelPair b = simulate_pair(c);
  const FramePair fb = form_frames(b, Method::hf, c);
  set_thread_count(0);
  for (int e = 0; e < a.post.event_count(); ++e) CHECK(a.post.samples[e] == b.post.samples[e]);
  CHECK(fa.pre.values == fb.pre.values);
  CHECK(fa.post.values == fb.post.values);
}

TEST_CASE("zero deformation reports near-zero strain and an undefined RMSE") {
  TempDir dir("pipeline");
  PipelineConfig c = small_config();
  c.deformation = "none";
  c.output_dir = dir.path.string();
  const PipelineReport report = run_pipeline(c, true);
  REQUIRE(report.methods.size() == 3);
  for (const auto& m : report.methods) {
    for (const auto& r : m.reports) {
      CHECK(!r.errors.rmse_percent.has_value());
      CHECK(std::abs(r.errors.me) < 2e-3);
    }
  }
  CHECK(fs::exists(dir.path / "summary.csv"));
  CHECK(fs::exists(dir.path / "HF_strain.bin"));
  CHECK(fs::exists(dir.path / "LF_bmode.pgm"));
  CHECK(slurp(dir.path / "summary.csv").find("undefined") != std::string::npos);
}

TEST_CASE("frame normalization uses the RMS of the valid pre nodes") {
  const ImageGrid g(0, 0, 1, 1, 3, 4);
  FramePair f{RfFrame(g, Field::Constant(4, 3, 2.0)), RfFrame(g, Field::Constant(4, 3, 6.0))};
  f.pre.values(0, 0) = 100.0;
  f.pre.valid(0, 0) = false;
  normalize_frames(f);
  CHECK(f.pre.values(1, 1) == doctest::Approx(1.0));
  CHECK(f.post.values(1, 1) == doctest::Approx(3.0));
  FramePair empty{RfFrame(g), RfFrame(g)};
  CHECK_THROWS_AS(normalize_frames(empty), DegenerateInput);
}

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

#include "vssa/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "vssa/interp.hpp"
#include "vssa/io.hpp"

namespace vssa {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json extent_json(Extent e) { return json::array({e[0], e[1]}); }
json region_json(const RegionSpec& r) { return {{"x", extent_json(r.x)}, {"z", extent_json(r.z)}}; }

Extent extent_from(const json& j) {
  if (!j.is_array() || j.size() != 2) throw ConfigError("extent must be a two-element array");
  return {j[0].get<double>(), j[1].get<double>()};
}
RegionSpec region_from(const json& j) { return {extent_from(j.at("x")), extent_from(j.at("z"))}; }

// Overlays `user` on `base`, rejecting keys that `base` does not have.
void merge_into(json& base, const json& user, const std::string& where) {
  if (!user.is_object()) throw ConfigError(where + ": expected an object");
  for (auto it = user.begin(); it != user.end(); ++it) {
    const std::string key = where.empty() ? it.key() : where + "." + it.key();
    if (!base.contains(it.key())) throw ConfigError("unknown configuration key '" + key + "'");
    json& slot = base[it.key()];
    if (slot.is_object() && it.value().is_object())
      merge_into(slot, it.value(), key);
    else
      slot = it.value();
  }
}

}  // namespace

json PipelineConfig::to_json() const {
  return {{"seed", seed},
          {"output_dir", output_dir},
          {"probe",
           {{"elements", elements},
            {"pitch", pitch},
            {"center_frequency", center_frequency},
            {"sampling_frequency", sampling_frequency},
            {"sound_speed", sound_speed},
            {"fractional_bandwidth", fractional_bandwidth}}},
          {"transmit", {{"focal_depth", focal_depth}, {"aperture_elements", aperture_elements}}},
          {"roi", region_json(roi)},
          {"phantom",
           {{"density_per_cell", density_per_cell},
            {"margin", phantom_margin},
            {"noise_snr_db", noise_snr_db ? json(*noise_snr_db) : json(nullptr)}}},
          {"deformation",
           {{"kind", deformation},
            {"uniform_strain", uniform_strain},
            {"center_x", inclusion.center_x},
            {"center_z", inclusion.center_z},
            {"radius", inclusion.radius},
            {"background_strain", inclusion.background_strain},
            {"inclusion_strain_ratio", inclusion.inclusion_strain_ratio},
            {"poisson", inclusion.poisson},
            {"transition_width", inclusion.transition_width}}},
          {"beamform", {{"f_number", f_number}, {"crop_margin", crop_margin}, {"depth_padding", depth_padding}}},
          {"dp", {{"max_strain", dp_max_strain}, {"smoothness_weight", dp_smoothness}, {"patch_half", dp_patch_half}}},
          {"overwind",
           {{"lf_alpha1", lf_alpha1},
            {"lf_alpha2", lf_alpha2},
            {"hf_alpha1", hf_alpha1},
            {"lambda", lambda},
            {"window_half_k", window_half_k},
            {"irls_iterations", irls_iterations},
            {"lateral_offset_ratio", lateral_offset_ratio}}},
          {"strain", {{"window_fraction", lsq_window_fraction}}},
          {"interp", {{"factor", interp_factor}}},
          {"metrics",
           {{"target", region_json(target)},
            {"background", region_json(background)},
            {"esf_depth", esf_depth},
            {"esf_lateral", esf_lateral}}}};
}

PipelineConfig PipelineConfig::from_json(const json& user) {
  json j = PipelineConfig{}.to_json();
  merge_into(j, user, "");
  PipelineConfig c;
  try {
    c.seed = j.at("seed").get<std::uint64_t>();
    c.output_dir = j.at("output_dir").get<std::string>();
    const json& p = j.at("probe");
    c.elements = p.at("elements");
    c.pitch = p.at("pitch");
    c.center_frequency = p.at("center_frequency");
    c.sampling_frequency = p.at("sampling_frequency");
    c.sound_speed = p.at("sound_speed");
    c.fractional_bandwidth = p.at("fractional_bandwidth");
    c.focal_depth = j.at("transmit").at("focal_depth");
    c.aperture_elements = j.at("transmit").at("aperture_elements");
    c.roi = region_from(j.at("roi"));
    const json& ph = j.at("phantom");
    c.density_per_cell = ph.at("density_per_cell");
    c.phantom_margin = ph.at("margin");
    if (!ph.at("noise_snr_db").is_null()) c.noise_snr_db = ph.at("noise_snr_db").get<double>();
    const json& d = j.at("deformation");
    c.deformation = d.at("kind");
    c.uniform_strain = d.at("uniform_strain");
    c.inclusion.center_x = d.at("center_x");
    c.inclusion.center_z = d.at("center_z");
    c.inclusion.radius = d.at("radius");
    c.inclusion.background_strain = d.at("background_strain");
    c.inclusion.inclusion_strain_ratio = d.at("inclusion_strain_ratio");
    c.inclusion.poisson = d.at("poisson");
    c.inclusion.transition_width = d.at("transition_width");
    c.f_number = j.at("beamform").at("f_number");
    c.crop_margin = j.at("beamform").at("crop_margin");
    c.depth_padding = j.at("beamform").at("depth_padding");
    const json& dp = j.at("dp");
    c.dp_max_strain = dp.at("max_strain");
    c.dp_smoothness = dp.at("smoothness_weight");
    c.dp_patch_half = dp.at("patch_half");
    const json& ow = j.at("overwind");
    c.lf_alpha1 = ow.at("lf_alpha1");
    c.lf_alpha2 = ow.at("lf_alpha2");
    c.hf_alpha1 = ow.at("hf_alpha1");
    c.lambda = ow.at("lambda");
    c.window_half_k = ow.at("window_half_k");
    c.irls_iterations = ow.at("irls_iterations");
    c.lateral_offset_ratio = ow.at("lateral_offset_ratio");
    c.lsq_window_fraction = j.at("strain").at("window_fraction");
    c.interp_factor = j.at("interp").at("factor");
    const json& m = j.at("metrics");
    c.target = region_from(m.at("target"));
    c.background = region_from(m.at("background"));
    c.esf_depth = m.at("esf_depth");
    c.esf_lateral = m.at("esf_lateral");
  } catch (const json::exception& e) {
    throw ConfigError(std::string("configuration: ") + e.what());
  }
  c.validate();
  return c;
}

PipelineConfig PipelineConfig::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return from_json(j);
}

PipelineConfig PipelineConfig::with_overrides(const PipelineConfig& base, const std::vector<std::string>& assignments) {
  json j = base.to_json();
  for (const auto& a : assignments) {
    const auto eq = a.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + a + "' is not key=value");
    const std::string key = a.substr(0, eq), text = a.substr(eq + 1);
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;
    json* slot = &j;
    std::size_t start = 0;
    while (true) {
      const auto dot = key.find('.', start);
      const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
      if (!slot->is_object() || !slot->contains(part)) throw ConfigError("unknown configuration key '" + key + "'");
      slot = &(*slot)[part];
      if (dot == std::string::npos) break;
      start = dot + 1;
    }
    *slot = value;
  }
  return from_json(j);
}

json PipelineConfig::provenance() {
  const char* desk = "non-paper: desk-scale choice";
  return {{"probe.elements", "non-paper: 64 instead of the 128-element probe"},
          {"probe.center_frequency", "non-paper: 5 MHz instead of 7 MHz"},
          {"probe.pitch", "non-paper: 16 HF grid spacings"},
          {"probe.sampling_frequency", desk},
          {"probe.fractional_bandwidth", desk},
          {"transmit", desk},
          {"roi", desk},
          {"phantom", "non-paper: point-scatterer model replaces the acoustic simulator"},
          {"deformation", "non-paper: analytic inclusion replaces the finite-element model"},
          {"beamform", desk},
          {"dp", "non-paper: DP parameters are not published"},
          {"overwind.lambda", "non-paper: not published"},
          {"overwind.window_half_k", "non-paper: not published"},
          {"overwind.irls_iterations", "non-paper: solver choice"},
          {"overwind.lf_alpha1", "non-paper default"},
          {"overwind.lf_alpha2", "non-paper default"},
          {"overwind.hf_alpha1", "non-paper default"},
          {"interp.factor", "non-paper: pitch over HF spacing (19 in the published simulation)"},
          {"metrics", "non-paper: rectangle coordinates are not published"},
          {"strain.window_fraction", "published value (5%)"},
          {"seed", desk}};
}

void PipelineConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(what);
  };
  require(elements >= 2 && pitch > 0.0 && center_frequency > 0.0 && sound_speed > 0.0, "probe parameters invalid");
  require(sampling_frequency > 2.0 * center_frequency, "sampling frequency must exceed twice the center frequency");
  require(fractional_bandwidth > 0.0, "fractional bandwidth must be positive");
  require(focal_depth > 0.0, "focal depth must be positive");
  require(aperture_elements >= 1 && aperture_elements <= elements, "aperture must use 1..elements elements");
  require(roi.x[1] > roi.x[0] && roi.z[1] > roi.z[0] && roi.z[0] > 0.0, "roi extents invalid");
  require(density_per_cell > 0.0 && phantom_margin >= 0.0, "phantom parameters invalid");
  require(deformation == "inclusion" || deformation == "uniform" || deformation == "none",
          "deformation kind must be inclusion, uniform or none");
  require(f_number > 0.0 && crop_margin >= 0.0 && depth_padding >= 0.0, "beamform parameters invalid");
  require(roi.z[0] - depth_padding > 0.0, "depth padding reaches the probe face");
  require(dp_max_strain > 0.0 && dp_smoothness >= 0.0 && dp_patch_half >= 0, "dp parameters invalid");
  require(lf_alpha1 >= 0.0 && lf_alpha2 >= 0.0 && hf_alpha1 >= 0.0 && lambda > 0.0, "overwind weights invalid");
  require(window_half_k >= 0 && irls_iterations >= 1, "overwind window or iteration count invalid");
  require(lateral_offset_ratio >= 0.0 && lateral_offset_ratio <= 0.5, "lateral offset ratio must lie in [0, 0.5]");
  require(lsq_window_fraction > 0.0 && lsq_window_fraction < 1.0, "strain window fraction must lie in (0, 1)");
  require(interp_factor >= 1, "interpolation factor must be >= 1");
  require(target.x[1] > target.x[0] && target.z[1] > target.z[0], "target rectangle invalid");
  require(background.x[1] > background.x[0] && background.z[1] > background.z[0], "background rectangle invalid");
  const bool disjoint = target.x[1] < background.x[0] || background.x[1] < target.x[0] ||
                        target.z[1] < background.z[0] || background.z[1] < target.z[0];
  require(disjoint, "target and background rectangles overlap");
  try {
    make_deformation(*this).validate();
    make_roi_lf_grid(*this);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
}

ProbeGeometry make_geometry(const PipelineConfig& c) {
  return ProbeGeometry(c.elements, c.pitch, c.center_frequency, c.sampling_frequency, c.sound_speed);
}

std::vector<TransmitEvent> make_transmit_plan(const PipelineConfig& c) {
  const ProbeGeometry g = make_geometry(c);
  std::vector<TransmitEvent> sweep = make_focused_sweep(g, c.focal_depth, c.aperture_elements);
  // Keep only events whose transmit cone (as used by the beamformer) reaches
  // the padded ROI; the others never contribute to an ROI node.
  const ImageGrid lf = make_roi_lf_grid(c);
  const double z_far = std::max(std::abs(c.roi.z[0] - c.depth_padding - c.focal_depth),
                                std::abs(c.roi.z[1] + c.depth_padding - c.focal_depth));
  std::vector<TransmitEvent> plan;
  for (auto& ev : sweep) {
    const auto& f = ev.focused();
    const double tan_half = 0.5 * static_cast<double>(f.elements.size()) * g.pitch() / f.focus_z;
    const double gap = std::max({0.0, lf.x0 - f.focus_x, f.focus_x - lf.x_end()});
    if (gap <= z_far * tan_half + 0.5 * g.pitch() + 1e-12) plan.push_back(std::move(ev));
  }
  return plan;
}

DeformationModel make_deformation(const PipelineConfig& c) {
  if (c.deformation == "inclusion") return DeformationModel{c.inclusion};
  if (c.deformation == "uniform") return DeformationModel{UniformCompression{c.uniform_strain, c.inclusion.poisson}};
  return DeformationModel{UniformCompression{0.0, c.inclusion.poisson}};
}

ImageGrid make_roi_lf_grid(const PipelineConfig& c) {
  const ProbeGeometry g = make_geometry(c);
  const ImageGrid full = make_lf_grid(g, c.roi.z);
  int first = -1, last = -1;
  for (int i = 0; i < full.nx; ++i)
    if (full.x(i) >= c.roi.x[0] - 1e-9 && full.x(i) <= c.roi.x[1] + 1e-9) {
      if (first < 0) first = i;
      last = i;
    }
  if (first < 0 || last - first + 1 < 4) throw ConfigError("roi must span at least 4 element columns");
  return crop_grid(full, 0, first, full.nz, last - first + 1);
}

ImageGrid make_roi_hf_grid(const PipelineConfig& c) {
  const ImageGrid lf = make_roi_lf_grid(c);
  return make_hf_grid(make_geometry(c), {lf.x0, lf.x_end()}, c.roi.z);
}

BeamformConfig make_beamform_config(const PipelineConfig& c) {
  BeamformConfig b;
  b.mode = BeamformMode::VSSA;
  b.f_number = c.f_number;
  b.crop_margin = c.crop_margin;
  b.vssa_region_policy = c.roi.z[0] > c.focal_depth ? RegionPolicy::below_only
                         : c.roi.z[1] < c.focal_depth ? RegionPolicy::above_only
                                                      : RegionPolicy::both_with_crop;
  return b;
}

int padding_rows(const ImageGrid& g, const PipelineConfig& c) {
  return static_cast<int>(std::ceil(c.depth_padding / g.dz - 1e-9));
}

ImageGrid pad_depth(const ImageGrid& g, const PipelineConfig& c) {
  const int rows = padding_rows(g, c);
  return ImageGrid(g.x0, g.z0 - rows * g.dz, g.dx, g.dz, g.nx, g.nz + 2 * rows);
}

ChannelPair simulate_pair(const PipelineConfig& c) {
  const ProbeGeometry g = make_geometry(c);
  const auto events = make_transmit_plan(c);
  const ImageGrid lf = make_roi_lf_grid(c);
  const PhantomRegion region{{lf.x0 - c.phantom_margin, lf.x_end() + c.phantom_margin},
                             {std::max(0.0, c.roi.z[0] - c.phantom_margin), c.roi.z[1] + c.phantom_margin}};
  PhantomOptions opts;
  opts.fractional_bandwidth = c.fractional_bandwidth;
  opts.focal_depth = c.focal_depth;
  opts.aperture = c.aperture_elements * c.pitch;
  const ScattererPhantom pre = generate_phantom(region, g, c.density_per_cell, c.seed, opts);
  const ScattererPhantom post = displace(pre, make_deformation(c));
  PulseModel pulse;
  pulse.center_frequency = c.center_frequency;
  pulse.fractional_bandwidth = c.fractional_bandwidth;
  SimulationOptions sim = record_window(g, events, pulse, region.z[0], region.z[1]);
  sim.noise_snr_db = c.noise_snr_db;
  sim.noise_seed = c.seed ^ 0x9e3779b97f4a7c15ULL;
  ChannelDataSet first = simulate_channel_data(pre, g, events, pulse, sim);
  sim.noise_seed += 1;
  return ChannelPair{std::move(first), simulate_channel_data(post, g, events, pulse, sim)};
}

const char* method_name(Method m) {
  switch (m) {
    case Method::lf:
      return "LF";
    case Method::inter:
      return "Inter";
    case Method::hf:
      return "HF";
  }
  return "?";
}

namespace {

template <typename F>
auto staged(const char* stage, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, e.what());
  }
}

}  // namespace

void normalize_frames(FramePair& f) {
  double ss = 0.0;
  long n = 0;
  for (Eigen::Index i = 0; i < f.pre.values.size(); ++i)
    if (f.pre.valid.data()[i]) {
      ss += f.pre.values.data()[i] * f.pre.values.data()[i];
      ++n;
    }
  const double rms = n > 0 ? std::sqrt(ss / n) : 0.0;
  if (!(rms > 0.0)) throw DegenerateInput("pre-deformation frame is empty");
  f.pre.values /= rms;
  f.post.values /= rms;
}

FramePair form_frames(const ChannelPair& ch, Method method, const PipelineConfig& c) {
  const BeamformConfig bf = make_beamform_config(c);
  FramePair f;
  if (method == Method::hf) {
    const ImageGrid grid = pad_depth(make_roi_hf_grid(c), c);
    f = {das_beamform(ch.pre, grid, bf), das_beamform(ch.post, grid, bf)};
  } else {
    const ImageGrid grid = pad_depth(make_roi_lf_grid(c), c);
    f = {das_beamform(ch.pre, grid, bf), das_beamform(ch.post, grid, bf)};
    if (method == Method::inter) {
      f.pre = spline_upsample(f.pre, c.interp_factor);
      f.post = spline_upsample(f.post, c.interp_factor);
    }
  }
  normalize_frames(f);
  return f;
}

TdeResult estimate_displacement(const FramePair& f, Method method, const PipelineConfig& c) {
  const int stride = method == Method::lf ? 1 : c.interp_factor;
  DpConfig dp = DpConfig::for_frame(f.pre.grid, c.dp_max_strain, stride);
  dp.smoothness_weight = c.dp_smoothness;
  dp.patch_half = c.dp_patch_half;
  TdeResult r;
  r.integer = dp_integer_displacement(f.pre, f.post, dp);

  OverwindParams p = method == Method::lf ? OverwindParams::tied_lf(c.lf_alpha1, c.lf_alpha2)
                                          : OverwindParams::tied_hf(c.hf_alpha1);
  p.lambda = {c.lambda, c.lambda, c.lambda, c.lambda};
  p.window_half_k = c.window_half_k;
  if (method != Method::lf) p.window_half_r = c.window_half_k;
  p.irls_iterations = c.irls_iterations;
  p.epsilon_a = default_epsilon_a(r.integer);
  p.epsilon_l = -c.lateral_offset_ratio * p.epsilon_a;
  OverwindResult o = overwind_solve(f.pre, f.post, r.integer, p);
  r.cost_history = std::move(o.cost_history);
  const int pad = padding_rows(f.pre.grid, c);
  const int nz = f.pre.grid.nz - 2 * pad;
  if (nz < 1) throw std::invalid_argument("frame is shorter than its depth padding");
  r.integer = crop_displacement(r.integer, pad, 0, nz, f.pre.grid.nx);
  r.displacement = crop_displacement(o.displacement, pad, 0, nz, f.pre.grid.nx);
  return r;
}

std::vector<MetricsReport> measure_strain(const StrainField& strain, const StrainField& truth, const std::string& label,
                                          const PipelineConfig& c) {
  const ImageGrid& g = strain.grid;
  const NodeRect target = rect_from_extent(g, c.target.x, c.target.z);
  const NodeRect background = rect_from_extent(g, c.background.x, c.background.z);
  std::vector<MetricsReport> out;
  for (Direction d : {Direction::axial, Direction::lateral}) {
    MetricsReport r;
    r.label = label;
    r.direction = d;
    r.window_length = lsq_window_length(c.lsq_window_fraction, d == Direction::axial ? g.nz : g.nx);
    r.target = target;
    r.background = background;
    try {
      r.cnr_db = cnr(strain, d, target, background);
      r.cnr_contrast_zero = std::isinf(r.cnr_db);
    } catch (const DegenerateInput&) {
      r.cnr_db = kInvalid;  // both rectangles are flat
    }
    r.errors = error_metrics(strain, truth, d);
    out.push_back(r);
  }
  return out;
}

MethodResult evaluate_method(const ChannelPair& ch, Method method, const PipelineConfig& c) {
  MethodResult m;
  m.method = method;
  m.frames = staged("beamform", [&] { return form_frames(ch, method, c); });
  m.tde = staged("tde", [&] { return estimate_displacement(m.frames, method, c); });
  m.strain = staged("strain", [&] { return lsq_strain(m.tde.displacement, c.lsq_window_fraction); });
  m.truth = ground_truth_displacement(make_deformation(c), m.strain.grid).strain;
  staged("metrics", [&] {
    const ImageGrid& g = m.strain.grid;
    m.reports = measure_strain(m.strain, m.truth, method_name(method), c);
    const int row = std::clamp(g.nearest_iz(c.esf_depth), 0, g.nz - 1);
    const int col = std::clamp(g.nearest_ix(c.esf_lateral), 0, g.nx - 1);
    m.esf_lateral = edge_spread(m.strain, Direction::lateral, LineOrientation::horizontal, row);
    m.esf_axial = edge_spread(m.strain, Direction::axial, LineOrientation::vertical, col);
    m.esf_lateral_truth = edge_spread(m.truth, Direction::lateral, LineOrientation::horizontal, row);
    m.esf_axial_truth = edge_spread(m.truth, Direction::axial, LineOrientation::vertical, col);
    return 0;
  });
  return m;
}

const MethodResult& PipelineReport::get(Method m) const {
  for (const auto& r : methods)
    if (r.method == m) return r;
  throw std::out_of_range("method not in report");
}

PipelineReport run_pipeline(const PipelineConfig& c, bool write_outputs) {
  c.validate();
  const ChannelPair ch = staged("simulate", [&] { return simulate_pair(c); });
  PipelineReport report;
  for (Method m : {Method::lf, Method::inter, Method::hf}) report.methods.push_back(evaluate_method(ch, m, c));
  if (write_outputs) staged("output", [&] {
      emit_outputs(report, c, &ch);
      return 0;
    });
  return report;
}

void emit_outputs(const PipelineReport& report, const PipelineConfig& c, const ChannelPair* ch) {
  const fs::path dir(c.output_dir);
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "config.json");
    out << json{{"config", c.to_json()}, {"provenance", PipelineConfig::provenance()}}.dump(2) << '\n';
  }
  if (ch) {
    save_channel_data(dir / "channels_pre", ch->pre);
    save_channel_data(dir / "channels_post", ch->post);
  }
  std::vector<MetricsReport> all;
  for (const auto& m : report.methods) {
    const std::string tag = method_name(m.method);
    save_frame(dir / (tag + "_pre"), m.frames.pre);
    save_frame(dir / (tag + "_post"), m.frames.post);
    save_displacement(dir / (tag + "_displacement"), m.tde.displacement);
    save_strain(dir / (tag + "_strain"), m.strain);
    write_bmode(dir / (tag + "_bmode.pgm"), m.frames.pre);
    write_pgm(dir / (tag + "_axial_displacement.pgm"), m.tde.displacement.axial(), m.tde.displacement.valid);
    write_pgm(dir / (tag + "_lateral_displacement.pgm"), m.tde.displacement.lateral(), m.tde.displacement.valid);
    write_pgm(dir / (tag + "_axial_strain.pgm"), m.strain.axial_strain, m.strain.valid);
    write_pgm(dir / (tag + "_lateral_strain.pgm"), m.strain.lateral_strain, m.strain.valid);
    write_profile_csv(dir / (tag + "_esf_lateral.csv"), m.esf_lateral);
    write_profile_csv(dir / (tag + "_esf_axial.csv"), m.esf_axial);
    all.insert(all.end(), m.reports.begin(), m.reports.end());
  }
  if (!report.methods.empty()) {
    const auto& m = report.methods.back();
    write_profile_csv(dir / "truth_esf_lateral.csv", m.esf_lateral_truth);
    write_profile_csv(dir / "truth_esf_axial.csv", m.esf_axial_truth);
  }
  write_metrics_csv(dir / "summary.csv", all);
}

}  // namespace vssa

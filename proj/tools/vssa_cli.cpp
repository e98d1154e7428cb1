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

// Command-line front end: one subcommand per processing stage plus the full
// LF / Inter. / HF comparison.
//
// Exit codes: 0 success, 2 invalid configuration or arguments, 3 stage failure.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vssa/interp.hpp"
#include "vssa/io.hpp"
#include "vssa/parallel.hpp"
#include "vssa/pipeline.hpp"

namespace fs = std::filesystem;
using namespace vssa;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitStage = 3;

struct Common {
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::string out;
  int threads = 0;

  PipelineConfig resolve() const {
    PipelineConfig c = config_path.empty() ? PipelineConfig{} : PipelineConfig::load(config_path);
    std::vector<std::string> all = overrides;
    if (seed) all.push_back("seed=" + std::to_string(*seed));
    if (!out.empty()) all.push_back("output_dir=\"" + out + "\"");
    c = PipelineConfig::with_overrides(c, all);
    c.validate();
    return c;
  }
};

Method parse_method(const std::string& s) {
  if (s == "lf") return Method::lf;
  if (s == "inter") return Method::inter;
  if (s == "hf") return Method::hf;
  throw ConfigError("unknown method '" + s + "' (expected lf, inter or hf)");
}

fs::path output_stem(const std::string& given, const PipelineConfig& c, const std::string& fallback) {
  const fs::path p = given.empty() ? fs::path(c.output_dir) / fallback : fs::path(given);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  return p;
}

template <typename F>
auto stage(const char* name, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Virtual-source synthetic aperture elastography toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  Common common;
  app.add_option("-c,--config", common.config_path, "JSON configuration file")->check(CLI::ExistingFile);
  app.add_option("-s,--set", common.overrides, "Override a setting, e.g. --set dp.smoothness_weight=0.5")
      ->take_all();
  app.add_option("--seed", common.seed, "Random seed");
  app.add_option("-o,--out", common.out, "Output directory");
  app.add_option("-j,--threads", common.threads, "Worker threads (default: VSSA_THREADS or all cores)")
      ->check(CLI::NonNegativeNumber);

  auto* simulate = app.add_subcommand("simulate", "Simulate pre/post channel data for the configured phantom");

  std::string bf_channels, bf_method = "hf", bf_output;
  auto* beamform = app.add_subcommand("beamform", "VSSA beamforming of channel data onto the LF or HF grid");
  beamform->add_option("channels", bf_channels, "Channel data stem")->required();
  beamform->add_option("-m,--method", bf_method, "lf or hf")->check(CLI::IsMember({"lf", "hf"}));
  beamform->add_option("-O,--output", bf_output, "Frame stem");

  std::string ip_frame, ip_output;
  int ip_factor = 0;
  auto* interp = app.add_subcommand("interp", "Lateral cubic-spline upsampling of a frame");
  interp->add_option("frame", ip_frame, "Frame stem")->required();
  interp->add_option("-f,--factor", ip_factor, "Upsampling factor (default: interp.factor)");
  interp->add_option("-O,--output", ip_output, "Frame stem");

  std::string td_pre, td_post, td_method = "hf", td_output;
  auto* tde = app.add_subcommand("tde", "DP and OVERWIND displacement estimation between two frames");
  tde->add_option("pre", td_pre, "Pre-deformation frame stem")->required();
  tde->add_option("post", td_post, "Post-deformation frame stem")->required();
  tde->add_option("-m,--method", td_method, "lf, inter or hf")->check(CLI::IsMember({"lf", "inter", "hf"}));
  tde->add_option("-O,--output", td_output, "Displacement stem");

  std::string st_disp, st_output;
  auto* strain = app.add_subcommand("strain", "LSQ strain of a displacement field");
  strain->add_option("displacement", st_disp, "Displacement stem")->required();
  strain->add_option("-O,--output", st_output, "Strain stem");

  std::string mt_strain, mt_label = "estimate", mt_csv;
  auto* metrics = app.add_subcommand("metrics", "CNR and error statistics against the configured deformation");
  metrics->add_option("strain", mt_strain, "Strain stem")->required();
  metrics->add_option("-l,--label", mt_label, "Label written with the reports");
  metrics->add_option("--csv", mt_csv, "Also write a CSV table here");

  auto* pipeline = app.add_subcommand("pipeline", "Simulate once and compare LF, Inter. and HF end to end");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (common.threads > 0) set_thread_count(common.threads);
    const PipelineConfig cfg = common.resolve();

    if (simulate->parsed()) {
      const ChannelPair ch = stage("simulate", [&] { return simulate_pair(cfg); });
      stage("output", [&] {
        fs::create_directories(cfg.output_dir);
        save_channel_data(fs::path(cfg.output_dir) / "channels_pre", ch.pre);
        save_channel_data(fs::path(cfg.output_dir) / "channels_post", ch.post);
        std::ofstream(fs::path(cfg.output_dir) / "config.json") << cfg.to_json().dump(2) << '\n';
        return 0;
      });
    } else if (beamform->parsed()) {
      const ChannelDataSet ch = stage("load", [&] { return load_channel_data(bf_channels); });
      const Method m = parse_method(bf_method);
      const RfFrame frame = stage("beamform", [&] {
        const ImageGrid roi = m == Method::hf ? make_roi_hf_grid(cfg) : make_roi_lf_grid(cfg);
        return das_beamform(ch, pad_depth(roi, cfg), make_beamform_config(cfg));
      });
      const fs::path stem = output_stem(bf_output, cfg, fs::path(bf_channels).filename().string() + "_" + bf_method);
      stage("output", [&] {
        save_frame(stem, frame);
        return 0;
      });
    } else if (interp->parsed()) {
      const RfFrame in = stage("load", [&] { return load_frame(ip_frame); });
      const int factor = ip_factor > 0 ? ip_factor : cfg.interp_factor;
      const RfFrame out = stage("interp", [&] { return spline_upsample(in, factor); });
      const fs::path stem = output_stem(ip_output, cfg, fs::path(ip_frame).filename().string() + "_inter");
      stage("output", [&] {
        save_frame(stem, out);
        return 0;
      });
    } else if (tde->parsed()) {
      const Method m = parse_method(td_method);
      FramePair f = stage("load", [&] { return FramePair{load_frame(td_pre), load_frame(td_post)}; });
      const TdeResult r = stage("tde", [&] {
        normalize_frames(f);
        return estimate_displacement(f, m, cfg);
      });
      const fs::path stem = output_stem(td_output, cfg, std::string(method_name(m)) + "_displacement");
      stage("output", [&] {
        save_displacement(stem, r.displacement);
        return 0;
      });
      std::printf("cost");
      for (double v : r.cost_history) std::printf(" %.10g", v);
      std::printf("\n");
    } else if (strain->parsed()) {
      const DisplacementField d = stage("load", [&] { return load_displacement(st_disp); });
      const StrainField s = stage("strain", [&] { return lsq_strain(d, cfg.lsq_window_fraction); });
      const fs::path stem = output_stem(st_output, cfg, fs::path(st_disp).filename().string() + "_strain");
      stage("output", [&] {
        save_strain(stem, s);
        return 0;
      });
    } else if (metrics->parsed()) {
      const StrainField s = stage("load", [&] { return load_strain(mt_strain); });
      const auto reports = stage("metrics", [&] {
        const StrainField truth = ground_truth_displacement(make_deformation(cfg), s.grid).strain;
        return measure_strain(s, truth, mt_label, cfg);
      });
      for (const auto& r : reports) std::cout << metrics_key_values(r) << '\n';
      if (!mt_csv.empty()) stage("output", [&] {
          write_metrics_csv(mt_csv, reports);
          return 0;
        });
    } else if (pipeline->parsed()) {
      const PipelineReport report = run_pipeline(cfg, true);
      for (const auto& m : report.methods)
        for (const auto& r : m.reports) std::cout << metrics_key_values(r) << '\n';
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const StageError& e) {
    std::cerr << "stage '" << e.stage() << "' failed: " << e.what() << '\n';
    return kExitStage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitStage;
  }
  return 0;
}

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

#include "vssa/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "vssa/beamformer.hpp"

namespace vssa {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path stem_of(const fs::path& p) {
  const auto ext = p.extension();
  return ext == ".bin" || ext == ".json" ? fs::path(p).replace_extension() : p;
}

fs::path with_ext(const fs::path& stem, const char* ext) { return fs::path(stem.string() + ext); }

class Writer {
 public:
  explicit Writer(const fs::path& path) : out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("cannot open " + path.string() + " for writing");
  }
  void f32(double v) {
    const auto u = std::bit_cast<std::uint32_t>(static_cast<float>(v));
    const char b[4] = {static_cast<char>(u & 0xff), static_cast<char>((u >> 8) & 0xff),
                       static_cast<char>((u >> 16) & 0xff), static_cast<char>((u >> 24) & 0xff)};
    out_.write(b, 4);
  }
  void byte(bool v) { out_.put(v ? 1 : 0); }
  void field(const Field& f) {
    for (Eigen::Index r = 0; r < f.rows(); ++r)
      for (Eigen::Index c = 0; c < f.cols(); ++c) f32(f(r, c));
  }
  void mask(const Mask& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) byte(m(r, c));
  }
  void close() {
    out_.close();
    if (!out_) throw std::runtime_error("write failed");
  }

 private:
  std::ofstream out_;
};

class Reader {
 public:
  Reader(const fs::path& path, std::uintmax_t expected) : in_(path, std::ios::binary) {
    if (!in_) throw FormatError("cannot open " + path.string());
    if (fs::file_size(path) != expected) throw FormatError(path.string() + ": payload size mismatch");
  }
  double f32() {
    unsigned char b[4];
    in_.read(reinterpret_cast<char*>(b), 4);
    if (!in_) throw FormatError("truncated payload");
    const std::uint32_t u = b[0] | (b[1] << 8) | (b[2] << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
    return static_cast<double>(std::bit_cast<float>(u));
  }
  bool byte() {
    const int c = in_.get();
    if (c == EOF) throw FormatError("truncated payload");
    if (c != 0 && c != 1) throw FormatError("mask byte must be 0 or 1");
    return c == 1;
  }
  Field field(int rows, int cols) {
    Field f(rows, cols);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) f(r, c) = f32();
    return f;
  }
  Mask mask(int rows, int cols) {
    Mask m(rows, cols);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) m(r, c) = byte();
    return m;
  }

 private:
  std::ifstream in_;
};

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
}

json read_json(const fs::path& path, const char* format) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  if (!j.is_object() || !j.contains("format") || j["format"] != format)
    throw FormatError(path.string() + ": expected format " + format);
  return j;
}

json grid_json(const ImageGrid& g) {
  return {{"x0", g.x0}, {"z0", g.z0}, {"dx", g.dx}, {"dz", g.dz}, {"nx", g.nx}, {"nz", g.nz}};
}

ImageGrid grid_from(const json& j) {
  try {
    return ImageGrid(j.at("x0"), j.at("z0"), j.at("dx"), j.at("dz"), j.at("nx"), j.at("nz"));
  } catch (const json::exception& e) {
    throw FormatError(std::string("grid metadata: ") + e.what());
  }
}

std::uintmax_t nodes(const ImageGrid& g) { return static_cast<std::uintmax_t>(g.nx) * g.nz; }

}  // namespace

void save_channel_data(const fs::path& path, const ChannelDataSet& data) {
  data.validate();
  const fs::path stem = stem_of(path);
  const ProbeGeometry& g = data.geometry;
  json events = json::array();
  for (const auto& ev : data.events) {
    if (ev.is_focused()) {
      const auto& f = ev.focused();
      events.push_back({{"kind", "focused"},
                        {"elements", f.elements},
                        {"focus_x", f.focus_x},
                        {"focus_z", f.focus_z},
                        {"apodization", ev.apodization}});
    } else {
      events.push_back({{"kind", "single"}, {"element", ev.single().element}, {"apodization", ev.apodization}});
    }
  }
  write_json(with_ext(stem, ".json"),
             {{"format", kChannelFormat},
              {"geometry",
               {{"element_count", g.element_count()},
                {"pitch", g.pitch()},
                {"center_frequency", g.center_frequency()},
                {"sampling_frequency", g.sampling_frequency()},
                {"sound_speed", g.sound_speed()}}},
              {"t0", data.t0},
              {"event_count", data.event_count()},
              {"sample_count", data.sample_count()},
              {"events", events}});
  Writer w(with_ext(stem, ".bin"));
  for (const Field& block : data.samples)
    for (Eigen::Index j = 0; j < block.cols(); ++j)
      for (Eigen::Index t = 0; t < block.rows(); ++t) w.f32(block(t, j));
  w.close();
}

ChannelDataSet load_channel_data(const fs::path& path) {
  const fs::path stem = stem_of(path);
  const json j = read_json(with_ext(stem, ".json"), kChannelFormat);
  try {
    const json& jg = j.at("geometry");
    ChannelDataSet data{ProbeGeometry(jg.at("element_count"), jg.at("pitch"), jg.at("center_frequency"),
                                      jg.at("sampling_frequency"), jg.at("sound_speed")),
                        {},
                        {},
                        j.at("t0")};
    for (const json& je : j.at("events")) {
      TransmitEvent ev;
      if (je.at("kind") == "focused") {
        FocusedAperture f;
        f.elements = je.at("elements").get<std::vector<int>>();
        f.focus_x = je.at("focus_x");
        f.focus_z = je.at("focus_z");
        ev.kind = f;
      } else if (je.at("kind") == "single") {
        ev.kind = SingleElement{je.at("element").get<int>()};
      } else {
        throw FormatError("unknown transmit kind");
      }
      ev.apodization = je.at("apodization").get<std::vector<double>>();
      data.events.push_back(std::move(ev));
    }
    const int ne = data.geometry.element_count();
    const int nt = j.at("sample_count");
    if (static_cast<int>(data.events.size()) != j.at("event_count").get<int>() || nt < 1)
      throw FormatError("inconsistent channel dimensions");
    Reader r(with_ext(stem, ".bin"), 4ull * data.events.size() * ne * nt);
    for (std::size_t e = 0; e < data.events.size(); ++e) {
      Field block(nt, ne);
      for (int jj = 0; jj < ne; ++jj)
        for (int t = 0; t < nt; ++t) block(t, jj) = r.f32();
      data.samples.push_back(std::move(block));
    }
    data.validate();
    return data;
  } catch (const json::exception& e) {
    throw FormatError(std::string("channel metadata: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("channel data: ") + e.what());
  }
}

void save_frame(const fs::path& path, const RfFrame& frame) {
  frame.validate();
  const fs::path stem = stem_of(path);
  write_json(with_ext(stem, ".json"), {{"format", kFrameFormat}, {"grid", grid_json(frame.grid)}});
  Writer w(with_ext(stem, ".bin"));
  w.field(frame.values);
  w.mask(frame.valid);
  w.close();
}

RfFrame load_frame(const fs::path& path) {
  const fs::path stem = stem_of(path);
  const json j = read_json(with_ext(stem, ".json"), kFrameFormat);
  const ImageGrid g = grid_from(j.at("grid"));
  Reader r(with_ext(stem, ".bin"), 5 * nodes(g));
  RfFrame f(g);
  f.values = r.field(g.nz, g.nx);
  f.valid = r.mask(g.nz, g.nx);
  try {
    f.validate();
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
  return f;
}

void save_displacement(const fs::path& path, const DisplacementField& d) {
  const fs::path stem = stem_of(path);
  write_json(with_ext(stem, ".json"),
             {{"format", kDisplacementFormat},
              {"grid", grid_json(d.grid)},
              {"arrays", {"axial_int", "lateral_int", "axial_sub", "lateral_sub", "valid"}}});
  Writer w(with_ext(stem, ".bin"));
  w.field(d.axial_int);
  w.field(d.lateral_int);
  w.field(d.axial_sub);
  w.field(d.lateral_sub);
  w.mask(d.valid);
  w.close();
}

DisplacementField load_displacement(const fs::path& path) {
  const fs::path stem = stem_of(path);
  const json j = read_json(with_ext(stem, ".json"), kDisplacementFormat);
  const ImageGrid g = grid_from(j.at("grid"));
  Reader r(with_ext(stem, ".bin"), 17 * nodes(g));
  DisplacementField d(g);
  d.axial_int = r.field(g.nz, g.nx);
  d.lateral_int = r.field(g.nz, g.nx);
  d.axial_sub = r.field(g.nz, g.nx);
  d.lateral_sub = r.field(g.nz, g.nx);
  d.valid = r.mask(g.nz, g.nx);
  return d;
}

void save_strain(const fs::path& path, const StrainField& s) {
  const fs::path stem = stem_of(path);
  write_json(with_ext(stem, ".json"),
             {{"format", kStrainFormat},
              {"grid", grid_json(s.grid)},
              {"provenance", s.provenance},
              {"arrays", {"axial_strain", "lateral_strain", "valid"}}});
  Writer w(with_ext(stem, ".bin"));
  w.field(s.axial_strain);
  w.field(s.lateral_strain);
  w.mask(s.valid);
  w.close();
}

StrainField load_strain(const fs::path& path) {
  const fs::path stem = stem_of(path);
  const json j = read_json(with_ext(stem, ".json"), kStrainFormat);
  const ImageGrid g = grid_from(j.at("grid"));
  Reader r(with_ext(stem, ".bin"), 9 * nodes(g));
  StrainField s(g);
  s.axial_strain = r.field(g.nz, g.nx);
  s.lateral_strain = r.field(g.nz, g.nx);
  s.valid = r.mask(g.nz, g.nx);
  s.provenance = j.value("provenance", "");
  return s;
}

void write_pgm(const fs::path& path, const Field& values, const Mask& valid) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const double v = values.data()[i];
    if (!valid.data()[i] || !std::isfinite(v)) continue;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (!std::isfinite(lo)) lo = hi = 0.0;
  write_pgm(path, values, valid, lo, hi);
}

void write_pgm(const fs::path& path, const Field& values, const Mask& valid, double lo, double hi) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << "P5\n" << values.cols() << ' ' << values.rows() << "\n65535\n";
  const double span = hi > lo ? hi - lo : 1.0;
  for (Eigen::Index r = 0; r < values.rows(); ++r)
    for (Eigen::Index c = 0; c < values.cols(); ++c) {
      const double v = values(r, c);
      std::uint16_t q = 0;
      if (valid(r, c) && std::isfinite(v)) q = static_cast<std::uint16_t>(std::lround(std::clamp((v - lo) / span, 0.0, 1.0) * 65535.0));
      out.put(static_cast<char>(q >> 8));
      out.put(static_cast<char>(q & 0xff));
    }
  write_json(fs::path(path.string() + ".json"), {{"min", lo}, {"max", hi}, {"width", values.cols()}, {"height", values.rows()}});
}

void write_bmode(const fs::path& path, const RfFrame& frame) {
  const RfFrame env = envelope(frame);
  const Field db = log_compress(env, 60.0);
  write_pgm(path, db, Mask::Constant(db.rows(), db.cols(), true), -60.0, 0.0);
}

void write_profile_csv(const fs::path& path, const StrainProfile& profile) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << "position_m,strain\n" << std::setprecision(10);
  for (std::size_t k = 0; k < profile.position.size(); ++k) {
    out << profile.position[k] << ',';
    if (std::isfinite(profile.value[k])) out << profile.value[k];
    out << '\n';
  }
}

void write_metrics_csv(const fs::path& path, const std::vector<MetricsReport>& reports) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << "method,direction,window,cnr_db,rmse_percent,me,ve,nodes\n" << std::setprecision(8);
  for (const auto& r : reports) {
    out << r.label << ',' << (r.direction == Direction::axial ? "axial" : "lateral") << ',' << r.window_length << ',';
    if (r.cnr_contrast_zero)
      out << "-inf";
    else if (std::isnan(r.cnr_db))
      out << "undefined";
    else
      out << r.cnr_db;
    out << ',';
    if (r.errors.rmse_percent)
      out << *r.errors.rmse_percent;
    else
      out << "undefined";
    out << ',' << r.errors.me << ',' << r.errors.ve << ',' << r.errors.count << '\n';
  }
}

std::string metrics_key_values(const MetricsReport& r) {
  std::ostringstream out;
  out << std::setprecision(10);
  const char* dir = r.direction == Direction::axial ? "axial" : "lateral";
  auto rect = [&](const char* name, const NodeRect& q) {
    out << name << ".iz0=" << q.iz0 << '\n'
        << name << ".ix0=" << q.ix0 << '\n'
        << name << ".nz=" << q.nz << '\n'
        << name << ".nx=" << q.nx << '\n';
  };
  out << "label=" << r.label << '\n' << "direction=" << dir << '\n' << "window=" << r.window_length << '\n';
  rect("target", r.target);
  rect("background", r.background);
  out << "cnr_db=";
  if (r.cnr_contrast_zero)
    out << "-inf";
  else if (std::isnan(r.cnr_db))
    out << "undefined";
  else
    out << r.cnr_db;
  out << "\nrmse_percent=";
  if (r.errors.rmse_percent)
    out << *r.errors.rmse_percent;
  else
    out << "undefined";
  out << "\nme=" << r.errors.me << "\nve=" << r.errors.ve << "\nnodes=" << r.errors.count << '\n';
  return out.str();
}

}  // namespace vssa

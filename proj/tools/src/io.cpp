// Copyright 2026 The clockrobust Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "clockrobust/tools/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <openssl/evp.h>

namespace clockrobust::tools {

std::string format_double(double v) {
  if (!std::isfinite(v)) return {};
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string schedule_csv(const ControlSchedule& schedule) {
  std::string out = "control,slice,amplitude\n";
  for (int k = 0; k < schedule.num_controls(); ++k) {
    for (int s = 0; s < schedule.slices(); ++s) {
      out += std::to_string(k) + "," + std::to_string(s) + "," +
             format_double(schedule.amplitude(k, s)) + "\n";
    }
  }
  return out;
}

RMatrix read_schedule_csv(const std::filesystem::path& path) {
  std::istringstream in(read_text_file(path));
  std::string line;
  if (!std::getline(in, line) || line.rfind("control,slice,amplitude", 0) != 0) {
    throw IoError(path.string() + ": expected header control,slice,amplitude");
  }
  std::map<std::pair<int, int>, double> cells;
  int controls = 0;
  int slices = 0;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    int k = -1;
    int s = -1;
    double v = 0.0;
    const char* p = line.data();
    const char* end = line.data() + line.size();
    auto r1 = std::from_chars(p, end, k);
    bool ok = r1.ec == std::errc() && r1.ptr < end && *r1.ptr == ',';
    if (ok) {
      auto r2 = std::from_chars(r1.ptr + 1, end, s);
      ok = r2.ec == std::errc() && r2.ptr < end && *r2.ptr == ',';
      if (ok) {
        auto r3 = std::from_chars(r2.ptr + 1, end, v);
        ok = r3.ec == std::errc() && r3.ptr == end;
      }
    }
    if (!ok || k < 0 || s < 0 || !std::isfinite(v)) {
      throw IoError(path.string() + ":" + std::to_string(lineno) + ": malformed row");
    }
    if (!cells.emplace(std::pair{k, s}, v).second) {
      throw IoError(path.string() + ":" + std::to_string(lineno) + ": duplicate cell");
    }
    controls = std::max(controls, k + 1);
    slices = std::max(slices, s + 1);
  }
  if (cells.size() != static_cast<std::size_t>(controls) * static_cast<std::size_t>(slices) ||
      cells.empty()) {
    throw IoError(path.string() + ": schedule is not a complete controls x slices table");
  }
  RMatrix u(controls, slices);
  for (const auto& [key, v] : cells) u(key.first, key.second) = v;
  return u;
}

std::string trace_csv(const OptimizationTrace& trace) {
  std::string out = "iteration,J0,objective,tested_error,step,gradient_evaluations\n";
  for (const auto& r : trace.records) {
    out += std::to_string(r.iteration) + "," + format_double(r.j0) + "," +
           format_double(r.objective) + "," + format_double(r.tested_error) + "," +
           format_double(r.step) + "," + std::to_string(r.gradient_evaluations) + "\n";
  }
  return out;
}

std::string histogram_csv(const std::vector<HistogramBin>& bins) {
  std::string out = "bin_low,bin_high,count\n";
  for (const auto& b : bins) {
    out += format_double(b.low) + "," + format_double(b.high) + "," + std::to_string(b.count) +
           "\n";
  }
  return out;
}

std::string sweep_csv(const SweepSurface& surface) {
  std::string out = "tau1,tau2,error\n";
  for (std::size_t i = 0; i < surface.tau1.size(); ++i) {
    for (std::size_t j = 0; j < surface.tau2.size(); ++j) {
      out += format_double(surface.tau1[i]) + "," + format_double(surface.tau2[j]) + "," +
             format_double(surface.errors(static_cast<Eigen::Index>(i),
                                          static_cast<Eigen::Index>(j))) +
             "\n";
    }
  }
  return out;
}

std::string smoothness_csv(const RVector& smoothness) {
  std::string out = "control,value\n";
  for (Eigen::Index k = 0; k < smoothness.size(); ++k) {
    out += std::to_string(k) + "," + format_double(smoothness(k)) + "\n";
  }
  return out;
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

std::string sha256_file(const std::filesystem::path& path) {
  return sha256_hex(read_text_file(path));
}

}  // namespace clockrobust::tools

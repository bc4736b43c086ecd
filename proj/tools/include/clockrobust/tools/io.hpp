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

#ifndef CLOCKROBUST_TOOLS_IO_HPP
#define CLOCKROBUST_TOOLS_IO_HPP

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "clockrobust/montecarlo.hpp"
#include "clockrobust/optimizers.hpp"
#include "clockrobust/system.hpp"

namespace clockrobust::tools {

/// Filesystem failure (unwritable directory, unreadable input file).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest text that parses back to the same double; "nan"/"inf" never
/// appear because non-finite values are written as empty fields.
std::string format_double(double v);

/// Writes `content` to `path` atomically enough for our purposes (truncate +
/// write + check), creating parent directories. Throws IoError.
void write_text_file(const std::filesystem::path& path, const std::string& content);

std::string read_text_file(const std::filesystem::path& path);

/// control,slice,amplitude with 0-based indices.
std::string schedule_csv(const ControlSchedule& schedule);
/// Inverse of schedule_csv; throws IoError on unreadable or malformed files.
RMatrix read_schedule_csv(const std::filesystem::path& path);

/// iteration,J0,objective,tested_error,step,gradient_evaluations (tested_error
/// empty when not tested).
std::string trace_csv(const OptimizationTrace& trace);

/// bin_low,bin_high,count
std::string histogram_csv(const std::vector<HistogramBin>& bins);

/// tau1,tau2,error
std::string sweep_csv(const SweepSurface& surface);

/// control,value
std::string smoothness_csv(const RVector& smoothness);

/// Lower-case hex SHA-256 of a byte string / file.
std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

}  // namespace clockrobust::tools

#endif  // CLOCKROBUST_TOOLS_IO_HPP

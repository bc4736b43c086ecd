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

#include "clockrobust/presets.hpp"

#include <numbers>
#include <random>

#include "clockrobust/operator_expr.hpp"
#include "clockrobust/random.hpp"

namespace clockrobust::presets {

QuantumSystem two_qubit_system() {
  CMatrix drift = kCouplingZZ * build_operator("Z Z");
  std::vector<CMatrix> controls{
      build_operator("(SP + SM) I"),
      build_operator("i(SP - SM) I"),
      build_operator("I (SP + SM)"),
      build_operator("I i(SP - SM)"),
  };
  return QuantumSystem(std::move(drift), std::move(controls), {0, 0, 1, 1});
}

CMatrix cnot_target() {
  return std::polar(1.0, std::numbers::pi / 4.0) * named_gate("CNOT").value();
}

ClockNoiseModel clock_noise(bool with_jitter, std::uint64_t seed) {
  ClockNoiseModel m;
  m.channel_latency = {UniformRange{0.0, kLatencyMax}, UniformRange{0.0, kLatencyMax}};
  m.jitter_half_width = with_jitter ? kJitterHalfWidth : 0.0;
  m.seed = seed;
  return m;
}

ControlSchedule random_schedule(int controls, int slices, double sample_period, double half_width,
                                std::uint64_t seed) {
  std::mt19937_64 engine(derive_seed(seed, 0));
  RMatrix u(controls, slices);
  // Column-major fill keeps the layout independent of control count per slice.
  for (int s = 0; s < slices; ++s) {
    for (int k = 0; k < controls; ++k) u(k, s) = uniform(engine, -half_width, half_width);
  }
  return ControlSchedule(sample_period, std::move(u));
}

}  // namespace clockrobust::presets

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

#ifndef CLOCKROBUST_PRESETS_HPP
#define CLOCKROBUST_PRESETS_HPP

#include <cstdint>

#include "clockrobust/noise.hpp"
#include "clockrobust/system.hpp"

namespace clockrobust::presets {

/// ZZ coupling 2 pi x 10 MHz in rad/ns.
inline constexpr double kCouplingZZ = 0.06283185307179587;
inline constexpr double kSamplePeriod = 1.0;
inline constexpr int kSlices = 50;
inline constexpr double kLatencyMax = 0.4;
inline constexpr double kJitterHalfWidth = 0.05;
/// Half-width of the i.i.d. uniform initial guess, 2 pi x 0.02 rad/ns.
inline constexpr double kInitialAmplitude = 0.12566370614359174;

/// Two qubits, H0 = g Z(x)Z, controls u_k sigma_k^+ + h.c. split into real
/// and imaginary parts: {X1, -Y1, X2, -Y2} on channels {0, 0, 1, 1}.
QuantumSystem two_qubit_system();

/// e^{i pi/4} CNOT, which has unit determinant.
CMatrix cnot_target();

/// Both channels U(0, 0.4) ns latency; jitter U(-0.05, 0.05) ns when enabled.
ClockNoiseModel clock_noise(bool with_jitter, std::uint64_t seed = 0);

/// i.i.d. uniform amplitudes in [-a, a].
ControlSchedule random_schedule(int controls, int slices, double sample_period, double half_width,
                                std::uint64_t seed);

}  // namespace clockrobust::presets

#endif  // CLOCKROBUST_PRESETS_HPP

/*
   Copyright 2026 The mdlang Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <complex>
#include <limits>

namespace mdl {

using cd = std::complex<double>;

constexpr double kHbar = 1.054571817e-34;
constexpr double kC0 = 299792458.0;
constexpr double kEps0 = 8.8541878128e-12;
constexpr double kMu0 = 1.25663706212e-6;
constexpr double kBoltzmann = 1.380649e-23;
constexpr double kElementaryCharge = 1.602176634e-19;
constexpr double kPi = 3.14159265358979323846;

// lifetime marker for a level without any decay channel
constexpr double kNoDecay = std::numeric_limits<double>::infinity();

constexpr int kMaxLevels = 6;

} // namespace mdl

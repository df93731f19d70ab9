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

#include <random>

#include "mdl/diffusion_verify.hpp"
#include "mdl/langevin_noise.hpp"
#include "mdl/quantum_model.hpp"

namespace mdl::testing {

inline DensityMatrix random_density(std::mt19937_64& rng, int n)
{
    return random_density_matrix(rng, n);
}

inline QuantumSystem random_three_level(std::mt19937_64& rng, double unit = 1e12,
                                        double omega = -1.0)
{
    return random_three_level_system(rng, unit, omega);
}

inline double max_abs(const ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); }

} // namespace mdl::testing

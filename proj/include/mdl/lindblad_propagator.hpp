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

#include <cstdint>

#include "mdl/langevin_noise.hpp"
#include "mdl/quantum_model.hpp"
#include "mdl/random.hpp"

namespace mdl {

/** rho <- U rho U^dag with the Cayley approximant of exp(-i H dt / hbar). */
DensityMatrix coherent_substep(const DensityMatrix& rho, const ComplexMatrix& h, double dt);

/** Exact relaxation over dt: rate-matrix exponential and exp(-gamma dt). */
DensityMatrix dissipative_substep(const DensityMatrix& rho, const QuantumSystem& sys, double dt);

/** Smallest eigenvalue of a Hermitian matrix (closed form for N <= 3). */
double min_eigenvalue(const DensityMatrix& rho);

/** Where a cell's draws come from. */
struct DrawKey {
    const NoiseStream* stream = nullptr;
    std::uint32_t cell = 0;
    std::uint64_t step = 0;
};

/**
 * Precomputed per-run propagator for one quantum system and time step:
 * half-step relaxation map, Hamiltonian pieces and noise settings.
 */
class Propagator {
public:
    Propagator(const QuantumSystem& sys, double dt, NoiseScheme scheme,
               ThreeLevelMap map = {});

    const QuantumSystem& system() const { return sys_; }
    double dt() const { return dt_; }
    NoiseScheme scheme() const { return scheme_; }
    int draws_per_step() const;

    void coherent(DensityMatrix& rho, double e_z) const;
    void dissipative_half(DensityMatrix& rho) const;
    /** rho += sqrt(dt) F(rho) for the configured scheme (Ito, pre-kick state). */
    void fluctuation(DensityMatrix& rho, double e_z, double n_cell, const DrawKey& key,
                     NoiseDiagnostics& diag) const;
    /** Half dissipative, coherent, half dissipative, fluctuation kick. */
    void full_step(DensityMatrix& rho, double e_z, double n_cell, const DrawKey& key,
                   NoiseDiagnostics& diag) const;

private:
    template <int N>
    void full_step_fixed(DensityMatrix& rho, double e_z, double n_cell, const DrawKey& key,
                         NoiseDiagnostics& diag) const;

    QuantumSystem sys_;
    double dt_;
    NoiseScheme scheme_;
    ThreeLevelMap map_;
    int n_;
    ComplexMatrix h0_;           // diag(eps) - hbar Omega
    ComplexMatrix mu_;           // dipole operator
    RealMatrix pop_map_;         // exp(R dt/2)
    RealMatrix coh_decay_;       // exp(-gamma dt/2)
};

/** Applies one fluctuation kick with the given scheme (free-function form). */
DensityMatrix fluctuation_substep(const DensityMatrix& rho, const QuantumSystem& sys,
                                  NoiseScheme scheme, double n_cell, double e_z, double dt,
                                  const DrawKey& key, NoiseDiagnostics& diag,
                                  ThreeLevelMap map = {});

} // namespace mdl

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
#include <string>
#include <vector>

#include "json.hpp"

namespace mdl {

struct CheckResult {
    std::string name;
    bool pass = false;
    double value = 0.0;       // measured quantity or worst residual
    double tolerance = 0.0;
    std::string detail;
};

struct SuiteReport {
    std::string suite;
    std::vector<CheckResult> checks;

    bool pass() const;
    void add(std::string name, bool pass, double value, double tolerance, std::string detail = "");
    nlohmann::ordered_json to_json() const;
};

/**
 * B B^T against the c-number diffusion matrix for random states, exact
 * second moments of the full fluctuation factor, block factorizations, and the
 * Einstein relation on a subset of the states.
 */
SuiteReport verify_diffusion(int states, std::uint64_t seed = 1);

/**
 * Monte Carlo moments: full fluctuation vector within 3 sigma of D at
 * full_draws; reduced-scheme variances within 5% at reduced_draws.
 */
SuiteReport verify_noise_stats(long full_draws, long reduced_draws, std::uint64_t seed = 1);

struct PulseSpeedResult {
    double measured = 0.0, expected = 0.0;
};
struct RabiResult {
    double measured = 0.0, expected = 0.0;
    int periods = 0;
};
struct ConvergenceResult {
    std::vector<double> dt, error;
    double order = 0.0;
};

/** Group speed of a Gaussian pulse at the given resolution and Courant number. */
PulseSpeedResult free_space_pulse_speed(double cells_per_wavelength, double courant,
                                        double eps_r);
/** Largest relative drift of the leapfrog energy in a closed lossless cavity. */
double cavity_energy_drift(long steps);
/** Resonantly driven two-level cell; Rabi frequency from the population minima. */
RabiResult two_level_rabi(int periods, double rabi_over_omega, int steps_per_period);
/** Error of rho(T) against a fine reference for dt, dt/2, dt/4; fitted order. */
ConvergenceResult driven_cell_convergence();

/** Pulse speed, energy conservation, Rabi frequency and dt convergence. */
SuiteReport verify_solver(long energy_steps = 100000);

} // namespace mdl

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

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mdl/constants.hpp"

namespace mdl {

using ComplexMatrix =
    Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxLevels, kMaxLevels>;
using RealMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxLevels, kMaxLevels>;
using DensityMatrix = ComplexMatrix;

/** Raw description of an N-level medium as read from a config. */
struct QuantumSystemParams {
    std::vector<std::string> level_names;
    std::vector<double> energies;      // J
    RealMatrix dipole_z;               // C m
    RealMatrix tunneling;              // rad/s
    RealMatrix scatter_rates;          // 1/s, (i, j) is the rate j -> i
    RealMatrix pure_dephasing;         // 1/s
    double carrier_density = 0.0;      // 1/m^3
    double period_length = 0.0;        // m
};

/**
 * Validated, immutable N-level system. Energies are shifted so that the
 * lowest level sits at zero; dephasing rates are precomputed.
 */
class QuantumSystem {
public:
    explicit QuantumSystem(QuantumSystemParams p);

    int num_levels() const { return n_; }
    const std::vector<std::string>& level_names() const { return p_.level_names; }
    const std::vector<double>& energies() const { return p_.energies; }
    const RealMatrix& dipole_z() const { return p_.dipole_z; }
    const RealMatrix& tunneling() const { return p_.tunneling; }
    const RealMatrix& scatter_rates() const { return p_.scatter_rates; }
    const RealMatrix& pure_dephasing() const { return p_.pure_dephasing; }
    double carrier_density() const { return p_.carrier_density; }
    double period_length() const { return p_.period_length; }
    const QuantumSystemParams& params() const { return p_; }

    double rate(int i, int j) const { return p_.scatter_rates(i, j); }
    /** 1/tau_j, sum of all exit rates of level j. */
    double inverse_lifetime(int j) const { return inv_tau_[j]; }
    /** gamma_ij including pure dephasing; zero on the diagonal. */
    double gamma(int i, int j) const { return gamma_(i, j); }
    const RealMatrix& gamma_matrix() const { return gamma_; }
    /** Index of a level by name; throws ConfigError if absent. */
    int level_index(const std::string& name) const;
    double max_rate() const;

private:
    QuantumSystemParams p_;
    int n_ = 0;
    std::vector<double> inv_tau_;
    RealMatrix gamma_;
};

double dephasing_rate(double tau_i, double tau_j, double gamma_p);

/** H(E) = diag(eps) - hbar Omega - mu_z E. */
ComplexMatrix coherent_generator(const QuantumSystem& sys, double e_z);

ComplexMatrix dissipator(const QuantumSystem& sys, const DensityMatrix& rho);

/** n_3D tr(mu_z rho), C/m^2. */
double macroscopic_polarization(const QuantumSystem& sys, const DensityMatrix& rho);

/** Two-level helper: ground at 0, excited at hbar*omega0. */
QuantumSystem two_level_system(double omega0, double dipole, double t1, double t2,
                               double carrier_density);

} // namespace mdl

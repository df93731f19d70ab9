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

#include "mdl/quantum_model.hpp"

#include <algorithm>
#include <cmath>

#include "mdl/errors.hpp"

namespace mdl {

namespace {

void check_square(const RealMatrix& m, int n, const char* what)
{
    if (m.rows() != n || m.cols() != n)
        throw ConfigError(std::string(what) + ": expected " + std::to_string(n) +
                          "x" + std::to_string(n) + " matrix");
    if (!m.allFinite())
        throw ConfigError(std::string(what) + ": non-finite entry");
}

} // namespace

QuantumSystem::QuantumSystem(QuantumSystemParams p) : p_(std::move(p))
{
    n_ = static_cast<int>(p_.energies.size());
    if (n_ < 2 || n_ > kMaxLevels)
        throw ConfigError("quantum system: number of levels must be in [2, " +
                          std::to_string(kMaxLevels) + "]");
    if (p_.level_names.empty()) {
        for (int i = 0; i < n_; ++i)
            p_.level_names.push_back(std::to_string(i));
    }
    if (static_cast<int>(p_.level_names.size()) != n_)
        throw ConfigError("quantum system: level_names size mismatch");
    check_square(p_.dipole_z, n_, "dipole_z");
    check_square(p_.tunneling, n_, "tunneling");
    check_square(p_.scatter_rates, n_, "scatter_rates");
    check_square(p_.pure_dephasing, n_, "pure_dephasing");
    for (double e : p_.energies)
        if (!std::isfinite(e))
            throw ConfigError("quantum system: non-finite energy");
    if (!(p_.carrier_density >= 0.0) || !std::isfinite(p_.carrier_density))
        throw ConfigError("quantum system: carrier_density must be >= 0");

    for (int i = 0; i < n_; ++i) {
        if (p_.dipole_z(i, i) != 0.0 || p_.tunneling(i, i) != 0.0)
            throw ConfigError("quantum system: dipole/tunneling diagonal must be 0");
        if (p_.scatter_rates(i, i) != 0.0 || p_.pure_dephasing(i, i) != 0.0)
            throw ConfigError("quantum system: rate diagonal must be 0");
        for (int j = 0; j < n_; ++j) {
            if (p_.dipole_z(i, j) != p_.dipole_z(j, i))
                throw ConfigError("quantum system: dipole_z not symmetric");
            if (p_.tunneling(i, j) != p_.tunneling(j, i))
                throw ConfigError("quantum system: tunneling not symmetric");
            if (p_.pure_dephasing(i, j) != p_.pure_dephasing(j, i))
                throw ConfigError("quantum system: pure_dephasing not symmetric");
            if (p_.scatter_rates(i, j) < 0.0 || p_.pure_dephasing(i, j) < 0.0)
                throw ConfigError("quantum system: negative rate");
        }
    }

    const double e0 = *std::min_element(p_.energies.begin(), p_.energies.end());
    for (double& e : p_.energies)
        e -= e0;

    inv_tau_.assign(n_, 0.0);
    for (int j = 0; j < n_; ++j)
        for (int i = 0; i < n_; ++i)
            if (i != j)
                inv_tau_[j] += p_.scatter_rates(i, j);

    gamma_ = RealMatrix::Zero(n_, n_);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
            if (i != j)
                gamma_(i, j) = 0.5 * (inv_tau_[i] + inv_tau_[j]) + p_.pure_dephasing(i, j);
}

int QuantumSystem::level_index(const std::string& name) const
{
    for (int i = 0; i < n_; ++i)
        if (p_.level_names[i] == name)
            return i;
    throw ConfigError("unknown level name '" + name + "'");
}

double QuantumSystem::max_rate() const
{
    double m = 0.0;
    for (int j = 0; j < n_; ++j)
        m = std::max(m, inv_tau_[j]);
    return std::max(m, gamma_.maxCoeff());
}

double dephasing_rate(double tau_i, double tau_j, double gamma_p)
{
    if (std::isnan(tau_i) || std::isnan(tau_j) || tau_i <= 0.0 || tau_j <= 0.0)
        throw DomainError("dephasing_rate: lifetimes must be positive");
    if (!(gamma_p >= 0.0))
        throw DomainError("dephasing_rate: pure dephasing must be >= 0");
    return 0.5 * (1.0 / tau_i + 1.0 / tau_j) + gamma_p;
}

ComplexMatrix coherent_generator(const QuantumSystem& sys, double e_z)
{
    const int n = sys.num_levels();
    ComplexMatrix h(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            h(i, j) = -kHbar * sys.tunneling()(i, j) - sys.dipole_z()(i, j) * e_z;
    for (int i = 0; i < n; ++i)
        h(i, i) += sys.energies()[i];
    return h;
}

ComplexMatrix dissipator(const QuantumSystem& sys, const DensityMatrix& rho)
{
    const int n = sys.num_levels();
    ComplexMatrix d(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j)
            d(i, j) = (i == j) ? cd(0.0) : -sys.gamma(i, j) * rho(i, j);
    }
    // pairwise flows so the trace cancels term by term
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double flow = sys.rate(i, j) * rho(j, j).real() -
                                sys.rate(j, i) * rho(i, i).real();
            d(i, i) += flow;
            d(j, j) -= flow;
        }
    }
    return d;
}

double macroscopic_polarization(const QuantumSystem& sys, const DensityMatrix& rho)
{
    const int n = sys.num_levels();
    double s = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            s += sys.dipole_z()(i, j) * (rho(i, j).real() + rho(j, i).real());
    return sys.carrier_density() * s;
}

QuantumSystem two_level_system(double omega0, double dipole, double t1, double t2,
                               double carrier_density)
{
    QuantumSystemParams p;
    p.level_names = {"g", "e"};
    p.energies = {0.0, kHbar * omega0};
    p.dipole_z = RealMatrix::Zero(2, 2);
    p.dipole_z(0, 1) = p.dipole_z(1, 0) = dipole;
    p.tunneling = RealMatrix::Zero(2, 2);
    p.scatter_rates = RealMatrix::Zero(2, 2);
    if (std::isfinite(t1)) {
        if (t1 <= 0.0)
            throw DomainError("two_level_system: t1 must be positive");
        p.scatter_rates(0, 1) = 1.0 / t1;
    }
    p.pure_dephasing = RealMatrix::Zero(2, 2);
    const double inv_t1 = std::isfinite(t1) ? 1.0 / t1 : 0.0;
    if (std::isfinite(t2)) {
        const double gp = 1.0 / t2 - 0.5 * inv_t1;
        if (gp < 0.0)
            throw DomainError("two_level_system: t2 exceeds 2 t1");
        p.pure_dephasing(0, 1) = p.pure_dephasing(1, 0) = gp;
    }
    p.carrier_density = carrier_density;
    return QuantumSystem(std::move(p));
}

} // namespace mdl

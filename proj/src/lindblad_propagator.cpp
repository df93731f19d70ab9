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

#include "mdl/lindblad_propagator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "mdl/errors.hpp"

namespace mdl {

namespace {

RealMatrix rate_matrix(const QuantumSystem& sys)
{
    const int n = sys.num_levels();
    RealMatrix r = RealMatrix::Zero(n, n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i)
            if (i != j)
                r(i, j) = sys.rate(i, j);
        r(j, j) = -sys.inverse_lifetime(j);
    }
    return r;
}

RealMatrix population_map(const QuantumSystem& sys, double dt)
{
    const int n = sys.num_levels();
    const Eigen::MatrixXd r = rate_matrix(sys) * dt;
    Eigen::MatrixXd p = r.exp();
    // columns of a stochastic map sum to one; remove rounding drift
    for (int j = 0; j < n; ++j) {
        const double s = p.col(j).sum();
        p(j, j) += 1.0 - s;
    }
    return p;
}

template <int N, class M>
auto fixed_block(M& m)
{
    if constexpr (N == Eigen::Dynamic)
        return m.topLeftCorner(m.rows(), m.cols());
    else
        return m.template topLeftCorner<N, N>();
}

template <int N>
using CMat = std::conditional_t<N == Eigen::Dynamic, ComplexMatrix, Eigen::Matrix<cd, N, N>>;

} // namespace

DensityMatrix coherent_substep(const DensityMatrix& rho, const ComplexMatrix& h, double dt)
{
    const int n = static_cast<int>(rho.rows());
    if (h.rows() != n || h.cols() != n)
        throw DomainError("coherent_substep: dimension mismatch");
    const ComplexMatrix a = ComplexMatrix::Identity(n, n) + cd(0.0, 0.5 * dt / kHbar) * h;
    Eigen::PartialPivLU<ComplexMatrix> lu(a);
    const ComplexMatrix u = lu.solve(ComplexMatrix(a.adjoint()));
    if (!u.allFinite())
        throw InvariantViolation("coherent_substep: Cayley solve failed");
    return u * rho * u.adjoint();
}

DensityMatrix dissipative_substep(const DensityMatrix& rho, const QuantumSystem& sys, double dt)
{
    const int n = sys.num_levels();
    const RealMatrix p = population_map(sys, dt);
    DensityMatrix out = rho;
    Eigen::VectorXd pop(n);
    for (int i = 0; i < n; ++i)
        pop(i) = rho(i, i).real();
    const Eigen::VectorXd np = p * pop;
    for (int i = 0; i < n; ++i) {
        out(i, i) = np(i);
        for (int j = 0; j < n; ++j)
            if (i != j)
                out(i, j) = rho(i, j) * std::exp(-sys.gamma(i, j) * dt);
    }
    return out;
}

double min_eigenvalue(const DensityMatrix& rho)
{
    const int n = static_cast<int>(rho.rows());
    if (n == 1)
        return rho(0, 0).real();
    if (n == 2) {
        const double a = rho(0, 0).real(), d = rho(1, 1).real();
        return 0.5 * (a + d) - std::sqrt(0.25 * (a - d) * (a - d) + std::norm(rho(0, 1)));
    }
    if (n == 3) {
        const double r00 = rho(0, 0).real(), r11 = rho(1, 1).real(), r22 = rho(2, 2).real();
        const double n01 = std::norm(rho(0, 1)), n02 = std::norm(rho(0, 2));
        const double n12 = std::norm(rho(1, 2));
        const double a = r00 + r11 + r22;
        const double b = r00 * r11 - n01 + r00 * r22 - n02 + r11 * r22 - n12;
        const double c = r00 * r11 * r22 + 2.0 * (rho(0, 1) * rho(1, 2) * rho(2, 0)).real() -
                         r00 * n12 - r11 * n02 - r22 * n01;
        const double p = b - a * a / 3.0;
        const double q = -2.0 * a * a * a / 27.0 + a * b / 3.0 - c;
        if (p >= 0.0)
            return a / 3.0;
        const double m = 2.0 * std::sqrt(-p / 3.0);
        double arg = 3.0 * q / (p * m);
        arg = std::clamp(arg, -1.0, 1.0);
        const double th = std::acos(arg) / 3.0;
        // th in [0, pi/3]: the k = 2 root cos(th + 2 pi / 3) is the smallest
        return a / 3.0 + m * std::cos(th + 2.0 * kPi / 3.0);
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

Propagator::Propagator(const QuantumSystem& sys, double dt, NoiseScheme scheme,
                       ThreeLevelMap map)
    : sys_(sys), dt_(dt), scheme_(scheme), map_(map), n_(sys.num_levels())
{
    if (!(dt > 0.0))
        throw ConfigError("propagator: dt must be positive");
    if (dt * sys.max_rate() >= 0.1)
        throw ConfigError("propagator: dt * max rate must be < 0.1, got " +
                          std::to_string(dt * sys.max_rate()));
    if (scheme == NoiseScheme::kFull && n_ != 3)
        throw ConfigError("full noise scheme requires a three-level system");
    h0_ = coherent_generator(sys, 0.0);
    mu_ = sys.dipole_z().cast<cd>();
    pop_map_ = population_map(sys, 0.5 * dt);
    coh_decay_ = RealMatrix::Ones(n_, n_);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
            if (i != j)
                coh_decay_(i, j) = std::exp(-0.5 * sys.gamma(i, j) * dt);
}

int Propagator::draws_per_step() const
{
    switch (scheme_) {
    case NoiseScheme::kOff:
        return 0;
    case NoiseScheme::kReduced:
        return reduced_draw_count(n_);
    case NoiseScheme::kFull:
        return kFullDrawCount;
    }
    return 0;
}

void Propagator::coherent(DensityMatrix& rho, double e_z) const
{
    const ComplexMatrix h = h0_ - mu_ * e_z;
    rho = coherent_substep(rho, h, dt_);
}

void Propagator::dissipative_half(DensityMatrix& rho) const
{
    Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxLevels, 1> pop(n_);
    for (int i = 0; i < n_; ++i)
        pop(i) = rho(i, i).real();
    pop = pop_map_ * pop;
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
            rho(i, j) = (i == j) ? cd(pop(i)) : rho(i, j) * coh_decay_(i, j);
}

void Propagator::fluctuation(DensityMatrix& rho, double e_z, double n_cell, const DrawKey& key,
                             NoiseDiagnostics& diag) const
{
    if (scheme_ == NoiseScheme::kOff)
        return;
    if (!(n_cell > 0.0))
        throw InvariantViolation("fluctuation: n_cell must be > 0 with noise enabled");
    double xi[kFullDrawCount > reduced_draw_count(kMaxLevels) ? kFullDrawCount
                                                               : reduced_draw_count(kMaxLevels)];
    const int count = draws_per_step();
    key.stream->gaussians(DrawDomain::kStep, key.cell, key.step, count, xi);
    ComplexMatrix f(n_, n_);
    if (scheme_ == NoiseScheme::kReduced) {
        reduced_fluctuation(rho, sys_, n_cell, xi, f, &diag);
    } else {
        const auto v = full_fluctuation_vector(rho, sys_, map_, e_z, n_cell, xi,
                                               RadicandMode::kClamped, &diag);
        full_fluctuation_matrix(v, map_, f);
    }
    rho += std::sqrt(dt_) * f;
}

template <int N>
void Propagator::full_step_fixed(DensityMatrix& rho, double e_z, double n_cell,
                                 const DrawKey& key, NoiseDiagnostics& diag) const
{
    using M = CMat<N>;
    M r = fixed_block<N>(rho);
    const int n = static_cast<int>(r.rows());

    auto relax = [&](M& x) {
        Eigen::Matrix<double, N, 1, 0, (N == Eigen::Dynamic ? kMaxLevels : N), 1> pop(n);
        for (int i = 0; i < n; ++i)
            pop(i) = x(i, i).real();
        pop = fixed_block<N>(pop_map_) * pop;
        x = x.cwiseProduct(fixed_block<N>(coh_decay_).template cast<cd>());
        for (int i = 0; i < n; ++i)
            x(i, i) = pop(i);
    };

    relax(r);
    {
        const M h = fixed_block<N>(h0_) - fixed_block<N>(mu_) * e_z;
        const M a = M::Identity(n, n) + cd(0.0, 0.5 * dt_ / kHbar) * h;
        M u;
        if constexpr (N == Eigen::Dynamic)
            u = a.partialPivLu().solve(M(a.adjoint()));
        else
            u = a.inverse() * a.adjoint();
        r = u * r * u.adjoint();
    }
    relax(r);

    if (scheme_ == NoiseScheme::kReduced) {
        double xi[reduced_draw_count(kMaxLevels)];
        key.stream->gaussians(DrawDomain::kStep, key.cell, key.step, reduced_draw_count(n), xi);
        M f(n, n);
        reduced_fluctuation(r, sys_, n_cell, xi, f, &diag);
        r += std::sqrt(dt_) * f;
    } else if (scheme_ == NoiseScheme::kFull) {
        DensityMatrix tmp = r;
        fluctuation(tmp, e_z, n_cell, key, diag);
        r = tmp;
    }

    // Hermitian part; structural rho_ji = conj(rho_ij)
    for (int i = 0; i < n; ++i) {
        r(i, i) = r(i, i).real();
        for (int j = i + 1; j < n; ++j) {
            const cd v = 0.5 * (r(i, j) + std::conj(r(j, i)));
            r(i, j) = v;
            r(j, i) = std::conj(v);
        }
    }
    fixed_block<N>(rho) = r;
}

void Propagator::full_step(DensityMatrix& rho, double e_z, double n_cell, const DrawKey& key,
                           NoiseDiagnostics& diag) const
{
    if (scheme_ != NoiseScheme::kOff && !(n_cell > 0.0))
        throw InvariantViolation("full_step: n_cell must be > 0 with noise enabled");
    switch (n_) {
    case 2:
        full_step_fixed<2>(rho, e_z, n_cell, key, diag);
        break;
    case 3:
        full_step_fixed<3>(rho, e_z, n_cell, key, diag);
        break;
    case 4:
        full_step_fixed<4>(rho, e_z, n_cell, key, diag);
        break;
    default:
        full_step_fixed<Eigen::Dynamic>(rho, e_z, n_cell, key, diag);
        break;
    }
}

DensityMatrix fluctuation_substep(const DensityMatrix& rho, const QuantumSystem& sys,
                                  NoiseScheme scheme, double n_cell, double e_z, double dt,
                                  const DrawKey& key, NoiseDiagnostics& diag, ThreeLevelMap map)
{
    if (scheme == NoiseScheme::kOff)
        return rho;
    Propagator p(sys, dt, scheme, map);
    DensityMatrix out = rho;
    p.fluctuation(out, e_z, n_cell, key, diag);
    return out;
}

} // namespace mdl

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

#include "doctest.h"

#include <cmath>
#include <random>

#include "mdl/errors.hpp"
#include "mdl/langevin_noise.hpp"
#include "test_util.hpp"

using namespace mdl;

namespace {

QuantumSystem decay_pair(double r10, double r01, double gp = 0.0)
{
    QuantumSystemParams p;
    p.energies = {0.0, 1e-21};
    p.dipole_z = RealMatrix::Zero(2, 2);
    p.tunneling = RealMatrix::Zero(2, 2);
    p.scatter_rates = RealMatrix::Zero(2, 2);
    p.scatter_rates(1, 0) = r10;
    p.scatter_rates(0, 1) = r01;
    p.pure_dephasing = RealMatrix::Zero(2, 2);
    p.pure_dephasing(0, 1) = p.pure_dephasing(1, 0) = gp;
    return QuantumSystem(p);
}

} // namespace

TEST_CASE("reduced population noise examples")
{
    const QuantumSystem s = decay_pair(0.0, 1e12);
    DensityMatrix rho = DensityMatrix::Zero(2, 2);
    CHECK(reduced_population_noise(1, 0, rho, s, 1e6, 1.0) == 0.0);
    rho(1, 1) = 1.0;
    // r_01 = 1 ps^-1, rho_11 = 1, N = 1e6: sqrt(1e12 / 1e6) = 1e3 s^-1/2
    CHECK(reduced_population_noise(1, 0, rho, s, 1e6, 1.0) == doctest::Approx(1e3));
    CHECK_THROWS_AS(reduced_population_noise(1, 1, rho, s, 1e6, 1.0), DomainError);
    CHECK_THROWS_AS(reduced_population_noise(1, 0, rho, s, 0.0, 1.0), DomainError);
}

TEST_CASE("reduced coherence noise examples")
{
    const QuantumSystem zero = decay_pair(0.0, 0.0);
    DensityMatrix rho = DensityMatrix::Identity(2, 2) * 0.5;
    CHECK(reduced_coherence_noise(1, 0, rho, zero, 1e4, 1.0, 1.0) == cd(0.0));
    CHECK_THROWS_AS(reduced_coherence_noise(0, 1, rho, zero, 1e4, 1.0, 1.0), DomainError);

    // rho_jj = 1, single exit channel r from j, gamma = r: radicand r / (2N)
    const double r = 1e12;
    const QuantumSystem s = decay_pair(r, 0.0, 0.5 * r);   // gamma = r/2 + r/2
    CHECK(s.gamma(1, 0) == doctest::Approx(r));
    rho.setZero();
    rho(0, 0) = 1.0;
    const cd f = reduced_coherence_noise(1, 0, rho, s, 1e4, 1.0, 0.0);
    CHECK(f.real() == doctest::Approx(std::sqrt(r / 2e4)));
}

TEST_CASE("reduced fluctuation matrix is Hermitian and traceless")
{
    std::mt19937_64 rng(3);
    const NoiseStream ns(9);
    for (int t = 0; t < 100; ++t) {
        const QuantumSystem q = testing::random_three_level(rng);
        const DensityMatrix rho = testing::random_density(rng, 3);
        double xi[reduced_draw_count(3)];
        ns.gaussians(DrawDomain::kTest, 0, t, reduced_draw_count(3), xi);
        ComplexMatrix f(3, 3);
        NoiseDiagnostics d;
        reduced_fluctuation(rho, q, 1e5, xi, f, &d);
        CHECK((f - f.adjoint()).cwiseAbs().maxCoeff() == 0.0);
        CHECK(std::abs(f.trace()) < 1e-12 * f.cwiseAbs().maxCoeff());
        CHECK(d.draws == 9);
    }
}

TEST_CASE("reduced variances match their closed forms (1e5 draws)")
{
    std::mt19937_64 rng(17);
    const QuantumSystem q = testing::random_three_level(rng);
    const DensityMatrix rho = testing::random_density(rng, 3);
    const NoiseStream ns(5);
    const double n_cell = 1e4;
    const int m = 100000;
    double var_pop[3] = {0, 0, 0}, var_coh[3] = {0, 0, 0};
    for (int k = 0; k < m; ++k) {
        double xi[9];
        ns.gaussians(DrawDomain::kTest, 1, k, 9, xi);
        ComplexMatrix f(3, 3);
        reduced_fluctuation(rho, q, n_cell, xi, f, static_cast<NoiseDiagnostics*>(nullptr));
        // single pair contributions through the free functions
        int p = 0;
        for (int i = 1; i < 3; ++i)
            for (int j = 0; j < i; ++j, ++p) {
                const double fp = reduced_population_noise(i, j, rho, q, n_cell, xi[3 * p]);
                var_pop[p] += fp * fp;
                const cd fc = reduced_coherence_noise(i, j, rho, q, n_cell, xi[3 * p + 1],
                                                      xi[3 * p + 2]);
                var_coh[p] += std::norm(fc);
                CHECK(fc == f(i, j));
            }
    }
    int p = 0;
    for (int i = 1; i < 3; ++i)
        for (int j = 0; j < i; ++j, ++p) {
            const double pop = (q.rate(j, i) * rho(i, i).real() + q.rate(i, j) * rho(j, j).real()) /
                               n_cell;
            double s = (2 * q.gamma(i, j) - q.inverse_lifetime(j)) * rho(j, j).real();
            for (int l = 0; l < 3; ++l)
                if (l != j)
                    s += q.rate(j, l) * rho(l, l).real();
            const double coh = s / n_cell;   // 2 x radicand
            CHECK(var_pop[p] / m == doctest::Approx(pop).epsilon(0.05));
            CHECK(var_coh[p] / m == doctest::Approx(coh).epsilon(0.05));
        }
}

TEST_CASE("full fluctuation vector at zero state and zero rates")
{
    QuantumSystemParams p;
    p.energies = {0.0, 1e-21, 3e-21};
    p.dipole_z = RealMatrix::Zero(3, 3);
    p.tunneling = RealMatrix::Zero(3, 3);
    p.scatter_rates = RealMatrix::Zero(3, 3);
    p.pure_dephasing = RealMatrix::Zero(3, 3);
    const QuantumSystem q(p);
    const DensityMatrix rho = DensityMatrix::Zero(3, 3);
    double xi[kFullDrawCount];
    NoiseStream(1).gaussians(DrawDomain::kTest, 0, 0, kFullDrawCount, xi);
    const auto v = full_fluctuation_vector(rho, q, {}, 0.0, 100.0, xi, RadicandMode::kExact);
    for (const cd& c : v)
        CHECK(std::abs(c) == 0.0);
}

TEST_CASE("full fluctuation population terms cancel for every draw")
{
    std::mt19937_64 rng(21);
    const NoiseStream ns(2);
    for (int t = 0; t < 200; ++t) {
        const QuantumSystem q = testing::random_three_level(rng);
        const DensityMatrix rho = testing::random_density(rng, 3);
        double xi[kFullDrawCount];
        ns.gaussians(DrawDomain::kTest, 3, t, kFullDrawCount, xi);
        NoiseDiagnostics d;
        const auto v =
            full_fluctuation_vector(rho, q, {}, 1e5, 1e4, xi, RadicandMode::kClamped, &d);
        const double scale = std::abs(v[kS33]) + std::abs(v[kS22]) + std::abs(v[kS11]);
        CHECK(std::abs(v[kS33] + v[kS22] + v[kS11]) <= 1e-12 * scale);
        CHECK(d.draws == kFullDrawCount);
        ComplexMatrix f(3, 3);
        full_fluctuation_matrix(v, {}, f);
        CHECK((f - f.adjoint()).cwiseAbs().maxCoeff() == 0.0);
        CHECK(std::abs(f.trace()) <= 1e-15 * scale);
    }
}

TEST_CASE("two-level initial condition")
{
    const DensityMatrix r0 = initial_condition_2lvl(0.0, 1.3);
    CHECK(r0(0, 0).real() == 0.0);
    CHECK(r0(1, 1).real() == 1.0);
    CHECK(std::abs(r0(1, 0)) == 0.0);

    const DensityMatrix r = initial_condition_2lvl(0.7, 0.4);
    CHECK(std::abs(r.trace() - 1.0) < 1e-15);
    CHECK((r - r.adjoint()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(std::abs((r * r - r).cwiseAbs().maxCoeff()) < 1e-15);   // pure
    CHECK(std::abs(r(1, 0)) == doctest::Approx(0.5 * std::sin(0.7)));

    const NoiseStream ns(31);
    const int m = 100000;
    double th2 = 0, coh = 0;
    for (int k = 0; k < m; ++k) {
        th2 += std::pow(tipping_draw(1e4, ns, k)[0], 2);
        coh += std::norm(initial_condition_2lvl(1e12, ns, k)(1, 0));
    }
    CHECK(th2 / m == doctest::Approx(4e-4).epsilon(0.05));
    CHECK(coh / m < 1e-11);
    CHECK_THROWS_AS(tipping_draw(0.0, ns, 0), DomainError);
}

TEST_CASE("thermal photon number")
{
    CHECK(thermal_photon_number(1e13, 0.0) == 0.0);
    const double t = 50.0;
    const double w = kBoltzmann * t * std::log(2.0) / kHbar;
    CHECK(thermal_photon_number(w, t) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(thermal_photon_number(2 * kPi * 3.5e12, 80.0) == doctest::Approx(0.1397).epsilon(1e-3));
    CHECK_THROWS_AS(thermal_photon_number(0.0, 1.0), DomainError);
}

TEST_CASE("noise scheme names round trip")
{
    for (auto s : {NoiseScheme::kOff, NoiseScheme::kReduced, NoiseScheme::kFull})
        CHECK(noise_scheme_from_string(to_string(s)) == s);
    CHECK_THROWS_AS(noise_scheme_from_string("loud"), ConfigError);
}

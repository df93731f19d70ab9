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

#include <Eigen/Eigenvalues>

#include "mdl/errors.hpp"
#include "mdl/lindblad_propagator.hpp"
#include "test_util.hpp"

using namespace mdl;

TEST_CASE("coherent substep")
{
    std::mt19937_64 rng(4);
    const DensityMatrix rho = testing::random_density(rng, 3);
    CHECK((coherent_substep(rho, ComplexMatrix::Zero(3, 3), 1e-15) - rho).cwiseAbs().maxCoeff() ==
          0.0);
    for (int t = 0; t < 100; ++t) {
        const DensityMatrix r = testing::random_density(rng, 4);
        ComplexMatrix h = testing::random_density(rng, 4) * 1e-20;
        const DensityMatrix out = coherent_substep(r, h, 1e-14);
        CHECK(std::abs(out.trace() - r.trace()) < 1e-14);
        CHECK(min_eigenvalue(out) == doctest::Approx(min_eigenvalue(r)).epsilon(1e-9));
    }
    CHECK_THROWS_AS(coherent_substep(rho, ComplexMatrix::Zero(2, 2), 1e-15), DomainError);
}

TEST_CASE("dissipative substep")
{
    const QuantumSystem none = two_level_system(1e13, 1e-28, kNoDecay, kNoDecay, 1e21);
    std::mt19937_64 rng(5);
    const DensityMatrix rho = testing::random_density(rng, 2);
    CHECK((dissipative_substep(rho, none, 1e-13) - rho).cwiseAbs().maxCoeff() == 0.0);

    const double tau = 2e-12;
    const QuantumSystem dec = two_level_system(1e13, 1e-28, tau, 2 * tau, 1e21);
    DensityMatrix e = DensityMatrix::Zero(2, 2);
    e(1, 1) = 1.0;
    const double t = 1.7e-12;
    const DensityMatrix out = dissipative_substep(e, dec, t);
    CHECK(out(1, 1).real() == doctest::Approx(std::exp(-t / tau)).epsilon(1e-12));
    CHECK(std::abs(out.trace() - 1.0) < 1e-15);

    // steady state is the null vector of the rate matrix
    const QuantumSystem q = testing::random_three_level(rng);
    Eigen::Matrix3d r = Eigen::Matrix3d::Zero();
    for (int j = 0; j < 3; ++j) {
        for (int i = 0; i < 3; ++i)
            if (i != j)
                r(i, j) = q.rate(i, j);
        r(j, j) = -q.inverse_lifetime(j);
    }
    Eigen::FullPivLU<Eigen::Matrix3d> lu(r);
    Eigen::Vector3d nv = lu.kernel().col(0);
    nv /= nv.sum();
    DensityMatrix s = testing::random_density(rng, 3);
    for (int k = 0; k < 200; ++k)
        s = dissipative_substep(s, q, 1e-12);
    for (int i = 0; i < 3; ++i)
        CHECK(s(i, i).real() == doctest::Approx(nv(i)).epsilon(1e-9));
    CHECK(std::abs(s(0, 1)) < 1e-30);
}

TEST_CASE("min eigenvalue closed forms")
{
    std::mt19937_64 rng(6);
    std::normal_distribution<double> g;
    for (int n : {2, 3, 4}) {
        for (int t = 0; t < 300; ++t) {
            ComplexMatrix a(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    a(i, j) = cd(g(rng), g(rng));
            const ComplexMatrix h = 0.5 * (a + a.adjoint());
            Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
            CHECK(min_eigenvalue(h) == doctest::Approx(es.eigenvalues().minCoeff()).epsilon(1e-9));
        }
    }
}

TEST_CASE("propagator setup validation")
{
    const QuantumSystem q = two_level_system(1e13, 1e-28, 1e-12, 1e-12, 1e21);
    CHECK_THROWS_AS(Propagator(q, 1e-12, NoiseScheme::kReduced), ConfigError);
    CHECK_THROWS_AS(Propagator(q, 1e-15, NoiseScheme::kFull), ConfigError);
    CHECK_THROWS_AS(Propagator(q, 0.0, NoiseScheme::kOff), ConfigError);
    const Propagator p(q, 1e-15, NoiseScheme::kReduced);
    CHECK(p.draws_per_step() == 3);
}

TEST_CASE("fixed point without field, rates or noise")
{
    const QuantumSystem q = two_level_system(1e13, 1e-28, kNoDecay, kNoDecay, 1e21);
    const Propagator p(q, 1e-16, NoiseScheme::kOff);
    DensityMatrix rho = initial_condition_2lvl(0.0, 0.0);
    NoiseDiagnostics d;
    for (int k = 0; k < 1000; ++k)
        p.full_step(rho, 0.0, 0.0, {}, d);
    CHECK(rho(1, 1).real() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(rho(0, 1)) == 0.0);
}

TEST_CASE("noisy steps keep Hermiticity and trace")
{
    const QuantumSystem q = two_level_system(2 * kPi * 1.5e12, 1e-28, kNoDecay, 100e-12, 1e22);
    const double dt = 2e-15;
    const Propagator p(q, dt, NoiseScheme::kReduced);
    const NoiseStream ns(3);
    DensityMatrix rho = initial_condition_2lvl(1e4, ns, 0);
    NoiseDiagnostics d;
    for (std::uint64_t k = 0; k < 100000; ++k) {
        p.full_step(rho, 1e3 * std::cos(2 * kPi * 1.5e12 * dt * k), 1e4, {&ns, 0, k}, d);
        REQUIRE(rho(0, 1) == std::conj(rho(1, 0)));
    }
    CHECK(std::abs(rho.trace() - 1.0) < 1e-9);
    CHECK(min_eigenvalue(rho) > -1e-7);
    CHECK(d.draws == 300000);
}

TEST_CASE("noisy replay is bit identical")
{
    std::mt19937_64 rng(8);
    const QuantumSystem q = testing::random_three_level(rng, 1e11);
    for (auto scheme : {NoiseScheme::kReduced, NoiseScheme::kFull}) {
        const Propagator p(q, 1e-14, scheme);
        const NoiseStream ns(77);
        DensityMatrix a = DensityMatrix::Identity(3, 3) / 3.0, b = a;
        NoiseDiagnostics d1, d2;
        for (std::uint64_t k = 0; k < 500; ++k)
            p.full_step(a, 2e4, 1e6, {&ns, 5, k}, d1);
        for (std::uint64_t k = 0; k < 500; ++k)
            p.full_step(b, 2e4, 1e6, {&ns, 5, k}, d2);
        CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
        CHECK(std::abs(a.trace() - 1.0) < 1e-12);
        CHECK((a - a.adjoint()).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("fluctuation substep with noise off is the identity")
{
    const QuantumSystem q = two_level_system(1e13, 1e-28, 1e-12, 1e-12, 1e21);
    const DensityMatrix rho = initial_condition_2lvl(0.3, 0.1);
    NoiseDiagnostics d;
    const DensityMatrix out = fluctuation_substep(rho, q, NoiseScheme::kOff, 1e4, 0.0, 1e-15, {}, d);
    CHECK((out - rho).cwiseAbs().maxCoeff() == 0.0);
    const NoiseStream ns(1);
    const DensityMatrix k = fluctuation_substep(rho, q, NoiseScheme::kReduced, 1e4, 0.0, 1e-15,
                                                {&ns, 0, 0}, d);
    CHECK(std::abs(k.trace() - 1.0) < 1e-15);
}

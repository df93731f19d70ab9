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

#include <random>

#include "mdl/diffusion_verify.hpp"
#include "mdl/errors.hpp"
#include "test_util.hpp"

using namespace mdl;
using mdl::testing::random_density;
using mdl::testing::random_three_level;

namespace {

CNumberState random_state(std::mt19937_64& rng, double* m_out = nullptr)
{
    // rates in ps^-1 so every entry of D is O(1)
    const QuantumSystem sys = random_three_level(rng, 1.0);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    const double m = u(rng);
    if (m_out)
        *m_out = m;
    const ThreeLevelMap map;
    return CNumberState::from_density(random_density(rng, 3), map,
                                      ThreeLevelRates::from_system(sys, map), m, 0.7, 0.3);
}

cd rnd_c(std::mt19937_64& rng)
{
    std::normal_distribution<double> g;
    return {g(rng), g(rng)};
}

} // namespace

TEST_CASE("block family 4 with a = 1")
{
    const Factor b = block_factor(BlockFamily::kConjugatePair, 1.0);
    Factor d = b * b.transpose();
    CHECK(std::abs(d(0, 0)) < 1e-15);
    CHECK(std::abs(d(0, 1) - 2.0) < 1e-15);
    CHECK(std::abs(d(1, 0) - 2.0) < 1e-15);
    CHECK(std::abs(d(1, 1)) < 1e-15);
}

TEST_CASE("block family 2 occupation with a = 1")
{
    const Factor b = block_factor(BlockFamily::kPopulationPair, 1.0);
    const Factor d = b * b.transpose();
    CHECK(d(0, 0) == cd(1.0));
    CHECK(d(0, 1) == cd(-1.0));
    CHECK(d(1, 0) == cd(-1.0));
    CHECK(d(1, 1) == cd(1.0));
}

TEST_CASE("block family 1 with a = b = 1, c = 0 matches its block matrix")
{
    const Factor b = block_factor(BlockFamily::kCoherencePopulation, 1.0, 1.0, 0.0);
    const Factor d = block_matrix(BlockFamily::kCoherencePopulation, 1.0, 1.0, 0.0);
    CHECK((b * b.transpose() - d).cwiseAbs().maxCoeff() < 1e-15);
    // expected: [[0,-1,1,2],[-1,1,-1,-1],[1,-1,1,1],[2,-1,1,0]]
    CHECK(d(0, 1) == cd(-1.0));
    CHECK(d(0, 3) == cd(2.0));
    CHECK(d(1, 3) == cd(-1.0));
    CHECK(d(2, 3) == cd(1.0));
}

TEST_CASE("every block factor reproduces its block matrix")
{
    std::mt19937_64 rng(11);
    const BlockFamily fams[] = {BlockFamily::kCoherencePopulation,
                                 BlockFamily::kPopulationPair, BlockFamily::kCoherenceCross,
                                 BlockFamily::kConjugatePair};
    for (int t = 0; t < 200; ++t) {
        for (auto f : fams) {
            for (bool variant : {false, true}) {
                if (variant && f != BlockFamily::kPopulationPair)
                    continue;
                const cd a = rnd_c(rng), b = rnd_c(rng), c = rnd_c(rng);
                const Factor bf = block_factor(f, a, b, c, variant);
                const Factor d = block_matrix(f, a, b, c, variant);
                const Factor diff = bf * bf.transpose() - d;
                REQUIRE(diff.cwiseAbs().maxCoeff() < 1e-12 * (1.0 + d.cwiseAbs().maxCoeff()));
            }
        }
    }
}

TEST_CASE("diffusion matrix structure")
{
    std::mt19937_64 rng(3);
    for (int t = 0; t < 100; ++t) {
        const CNumberState s = random_state(rng);
        const CMatrix11 d = cnumber_diffusion_matrix(s);
        CHECK((d - d.transpose()).cwiseAbs().maxCoeff() == 0.0);
        for (int r = kS33; r <= kS11; ++r) {
            const cd row = d(r, kS33) + d(r, kS22) + d(r, kS11);
            CHECK(std::abs(row) < 1e-12 * d.cwiseAbs().maxCoeff());
        }
    }
}

TEST_CASE("zero state gives zero diffusion and zero factor")
{
    CNumberState s;
    CHECK(assemble_noise_matrix(s).b.cwiseAbs().maxCoeff() == 0.0);
    s.params.rates = {1, 1, 1, 1, 1, 1, 2, 2, 2, 1};
    CHECK(cnumber_diffusion_matrix(s).cwiseAbs().maxCoeff() == 0.0);
    const NoiseAssembly a = assemble_noise_matrix(s);
    CHECK(a.ok());
}

TEST_CASE("population entry differs from the operator correlation by the coherent terms")
{
    std::mt19937_64 rng(5);
    for (int t = 0; t < 50; ++t) {
        const CNumberState s = random_state(rng);
        const cd i(0, 1);
        const CMatrix11 d = cnumber_diffusion_matrix(s);
        const cd extra = i * (s.gac() * s.a[kS23] - s.ga() * s.a[kS23c]) +
                         i * s.params.rates.omega * (s.a[kS31c] - s.a[kS31]);
        const double q = quantum_correlation(CorrelationPair::kF33F33, s);
        CHECK(std::abs(d(kS33, kS33) - q - extra) < 1e-12);
    }
}

TEST_CASE("quantum correlation examples")
{
    CNumberState s;
    s.params.rates = {0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 2.0, 3.0, 4.0, 1.0};
    s.params.kappa = 0.9;
    s.params.n_th = 0.25;
    for (auto p : all_correlation_pairs())
        if (p != CorrelationPair::kFaDagFa && p != CorrelationPair::kFaFaDag)
            CHECK(quantum_correlation(p, s) == 0.0);
    CHECK(quantum_correlation("FaFa+", s) - quantum_correlation("Fa+Fa", s) ==
          doctest::Approx(0.9));
    s.a[kS33] = 1.0;
    const auto& r = s.params.rates;
    CHECK(quantum_correlation("F23+F23", s) == doctest::Approx(2 * r.g23 - (r.r23 + r.r13)));
    CHECK_THROWS_AS(quantum_correlation("F99", s), DomainError);
    for (auto p : all_correlation_pairs())
        CHECK(correlation_pair_from_label(label(p)) == p);
}

TEST_CASE("the (s23*, s23) diffusion entry carries the field term 2i g a s23")
{
    CNumberState s;
    s.params.rates = {0, 0, 0, 0, 0, 0, 0, 0, 0, 0};
    s.a[kA] = s.a[kAc] = 0.5;
    s.a[kS23] = cd(0.2, 0.1);
    const CMatrix11 d = cnumber_diffusion_matrix(s);
    CHECK(std::abs(d(kS23, kS23) - cd(0, 2) * 0.5 * cd(0.2, 0.1)) < 1e-15);
}

TEST_CASE("assembled B B^T reproduces D for 1000 random states")
{
    std::mt19937_64 rng(2026);
    double worst = 0.0;
    for (int t = 0; t < 1000; ++t) {
        const CNumberState s = random_state(rng);
        const NoiseAssembly a = assemble_noise_matrix(s, 1e-10);
        INFO("offending: " << (a.offending.empty() ? "" : a.offending.front()));
        REQUIRE(a.ok());
        worst = std::max(worst, a.residual.cwiseAbs().maxCoeff() / a.scale);
        REQUIRE(a.b.cols() == 33);
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("assembled D keeps the conjugate pairing of (s23*, s23)")
{
    std::mt19937_64 rng(8);
    const CNumberState s = random_state(rng);
    const NoiseAssembly a = assemble_noise_matrix(s);
    const CMatrix11 bbt = a.b * a.b.transpose();
    CHECK(std::abs(bbt(kS23c, kS23) - bbt(kS23, kS23c)) < 1e-14);
}

TEST_CASE("assembly reports offending entries when the cross block is indefinite")
{
    CNumberState s;
    std::mt19937_64 rng(4);
    const ThreeLevelMap map;
    ThreeLevelRates r{0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 0.0, 0.0, 0.0, 0.5};
    r.g23 = 0.5 * (0.6 + 0.9 + 0.5 + 0.7);
    r.g13 = 0.5 * (0.6 + 0.9 + 0.8 + 1.0) + 3.0;   // large gamma_1'3 makes g12 - g13 + g23 < 0
    r.g12 = 0.5 * (0.5 + 0.7 + 0.8 + 1.0);
    s = CNumberState::from_density(random_density(rng, 3), map, r, 0.4);
    const NoiseAssembly a = assemble_noise_matrix(s);
    CHECK_FALSE(a.ok());
    CHECK(!a.offending.empty());
}

TEST_CASE("exact second moments of the full fluctuation factor equal D")
{
    std::mt19937_64 rng(77);
    for (int t = 0; t < 300; ++t) {
        double m = 0.0;
        const CNumberState s = random_state(rng, &m);
        const ThreeLevelMap map;
        ThreeLevelView v;
        v.s23 = s.a[kS23];
        v.s31 = s.a[kS31];
        v.s21 = s.a[kS21];
        v.p3 = s.a[kS33].real();
        v.p2 = s.a[kS22].real();
        v.p1 = s.a[kS11].real();
        const FullNoiseFactor b =
            full_fluctuation_factor(v, s.params.rates, m, RadicandMode::kExact);
        CMatrix11 d = cnumber_diffusion_matrix(s);
        d(kAc, kA) = d(kA, kAc) = 0.0;   // no field reservoir noise in the kick
        const CMatrix11 mom = b * b.transpose();
        REQUIRE((mom - d).cwiseAbs().maxCoeff() < 1e-10 * d.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("einstein relation residual vanishes for every system pair")
{
    std::mt19937_64 rng(99);
    const ThreeLevelMap map;
    for (int t = 0; t < 20; ++t) {
        const QuantumSystem sys = random_three_level(rng);
        const DensityMatrix rho = random_density(rng, 3);
        const double gmax = sys.max_rate();
        for (auto p : all_correlation_pairs()) {
            if (p == CorrelationPair::kFaDagFa || p == CorrelationPair::kFaFaDag)
                continue;
            const double res = einstein_check(p, rho, sys, map, 2e5, 1e-6 / gmax);
            INFO(label(p));
            CHECK(std::abs(res) < 1e-8 * gmax);
        }
    }
}

TEST_CASE("einstein residual converges under dt refinement")
{
    std::mt19937_64 rng(12);
    const ThreeLevelMap map;
    const QuantumSystem sys = random_three_level(rng);
    const DensityMatrix rho = random_density(rng, 3);
    const double g = sys.max_rate();
    const double r1 = std::abs(einstein_check(CorrelationPair::kF23DagF23, rho, sys, map, 1e6, 0.2 / g));
    const double r2 = std::abs(einstein_check(CorrelationPair::kF23DagF23, rho, sys, map, 1e6, 0.1 / g));
    CHECK(r1 > 0.0);
    CHECK(r2 < 0.6 * r1);
}

TEST_CASE("einstein residual is zero without rates")
{
    QuantumSystemParams p;
    p.energies = {0.0, 1e-21, 3e-21};
    p.dipole_z = RealMatrix::Zero(3, 3);
    p.tunneling = RealMatrix::Zero(3, 3);
    p.tunneling(0, 2) = p.tunneling(2, 0) = 1e12;
    p.scatter_rates = RealMatrix::Zero(3, 3);
    p.pure_dephasing = RealMatrix::Zero(3, 3);
    const QuantumSystem sys(p);
    std::mt19937_64 rng(1);
    const DensityMatrix rho = random_density(rng, 3);
    for (auto pr : {CorrelationPair::kF23DagF23, CorrelationPair::kF33F33})
        CHECK(std::abs(einstein_check(pr, rho, sys, {}, 0.0, 1e-18)) < 1e-8 * 1e12);
    CHECK_THROWS_AS(pair_operators(CorrelationPair::kFaDagFa, {}), DomainError);
}

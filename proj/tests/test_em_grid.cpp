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
#include <vector>

#include "mdl/em_grid.hpp"
#include "mdl/errors.hpp"

using namespace mdl;

namespace {

struct Line {
    std::vector<MaterialParams> mats;
    FieldSolver solver;
    GridState s;
    Line(int m, double dx, double dt, BoundarySpec l, BoundarySpec r, MaterialParams mp = {})
        : mats(m, mp), solver(mats, dx, dt, l, r), s(GridState::create(m, dx, dt, mats))
    {
    }
};

} // namespace

TEST_CASE("courant timestep examples")
{
    CHECK(courant_timestep(1e-6, 1.0) == doctest::Approx(3.3356e-15).epsilon(1e-4));
    CHECK(courant_timestep(1e-6, 3.6) == doctest::Approx(12.008e-15).epsilon(1e-4));
    CHECK(courant_timestep(1e-6, 3.6, 0.5) == doctest::Approx(0.5 * courant_timestep(1e-6, 3.6)));
    CHECK_THROWS_AS(courant_timestep(0.0, 1.0), DomainError);
}

TEST_CASE("grid construction enforces the stability bound")
{
    std::vector<MaterialParams> m(10);
    CHECK_THROWS_AS(GridState::create(10, 1e-6, 1.01 * courant_timestep(1e-6, 1.0), m), ConfigError);
    CHECK_NOTHROW(GridState::create(10, 1e-6, courant_timestep(1e-6, 1.0), m));
    CHECK_THROWS_AS(BoundarySpec::facet(1.5).validate(), ConfigError);
    CHECK_THROWS_AS(boundary_kind_from_string("mirror"), ConfigError);
    MaterialParams bad;
    bad.gamma_overlap = 2.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("update_h")
{
    const double dx = 1e-6, dt = 0.5 * dx / kC0;
    Line l(20, dx, dt, BoundarySpec::reflector(), BoundarySpec::reflector());
    std::fill(l.s.e_field.begin(), l.s.e_field.end(), 3.0);
    l.solver.update_h(l.s);
    for (double h : l.s.h_field)
        CHECK(h == 0.0);
    std::fill(l.s.e_field.begin(), l.s.e_field.end(), 0.0);
    for (int k = 10; k <= 20; ++k)
        l.s.e_field[k] = 1.0;
    l.solver.update_h(l.s);
    CHECK(l.s.h_field[9] == doctest::Approx(dt / (kMu0 * dx)));
    CHECK(l.s.h_field[8] == 0.0);
}

TEST_CASE("update_e with uniform H and with loss")
{
    const double dx = 1e-6, dt = 0.5 * dx / kC0;
    MaterialParams lossy;
    lossy.sigma = 50.0;
    Line l(20, dx, dt, BoundarySpec::reflector(), BoundarySpec::reflector(), lossy);
    const std::vector<double> dp(20, 0.0);
    std::fill(l.s.e_field.begin(), l.s.e_field.end(), 1.0);
    const double x = lossy.sigma * dt / (2 * kEps0);
    const double f = (1 - x) / (1 + x);
    for (int n = 1; n <= 5; ++n) {
        l.solver.update_e(l.s, dp);
        CHECK(l.s.e_field[10] == doctest::Approx(std::pow(f, n)).epsilon(1e-12));
    }
    Line v(20, dx, dt, BoundarySpec::reflector(), BoundarySpec::reflector());
    std::fill(v.s.e_field.begin(), v.s.e_field.end(), 2.0);
    std::fill(v.s.h_field.begin(), v.s.h_field.end(), 7.0);
    v.solver.update_e(v.s, dp);
    CHECK(v.s.e_field[5] == 2.0);
}

TEST_CASE("radiated field scales with the confinement factor")
{
    const double dx = 1e-6, dt = dx / kC0;
    double peak[2];
    int idx = 0;
    for (double g : {1.0, 0.5}) {
        MaterialParams mp;
        mp.gamma_overlap = g;
        Line l(200, dx, dt, BoundarySpec::absorbing(), BoundarySpec::absorbing(), mp);
        std::vector<double> dp(200, 0.0);
        FacetRecord fr;
        double mx = 0.0;
        for (int n = 0; n < 400; ++n) {
            dp.assign(200, 0.0);
            dp[100] = 1e-3 * std::cos(2 * kPi * n / 20.0);
            l.solver.update_h(l.s);
            l.solver.update_e(l.s, dp);
            l.solver.apply_boundaries(l.s, dp, fr);
            mx = std::max(mx, std::abs(l.s.e_field[150]));
        }
        peak[idx++] = mx;
    }
    CHECK(peak[0] / peak[1] == doctest::Approx(2.0).epsilon(1e-2));
}

TEST_CASE("reflector returns an inverted pulse with its energy")
{
    const double dx = 1e-6, dt = 0.9 * dx / kC0;
    const int m = 400;
    Line l(m, dx, dt, BoundarySpec::reflector(), BoundarySpec::reflector());
    const double z = std::sqrt(kMu0 / kEps0);
    const double w = 12 * dx, x0 = 150 * dx;
    auto f = [&](double x) { return std::exp(-std::pow((x - x0) / w, 2)); };
    for (int k = 0; k <= m; ++k)
        l.s.e_field[k] = f(k * dx);
    for (int k = 0; k < m; ++k)
        l.s.h_field[k] = -f((k + 0.5) * dx + 0.5 * kC0 * dt) / z;   // rightward
    const std::vector<double> dp(m, 0.0);
    FacetRecord fr;
    std::vector<double> hp = l.s.h_field;
    l.solver.update_h(l.s);
    const double e0 = l.solver.leapfrog_energy(l.s, hp);
    const int steps = static_cast<int>(std::round(2 * (m * dx - x0) / (kC0 * dt)));
    for (int n = 0; n < steps; ++n) {
        l.solver.update_e(l.s, dp);
        l.solver.apply_boundaries(l.s, dp, fr);
        hp = l.s.h_field;
        l.solver.update_h(l.s);
    }
    const double e1 = l.solver.leapfrog_energy(l.s, hp);
    CHECK(std::abs(e1 - e0) / e0 < 1e-6);
    int kmin = 0;
    for (int k = 0; k <= m; ++k)
        if (l.s.e_field[k] < l.s.e_field[kmin])
            kmin = k;
    CHECK(l.s.e_field[kmin] < -0.9);
    CHECK(std::abs(kmin - 150) <= 2);
}

TEST_CASE("absorbing boundary and matched facet")
{
    for (auto bs : {BoundarySpec::absorbing(), BoundarySpec::facet(0.0)}) {
        const double dx = 1e-6, dt = 0.95 * dx / kC0;
        const int m = 400;
        Line l(m, dx, dt, BoundarySpec::reflector(), bs);
        const double z = std::sqrt(kMu0 / kEps0);
        const double w = 15 * dx, x0 = 150 * dx;
        auto f = [&](double x) { return std::exp(-std::pow((x - x0) / w, 2)); };
        for (int k = 0; k <= m; ++k)
            l.s.e_field[k] = f(k * dx);
        for (int k = 0; k < m; ++k)
            l.s.h_field[k] = -f((k + 0.5) * dx + 0.5 * kC0 * dt) / z;
        const double e0 = l.solver.field_energy(l.s);
        const std::vector<double> dp(m, 0.0);
        FacetRecord fr;
        const int steps = static_cast<int>(2 * (m * dx - x0) / (kC0 * dt)) + 40;
        for (int n = 0; n < steps; ++n) {
            l.solver.update_h(l.s);
            l.solver.update_e(l.s, dp);
            l.solver.apply_boundaries(l.s, dp, fr);
        }
        CHECK(l.solver.field_energy(l.s) / e0 < 1e-4);
        CHECK(fr.energy_right / e0 == doctest::Approx(1.0).epsilon(1e-3));
    }
}

TEST_CASE("facet reflects the Fresnel fraction")
{
    const double n = 3.6;
    MaterialParams mp;
    mp.eps_r = n * n;
    const double dx = 1e-6, dt = 0.95 * n * dx / kC0;
    const int m = 600;
    Line l(m, dx, dt, BoundarySpec::reflector(), BoundarySpec::fresnel(n), mp);
    const double z = std::sqrt(kMu0 / (kEps0 * n * n)), v = kC0 / n;
    const double w = 20 * dx, x0 = 200 * dx;
    auto f = [&](double x) { return std::exp(-std::pow((x - x0) / w, 2)); };
    for (int k = 0; k <= m; ++k)
        l.s.e_field[k] = f(k * dx);
    for (int k = 0; k < m; ++k)
        l.s.h_field[k] = -f((k + 0.5) * dx + 0.5 * v * dt) / z;
    const double e0 = l.solver.field_energy(l.s);
    const std::vector<double> dp(m, 0.0);
    FacetRecord fr;
    const int steps = static_cast<int>(2 * (m * dx - x0) / (v * dt)) + 60;
    for (int n2 = 0; n2 < steps; ++n2) {
        l.solver.update_h(l.s);
        l.solver.update_e(l.s, dp);
        l.solver.apply_boundaries(l.s, dp, fr);
    }
    const double r = (n - 1) / (n + 1);
    CHECK(l.solver.field_energy(l.s) / e0 == doctest::Approx(r * r).epsilon(1e-2));
    CHECK(fr.energy_right / e0 == doctest::Approx(1 - r * r).epsilon(1e-2));
}

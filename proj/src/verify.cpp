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

#include "mdl/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "mdl/diffusion_verify.hpp"
#include "mdl/em_grid.hpp"
#include "mdl/errors.hpp"
#include "mdl/langevin_noise.hpp"
#include "mdl/lindblad_propagator.hpp"
#include "mdl/signal_analysis.hpp"

namespace mdl {

namespace {

std::string fmt(const char* f, double a, double b = 0.0)
{
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

CNumberState random_cnumber_state(std::mt19937_64& rng, double& m)
{
    // rates in ps^-1 so every entry of D is O(1)
    const QuantumSystem sys = random_three_level_system(rng, 1.0);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    m = u(rng);
    const ThreeLevelMap map;
    return CNumberState::from_density(random_density_matrix(rng, 3), map,
                                      ThreeLevelRates::from_system(sys, map), m, 0.7, 0.3);
}

ThreeLevelView view_of(const CNumberState& s)
{
    ThreeLevelView v;
    v.s23 = s.a[kS23];
    v.s31 = s.a[kS31];
    v.s21 = s.a[kS21];
    v.p3 = s.a[kS33].real();
    v.p2 = s.a[kS22].real();
    v.p1 = s.a[kS11].real();
    return v;
}

/** Envelope peak time with parabolic refinement. */
double envelope_peak_time(const std::vector<double>& x, double dt)
{
    TraceRecord t;
    t.dt = dt;
    t.samples = x;
    const InstantaneousFrequency f = instantaneous_frequency(t, 0.5);
    const auto& e = f.envelope;
    const std::size_t k = static_cast<std::size_t>(std::max_element(e.begin(), e.end()) - e.begin());
    double off = 0.0;
    if (k > 0 && k + 1 < e.size()) {
        const double den = e[k - 1] - 2.0 * e[k] + e[k + 1];
        if (den != 0.0)
            off = 0.5 * (e[k - 1] - e[k + 1]) / den;
    }
    return (static_cast<double>(k) + off) * dt;
}

} // namespace

bool SuiteReport::pass() const
{
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

void SuiteReport::add(std::string name, bool pass, double value, double tolerance, std::string detail)
{
    checks.push_back({std::move(name), pass, value, tolerance, std::move(detail)});
}

nlohmann::ordered_json SuiteReport::to_json() const
{
    nlohmann::ordered_json j;
    j["suite"] = suite;
    j["pass"] = pass();
    j["checks"] = nlohmann::ordered_json::array();
    for (const CheckResult& c : checks) {
        nlohmann::ordered_json x;
        x["name"] = c.name;
        x["pass"] = c.pass;
        x["value"] = c.value;
        x["tolerance"] = c.tolerance;
        if (!c.detail.empty())
            x["detail"] = c.detail;
        j["checks"].push_back(x);
    }
    return j;
}

// ---------------------------------------------------------------- diffusion

SuiteReport verify_diffusion(int states, std::uint64_t seed)
{
    if (states < 1)
        throw ConfigError("verify diffusion: samples must be >= 1");
    SuiteReport r;
    r.suite = "diffusion";
    std::mt19937_64 rng(seed);

    double worst_bbt = 0.0, worst_exact = 0.0;
    int failures = 0;
    std::string first_offender;
    for (int t = 0; t < states; ++t) {
        double m = 0.0;
        const CNumberState s = random_cnumber_state(rng, m);
        const NoiseAssembly a = assemble_noise_matrix(s, 1e-10);
        if (!a.ok()) {
            ++failures;
            if (first_offender.empty())
                first_offender = a.offending.front();
        }
        worst_bbt = std::max(worst_bbt, a.residual.cwiseAbs().maxCoeff() / std::max(a.scale, 1e-300));

        const FullNoiseFactor b = full_fluctuation_factor(view_of(s), s.params.rates, m,
                                                          RadicandMode::kExact);
        CMatrix11 d = cnumber_diffusion_matrix(s);
        d(kAc, kA) = d(kA, kAc) = 0.0;   // the kick carries no field reservoir noise
        const CMatrix11 mom = b * b.transpose();
        worst_exact = std::max(worst_exact, (mom - d).cwiseAbs().maxCoeff() /
                                                std::max(d.cwiseAbs().maxCoeff(), 1e-300));
    }
    r.add("block_assembly_bbt_equals_d", failures == 0 && worst_bbt <= 1e-10, worst_bbt, 1e-10,
          failures ? std::to_string(failures) + " states failed, first: " + first_offender
                   : std::to_string(states) + " states");
    r.add("full_factor_exact_moments_equal_d", worst_exact <= 1e-10, worst_exact, 1e-10,
          std::to_string(states) + " states");

    // each block family on its own
    const BlockFamily fams[] = {BlockFamily::kCoherencePopulation, BlockFamily::kPopulationPair,
                                 BlockFamily::kCoherenceCross, BlockFamily::kConjugatePair};
    const char* names[] = {"coherence_population", "population_pair", "coherence_cross",
                           "conjugate_pair"};
    std::normal_distribution<double> g;
    auto rc = [&] { return cd(g(rng), g(rng)); };
    for (int f = 0; f < 4; ++f) {
        for (bool variant : {false, true}) {
            if (variant && fams[f] != BlockFamily::kPopulationPair)
                continue;
            double worst = 0.0;
            for (int t = 0; t < std::max(states, 100); ++t) {
                const cd a = rc(), b = rc(), c = rc();
                const Factor bf = block_factor(fams[f], a, b, c, variant);
                const Factor d = block_matrix(fams[f], a, b, c, variant);
                worst = std::max(worst, (bf * bf.transpose() - d).cwiseAbs().maxCoeff() /
                                            (1.0 + d.cwiseAbs().maxCoeff()));
            }
            r.add(std::string("block_factor_") + names[f] + (variant ? "_coherence_variant" : ""),
                  worst <= 1e-12, worst, 1e-12);
        }
    }

    // operator Einstein relation, SI rates
    double worst_einstein = 0.0;
    const ThreeLevelMap map;
    const int einstein_states = std::min(states, 20);
    for (int t = 0; t < einstein_states; ++t) {
        const QuantumSystem sys = random_three_level_system(rng);
        const DensityMatrix rho = random_density_matrix(rng, 3);
        const double gmax = sys.max_rate();
        for (auto p : all_correlation_pairs()) {
            if (p == CorrelationPair::kFaDagFa || p == CorrelationPair::kFaFaDag)
                continue;
            const double res = einstein_check(p, rho, sys, map, 2e5, 1e-6 / gmax);
            worst_einstein = std::max(worst_einstein, std::abs(res) / gmax);
        }
    }
    r.add("einstein_relation", worst_einstein <= 1e-8, worst_einstein, 1e-8,
          std::to_string(einstein_states) + " states, residual / max rate");
    return r;
}

// ---------------------------------------------------------------- noise stats

SuiteReport verify_noise_stats(long full_draws, long reduced_draws, std::uint64_t seed)
{
    if (full_draws < 2 || reduced_draws < 2)
        throw ConfigError("verify noise-stats: samples must be >= 2");
    SuiteReport r;
    r.suite = "noise-stats";
    std::mt19937_64 rng(seed);
    const NoiseStream ns(seed);

    {
        double m = 0.0;
        const CNumberState s = random_cnumber_state(rng, m);
        const FullNoiseFactor b =
            full_fluctuation_factor(view_of(s), s.params.rates, m, RadicandMode::kExact);
        CMatrix11 d = cnumber_diffusion_matrix(s);
        constexpr int lo = kS23c, n = 11 - kS23c;
        Eigen::Matrix<cd, n, n> sum = Eigen::Matrix<cd, n, n>::Zero();
        Eigen::Matrix<double, n, n> sq_re = Eigen::Matrix<double, n, n>::Zero();
        Eigen::Matrix<double, n, n> sq_im = Eigen::Matrix<double, n, n>::Zero();
        double xi[kFullDrawCount];
        Eigen::Map<const Eigen::Matrix<double, kFullDrawCount, 1>> x(xi);
        for (long k = 0; k < full_draws; ++k) {
            ns.gaussians(DrawDomain::kTest, 11, static_cast<std::uint64_t>(k), kFullDrawCount, xi);
            const Eigen::Matrix<cd, 11, 1> f = b * x.cast<cd>();
            for (int i = 0; i < n; ++i)
                for (int j = i; j < n; ++j) {
                    const cd p = f[lo + i] * f[lo + j];
                    sum(i, j) += p;
                    sq_re(i, j) += p.real() * p.real();
                    sq_im(i, j) += p.imag() * p.imag();
                }
        }
        const double nd = static_cast<double>(full_draws);
        double zmax = 0.0;
        int beyond = 0, compared = 0;
        std::string worst;
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                const cd mean = sum(i, j) / nd;
                const cd target = d(lo + i, lo + j);
                const double parts[2][3] = {
                    {mean.real(), target.real(), sq_re(i, j) / nd - mean.real() * mean.real()},
                    {mean.imag(), target.imag(), sq_im(i, j) / nd - mean.imag() * mean.imag()}};
                for (int c = 0; c < 2; ++c) {
                    const double sigma = std::sqrt(std::max(parts[c][2], 0.0) / nd);
                    const double diff = std::abs(parts[c][0] - parts[c][1]);
                    double z;
                    if (sigma > 0.0)
                        z = diff / sigma;
                    else
                        z = diff <= 1e-12 * (1.0 + std::abs(parts[c][1])) ? 0.0 : INFINITY;
                    ++compared;
                    if (z > 3.0)
                        ++beyond;
                    if (z > zmax) {
                        zmax = z;
                        worst = "(" + cnumber_label(lo + i) + "," + cnumber_label(lo + j) + ") " +
                                (c ? "imag" : "real");
                    }
                }
            }
        r.add("full_fluctuation_moments_within_3_sigma", beyond == 0, zmax, 3.0,
              std::to_string(full_draws) + " draws, " + std::to_string(compared) +
                  " real comparisons, " + std::to_string(beyond) + " beyond 3 sigma, worst " +
                  worst);
    }

    {
        const QuantumSystem q = random_three_level_system(rng);
        const DensityMatrix rho = random_density_matrix(rng, 3);
        const double n_cell = 1e4;
        double var_pop[3] = {0, 0, 0}, var_coh[3] = {0, 0, 0};
        double xi[9];
        for (long k = 0; k < reduced_draws; ++k) {
            ns.gaussians(DrawDomain::kTest, 12, static_cast<std::uint64_t>(k), 9, xi);
            int p = 0;
            for (int i = 1; i < 3; ++i)
                for (int j = 0; j < i; ++j, ++p) {
                    const double fp = reduced_population_noise(i, j, rho, q, n_cell, xi[3 * p]);
                    var_pop[p] += fp * fp;
                    var_coh[p] += std::norm(reduced_coherence_noise(i, j, rho, q, n_cell,
                                                                    xi[3 * p + 1], xi[3 * p + 2]));
                }
        }
        const double nd = static_cast<double>(reduced_draws);
        double worst_pop = 0.0, worst_coh = 0.0;
        int p = 0;
        for (int i = 1; i < 3; ++i)
            for (int j = 0; j < i; ++j, ++p) {
                const double pop =
                    (q.rate(j, i) * rho(i, i).real() + q.rate(i, j) * rho(j, j).real()) / n_cell;
                double s = (2 * q.gamma(i, j) - q.inverse_lifetime(j)) * rho(j, j).real();
                for (int l = 0; l < 3; ++l)
                    if (l != j)
                        s += q.rate(j, l) * rho(l, l).real();
                const double coh = s / n_cell;
                worst_pop = std::max(worst_pop, std::abs(var_pop[p] / nd / pop - 1.0));
                worst_coh = std::max(worst_coh, std::abs(var_coh[p] / nd / coh - 1.0));
            }
        r.add("reduced_population_variance", worst_pop <= 0.05, worst_pop, 0.05,
              std::to_string(reduced_draws) + " draws, relative error");
        r.add("reduced_coherence_variance", worst_coh <= 0.05, worst_coh, 0.05,
              std::to_string(reduced_draws) + " draws, relative error");
    }
    return r;
}

// ---------------------------------------------------------------- solver

PulseSpeedResult free_space_pulse_speed(double cells_per_wavelength, double courant, double eps_r)
{
    const int cells = 1400, src = 100, pa = 400, pb = 1000;
    const double dx = 1e-6;
    MaterialParams mat;
    mat.eps_r = eps_r;
    const double n = mat.refractive_index();
    const double dt = courant_timestep(dx, n, courant);
    const double lambda = cells_per_wavelength * dx;    // in the medium
    const double omega = 2.0 * kPi * kC0 / (n * lambda);
    const double tau = 4.0 * 2.0 * kPi / omega;
    const double t0 = 4.0 * tau;
    const std::vector<MaterialParams> mats(cells, mat);
    const FieldSolver solver(mats, dx, dt, BoundarySpec::absorbing(), BoundarySpec::absorbing());
    GridState s = GridState::create(cells, dx, dt, mats);
    const std::vector<double> dp(cells, 0.0);
    FacetRecord facets;
    const double travel = (pb - src) * dx * n / kC0;
    const long steps = static_cast<long>((2.0 * t0 + travel) / dt) + 1;
    std::vector<double> ea, eb;
    for (long k = 1; k <= steps; ++k) {
        solver.update_h(s);
        solver.update_e(s, dp);
        solver.apply_boundaries(s, dp, facets);
        const double t = static_cast<double>(k) * dt;
        const double x = (t - t0) / tau;
        s.e_field[src] += std::exp(-x * x) * std::sin(omega * t);
        ea.push_back(s.e_field[pa]);
        eb.push_back(s.e_field[pb]);
    }
    PulseSpeedResult r;
    r.measured = (pb - pa) * dx / (envelope_peak_time(eb, dt) - envelope_peak_time(ea, dt));
    r.expected = kC0 / n;
    return r;
}

double cavity_energy_drift(long steps)
{
    const int cells = 200;
    const double dx = 1e-6;
    const std::vector<MaterialParams> mats(cells, MaterialParams{});
    const double dt = courant_timestep(dx, 1.0, 0.9);
    const FieldSolver solver(mats, dx, dt, BoundarySpec::reflector(), BoundarySpec::reflector());
    GridState s = GridState::create(cells, dx, dt, mats);
    for (int k = 1; k < cells; ++k) {
        const double x = (k - 0.5 * cells) / 10.0;
        s.e_field[k] = std::exp(-x * x) * std::cos(0.8 * k);
    }
    const std::vector<double> dp(cells, 0.0);
    FacetRecord facets;
    std::vector<double> h_prev = s.h_field;
    double w0 = 0.0, drift = 0.0;
    for (long k = 0; k < steps; ++k) {
        h_prev = s.h_field;
        solver.update_h(s);
        const double w = solver.leapfrog_energy(s, h_prev);
        if (k == 0)
            w0 = w;
        else
            drift = std::max(drift, std::abs(w - w0) / w0);
        solver.update_e(s, dp);
        solver.apply_boundaries(s, dp, facets);
    }
    return drift;
}

RabiResult two_level_rabi(int periods, double rabi_over_omega, int steps_per_period)
{
    const double omega0 = 2.0 * kPi * 1e12;
    const double mu = kElementaryCharge * 1e-9;
    const double rabi = rabi_over_omega * omega0;
    const double e0 = rabi * kHbar / mu;
    const QuantumSystem sys = two_level_system(omega0, mu, kNoDecay, kNoDecay, 1e20);
    const double dt = 2.0 * kPi / omega0 / steps_per_period;
    const Propagator prop(sys, dt, NoiseScheme::kOff);
    const long steps = static_cast<long>(std::ceil((periods + 0.5) * 2.0 * kPi / rabi / dt));
    DensityMatrix rho = DensityMatrix::Zero(2, 2);
    rho(0, 0) = 1.0;
    NoiseDiagnostics diag;
    const NoiseStream stream(0);
    std::vector<double> pe(static_cast<std::size_t>(steps) + 1);
    pe[0] = 0.0;
    for (long k = 0; k < steps; ++k) {
        const double tm = (static_cast<double>(k) + 0.5) * dt;
        prop.full_step(rho, e0 * std::cos(omega0 * tm), 0.0, DrawKey{&stream, 0, 0}, diag);
        pe[static_cast<std::size_t>(k) + 1] = rho(1, 1).real();
    }
    // one optical period boxcar removes the counter-rotating ripple
    const int w = steps_per_period;
    std::vector<double> sm(pe.size(), 0.0);
    double acc = 0.0;
    for (std::size_t k = 0; k < pe.size(); ++k) {
        acc += pe[k];
        if (k >= static_cast<std::size_t>(w))
            acc -= pe[k - w];
        sm[k] = acc / w;
    }
    // upward crossings of 1/2 with hysteresis; boxcar delay is common to all
    std::vector<double> t_up;
    bool armed = false;
    for (std::size_t k = static_cast<std::size_t>(w); k < sm.size(); ++k) {
        if (sm[k] < 0.2)
            armed = true;
        if (armed && sm[k - 1] < 0.5 && sm[k] >= 0.5) {
            const double frac = (0.5 - sm[k - 1]) / (sm[k] - sm[k - 1]);
            t_up.push_back((static_cast<double>(k - 1) + frac) * dt);
            armed = false;
        }
    }
    RabiResult r;
    r.expected = rabi;
    r.periods = static_cast<int>(t_up.size()) - 1;
    if (r.periods >= 1)
        r.measured = 2.0 * kPi * r.periods / (t_up.back() - t_up.front());
    return r;
}

ConvergenceResult driven_cell_convergence()
{
    const double omega0 = 2.0 * kPi * 1e12;
    const double mu = kElementaryCharge * 1e-9;
    const double e0 = 0.1 * omega0 * kHbar / mu;
    const QuantumSystem sys = two_level_system(omega0, mu, 3e-12, 2e-12, 1e20);
    const double period = 2.0 * kPi / omega0;
    const NoiseStream stream(0);
    auto evolve = [&](int steps_per_period) {
        const double dt = period / steps_per_period;
        const Propagator prop(sys, dt, NoiseScheme::kOff);
        DensityMatrix rho = DensityMatrix::Zero(2, 2);
        rho(0, 0) = 1.0;
        NoiseDiagnostics diag;
        for (int k = 0; k < 3 * steps_per_period; ++k) {
            const double tm = (k + 0.5) * dt;
            prop.full_step(rho, e0 * std::cos(omega0 * tm), 0.0, DrawKey{&stream, 0, 0}, diag);
        }
        return rho;
    };
    const DensityMatrix ref = evolve(20 * 128);
    ConvergenceResult r;
    for (int spp : {20, 40, 80}) {
        r.dt.push_back(period / spp);
        r.error.push_back((evolve(spp) - ref).cwiseAbs().maxCoeff());
    }
    // least-squares slope of log error against log dt
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < r.dt.size(); ++k) {
        const double x = std::log(r.dt[k]), y = std::log(r.error[k]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double nk = static_cast<double>(r.dt.size());
    r.order = (nk * sxy - sx * sy) / (nk * sxx - sx * sx);
    return r;
}

SuiteReport verify_solver(long energy_steps)
{
    SuiteReport r;
    r.suite = "solver";
    for (double courant : {0.95, 0.5}) {
        const PulseSpeedResult v = free_space_pulse_speed(20.0, courant, 12.96);
        const double ev = std::abs(v.measured / v.expected - 1.0);
        r.add(courant == 0.95 ? "free_space_pulse_speed" : "free_space_pulse_speed_courant_0.5",
              ev <= 0.01, ev, 0.01,
              fmt("measured %.6g m/s, expected %.6g m/s", v.measured, v.expected) +
                  fmt(", 20 cells per wavelength, Courant %.2g", courant));
    }

    const double drift = cavity_energy_drift(energy_steps);
    r.add("cavity_energy_conservation", drift <= 1e-6, drift, 1e-6,
          std::to_string(energy_steps) + " lossless steps, max relative drift");

    const RabiResult rb = two_level_rabi(10, 0.05, 48);
    const double er = rb.periods >= 10 ? std::abs(rb.measured / rb.expected - 1.0) : INFINITY;
    r.add("two_level_rabi_frequency", er <= 0.01, er, 0.01,
          fmt("measured %.6g rad/s, expected %.6g rad/s", rb.measured, rb.expected) + ", " +
              std::to_string(rb.periods) + " periods");

    const ConvergenceResult c = driven_cell_convergence();
    const double eo = std::abs(c.order - 2.0);
    r.add("driven_cell_dt_convergence_order", eo <= 0.2, c.order, 0.2,
          fmt("errors %.3g ... %.3g", c.error.front(), c.error.back()) + ", |order - 2|");
    return r;
}

} // namespace mdl

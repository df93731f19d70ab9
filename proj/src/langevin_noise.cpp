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

#include "mdl/langevin_noise.hpp"

#include <cmath>

#include "mdl/errors.hpp"

namespace mdl {

std::string to_string(NoiseScheme s)
{
    switch (s) {
    case NoiseScheme::kOff:
        return "off";
    case NoiseScheme::kReduced:
        return "reduced";
    case NoiseScheme::kFull:
        return "full";
    }
    return "off";
}

NoiseScheme noise_scheme_from_string(const std::string& s)
{
    if (s == "off")
        return NoiseScheme::kOff;
    if (s == "reduced")
        return NoiseScheme::kReduced;
    if (s == "full")
        return NoiseScheme::kFull;
    throw ConfigError("noise scheme must be off|reduced|full, got '" + s + "'");
}

double reduced_population_noise(int i, int j, const DensityMatrix& rho,
                                const QuantumSystem& sys, double n_cell, double xi1,
                                NoiseDiagnostics* diag)
{
    if (i == j)
        throw DomainError("reduced_population_noise: i == j");
    if (!(n_cell > 0.0))
        throw DomainError("reduced_population_noise: n_cell must be > 0");
    const double rad =
        (sys.rate(j, i) * rho(i, i).real() + sys.rate(i, j) * rho(j, j).real()) / n_cell;
    if (diag)
        ++diag->draws;
    return xi1 * clamped_sqrt(rad, diag);
}

cd reduced_coherence_noise(int i, int j, const DensityMatrix& rho, const QuantumSystem& sys,
                           double n_cell, double xi2, double xi3, NoiseDiagnostics* diag)
{
    if (i <= j)
        throw DomainError("reduced_coherence_noise: requires i > j");
    if (!(n_cell > 0.0))
        throw DomainError("reduced_coherence_noise: n_cell must be > 0");
    const int n = sys.num_levels();
    double s = (2.0 * sys.gamma(i, j) - sys.inverse_lifetime(j)) * rho(j, j).real();
    for (int m = 0; m < n; ++m)
        if (m != j)
            s += sys.rate(j, m) * rho(m, m).real();
    if (diag)
        diag->draws += 2;
    const double amp = clamped_sqrt(s / (2.0 * n_cell), diag);
    return {xi2 * amp, xi3 * amp};
}

ThreeLevelRates ThreeLevelRates::from_system(const QuantumSystem& sys, const ThreeLevelMap& m)
{
    if (sys.num_levels() != 3)
        throw ConfigError("full noise scheme requires a three-level system");
    ThreeLevelRates r;
    const int i1 = m.injector, i2 = m.lower, i3 = m.upper;
    r.r32 = sys.rate(i3, i2);
    r.r23 = sys.rate(i2, i3);
    r.r12 = sys.rate(i1, i2);
    r.r21 = sys.rate(i2, i1);
    r.r13 = sys.rate(i1, i3);
    r.r31 = sys.rate(i3, i1);
    r.g23 = sys.gamma(i2, i3);
    r.g13 = sys.gamma(i1, i3);
    r.g12 = sys.gamma(i1, i2);
    r.omega = sys.tunneling()(i1, i3);
    return r;
}

ThreeLevelView ThreeLevelView::from_density(const DensityMatrix& rho, const ThreeLevelMap& m)
{
    ThreeLevelView v;
    v.s23 = rho(m.upper, m.lower);
    v.s31 = rho(m.injector, m.upper);
    v.s21 = rho(m.injector, m.lower);
    v.p1 = rho(m.injector, m.injector).real();
    v.p2 = rho(m.lower, m.lower).real();
    v.p3 = rho(m.upper, m.upper).real();
    return v;
}

namespace {

constexpr int kXi11 = 0, kXi12 = 1, kXi13 = 2, kXi14 = 3, kXi15a = 4, kXi15b = 5, kXi16 = 6;
constexpr int kXi31 = 7, kXi32 = 8, kXi33 = 9, kXi41 = 10, kXi42 = 11, kXi43 = 12;
constexpr int kXi21 = 0, kXi22 = 1, kXi23 = 2, kXi24 = 3, kXi25 = 4;

class FactorBuilder {
public:
    FactorBuilder(FullNoiseFactor& b, RadicandMode mode, NoiseDiagnostics* diag)
        : b_(b), mode_(mode), diag_(diag)
    {
        b_.setZero();
    }

    // c multiplies xi_q, d multiplies conj(xi_q)
    void cplx(int row, int q, cd c, cd d)
    {
        b_(row, 2 * q) += c + d;
        b_(row, 2 * q + 1) += cd(0.0, 1.0) * (c - d);
    }
    void xi(int row, int q, cd c) { cplx(row, q, c, 0.0); }
    void xic(int row, int q, cd d) { cplx(row, q, 0.0, d); }
    void real(int row, int k, cd c) { b_(row, 2 * kFullComplexDraws + k) += c; }

    // square root of a radicand that is real for a physical state
    cd root(double x)
    {
        if (mode_ == RadicandMode::kExact)
            return std::sqrt(cd(x, 0.0));
        return clamped_sqrt(x, diag_);
    }

private:
    FullNoiseFactor& b_;
    RadicandMode mode_;
    NoiseDiagnostics* diag_;
};

} // namespace

FullNoiseFactor full_fluctuation_factor(const ThreeLevelView& v, const ThreeLevelRates& r,
                                        double m, RadicandMode mode, NoiseDiagnostics* diag)
{
    FullNoiseFactor b;
    FactorBuilder f(b, mode, diag);
    const cd i(0.0, 1.0);

    // rho_ij in the level labels 1', 2, 3
    const cd rho32 = v.s23, rho23 = std::conj(v.s23);
    const cd rho13 = v.s31, rho31 = std::conj(v.s31);
    const cd rho12 = v.s21, rho21 = std::conj(v.s21);
    const double a32 = std::norm(rho32), a13 = std::norm(rho13), a12 = std::norm(rho12);
    const double p1 = v.p1, p2 = v.p2, p3 = v.p3;

    const double sr32 = std::sqrt(r.r32), sr23 = std::sqrt(r.r23), sr12 = std::sqrt(r.r12);
    const double sr13 = std::sqrt(r.r13);
    const cd sgs = f.root(0.5 * (r.g12 - r.g13 + r.g23));

    const double x41 = 0.5 * (r.g13 - r.g12 - r.g23) + 0.5 * r.r32 * p2 +
                       0.5 * (2.0 * r.g23 - r.r13 - r.r23) * p3 - 0.5 * m * m - r.r12 - r.r32 +
                       std::abs(m * rho32);
    const double x42 = 0.5 * (2.0 * r.g13 - r.r21 - r.r31) * p1 + 0.5 * r.r12 * p2 - a13 +
                       0.5 * r.r13 * p3 - m * m - r.r13 - r.r23 + std::abs(r.omega * rho13);
    const double x43 = 0.5 * (2.0 * r.g12 - r.r21 - r.r31) * p1 + 0.5 * r.r12 * p2 - a12 +
                       0.5 * r.r13 * p3 - r.r12 - r.r32 +
                       0.5 * (r.g13 - r.g12 - r.g23) * a13;
    // i m (rho32 - rho23) and i Omega (rho31 - rho13) are real
    const double x21 = -(r.r32 + 1.0) * a12 + r.r23 * (p3 - a13) + r.r32 * (p2 - a32) -
                       2.0 * m * rho32.imag();
    const double x22 = -2.0 * r.omega * rho31.imag() + r.r31 * p1 + r.r13 * (p3 - a13);
    const double x23 = r.r21 * p1 - r.r12 * (a12 - p2 + a32);

    const cd s41 = f.root(x41), s42 = f.root(x42), s43 = f.root(x43);
    const cd s21 = f.root(x21), s22 = f.root(x22), s23 = f.root(x23);
    const cd s24 = std::sqrt(2.0 * i * m * rho32);
    const cd s24c = std::sqrt(-2.0 * i * m * rho23);
    const cd s25 = std::sqrt(-2.0 * i * r.omega * rho13);
    const cd s25c = std::sqrt(2.0 * i * r.omega * rho31);

    // F23
    f.xi(kS23, kXi11, sr32);
    f.xi(kS23, kXi14, sr12);
    f.real(kS23, kXi24, -s24);
    f.xic(kS23, kXi31, -0.5 * i * m);
    f.xic(kS23, kXi32, 0.5 * i * m);
    f.xic(kS23, kXi33, sgs);
    f.xic(kS23, kXi41, s41);

    // F31'
    f.xi(kS31, kXi12, sr13);
    f.xi(kS31, kXi15a, sr23);
    f.xi(kS31, kXi15b, -i * m);
    f.real(kS31, kXi25, -s25);
    f.xi(kS31, kXi31, rho13);
    f.xic(kS31, kXi42, s42);

    // F21'
    f.xi(kS21, kXi13, sr12);
    f.xi(kS21, kXi16, sr32);
    f.xi(kS21, kXi32, rho12);
    f.xic(kS21, kXi33, sgs * rho13);
    f.xic(kS21, kXi43, s43);

    // F33
    f.cplx(kS33, kXi11, -0.5 * sr32 * rho23, -0.5 * sr32 * rho32);
    f.cplx(kS33, kXi12, 0.5 * sr13 * rho31, 0.5 * sr13 * rho13);
    f.cplx(kS33, kXi15a, 0.5 * sr23 * rho31, 0.5 * sr23 * rho13);
    f.cplx(kS33, kXi15b, -0.5 * rho21, -0.5 * rho12);
    f.cplx(kS33, kXi16, -0.5 * sr32 * rho21, -0.5 * sr32 * rho12);
    f.real(kS33, kXi21, s21);
    f.real(kS33, kXi22, s22);

    // F22
    f.cplx(kS22, kXi11, 0.5 * sr32 * rho23, 0.5 * sr32 * rho32);
    f.cplx(kS22, kXi13, 0.5 * sr12 * rho21, 0.5 * sr12 * rho12);
    f.cplx(kS22, kXi14, 0.5 * sr12 * rho23, 0.5 * sr12 * rho32);
    f.cplx(kS22, kXi15a, -0.5 * sr23 * rho31, -0.5 * sr23 * rho13);
    f.cplx(kS22, kXi15b, 0.5 * rho21, 0.5 * rho12);
    f.cplx(kS22, kXi16, 0.5 * sr32 * rho21, 0.5 * sr32 * rho12);
    f.real(kS22, kXi21, -s21);
    f.real(kS22, kXi23, s23);

    // F1'1'
    f.cplx(kS11, kXi12, -0.5 * sr13 * rho31, -0.5 * sr13 * rho13);
    f.cplx(kS11, kXi13, -0.5 * sr12 * rho21, -0.5 * sr12 * rho12);
    f.cplx(kS11, kXi14, -0.5 * sr12 * rho23, -0.5 * sr12 * rho32);
    f.real(kS11, kXi22, -s22);
    f.real(kS11, kXi23, -s23);

    // F1'2
    f.xic(kS21c, kXi13, sr12);
    f.xic(kS21c, kXi16, sr32);
    f.xic(kS21c, kXi32, rho21);
    f.xi(kS21c, kXi33, sgs * rho31);
    f.xi(kS21c, kXi43, s43);

    // F1'3
    f.xic(kS31c, kXi12, sr13);
    f.xic(kS31c, kXi15a, sr23);
    f.xic(kS31c, kXi15b, i * m);
    f.real(kS31c, kXi25, s25c);
    f.xic(kS31c, kXi31, rho31);
    f.xi(kS31c, kXi42, s42);

    // F32
    f.xic(kS23c, kXi11, sr32);
    f.xic(kS23c, kXi14, sr12);
    f.real(kS23c, kXi24, s24c);
    f.xi(kS23c, kXi31, 0.5 * i * m);
    f.xi(kS23c, kXi32, -0.5 * i * m);
    f.xi(kS23c, kXi33, sgs);
    f.xi(kS23c, kXi41, s41);

    return b;
}

std::array<cd, 11> full_fluctuation_vector(const DensityMatrix& rho, const QuantumSystem& sys,
                                           const ThreeLevelMap& map, double e_z, double n_cell,
                                           const double* xi, RadicandMode mode,
                                           NoiseDiagnostics* diag)
{
    if (!(n_cell > 0.0))
        throw DomainError("full_fluctuation_vector: n_cell must be > 0");
    const ThreeLevelRates r = ThreeLevelRates::from_system(sys, map);
    const ThreeLevelView v = ThreeLevelView::from_density(rho, map);
    const double m = sys.dipole_z()(map.lower, map.upper) * e_z / kHbar;
    const FullNoiseFactor b = full_fluctuation_factor(v, r, m, mode, diag);
    Eigen::Map<const Eigen::Matrix<double, kFullDrawCount, 1>> x(xi);
    const Eigen::Matrix<cd, 11, 1> f = b * x.cast<cd>() / std::sqrt(n_cell);
    if (diag)
        diag->draws += kFullDrawCount;
    std::array<cd, 11> out;
    for (int k = 0; k < 11; ++k)
        out[k] = f(k);
    return out;
}

DensityMatrix initial_condition_2lvl(double theta, double phi)
{
    DensityMatrix rho(2, 2);
    const double c = std::cos(0.5 * theta), s = std::sin(0.5 * theta);
    rho(0, 0) = s * s;
    rho(1, 1) = c * c;
    rho(1, 0) = 0.5 * std::sin(theta) * std::polar(1.0, phi);
    rho(0, 1) = std::conj(rho(1, 0));
    return rho;
}

std::array<double, 2> tipping_draw(double n_cell, const NoiseStream& rng, std::uint32_t cell)
{
    if (!(n_cell > 0.0))
        throw DomainError("initial_condition_2lvl: n_cell must be > 0");
    double g = 0.0, u = 0.0;
    rng.gaussians(DrawDomain::kInitial, cell, 0, 1, &g);
    rng.uniforms(DrawDomain::kInitial, cell, 1, 1, &u);
    return {g * 2.0 / std::sqrt(n_cell), 2.0 * kPi * u};
}

DensityMatrix initial_condition_2lvl(double n_cell, const NoiseStream& rng, std::uint32_t cell)
{
    const auto d = tipping_draw(n_cell, rng, cell);
    return initial_condition_2lvl(d[0], d[1]);
}

double thermal_photon_number(double omega0, double temperature)
{
    if (!(omega0 > 0.0) || !(temperature >= 0.0))
        throw DomainError("thermal_photon_number: requires omega0 > 0, T >= 0");
    if (temperature == 0.0)
        return 0.0;
    return 1.0 / std::expm1(kHbar * omega0 / (kBoltzmann * temperature));
}

} // namespace mdl

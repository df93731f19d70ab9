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

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mdl/quantum_model.hpp"
#include "mdl/random.hpp"

namespace mdl {

enum class NoiseScheme { kOff, kReduced, kFull };

enum class NCellSource { kDerived, kExplicit };

struct NoiseModel {
    NoiseScheme scheme = NoiseScheme::kReduced;
    std::uint64_t seed = 1;
    NCellSource n_cell_source = NCellSource::kDerived;
    std::vector<double> n_cell_explicit;
};

std::string to_string(NoiseScheme s);
NoiseScheme noise_scheme_from_string(const std::string& s);

/** Counters accumulated over a run; merged across workers in a fixed order. */
struct NoiseDiagnostics {
    std::uint64_t draws = 0;
    std::uint64_t clamp_events = 0;
    double most_negative_radicand = 0.0;

    void clamp(double radicand)
    {
        ++clamp_events;
        if (radicand < most_negative_radicand)
            most_negative_radicand = radicand;
    }
    void merge(const NoiseDiagnostics& o)
    {
        draws += o.draws;
        clamp_events += o.clamp_events;
        if (o.most_negative_radicand < most_negative_radicand)
            most_negative_radicand = o.most_negative_radicand;
    }
    double clamp_rate() const
    {
        return draws ? static_cast<double>(clamp_events) / static_cast<double>(draws) : 0.0;
    }
};

/** sqrt(max(x, 0)), counting a clamp when x < 0. */
inline double clamped_sqrt(double x, NoiseDiagnostics* diag)
{
    if (x < 0.0) {
        if (diag)
            diag->clamp(x);
        return 0.0;
    }
    return std::sqrt(x);
}

// ---------------------------------------------------------------- reduced

/** Number of unit Gaussians per cell and step for the reduced scheme. */
constexpr int reduced_draw_count(int n) { return 3 * n * (n - 1) / 2; }

/** Pairwise population increment F_ii^j (the partner is -F_ii^j). */
double reduced_population_noise(int i, int j, const DensityMatrix& rho,
                                const QuantumSystem& sys, double n_cell, double xi1,
                                NoiseDiagnostics* diag = nullptr);

/** Coherence increment F_ij for i > j; F_ji is its conjugate. */
cd reduced_coherence_noise(int i, int j, const DensityMatrix& rho, const QuantumSystem& sys,
                           double n_cell, double xi2, double xi3,
                           NoiseDiagnostics* diag = nullptr);

/**
 * Full reduced fluctuation matrix from reduced_draw_count(N) draws. Pairs
 * (i > j) are enumerated row-major; pair p uses xi[3p], xi[3p+1], xi[3p+2].
 * Result is Hermitian with zero trace.
 */
template <class Mat>
void reduced_fluctuation(const Mat& rho, const QuantumSystem& sys, double n_cell,
                         const double* xi, Mat& f, NoiseDiagnostics* diag)
{
    const int n = static_cast<int>(rho.rows());
    f.setZero();
    const double inv_n = 1.0 / n_cell;
    int p = 0;
    for (int i = 1; i < n; ++i) {
        for (int j = 0; j < i; ++j, ++p) {
            const double pii = rho(i, i).real();
            const double pjj = rho(j, j).real();
            const double pop_rad = (sys.rate(j, i) * pii + sys.rate(i, j) * pjj) * inv_n;
            const double fp = xi[3 * p] * clamped_sqrt(pop_rad, diag);
            f(i, i) += fp;
            f(j, j) -= fp;

            double s = (2.0 * sys.gamma(i, j) - sys.inverse_lifetime(j)) * pjj;
            for (int m = 0; m < n; ++m)
                if (m != j)
                    s += sys.rate(j, m) * rho(m, m).real();
            const double amp = clamped_sqrt(0.5 * s * inv_n, diag);
            const cd fc(xi[3 * p + 1] * amp, xi[3 * p + 2] * amp);
            f(i, j) = fc;
            f(j, i) = std::conj(fc);
        }
    }
    if (diag)
        diag->draws += static_cast<std::uint64_t>(3 * p);
}

// ---------------------------------------------------------------- full

/** Level indices of the injector (1'), lower (2) and upper (3) laser levels. */
struct ThreeLevelMap {
    int injector = 0;
    int lower = 1;
    int upper = 2;
};

/**
 * Index of the 11-component c-number vector
 * (a*, a, s23*, s31'*, s21'*, s33, s22, s1'1', s21', s31', s23).
 */
enum CIndex : int {
    kAc = 0,
    kA = 1,
    kS23c = 2,
    kS31c = 3,
    kS21c = 4,
    kS33 = 5,
    kS22 = 6,
    kS11 = 7,
    kS21 = 8,
    kS31 = 9,
    kS23 = 10,
};

constexpr int kFullComplexDraws = 13;
constexpr int kFullRealDraws = 5;
/** Real unit Gaussians per cell and step for the full scheme. */
constexpr int kFullDrawCount = 2 * kFullComplexDraws + kFullRealDraws;

enum class RadicandMode { kExact, kClamped };

/**
 * Linear map from kFullDrawCount real unit Gaussians to the fluctuation
 * components, row k is the noise on c-number component k (rows 0, 1 are
 * zero: no field reservoir noise). Complex draw q is x_{2q} + i x_{2q+1};
 * the real draws follow at 2*kFullComplexDraws.
 */
using FullNoiseFactor = Eigen::Matrix<cd, 11, kFullDrawCount>;

/** Rates and couplings of the three-level system in (1', 2, 3) order. */
struct ThreeLevelRates {
    double r32 = 0, r23 = 0;   // 2 -> 3, 3 -> 2
    double r12 = 0, r21 = 0;   // 2 -> 1', 1' -> 2
    double r13 = 0, r31 = 0;   // 3 -> 1', 1' -> 3
    double g23 = 0, g13 = 0, g12 = 0;
    double omega = 0;          // tunneling, rad/s

    static ThreeLevelRates from_system(const QuantumSystem& sys, const ThreeLevelMap& m);
};

/** Components of rho in the c-number convention sigma_ij <-> rho_ji. */
struct ThreeLevelView {
    cd s23, s31, s21;   // rho(3,2), rho(1',3), rho(1',2)
    double p1 = 0, p2 = 0, p3 = 0;

    static ThreeLevelView from_density(const DensityMatrix& rho, const ThreeLevelMap& m);
};

/**
 * Fluctuation factor of the full three-level scheme, before the 1/sqrt(N_cell)
 * scaling. m is the Rabi coupling mu_23 E / hbar (rad/s).
 */
FullNoiseFactor full_fluctuation_factor(const ThreeLevelView& v, const ThreeLevelRates& r,
                                        double m, RadicandMode mode,
                                        NoiseDiagnostics* diag = nullptr);

/**
 * Noise increments per c-number component (index by CIndex), scaled by
 * 1/sqrt(n_cell), from kFullDrawCount real draws.
 */
std::array<cd, 11> full_fluctuation_vector(const DensityMatrix& rho, const QuantumSystem& sys,
                                           const ThreeLevelMap& map, double e_z, double n_cell,
                                           const double* xi, RadicandMode mode,
                                           NoiseDiagnostics* diag = nullptr);

/**
 * Maps a c-number increment vector onto a Hermitian matrix increment. The
 * unstarred coherences (s23, s31', s21') and the populations s33, s22 are
 * primary; partners follow by conjugation and trace closure.
 */
template <class Mat>
void full_fluctuation_matrix(const std::array<cd, 11>& v, const ThreeLevelMap& m, Mat& f)
{
    f.setZero();
    const int i1 = m.injector, i2 = m.lower, i3 = m.upper;
    f(i3, i3) = v[kS33].real();
    f(i2, i2) = v[kS22].real();
    f(i1, i1) = -(f(i3, i3) + f(i2, i2));
    f(i3, i2) = v[kS23];            // sigma23 <-> rho32
    f(i2, i3) = std::conj(v[kS23]);
    f(i1, i3) = v[kS31];            // sigma31' <-> rho1'3
    f(i3, i1) = std::conj(v[kS31]);
    f(i1, i2) = v[kS21];            // sigma21' <-> rho1'2
    f(i2, i1) = std::conj(v[kS21]);
}

// ---------------------------------------------------------------- misc

/** Inverted two-level state tipped by theta, phase phi (index 0 ground). */
DensityMatrix initial_condition_2lvl(double theta, double phi);

/** Random tipping: theta ~ N(0, 2/sqrt(n_cell)), phi ~ U(0, 2 pi). */
DensityMatrix initial_condition_2lvl(double n_cell, const NoiseStream& rng, std::uint32_t cell);

/** Tipping angle and phase drawn for a cell. */
std::array<double, 2> tipping_draw(double n_cell, const NoiseStream& rng, std::uint32_t cell);

double thermal_photon_number(double omega0, double temperature);

} // namespace mdl

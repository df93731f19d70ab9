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
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mdl/langevin_noise.hpp"
#include "mdl/quantum_model.hpp"

namespace mdl {

using CVector11 = Eigen::Matrix<cd, 11, 1>;
using CMatrix11 = Eigen::Matrix<cd, 11, 11>;

struct CNumberParams {
    ThreeLevelRates rates;
    double g = 1.0;          // field coupling; with g = 1, a carries mu E / hbar
    double kappa = 0.0;      // cavity decay, 1/s
    double n_th = 0.0;
};

/** c-number vector (a*, a, s23*, s31'*, s21'*, s33, s22, s1'1', s21', s31', s23). */
struct CNumberState {
    CVector11 a = CVector11::Zero();
    CNumberParams params;

    /** From a density matrix: s_ij <-> rho_ji; a = a* = m with g = 1. */
    static CNumberState from_density(const DensityMatrix& rho, const ThreeLevelMap& map,
                                     const ThreeLevelRates& rates, double m, double kappa = 0.0,
                                     double n_th = 0.0);

    cd ga() const { return params.g * a[kA]; }
    cd gac() const { return params.g * a[kAc]; }
};

enum class CorrelationPair {
    kFaDagFa,
    kFaFaDag,
    kF23DagF23,
    kF23F23Dag,
    kF31DagF31,
    kF31F31Dag,
    kF21DagF21,
    kF21F21Dag,
    kF33F33,
    kF22F22,
    kF11F11,
};

/** Labels such as "F23+F23", "FaFa+", "F1'1'F1'1'". */
CorrelationPair correlation_pair_from_label(const std::string& label);
std::string label(CorrelationPair p);
std::vector<CorrelationPair> all_correlation_pairs();

/** Operator second-order correlation coefficient (1/s). */
double quantum_correlation(CorrelationPair pair, const CNumberState& state);
double quantum_correlation(const std::string& pair, const CNumberState& state);

/** The full 11x11 c-number diffusion matrix; complex symmetric. */
CMatrix11 cnumber_diffusion_matrix(const CNumberState& state);

enum class BlockFamily {
    kCoherencePopulation,   // 4x2
    kPopulationPair,        // 2x1
    kCoherenceCross,        // 4x2
    kConjugatePair,         // 2x2
};

using Factor = Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic>;

/**
 * Rectangular factor of one block; coherence_variant selects the
 * (s*, s) form of the 2x1 family: [a, a*] instead of [a, -a].
 */
Factor block_factor(BlockFamily family, cd a, cd b = 0.0, cd c = 0.0,
                     bool coherence_variant = false);

/** The block D_nu for the same parameters, written out entrywise (independent form). */
Factor block_matrix(BlockFamily family, cd a, cd b = 0.0, cd c = 0.0,
                    bool coherence_variant = false);

struct BlockPlacement {
    BlockFamily family;
    bool coherence_variant = false;
    std::vector<int> rows;     // c-number indices of the block rows
    cd a, b, c;
    std::string tag;
};

struct NoiseAssembly {
    Eigen::Matrix<cd, 11, Eigen::Dynamic> b;
    std::vector<BlockPlacement> blocks;
    CMatrix11 residual;                    // D - B B^T
    double scale = 0.0;                    // max |D|
    std::vector<std::string> offending;    // entries beyond tolerance
    bool ok() const { return offending.empty(); }
};

/**
 * B assembled from block factorizations with closed-form parameters, each block
 * adding independent real columns; checked against the diffusion matrix.
 */
NoiseAssembly assemble_noise_matrix(const CNumberState& state, double rel_tol = 1e-10);

std::string cnumber_label(int k);

/** Operators A_mu, A_nu of a system-operator pair, in the level basis. */
std::array<ComplexMatrix, 2> pair_operators(CorrelationPair pair, const ThreeLevelMap& map);

/**
 * 2 D - (d/dt <A A> - <M A> - <A M>) with the time derivative from a central
 * difference of the Lindblad evolution over +-dt. Field pairs are rejected.
 */
double einstein_check(CorrelationPair pair, const DensityMatrix& rho, const QuantumSystem& sys,
                      const ThreeLevelMap& map, double e_z, double dt);

/** rho = G G^dag / tr G G^dag with complex Gaussian G. */
DensityMatrix random_density_matrix(std::mt19937_64& rng, int n);

/**
 * Three-level system in (1', 2, 3) = (0, 1, 2) order with rates uniform in
 * [0.2, 2] * unit and per-level pure dephasing gp_ij = (d_i + d_j) / 2,
 * d_i uniform in [0, unit]. omega < 0 draws the tunneling rate too.
 */
QuantumSystem random_three_level_system(std::mt19937_64& rng, double unit = 1e12,
                                        double omega = -1.0);

/** Adjoint of the dissipator, tr(A D(rho)) = tr(D^dag(A) rho). */
ComplexMatrix adjoint_dissipator(const QuantumSystem& sys, const ComplexMatrix& a);

} // namespace mdl

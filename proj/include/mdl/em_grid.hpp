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

#include <string>
#include <vector>

#include "mdl/quantum_model.hpp"

namespace mdl {

struct MaterialParams {
    double eps_r = 1.0;
    double chi = 0.0;            // instantaneous background susceptibility
    double sigma = 0.0;          // S/m
    double gamma_overlap = 1.0;  // confinement factor
    double mu_r = 1.0;

    void validate() const;
    double refractive_index() const;
};

enum class BoundaryKind { kReflector, kFacet, kAbsorbing };

struct BoundarySpec {
    BoundaryKind kind = BoundaryKind::kAbsorbing;
    double reflectivity = 0.0;   // amplitude reflectivity for kFacet

    void validate() const;
    static BoundarySpec reflector() { return {BoundaryKind::kReflector, 1.0}; }
    static BoundarySpec absorbing() { return {BoundaryKind::kAbsorbing, 0.0}; }
    static BoundarySpec facet(double r) { return {BoundaryKind::kFacet, r}; }
    /** Fresnel amplitude reflectivity (n-1)/(n+1) to vacuum. */
    static BoundarySpec fresnel(double n) { return facet((n - 1.0) / (n + 1.0)); }
};

std::string to_string(BoundaryKind k);
BoundaryKind boundary_kind_from_string(const std::string& s);

/** Staggered fields: E at nodes 0..M, H at half nodes 0..M-1, matter per cell. */
struct GridState {
    int num_cells = 0;
    double dx = 0.0;
    double dt = 0.0;
    std::vector<double> e_field;
    std::vector<double> h_field;
    std::vector<DensityMatrix> rho;
    std::vector<double> p_qm;
    std::vector<double> p_qm_prev;
    std::vector<double> n_cell;

    /** Zero fields, empty matter; checks dt against the stability bound. */
    static GridState create(int num_cells, double dx, double dt,
                            const std::vector<MaterialParams>& materials);
};

/** Energy that left through each boundary, per unit cross-section (J/m^2). */
struct FacetRecord {
    double energy_left = 0.0;
    double energy_right = 0.0;
    double power_left = 0.0;     // last step, W/m^2
    double power_right = 0.0;
};

double courant_timestep(double dx, double n, double s = 1.0);

/**
 * Precomputed update coefficients for a fixed material layout and step.
 * dP arrays are per cell (C m^-2 s^-1); Gamma is applied here.
 */
class FieldSolver {
public:
    FieldSolver(std::vector<MaterialParams> cells, double dx, double dt, BoundarySpec left,
                BoundarySpec right);

    int num_cells() const { return static_cast<int>(cells_.size()); }
    const std::vector<MaterialParams>& materials() const { return cells_; }
    const BoundarySpec& left() const { return left_; }
    const BoundarySpec& right() const { return right_; }
    double dx() const { return dx_; }
    double dt() const { return dt_; }

    void update_h(GridState& s) const;
    /** Interior nodes 1..M-1. */
    void update_e(GridState& s, const std::vector<double>& dp) const;
    /** Nodes 0 and M; must run after update_e on the same step. */
    void apply_boundaries(GridState& s, const std::vector<double>& dp, FacetRecord& out) const;

    /** Sum of 1/2 eps E^2 + 1/2 mu H^2 over the grid (J/m^2). */
    double field_energy(const GridState& s) const;
    /** Energy conserved by leapfrog: H term uses H^{n-1/2} H^{n+1/2}. */
    double leapfrog_energy(const GridState& s, const std::vector<double>& h_prev) const;

private:
    std::vector<MaterialParams> cells_;
    double dx_, dt_;
    BoundarySpec left_, right_;
    std::vector<double> ch_;          // dt / (mu dx) per cell
    std::vector<double> ca_, cb_;     // per node
    std::vector<double> node_eps_;
    double bl_num_ = 0, bl_den_ = 0, br_num_ = 0, br_den_ = 0;
    double zl_left_ = 0, zl_right_ = 0;   // load impedance, inf for open
};

void update_h(GridState& s, const FieldSolver& f);
void update_e(GridState& s, const FieldSolver& f, const std::vector<double>& dp);
void apply_boundaries(GridState& s, const FieldSolver& f, const std::vector<double>& dp,
                      FacetRecord& out);

} // namespace mdl

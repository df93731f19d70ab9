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

#include "mdl/em_grid.hpp"

#include <cmath>
#include <limits>

#include "mdl/errors.hpp"

namespace mdl {

void MaterialParams::validate() const
{
    if (!(eps_r >= 1.0))
        throw ConfigError("material: eps_r must be >= 1");
    if (!(sigma >= 0.0))
        throw ConfigError("material: sigma must be >= 0");
    if (!(gamma_overlap >= 0.0 && gamma_overlap <= 1.0))
        throw ConfigError("material: gamma_overlap must be in [0, 1]");
    if (!(mu_r > 0.0))
        throw ConfigError("material: mu_r must be > 0");
    if (!(eps_r + chi > 0.0))
        throw ConfigError("material: eps_r + chi must be > 0");
}

double MaterialParams::refractive_index() const { return std::sqrt((eps_r + chi) * mu_r); }

void BoundarySpec::validate() const
{
    if (kind == BoundaryKind::kFacet && !(reflectivity >= 0.0 && reflectivity <= 1.0))
        throw ConfigError("boundary: facet reflectivity must be in [0, 1]");
}

std::string to_string(BoundaryKind k)
{
    switch (k) {
    case BoundaryKind::kReflector:
        return "reflector";
    case BoundaryKind::kFacet:
        return "facet";
    case BoundaryKind::kAbsorbing:
        return "absorbing";
    }
    return "absorbing";
}

BoundaryKind boundary_kind_from_string(const std::string& s)
{
    if (s == "reflector")
        return BoundaryKind::kReflector;
    if (s == "facet")
        return BoundaryKind::kFacet;
    if (s == "absorbing")
        return BoundaryKind::kAbsorbing;
    throw ConfigError("boundary kind must be reflector|facet|absorbing, got '" + s + "'");
}

GridState GridState::create(int num_cells, double dx, double dt,
                            const std::vector<MaterialParams>& materials)
{
    if (num_cells < 1 || !(dx > 0.0) || !(dt > 0.0))
        throw ConfigError("grid: need num_cells >= 1, dx > 0, dt > 0");
    if (static_cast<int>(materials.size()) != num_cells)
        throw ConfigError("grid: one material entry per cell required");
    double n_min = std::numeric_limits<double>::infinity();
    for (const auto& m : materials) {
        m.validate();
        n_min = std::min(n_min, m.refractive_index());
    }
    if (dt > dx * n_min / kC0 * (1.0 + 1e-12))
        throw ConfigError("grid: dt exceeds the stability bound dx n / c");
    GridState s;
    s.num_cells = num_cells;
    s.dx = dx;
    s.dt = dt;
    s.e_field.assign(num_cells + 1, 0.0);
    s.h_field.assign(num_cells, 0.0);
    s.p_qm.assign(num_cells, 0.0);
    s.p_qm_prev.assign(num_cells, 0.0);
    s.n_cell.assign(num_cells, 0.0);
    return s;
}

double courant_timestep(double dx, double n, double s)
{
    if (!(dx > 0.0) || !(n >= 1.0) || !(s > 0.0 && s <= 1.0))
        throw DomainError("courant_timestep: need dx > 0, n >= 1, 0 < s <= 1");
    return s * dx * n / kC0;
}

namespace {

double load_impedance(const BoundarySpec& b, const MaterialParams& m)
{
    const double z = std::sqrt(kMu0 * m.mu_r / (kEps0 * (m.eps_r + m.chi)));
    const double r = (b.kind == BoundaryKind::kAbsorbing) ? 0.0 : b.reflectivity;
    if (r >= 1.0)
        return std::numeric_limits<double>::infinity();
    return z * (1.0 + r) / (1.0 - r);
}

} // namespace

FieldSolver::FieldSolver(std::vector<MaterialParams> cells, double dx, double dt,
                         BoundarySpec left, BoundarySpec right)
    : cells_(std::move(cells)), dx_(dx), dt_(dt), left_(left), right_(right)
{
    left_.validate();
    right_.validate();
    const int m = num_cells();
    if (m < 1)
        throw ConfigError("field solver: no cells");
    for (const auto& c : cells_)
        c.validate();

    ch_.resize(m);
    for (int k = 0; k < m; ++k)
        ch_[k] = dt / (kMu0 * cells_[k].mu_r * dx);

    ca_.assign(m + 1, 0.0);
    cb_.assign(m + 1, 0.0);
    node_eps_.assign(m + 1, 0.0);
    for (int k = 1; k < m; ++k) {
        const double eps =
            kEps0 * 0.5 * (cells_[k - 1].eps_r + cells_[k - 1].chi + cells_[k].eps_r + cells_[k].chi);
        const double sig = 0.5 * (cells_[k - 1].sigma + cells_[k].sigma);
        const double l = sig * dt / (2.0 * eps);
        node_eps_[k] = eps;
        ca_[k] = (1.0 - l) / (1.0 + l);
        cb_[k] = (dt / eps) / (1.0 + l);
    }
    node_eps_[0] = kEps0 * (cells_[0].eps_r + cells_[0].chi);
    node_eps_[m] = kEps0 * (cells_[m - 1].eps_r + cells_[m - 1].chi);

    auto half_cell = [&](const MaterialParams& c, double eps, double zl, double& num,
                         double& den) {
        const double a = eps * dx / (2.0 * dt);
        const double s = c.sigma * dx / 4.0;
        const double g = std::isinf(zl) ? 0.0 : 1.0 / (2.0 * zl);
        num = a - s - g;
        den = a + s + g;
    };
    zl_left_ = load_impedance(left_, cells_[0]);
    zl_right_ = load_impedance(right_, cells_[m - 1]);
    half_cell(cells_[0], node_eps_[0], zl_left_, bl_num_, bl_den_);
    half_cell(cells_[m - 1], node_eps_[m], zl_right_, br_num_, br_den_);
}

void FieldSolver::update_h(GridState& s) const
{
    const int m = num_cells();
    const double* e = s.e_field.data();
    double* h = s.h_field.data();
    for (int k = 0; k < m; ++k)
        h[k] += ch_[k] * (e[k + 1] - e[k]);
}

void FieldSolver::update_e(GridState& s, const std::vector<double>& dp) const
{
    const int m = num_cells();
    double* e = s.e_field.data();
    const double* h = s.h_field.data();
    const double inv_dx = 1.0 / dx_;
    for (int k = 1; k < m; ++k) {
        const double src = 0.5 * (cells_[k - 1].gamma_overlap * dp[k - 1] +
                                  cells_[k].gamma_overlap * dp[k]);
        e[k] = ca_[k] * e[k] + cb_[k] * ((h[k] - h[k - 1]) * inv_dx - src);
    }
}

void FieldSolver::apply_boundaries(GridState& s, const std::vector<double>& dp,
                                   FacetRecord& out) const
{
    const int m = num_cells();
    double* e = s.e_field.data();
    const double* h = s.h_field.data();

    auto outflow = [&](double e_old, double e_new, double zl, double& energy, double& power) {
        if (std::isinf(zl)) {
            power = 0.0;
            return;
        }
        const double eb = 0.5 * (e_old + e_new);
        power = eb * eb / zl;
        energy += power * dt_;
    };

    if (left_.kind == BoundaryKind::kReflector) {
        e[0] = 0.0;
        out.power_left = 0.0;
    } else {
        const double old = e[0];
        const double src = 0.5 * dx_ * cells_[0].gamma_overlap * dp[0];
        e[0] = (bl_num_ * old + h[0] - src) / bl_den_;
        outflow(old, e[0], zl_left_, out.energy_left, out.power_left);
    }
    if (right_.kind == BoundaryKind::kReflector) {
        e[m] = 0.0;
        out.power_right = 0.0;
    } else {
        const double old = e[m];
        const double src = 0.5 * dx_ * cells_[m - 1].gamma_overlap * dp[m - 1];
        e[m] = (br_num_ * old - h[m - 1] - src) / br_den_;
        outflow(old, e[m], zl_right_, out.energy_right, out.power_right);
    }
}

double FieldSolver::field_energy(const GridState& s) const
{
    const int m = num_cells();
    double w = 0.0;
    for (int k = 0; k <= m; ++k) {
        const double wt = (k == 0 || k == m) ? 0.5 : 1.0;
        w += 0.5 * node_eps_[k] * s.e_field[k] * s.e_field[k] * wt;
    }
    for (int k = 0; k < m; ++k)
        w += 0.5 * kMu0 * cells_[k].mu_r * s.h_field[k] * s.h_field[k];
    return w * dx_;
}

double FieldSolver::leapfrog_energy(const GridState& s, const std::vector<double>& h_prev) const
{
    const int m = num_cells();
    double w = 0.0;
    for (int k = 0; k <= m; ++k) {
        const double wt = (k == 0 || k == m) ? 0.5 : 1.0;
        w += 0.5 * node_eps_[k] * s.e_field[k] * s.e_field[k] * wt;
    }
    for (int k = 0; k < m; ++k)
        w += 0.5 * kMu0 * cells_[k].mu_r * h_prev[k] * s.h_field[k];
    return w * dx_;
}

void update_h(GridState& s, const FieldSolver& f) { f.update_h(s); }

void update_e(GridState& s, const FieldSolver& f, const std::vector<double>& dp)
{
    f.update_e(s, dp);
}

void apply_boundaries(GridState& s, const FieldSolver& f, const std::vector<double>& dp,
                      FacetRecord& out)
{
    f.apply_boundaries(s, dp, out);
}

} // namespace mdl

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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "mdl/em_grid.hpp"
#include "mdl/langevin_noise.hpp"
#include "mdl/quantum_model.hpp"

namespace mdl {

using Json = nlohmann::ordered_json;

constexpr int kScenarioSchemaVersion = 1;

// Scenario fields are kept in the units of the file so that save/load is exact.

struct LevelSpec {
    std::string name;
    double energy_meV = 0.0;
};

struct LevelPair {
    std::string a, b;
    double value = 0.0;
};

struct RateSpec {
    std::string from, to;
    double rate_per_s = 0.0;
};

struct QuantumSystemSpec {
    std::vector<LevelSpec> levels;
    std::vector<LevelPair> dipoles_e_nm;
    std::vector<LevelPair> coupling_meV;        // hbar Omega
    std::vector<RateSpec> scattering;
    std::vector<LevelPair> pure_dephasing_per_s;
    double carrier_density_per_m3 = 0.0;
    double period_length_m = 0.0;
};

struct ProbeSpec {
    std::string name;
    /** e_field | intensity | facet_power | population | bloch_ratio | field_energy */
    std::string quantity;
    double position_m = 0.0;
    std::string side;          // facet_power: left | right
    std::string level;         // population
    bool medium_average = false;
    int decimation = 1;
    /** sample | mean; mean is a boxcar low-pass over the decimation window. */
    std::string reduce;
};

struct InitialStateSpec {
    /** tipped_inversion (two-level) | level */
    std::string kind = "tipped_inversion";
    std::string level;
    bool force_zero_tipping = false;
};

struct Scenario {
    int schema_version = kScenarioSchemaVersion;
    std::string name;
    std::string description;
    QuantumSystemSpec system;
    std::optional<std::array<std::string, 3>> three_level_map;   // injector, lower, upper
    MaterialParams material;
    double length_m = 0.0;
    int cells = 0;
    double cross_section_m2 = 0.0;
    double courant_factor = 1.0;
    BoundarySpec left, right;
    bool left_fresnel = false, right_fresnel = false;
    NoiseScheme noise_scheme = NoiseScheme::kReduced;
    std::uint64_t seed = 1;
    NCellSource n_cell_source = NCellSource::kDerived;
    std::vector<double> n_cell_explicit;
    InitialStateSpec initial;
    double duration_s = 0.0;
    std::vector<ProbeSpec> probes;
    std::uint64_t snapshot_every_steps = 0;
    double positivity_floor = -1e-5;
    int monitor_every_steps = 1;
    std::string notes;

    double dx() const { return length_m / cells; }
    double dt() const;
    std::uint64_t steps() const;
    /** Checks the cross-field invariants; throws ConfigError. */
    void validate() const;
};

QuantumSystem build_quantum_system(const QuantumSystemSpec& spec);
ThreeLevelMap build_three_level_map(const Scenario& s, const QuantumSystem& sys);
BoundarySpec resolved_boundary(const Scenario& s, bool left);
std::vector<double> cell_carriers(const Scenario& s);

Scenario scenario_from_json(const Json& j);
Json scenario_to_json(const Scenario& s);
Scenario load_scenario(const std::string& path);
void save_scenario(const Scenario& s, const std::string& path);
/** JSON schema (draft 2020-12) of the scenario file. */
Json scenario_schema();

/** 64-bit FNV-1a of the canonical JSON text. */
std::uint64_t config_hash(const Scenario& s);

/**
 * Two-level superfluorescence setup with dephasing time t2; overrides is a
 * JSON merge patch applied to the scenario document.
 */
Scenario superfluorescence_scenario(double t2, const Json& overrides = Json::object());

/**
 * Three-level QCL cavity from a parameter file; throws ConfigError listing
 * every absent required key.
 */
Scenario qcl_hfc_scenario(const std::string& params_path);
Scenario qcl_hfc_scenario_from_json(const Json& params);

struct BlochVector {
    double rho1 = 0.0, rho2 = 0.0, rho3 = 0.0;
    double ratio = 0.0;
    bool defined = true;
};

/** Bloch components of a two-level state (index 0 ground, 1 excited). */
BlochVector bloch_vector_metric(const DensityMatrix& rho);

} // namespace mdl

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

#include <cmath>
#include <fstream>
#include <set>

#include "mdl/errors.hpp"
#include "mdl/scenario.hpp"

namespace mdl {

namespace {

constexpr double kPlanck = 2.0 * kPi * kHbar;

// Desk-scale two-level medium for the cooperative-emission runs.
constexpr double kSfFrequency = 1.5e12;         // Hz
constexpr double kSfDipoleENm = 2.0;
constexpr double kSfDensity = 5.0e19;           // 1/m^3
constexpr double kSfCellsPerWavelength = 20.0;
constexpr double kSfWavelengths = 20.0;         // medium length in wavelengths
constexpr double kSfCrossSection = 1.0e-9;      // m^2
constexpr double kSfDuration = 300e-12;

} // namespace

Scenario superfluorescence_scenario(double t2, const Json& overrides)
{
    if (!(t2 > 0.0) || !std::isfinite(t2))
        throw DomainError("superfluorescence_scenario: t2 must be positive and finite");
    const double lambda = kC0 / kSfFrequency;
    const int cells = static_cast<int>(kSfWavelengths * kSfCellsPerWavelength);
    const double length = kSfWavelengths * lambda;
    const double dx = length / cells;

    Json j;
    j["schema_version"] = kScenarioSchemaVersion;
    char name[64];
    std::snprintf(name, sizeof name, "superfluorescence_t2_%gps", t2 * 1e12);
    j["name"] = name;
    j["description"] =
        "Inverted two-level ensemble without injected field; cooperative emission "
        "or amplified spontaneous emission depending on T2.";
    j["notes"] = "T1 is infinite; T2 is pure dephasing. All medium values are listed here.";
    j["quantum_system"] = {
        {"levels", Json::array({{{"name", "g"}, {"energy_meV", 0.0}},
                                {{"name", "e"}, {"energy_meV", kPlanck * kSfFrequency /
                                                                   (1e-3 * kElementaryCharge)}}})},
        {"dipoles", Json::array({{{"between", {"g", "e"}}, {"value_e_nm", kSfDipoleENm}}})},
        {"tunneling", Json::array()},
        {"scattering", Json::array()},
        {"pure_dephasing", Json::array({{{"between", {"g", "e"}}, {"rate_per_s", 1.0 / t2}}})},
        {"carrier_density_per_m3", kSfDensity},
        {"period_length_m", 0.0}};
    j["material"] = {{"eps_r", 1.0}, {"chi", 0.0}, {"conductivity_S_per_m", 0.0},
                     {"gamma_overlap", 1.0}, {"mu_r", 1.0}};
    j["geometry"] = {{"length_m", length}, {"cells", cells},
                     {"cross_section_m2", kSfCrossSection}, {"courant_factor", 0.95}};
    j["boundaries"] = {{"left", {{"kind", "absorbing"}}}, {"right", {{"kind", "absorbing"}}}};
    j["noise"] = {{"scheme", "reduced"}, {"seed", 1}, {"n_cell_source", "derived"}};
    j["initial_state"] = {{"kind", "tipped_inversion"}};
    j["duration_s"] = kSfDuration;
    j["probes"] = Json::array(
        {{{"name", "output_power"}, {"quantity", "facet_power"}, {"position_m", length},
          {"side", "right"}, {"decimation", 10}, {"reduce", "mean"}},
         {{"name", "output_field"}, {"quantity", "e_field"}, {"position_m", length},
          {"decimation", 1}, {"reduce", "sample"}},
         {{"name", "bloch_ratio_exit"}, {"quantity", "bloch_ratio"},
          {"position_m", length - 0.5 * dx}, {"decimation", 10}, {"reduce", "sample"}},
         {{"name", "upper_population"}, {"quantity", "population"}, {"position_m", 0.0},
          {"level", "e"}, {"medium_average", true}, {"decimation", 10}, {"reduce", "sample"}}});
    j["snapshot_every_steps"] = 2000;
    j["monitor"] = {{"positivity_floor", -1e-5}, {"every_steps", 1}};
    j.merge_patch(overrides);
    if (!overrides.contains("probes") && j["geometry"].is_object()) {
        // exit probes follow a patched geometry
        const Json& g = j["geometry"];
        if (g.contains("length_m") && g["length_m"].is_number() && g.contains("cells") &&
            g["cells"].is_number_integer() && g["cells"].get<int>() > 0) {
            const double l = g["length_m"].get<double>();
            j["probes"][0]["position_m"] = l;
            j["probes"][1]["position_m"] = l;
            j["probes"][2]["position_m"] = l - 0.5 * l / g["cells"].get<int>();
        }
    }
    return scenario_from_json(j);
}

Scenario qcl_hfc_scenario(const std::string& params_path)
{
    std::ifstream in(params_path);
    if (!in)
        throw ConfigError("qcl params: cannot open '" + params_path + "'");
    Json j;
    try {
        j = Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("qcl params: '" + params_path + "' is not valid JSON (at byte " +
                          std::to_string(e.byte) + ")");
    }
    return qcl_hfc_scenario_from_json(j);
}

Scenario qcl_hfc_scenario_from_json(const Json& p)
{
    static const char* kLevels[] = {"1'", "2", "3"};
    static const char* kRates[] = {"3->2", "3->1'", "2->1'", "2->3", "1'->2", "1'->3"};
    static const char* kDephasing[] = {"3-2", "3-1'", "2-1'"};
    static const char* kScalars[] = {"dipole_32_e_nm",   "coupling_13_meV",
                                     "carrier_density_per_m3", "period_length_m",
                                     "eps_r",            "gamma_overlap",
                                     "cavity_length_m",  "cross_section_m2",
                                     "cells_per_wavelength", "center_frequency_Hz",
                                     "round_trips"};

    if (!p.is_object())
        throw ConfigError("qcl params: top level must be an object");
    if (p.contains("schema_version") && p.at("schema_version") != kScenarioSchemaVersion)
        throw ConfigError("qcl params: unsupported schema_version");
    std::vector<std::string> missing;
    auto need_group = [&](const char* group, const char* const* keys, std::size_t n) {
        const bool ok = p.contains(group) && p.at(group).is_object();
        for (std::size_t k = 0; k < n; ++k)
            if (!ok || !p.at(group).contains(keys[k]) || !p.at(group).at(keys[k]).is_number())
                missing.push_back(std::string(group) + "." + keys[k]);
    };
    need_group("energy_meV", kLevels, 3);
    need_group("rates_per_s", kRates, 6);
    need_group("pure_dephasing_per_s", kDephasing, 3);
    for (const char* k : kScalars)
        if (!p.contains(k) || !p.at(k).is_number())
            missing.push_back(k);
    static const std::set<std::string> kKnown = {
        "schema_version", "name", "notes", "energy_meV", "rates_per_s", "pure_dephasing_per_s",
        "dipole_32_e_nm", "coupling_13_meV", "carrier_density_per_m3", "period_length_m",
        "eps_r", "conductivity_S_per_m", "gamma_overlap", "cavity_length_m", "cross_section_m2",
        "cells_per_wavelength", "center_frequency_Hz", "courant_factor", "facet_reflectivity",
        "round_trips", "noise_scheme", "seed", "field_decimation", "power_decimation",
        "snapshot_every_steps", "monitor_every_steps"};
    for (auto it = p.begin(); it != p.end(); ++it)
        if (!kKnown.count(it.key()))
            throw ConfigError("qcl params: unknown key '" + it.key() + "'");
    if (!missing.empty()) {
        std::string msg = "qcl params: missing keys:";
        for (const auto& m : missing)
            msg += " " + m;
        throw ConfigError(msg);
    }
    auto num = [&](const char* k) { return p.at(k).get<double>(); };

    const double n_eff = std::sqrt(num("eps_r"));
    const double length = num("cavity_length_m");
    const double lambda_medium = kC0 / num("center_frequency_Hz") / n_eff;
    const int cells = static_cast<int>(std::ceil(length / lambda_medium * num("cells_per_wavelength")));
    const double round_trip = 2.0 * n_eff * length / kC0;

    Json j;
    j["schema_version"] = kScenarioSchemaVersion;
    j["name"] = p.value("name", std::string("qcl_hfc"));
    j["description"] = "Three-level THz QCL Fabry-Perot cavity, self-starting from noise.";
    if (p.contains("notes"))
        j["notes"] = p.at("notes");

    Json levels = Json::array();
    for (const char* l : kLevels)
        levels.push_back({{"name", l}, {"energy_meV", p.at("energy_meV").at(l)}});
    Json scattering = Json::array();
    for (const char* r : kRates) {
        const std::string key = r;
        const auto arrow = key.find("->");
        scattering.push_back({{"from", key.substr(0, arrow)},
                              {"to", key.substr(arrow + 2)},
                              {"rate_per_s", p.at("rates_per_s").at(r)}});
    }
    Json dephasing = Json::array();
    for (const char* d : kDephasing) {
        const std::string key = d;
        const auto dash = key.find('-');
        dephasing.push_back({{"between", {key.substr(0, dash), key.substr(dash + 1)}},
                             {"rate_per_s", p.at("pure_dephasing_per_s").at(d)}});
    }
    j["quantum_system"] = {
        {"levels", levels},
        {"dipoles", Json::array({{{"between", {"3", "2"}}, {"value_e_nm", num("dipole_32_e_nm")}}})},
        {"tunneling",
         Json::array({{{"between", {"1'", "3"}}, {"hbar_omega_meV", num("coupling_13_meV")}}})},
        {"scattering", scattering},
        {"pure_dephasing", dephasing},
        {"carrier_density_per_m3", num("carrier_density_per_m3")},
        {"period_length_m", num("period_length_m")}};
    j["three_level_map"] = {{"injector", "1'"}, {"lower", "2"}, {"upper", "3"}};
    j["material"] = {{"eps_r", num("eps_r")},
                     {"chi", 0.0},
                     {"conductivity_S_per_m", p.value("conductivity_S_per_m", 0.0)},
                     {"gamma_overlap", num("gamma_overlap")},
                     {"mu_r", 1.0}};
    j["geometry"] = {{"length_m", length},
                     {"cells", cells},
                     {"cross_section_m2", num("cross_section_m2")},
                     {"courant_factor", p.value("courant_factor", 1.0)}};
    Json facet = {{"kind", "facet"}};
    if (p.contains("facet_reflectivity"))
        facet["reflectivity"] = p.at("facet_reflectivity");
    j["boundaries"] = {{"left", facet}, {"right", facet}};
    j["noise"] = {{"scheme", p.value("noise_scheme", std::string("reduced"))},
                  {"seed", p.value("seed", std::uint64_t{1})},
                  {"n_cell_source", "derived"}};
    j["initial_state"] = {{"kind", "level"}, {"level", "1'"}};
    j["duration_s"] = num("round_trips") * round_trip;

    const int field_decimation = static_cast<int>(p.value("field_decimation", 1));
    const int power_decimation = static_cast<int>(p.value("power_decimation", 50));
    j["probes"] = Json::array(
        {{{"name", "facet_field"}, {"quantity", "e_field"}, {"position_m", length},
          {"decimation", field_decimation}, {"reduce", "sample"}},
         {{"name", "facet_power"}, {"quantity", "facet_power"}, {"position_m", length},
          {"side", "right"}, {"decimation", power_decimation}, {"reduce", "mean"}},
         {{"name", "upper_population"}, {"quantity", "population"}, {"position_m", 0.0},
          {"level", "3"}, {"medium_average", true}, {"decimation", power_decimation},
          {"reduce", "sample"}}});
    j["snapshot_every_steps"] = p.value("snapshot_every_steps", std::uint64_t{0});
    j["monitor"] = {{"positivity_floor", -1e-5}, {"every_steps", p.value("monitor_every_steps", 1)}};
    return scenario_from_json(j);
}

Json scenario_schema()
{
    const Json num = {{"type", "number"}};
    const Json str = {{"type", "string"}};
    const Json pair = [&] {
        Json b = {{"type", "array"}, {"items", str}, {"minItems", 2}, {"maxItems", 2}};
        return b;
    }();
    auto object = [](Json props, Json required) {
        return Json{{"type", "object"},
                    {"properties", std::move(props)},
                    {"required", std::move(required)},
                    {"additionalProperties", false}};
    };
    auto list = [](Json item) { return Json{{"type", "array"}, {"items", std::move(item)}}; };
    const Json boundary = object(
        {{"kind", {{"enum", {"reflector", "facet", "absorbing"}}}},
         {"reflectivity",
          {{"type", "number"}, {"minimum", 0}, {"maximum", 1},
           {"description", "amplitude reflectivity of a facet; Fresnel value when absent"}}}},
        {"kind"});

    Json s;
    s["$schema"] = "https://json-schema.org/draft/2020-12/schema";
    s["title"] = "mdlang scenario";
    s["type"] = "object";
    s["additionalProperties"] = false;
    s["required"] = {"schema_version", "name", "quantum_system", "material", "geometry",
                     "boundaries", "noise", "initial_state", "duration_s"};
    s["properties"] = {
        {"schema_version", {{"const", kScenarioSchemaVersion}}},
        {"name", str},
        {"description", str},
        {"notes", str},
        {"quantum_system",
         object({{"levels", list(object({{"name", str}, {"energy_meV", num}}, {"name", "energy_meV"}))},
                 {"dipoles", list(object({{"between", pair}, {"value_e_nm", num}}, {"between", "value_e_nm"}))},
                 {"tunneling",
                  list(object({{"between", pair}, {"hbar_omega_meV", num}}, {"between", "hbar_omega_meV"}))},
                 {"scattering", list(object({{"from", str}, {"to", str}, {"rate_per_s", num}},
                                            {"from", "to", "rate_per_s"}))},
                 {"pure_dephasing",
                  list(object({{"between", pair}, {"rate_per_s", num}}, {"between", "rate_per_s"}))},
                 {"carrier_density_per_m3", num},
                 {"period_length_m", num}},
                {"levels", "carrier_density_per_m3"})},
        {"three_level_map",
         object({{"injector", str}, {"lower", str}, {"upper", str}}, {"injector", "lower", "upper"})},
        {"material", object({{"eps_r", num},
                             {"chi", num},
                             {"conductivity_S_per_m", num},
                             {"gamma_overlap", num},
                             {"mu_r", num}},
                            {"eps_r"})},
        {"geometry", object({{"length_m", num},
                             {"cells", {{"type", "integer"}, {"minimum", 1}}},
                             {"cross_section_m2", num},
                             {"courant_factor", num}},
                            {"length_m", "cells", "cross_section_m2"})},
        {"boundaries", object({{"left", boundary}, {"right", boundary}}, {"left", "right"})},
        {"noise", object({{"scheme", {{"enum", {"off", "reduced", "full"}}}},
                          {"seed", {{"type", "integer"}, {"minimum", 0}}},
                          {"n_cell_source", {{"enum", {"derived", "explicit"}}}},
                          {"n_cell", {{"oneOf", {num, list(num)}}}}},
                         {"scheme"})},
        {"initial_state", object({{"kind", {{"enum", {"tipped_inversion", "level"}}}},
                                  {"level", str},
                                  {"force_zero_tipping", {{"type", "boolean"}}}},
                                 {"kind"})},
        {"duration_s", num},
        {"probes",
         list(object({{"name", str},
                      {"quantity", {{"enum", {"e_field", "intensity", "facet_power", "population",
                                              "bloch_ratio", "field_energy"}}}},
                      {"position_m", num},
                      {"side", {{"enum", {"left", "right"}}}},
                      {"level", str},
                      {"medium_average", {{"type", "boolean"}}},
                      {"decimation", {{"type", "integer"}, {"minimum", 1}}},
                      {"reduce", {{"enum", {"sample", "mean"}}}}},
                     {"name", "quantity"}))},
        {"snapshot_every_steps", {{"type", "integer"}, {"minimum", 0}}},
        {"monitor", object({{"positivity_floor", num}, {"every_steps", {{"type", "integer"}, {"minimum", 1}}}},
                           Json::array())}};
    return s;
}

} // namespace mdl

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
#include <filesystem>
#include <functional>
#include <fstream>

#include "mdl/errors.hpp"
#include "mdl/scenario.hpp"

namespace fs = std::filesystem;
using namespace mdl;

namespace {

fs::path temp_path(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / "mdl_scenario_tests";
    fs::create_directories(dir);
    return dir / name;
}

fs::path source_path(const std::string& rel) { return fs::path(MDL_SOURCE_DIR) / rel; }

Json qcl_params()
{
    std::ifstream in(source_path("scenarios/qcl_hfc_params.json"));
    return Json::parse(in);
}

std::string error_of(const std::function<void()>& f)
{
    try {
        f();
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

// every key the serializer emits must be declared by the schema
void check_keys_in_schema(const Json& doc, const Json& schema, const std::string& path)
{
    if (doc.is_object()) {
        REQUIRE_MESSAGE(schema.contains("properties"), path);
        for (auto it = doc.begin(); it != doc.end(); ++it) {
            const std::string key = path + "." + it.key();
            INFO(key);
            REQUIRE(schema["properties"].contains(it.key()));
            check_keys_in_schema(it.value(), schema["properties"][it.key()], path + "." + it.key());
        }
    } else if (doc.is_array() && schema.contains("items")) {
        for (const Json& x : doc)
            check_keys_in_schema(x, schema["items"], path + "[]");
    }
}

} // namespace

TEST_CASE("superfluorescence scenario round trips losslessly")
{
    for (double t2 : {100e-12, 14.3e-12}) {
        const Scenario a = superfluorescence_scenario(t2);
        const fs::path p = temp_path("sf.json");
        save_scenario(a, p.string());
        const Scenario b = load_scenario(p.string());
        CHECK(scenario_to_json(a) == scenario_to_json(b));
        CHECK(config_hash(a) == config_hash(b));
        save_scenario(b, p.string());
        const Scenario c = load_scenario(p.string());
        CHECK(scenario_to_json(c).dump() == scenario_to_json(b).dump());
        CHECK(c.dt() == a.dt());
        CHECK(c.steps() == a.steps());
    }
}

TEST_CASE("superfluorescence scenario defaults")
{
    const Scenario s = superfluorescence_scenario(100e-12);
    const QuantumSystem sys = build_quantum_system(s.system);
    CHECK(sys.num_levels() == 2);
    CHECK(sys.gamma(0, 1) == doctest::Approx(1e10).epsilon(1e-14));
    CHECK(sys.rate(0, 1) == 0.0);
    CHECK(s.noise_scheme == NoiseScheme::kReduced);
    CHECK(s.initial.kind == "tipped_inversion");
    CHECK(s.cells * s.dx() == doctest::Approx(s.length_m).epsilon(1e-15));
    const double f0 = sys.energies()[1] / (2 * kPi * kHbar);
    CHECK(f0 == doctest::Approx(1.5e12).epsilon(1e-12));
    for (const ProbeSpec& p : s.probes) {
        CHECK(p.position_m >= 0.0);
        CHECK(p.position_m <= s.length_m);
    }
    CHECK_THROWS_AS(superfluorescence_scenario(0.0), DomainError);
}

TEST_CASE("overrides are a merge patch")
{
    const Scenario s = superfluorescence_scenario(
        100e-12, Json{{"noise", {{"scheme", "off"}}}, {"initial_state", {{"force_zero_tipping", true}}},
                      {"duration_s", 1e-12}});
    CHECK(s.noise_scheme == NoiseScheme::kOff);
    CHECK(s.initial.force_zero_tipping);
    CHECK(s.duration_s == 1e-12);
    CHECK(s.seed == 1);
    CHECK_THROWS_AS(superfluorescence_scenario(100e-12, Json{{"geometry", {{"cells", 0}}}}),
                    ConfigError);
}

TEST_CASE("shipped scenario files match their generators")
{
    CHECK(scenario_to_json(load_scenario(source_path("scenarios/sf_t2_100ps.json").string())) ==
          scenario_to_json(superfluorescence_scenario(100e-12)));
    CHECK(scenario_to_json(load_scenario(source_path("scenarios/sf_t2_14p3ps.json").string())) ==
          scenario_to_json(superfluorescence_scenario(14.3e-12)));
    CHECK(scenario_to_json(load_scenario(source_path("scenarios/qcl_hfc.json").string())) ==
          scenario_to_json(qcl_hfc_scenario(source_path("scenarios/qcl_hfc_params.json").string())));
}

TEST_CASE("qcl scenario targets")
{
    const Scenario s = qcl_hfc_scenario_from_json(qcl_params());
    const QuantumSystem sys = build_quantum_system(s.system);
    CHECK(sys.num_levels() == 3);
    CHECK(s.noise_scheme == NoiseScheme::kReduced);
    CHECK(s.length_m == 4e-3);
    const double n = s.material.refractive_index();
    CHECK(kC0 / (2 * n * s.length_m) == doctest::Approx(9.94e9).epsilon(0.002));
    const ThreeLevelMap m = build_three_level_map(s, sys);
    const double f32 = (sys.energies()[m.upper] - sys.energies()[m.lower]) / (2 * kPi * kHbar);
    CHECK(f32 == doctest::Approx(3.5e12).epsilon(1e-3));
    CHECK(s.duration_s == doctest::Approx(50.0 * 2 * n * s.length_m / kC0).epsilon(1e-12));
    CHECK(s.left.kind == BoundaryKind::kFacet);

    const fs::path p = temp_path("qcl.json");
    save_scenario(s, p.string());
    CHECK(scenario_to_json(load_scenario(p.string())) == scenario_to_json(s));
}

TEST_CASE("qcl params with missing rates list every absent key")
{
    Json p = qcl_params();
    p["rates_per_s"].erase("3->2");
    p["rates_per_s"].erase("1'->3");
    p.erase("dipole_32_e_nm");
    const std::string msg = error_of([&] { qcl_hfc_scenario_from_json(p); });
    CHECK(msg.find("rates_per_s.3->2") != std::string::npos);
    CHECK(msg.find("rates_per_s.1'->3") != std::string::npos);
    CHECK(msg.find("dipole_32_e_nm") != std::string::npos);
    CHECK(msg.find("rates_per_s.2->1'") == std::string::npos);

    Json q = qcl_params();
    q.erase("rates_per_s");
    const std::string all = error_of([&] { qcl_hfc_scenario_from_json(q); });
    for (const char* k : {"3->2", "3->1'", "2->1'", "2->3", "1'->2", "1'->3"})
        CHECK(all.find(std::string("rates_per_s.") + k) != std::string::npos);

    Json typo = qcl_params();
    typo["round_trip"] = 3;
    CHECK(error_of([&] { qcl_hfc_scenario_from_json(typo); }).find("round_trip") != std::string::npos);
    CHECK_THROWS_AS(qcl_hfc_scenario(temp_path("missing_params.json").string()), ConfigError);
}

TEST_CASE("config errors name the offending key")
{
    Json j = scenario_to_json(superfluorescence_scenario(100e-12));
    SUBCASE("missing")
    {
        j["geometry"].erase("length_m");
        CHECK(error_of([&] { scenario_from_json(j); }).find("geometry.length_m") != std::string::npos);
    }
    SUBCASE("unknown")
    {
        j["geometry"]["lenght_m"] = 1.0;
        CHECK(error_of([&] { scenario_from_json(j); }).find("geometry.lenght_m") != std::string::npos);
    }
    SUBCASE("wrong type")
    {
        j["duration_s"] = "long";
        CHECK(error_of([&] { scenario_from_json(j); }).find("duration_s") != std::string::npos);
    }
    SUBCASE("schema version")
    {
        j["schema_version"] = 2;
        CHECK(error_of([&] { scenario_from_json(j); }).find("schema_version") != std::string::npos);
    }
    SUBCASE("probe outside the medium")
    {
        j["probes"][0]["position_m"] = 1.0;
        CHECK(error_of([&] { scenario_from_json(j); }).find("position_m") != std::string::npos);
    }
    SUBCASE("unknown level")
    {
        j["probes"][3]["level"] = "x";
        CHECK(error_of([&] { scenario_from_json(j); }).find("'x'") != std::string::npos);
    }
    SUBCASE("step counter overflow")
    {
        j["duration_s"] = 1e30;
        CHECK(error_of([&] { scenario_from_json(j); }).find("64-bit") != std::string::npos);
    }
    SUBCASE("malformed file")
    {
        const fs::path p = temp_path("bad.json");
        std::ofstream(p) << "{\"schema_version\": 1,";
        CHECK(error_of([&] { load_scenario(p.string()); }).find("at byte") != std::string::npos);
    }
}

TEST_CASE("facet without reflectivity uses the Fresnel value")
{
    Json j = scenario_to_json(superfluorescence_scenario(100e-12));
    j["material"]["eps_r"] = 12.96;
    j["boundaries"]["left"] = {{"kind", "facet"}};
    j["boundaries"]["right"] = {{"kind", "facet"}, {"reflectivity", 0.25}};
    const Scenario s = scenario_from_json(j);
    CHECK(resolved_boundary(s, true).reflectivity == doctest::Approx(2.6 / 4.6));
    CHECK(resolved_boundary(s, false).reflectivity == 0.25);
    CHECK(scenario_to_json(scenario_from_json(scenario_to_json(s))) == scenario_to_json(s));
}

TEST_CASE("derived and explicit carrier counts")
{
    Scenario s = superfluorescence_scenario(100e-12);
    const auto derived = cell_carriers(s);
    CHECK(derived.size() == static_cast<std::size_t>(s.cells));
    CHECK(derived[0] == doctest::Approx(s.system.carrier_density_per_m3 * s.dx() * s.cross_section_m2));
    Json j = scenario_to_json(s);
    j["noise"]["n_cell_source"] = "explicit";
    j["noise"]["n_cell"] = 1234.0;
    s = scenario_from_json(j);
    CHECK(cell_carriers(s) == std::vector<double>(s.cells, 1234.0));
    j["noise"]["n_cell"] = Json::array({1.0, 2.0});
    CHECK_THROWS_AS(scenario_from_json(j), ConfigError);
}

TEST_CASE("schema declares every serialized key")
{
    const Json schema = scenario_schema();
    CHECK(schema["properties"]["schema_version"]["const"] == kScenarioSchemaVersion);
    check_keys_in_schema(scenario_to_json(superfluorescence_scenario(100e-12)), schema, "");
    check_keys_in_schema(scenario_to_json(qcl_hfc_scenario_from_json(qcl_params())), schema, "");
}

TEST_CASE("bloch vector metric")
{
    DensityMatrix rho = DensityMatrix::Zero(2, 2);
    rho(1, 1) = 1.0;
    BlochVector b = bloch_vector_metric(rho);
    CHECK(b.defined);
    CHECK(b.ratio == 1.0);

    rho.setConstant(0.5);
    b = bloch_vector_metric(rho);
    CHECK(b.rho1 == 1.0);
    CHECK(b.rho3 == 0.0);
    CHECK(b.ratio == 0.0);

    rho = DensityMatrix::Zero(2, 2);
    rho(0, 0) = rho(1, 1) = 0.5;
    b = bloch_vector_metric(rho);
    CHECK_FALSE(b.defined);
    CHECK(std::isnan(b.ratio));

    rho = DensityMatrix::Zero(2, 2);
    rho(0, 0) = 0.2;
    rho(1, 1) = 0.8;
    rho(1, 0) = cd(0.1, 0.2);
    rho(0, 1) = std::conj(rho(1, 0));
    b = bloch_vector_metric(rho);
    CHECK(b.rho2 == doctest::Approx(0.4));
    CHECK(b.ratio == doctest::Approx(0.6 / std::sqrt(0.04 + 0.16 + 0.36)));

    CHECK_THROWS_AS(bloch_vector_metric(DensityMatrix::Identity(3, 3)), DomainError);
}

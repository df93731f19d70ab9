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

#include "mdl/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "mdl/errors.hpp"

namespace mdl {

namespace {

constexpr double kMeV = 1e-3 * kElementaryCharge;
constexpr double kENm = kElementaryCharge * 1e-9;

// ---------------------------------------------------------------- reading

class Reader {
public:
    Reader(const Json& j, std::string path) : j_(j), path_(std::move(path))
    {
        if (!j_.is_object())
            throw ConfigError("config: '" + where() + "' must be an object");
    }

    bool has(const char* key) const { return j_.contains(key); }

    const Json& at(const char* key)
    {
        seen_.insert(key);
        if (!j_.contains(key))
            throw ConfigError("config: missing key '" + full(key) + "'");
        return j_.at(key);
    }

    double number(const char* key)
    {
        const Json& v = at(key);
        if (!v.is_number())
            throw ConfigError("config: '" + full(key) + "' must be a number");
        const double x = v.get<double>();
        if (!std::isfinite(x))
            throw ConfigError("config: '" + full(key) + "' must be finite");
        return x;
    }
    double number(const char* key, double dflt) { return has(key) ? number(key) : dflt; }

    std::int64_t integer(const char* key)
    {
        const Json& v = at(key);
        if (!v.is_number_integer())
            throw ConfigError("config: '" + full(key) + "' must be an integer");
        return v.get<std::int64_t>();
    }
    std::int64_t integer(const char* key, std::int64_t dflt)
    {
        return has(key) ? integer(key) : dflt;
    }

    std::uint64_t unsigned_integer(const char* key)
    {
        const Json& v = at(key);
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
            throw ConfigError("config: '" + full(key) + "' must be a non-negative integer");
        return v.get<std::uint64_t>();
    }
    std::uint64_t unsigned_integer(const char* key, std::uint64_t dflt)
    {
        return has(key) ? unsigned_integer(key) : dflt;
    }

    std::string string(const char* key)
    {
        const Json& v = at(key);
        if (!v.is_string())
            throw ConfigError("config: '" + full(key) + "' must be a string");
        return v.get<std::string>();
    }
    std::string string(const char* key, const std::string& dflt)
    {
        return has(key) ? string(key) : dflt;
    }

    bool boolean(const char* key, bool dflt)
    {
        if (!has(key))
            return dflt;
        const Json& v = at(key);
        if (!v.is_boolean())
            throw ConfigError("config: '" + full(key) + "' must be true or false");
        return v.get<bool>();
    }

    Reader child(const char* key) { return Reader(at(key), full(key)); }

    std::string full(const std::string& key) const
    {
        return path_.empty() ? key : path_ + "." + key;
    }
    std::string where() const { return path_.empty() ? "<root>" : path_; }

    /** Rejects keys that were never read, which catches typos. */
    void finish() const
    {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key()))
                throw ConfigError("config: unknown key '" + full(it.key()) + "'");
    }

private:
    const Json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

std::vector<Reader> array_items(Reader& parent, const char* key, bool required = true)
{
    std::vector<Reader> out;
    if (!required && !parent.has(key))
        return out;
    const Json& a = parent.at(key);
    if (!a.is_array())
        throw ConfigError("config: '" + parent.full(key) + "' must be an array");
    for (std::size_t i = 0; i < a.size(); ++i)
        out.emplace_back(a[i], parent.full(key) + "[" + std::to_string(i) + "]");
    return out;
}

std::array<std::string, 2> read_between(Reader& r)
{
    const Json& b = r.at("between");
    if (!b.is_array() || b.size() != 2 || !b[0].is_string() || !b[1].is_string())
        throw ConfigError("config: '" + r.full("between") + "' must be two level names");
    return {b[0].get<std::string>(), b[1].get<std::string>()};
}

std::vector<LevelPair> read_pairs(Reader& parent, const char* key, const char* value_key)
{
    std::vector<LevelPair> out;
    for (Reader& r : array_items(parent, key, false)) {
        const auto ab = read_between(r);
        out.push_back({ab[0], ab[1], r.number(value_key)});
        r.finish();
    }
    return out;
}

QuantumSystemSpec read_system(Reader r)
{
    QuantumSystemSpec s;
    for (Reader& l : array_items(r, "levels")) {
        s.levels.push_back({l.string("name"), l.number("energy_meV")});
        l.finish();
    }
    s.dipoles_e_nm = read_pairs(r, "dipoles", "value_e_nm");
    s.coupling_meV = read_pairs(r, "tunneling", "hbar_omega_meV");
    for (Reader& x : array_items(r, "scattering", false)) {
        s.scattering.push_back({x.string("from"), x.string("to"), x.number("rate_per_s")});
        x.finish();
    }
    s.pure_dephasing_per_s = read_pairs(r, "pure_dephasing", "rate_per_s");
    s.carrier_density_per_m3 = r.number("carrier_density_per_m3");
    s.period_length_m = r.number("period_length_m", 0.0);
    r.finish();
    return s;
}

void read_boundary(Reader r, BoundarySpec& b, bool& fresnel)
{
    b.kind = boundary_kind_from_string(r.string("kind"));
    fresnel = false;
    b.reflectivity = 0.0;
    if (b.kind == BoundaryKind::kFacet) {
        if (r.has("reflectivity"))
            b.reflectivity = r.number("reflectivity");
        else
            fresnel = true;
    } else if (b.kind == BoundaryKind::kReflector) {
        b.reflectivity = 1.0;
    }
    r.finish();
}

std::string default_reduce(const std::string& quantity)
{
    return (quantity == "intensity" || quantity == "facet_power") ? "mean" : "sample";
}

const std::set<std::string>& probe_quantities()
{
    static const std::set<std::string> q = {"e_field",    "intensity",   "facet_power",
                                            "population", "bloch_ratio", "field_energy"};
    return q;
}

// ---------------------------------------------------------------- writing

Json pair_json(const LevelPair& p, const char* value_key)
{
    Json j;
    j["between"] = Json::array({p.a, p.b});
    j[value_key] = p.value;
    return j;
}

Json boundary_json(const BoundarySpec& b, bool fresnel)
{
    Json j;
    j["kind"] = to_string(b.kind);
    if (b.kind == BoundaryKind::kFacet && !fresnel)
        j["reflectivity"] = b.reflectivity;
    return j;
}

std::uint64_t fnv1a(const std::string& s)
{
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace

// ---------------------------------------------------------------- Scenario

double Scenario::dt() const
{
    return courant_timestep(dx(), material.refractive_index(), courant_factor);
}

std::uint64_t Scenario::steps() const
{
    const long double n = static_cast<long double>(duration_s) / dt();
    if (!(n < 1.8e19L))
        throw ConfigError("scenario: duration/dt does not fit a 64-bit step counter");
    // a duration that is an integer number of steps up to rounding keeps that count
    const long double r = std::nearbyint(n);
    if (std::fabs(n - r) <= 1e-9L * std::max<long double>(1.0L, r))
        return static_cast<std::uint64_t>(r);
    return static_cast<std::uint64_t>(std::ceil(n));
}

void Scenario::validate() const
{
    if (schema_version != kScenarioSchemaVersion)
        throw ConfigError("scenario: unsupported schema_version " +
                          std::to_string(schema_version));
    if (!(length_m > 0.0) || cells < 1)
        throw ConfigError("scenario: geometry needs length_m > 0 and cells >= 1");
    if (!(cross_section_m2 > 0.0))
        throw ConfigError("scenario: geometry.cross_section_m2 must be > 0");
    if (!(courant_factor > 0.0 && courant_factor <= 1.0))
        throw ConfigError("scenario: geometry.courant_factor must be in (0, 1]");
    if (!(duration_s > 0.0))
        throw ConfigError("scenario: duration_s must be > 0");
    material.validate();
    left.validate();
    right.validate();
    (void)steps();
    if (!(positivity_floor <= 0.0))
        throw ConfigError("scenario: monitor.positivity_floor must be <= 0");
    if (monitor_every_steps < 1)
        throw ConfigError("scenario: monitor.every_steps must be >= 1");

    const QuantumSystem sys = build_quantum_system(system);
    const int n = sys.num_levels();
    if (noise_scheme == NoiseScheme::kFull) {
        if (n != 3)
            throw ConfigError("scenario: the full noise scheme needs exactly three levels");
        if (!three_level_map)
            throw ConfigError("scenario: the full noise scheme needs three_level_map");
    }
    if (three_level_map)
        (void)build_three_level_map(*this, sys);
    if (n_cell_source == NCellSource::kExplicit) {
        if (n_cell_explicit.size() != 1 && n_cell_explicit.size() != static_cast<std::size_t>(cells))
            throw ConfigError("scenario: noise.n_cell must hold 1 or 'cells' values");
        for (double v : n_cell_explicit)
            if (!(v > 0.0))
                throw ConfigError("scenario: noise.n_cell values must be > 0");
    }
    if (initial.kind == "tipped_inversion") {
        if (n != 2)
            throw ConfigError("scenario: initial_state tipped_inversion needs two levels");
    } else if (initial.kind == "level") {
        (void)sys.level_index(initial.level);
    } else {
        throw ConfigError("scenario: unknown initial_state.kind '" + initial.kind + "'");
    }

    std::set<std::string> names;
    for (const ProbeSpec& p : probes) {
        const std::string tag = "scenario: probe '" + p.name + "': ";
        if (p.name.empty() || !names.insert(p.name).second)
            throw ConfigError("scenario: probe names must be non-empty and unique");
        if (!probe_quantities().count(p.quantity))
            throw ConfigError(tag + "unknown quantity '" + p.quantity + "'");
        if (!(p.position_m >= 0.0 && p.position_m <= length_m))
            throw ConfigError(tag + "position_m outside [0, length_m]");
        if (p.decimation < 1)
            throw ConfigError(tag + "decimation must be >= 1");
        if (p.reduce != "sample" && p.reduce != "mean")
            throw ConfigError(tag + "reduce must be 'sample' or 'mean'");
        if (p.quantity == "facet_power" && p.side != "left" && p.side != "right")
            throw ConfigError(tag + "facet_power needs side left or right");
        if (p.quantity == "population")
            (void)sys.level_index(p.level);
        if (p.quantity == "bloch_ratio" && n != 2)
            throw ConfigError(tag + "bloch_ratio needs a two-level system");
    }
}

QuantumSystem build_quantum_system(const QuantumSystemSpec& spec)
{
    QuantumSystemParams p;
    const int n = static_cast<int>(spec.levels.size());
    for (const LevelSpec& l : spec.levels) {
        if (std::find(p.level_names.begin(), p.level_names.end(), l.name) != p.level_names.end())
            throw ConfigError("quantum_system: duplicate level name '" + l.name + "'");
        p.level_names.push_back(l.name);
        p.energies.push_back(l.energy_meV * kMeV);
    }
    if (n < 2 || n > kMaxLevels)
        throw ConfigError("quantum_system: number of levels must be in [2, " +
                          std::to_string(kMaxLevels) + "]");
    auto index = [&](const std::string& name) {
        const auto it = std::find(p.level_names.begin(), p.level_names.end(), name);
        if (it == p.level_names.end())
            throw ConfigError("quantum_system: unknown level '" + name + "'");
        return static_cast<int>(it - p.level_names.begin());
    };
    auto sym = [&](RealMatrix& m, const std::vector<LevelPair>& v, double scale, const char* what) {
        m = RealMatrix::Zero(n, n);
        for (const LevelPair& x : v) {
            const int a = index(x.a), b = index(x.b);
            if (a == b)
                throw ConfigError(std::string("quantum_system: ") + what + " between a level and itself");
            m(a, b) = m(b, a) = x.value * scale;
        }
    };
    sym(p.dipole_z, spec.dipoles_e_nm, kENm, "dipole");
    sym(p.tunneling, spec.coupling_meV, kMeV / kHbar, "tunneling");
    sym(p.pure_dephasing, spec.pure_dephasing_per_s, 1.0, "pure_dephasing");
    p.scatter_rates = RealMatrix::Zero(n, n);
    for (const RateSpec& r : spec.scattering) {
        const int from = index(r.from), to = index(r.to);
        if (from == to)
            throw ConfigError("quantum_system: scattering from a level to itself");
        p.scatter_rates(to, from) = r.rate_per_s;
    }
    p.carrier_density = spec.carrier_density_per_m3;
    p.period_length = spec.period_length_m;
    return QuantumSystem(std::move(p));
}

ThreeLevelMap build_three_level_map(const Scenario& s, const QuantumSystem& sys)
{
    ThreeLevelMap m;
    if (!s.three_level_map)
        return m;
    m.injector = sys.level_index((*s.three_level_map)[0]);
    m.lower = sys.level_index((*s.three_level_map)[1]);
    m.upper = sys.level_index((*s.three_level_map)[2]);
    if (m.injector == m.lower || m.lower == m.upper || m.injector == m.upper)
        throw ConfigError("three_level_map: levels must be distinct");
    return m;
}

BoundarySpec resolved_boundary(const Scenario& s, bool left)
{
    const bool fresnel = left ? s.left_fresnel : s.right_fresnel;
    if (fresnel)
        return BoundarySpec::fresnel(s.material.refractive_index());
    return left ? s.left : s.right;
}

std::vector<double> cell_carriers(const Scenario& s)
{
    if (s.n_cell_source == NCellSource::kExplicit) {
        if (s.n_cell_explicit.size() == 1)
            return std::vector<double>(s.cells, s.n_cell_explicit[0]);
        return s.n_cell_explicit;
    }
    const double n = s.system.carrier_density_per_m3 * s.dx() * s.cross_section_m2;
    return std::vector<double>(s.cells, n);
}

// ---------------------------------------------------------------- JSON

Scenario scenario_from_json(const Json& j)
{
    Reader r(j, "");
    Scenario s;
    s.schema_version = static_cast<int>(r.integer("schema_version"));
    if (s.schema_version != kScenarioSchemaVersion)
        throw ConfigError("config: unsupported schema_version " +
                          std::to_string(s.schema_version) + " (expected " +
                          std::to_string(kScenarioSchemaVersion) + ")");
    s.name = r.string("name");
    s.description = r.string("description", "");
    s.notes = r.string("notes", "");
    s.system = read_system(r.child("quantum_system"));

    if (r.has("three_level_map")) {
        Reader m = r.child("three_level_map");
        s.three_level_map = std::array<std::string, 3>{m.string("injector"), m.string("lower"),
                                                       m.string("upper")};
        m.finish();
    }

    {
        Reader m = r.child("material");
        s.material.eps_r = m.number("eps_r");
        s.material.chi = m.number("chi", 0.0);
        s.material.sigma = m.number("conductivity_S_per_m", 0.0);
        s.material.gamma_overlap = m.number("gamma_overlap", 1.0);
        s.material.mu_r = m.number("mu_r", 1.0);
        m.finish();
    }
    {
        Reader g = r.child("geometry");
        s.length_m = g.number("length_m");
        const std::int64_t cells = g.integer("cells");
        if (cells < 1 || cells > std::numeric_limits<int>::max())
            throw ConfigError("config: 'geometry.cells' out of range");
        s.cells = static_cast<int>(cells);
        s.cross_section_m2 = g.number("cross_section_m2");
        s.courant_factor = g.number("courant_factor", 1.0);
        g.finish();
    }
    {
        Reader b = r.child("boundaries");
        read_boundary(b.child("left"), s.left, s.left_fresnel);
        read_boundary(b.child("right"), s.right, s.right_fresnel);
        b.finish();
    }
    {
        Reader nz = r.child("noise");
        s.noise_scheme = noise_scheme_from_string(nz.string("scheme"));
        s.seed = nz.unsigned_integer("seed", 1);
        const std::string src = nz.string("n_cell_source", "derived");
        if (src == "derived") {
            s.n_cell_source = NCellSource::kDerived;
        } else if (src == "explicit") {
            s.n_cell_source = NCellSource::kExplicit;
            const Json& v = nz.at("n_cell");
            if (v.is_number()) {
                s.n_cell_explicit = {v.get<double>()};
            } else if (v.is_array()) {
                for (const Json& x : v) {
                    if (!x.is_number())
                        throw ConfigError("config: 'noise.n_cell' entries must be numbers");
                    s.n_cell_explicit.push_back(x.get<double>());
                }
            } else {
                throw ConfigError("config: 'noise.n_cell' must be a number or an array");
            }
        } else {
            throw ConfigError("config: 'noise.n_cell_source' must be derived or explicit");
        }
        nz.finish();
    }
    {
        Reader in = r.child("initial_state");
        s.initial.kind = in.string("kind");
        s.initial.level = in.string("level", "");
        s.initial.force_zero_tipping = in.boolean("force_zero_tipping", false);
        in.finish();
    }
    s.duration_s = r.number("duration_s");
    for (Reader& p : array_items(r, "probes", false)) {
        ProbeSpec ps;
        ps.name = p.string("name");
        ps.quantity = p.string("quantity");
        ps.position_m = p.number("position_m", 0.0);
        ps.side = p.string("side", "");
        ps.level = p.string("level", "");
        ps.medium_average = p.boolean("medium_average", false);
        const std::int64_t d = p.integer("decimation", 1);
        if (d < 1 || d > std::numeric_limits<int>::max())
            throw ConfigError("config: '" + p.full("decimation") + "' out of range");
        ps.decimation = static_cast<int>(d);
        ps.reduce = p.string("reduce", default_reduce(ps.quantity));
        p.finish();
        s.probes.push_back(std::move(ps));
    }
    s.snapshot_every_steps = r.unsigned_integer("snapshot_every_steps", 0);
    if (r.has("monitor")) {
        Reader m = r.child("monitor");
        s.positivity_floor = m.number("positivity_floor", -1e-5);
        const std::int64_t e = m.integer("every_steps", 1);
        if (e < 1 || e > std::numeric_limits<int>::max())
            throw ConfigError("config: 'monitor.every_steps' out of range");
        s.monitor_every_steps = static_cast<int>(e);
        m.finish();
    }
    r.finish();
    s.validate();
    return s;
}

Json scenario_to_json(const Scenario& s)
{
    Json j;
    j["schema_version"] = s.schema_version;
    j["name"] = s.name;
    if (!s.description.empty())
        j["description"] = s.description;
    if (!s.notes.empty())
        j["notes"] = s.notes;

    Json q;
    q["levels"] = Json::array();
    for (const LevelSpec& l : s.system.levels)
        q["levels"].push_back({{"name", l.name}, {"energy_meV", l.energy_meV}});
    q["dipoles"] = Json::array();
    for (const LevelPair& p : s.system.dipoles_e_nm)
        q["dipoles"].push_back(pair_json(p, "value_e_nm"));
    q["tunneling"] = Json::array();
    for (const LevelPair& p : s.system.coupling_meV)
        q["tunneling"].push_back(pair_json(p, "hbar_omega_meV"));
    q["scattering"] = Json::array();
    for (const RateSpec& r : s.system.scattering)
        q["scattering"].push_back({{"from", r.from}, {"to", r.to}, {"rate_per_s", r.rate_per_s}});
    q["pure_dephasing"] = Json::array();
    for (const LevelPair& p : s.system.pure_dephasing_per_s)
        q["pure_dephasing"].push_back(pair_json(p, "rate_per_s"));
    q["carrier_density_per_m3"] = s.system.carrier_density_per_m3;
    q["period_length_m"] = s.system.period_length_m;
    j["quantum_system"] = q;

    if (s.three_level_map)
        j["three_level_map"] = {{"injector", (*s.three_level_map)[0]},
                                {"lower", (*s.three_level_map)[1]},
                                {"upper", (*s.three_level_map)[2]}};

    j["material"] = {{"eps_r", s.material.eps_r},
                     {"chi", s.material.chi},
                     {"conductivity_S_per_m", s.material.sigma},
                     {"gamma_overlap", s.material.gamma_overlap},
                     {"mu_r", s.material.mu_r}};
    j["geometry"] = {{"length_m", s.length_m},
                     {"cells", s.cells},
                     {"cross_section_m2", s.cross_section_m2},
                     {"courant_factor", s.courant_factor}};
    j["boundaries"] = {{"left", boundary_json(s.left, s.left_fresnel)},
                       {"right", boundary_json(s.right, s.right_fresnel)}};

    Json nz;
    nz["scheme"] = to_string(s.noise_scheme);
    nz["seed"] = s.seed;
    if (s.n_cell_source == NCellSource::kExplicit) {
        nz["n_cell_source"] = "explicit";
        if (s.n_cell_explicit.size() == 1)
            nz["n_cell"] = s.n_cell_explicit[0];
        else
            nz["n_cell"] = s.n_cell_explicit;
    } else {
        nz["n_cell_source"] = "derived";
    }
    j["noise"] = nz;

    Json in;
    in["kind"] = s.initial.kind;
    if (!s.initial.level.empty())
        in["level"] = s.initial.level;
    if (s.initial.force_zero_tipping)
        in["force_zero_tipping"] = true;
    j["initial_state"] = in;
    j["duration_s"] = s.duration_s;

    j["probes"] = Json::array();
    for (const ProbeSpec& p : s.probes) {
        Json pj;
        pj["name"] = p.name;
        pj["quantity"] = p.quantity;
        pj["position_m"] = p.position_m;
        if (!p.side.empty())
            pj["side"] = p.side;
        if (!p.level.empty())
            pj["level"] = p.level;
        if (p.medium_average)
            pj["medium_average"] = true;
        pj["decimation"] = p.decimation;
        pj["reduce"] = p.reduce;
        j["probes"].push_back(pj);
    }
    j["snapshot_every_steps"] = s.snapshot_every_steps;
    j["monitor"] = {{"positivity_floor", s.positivity_floor},
                    {"every_steps", s.monitor_every_steps}};
    return j;
}

Scenario load_scenario(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("config: cannot open '" + path + "'");
    Json j;
    try {
        j = Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config: '" + path + "' is not valid JSON (at byte " +
                          std::to_string(e.byte) + ")");
    }
    return scenario_from_json(j);
}

void save_scenario(const Scenario& s, const std::string& path)
{
    std::ofstream out(path);
    if (!out)
        throw ConfigError("config: cannot write '" + path + "'");
    out << scenario_to_json(s).dump(2) << '\n';
    if (!out)
        throw ConfigError("config: write to '" + path + "' failed");
}

std::uint64_t config_hash(const Scenario& s) { return fnv1a(scenario_to_json(s).dump()); }

// ---------------------------------------------------------------- metric

BlochVector bloch_vector_metric(const DensityMatrix& rho)
{
    if (rho.rows() != 2 || rho.cols() != 2)
        throw DomainError("bloch_vector_metric: needs a two-level density matrix");
    BlochVector b;
    const cd eg = rho(1, 0);
    b.rho1 = 2.0 * eg.real();
    b.rho2 = 2.0 * eg.imag();
    b.rho3 = rho(1, 1).real() - rho(0, 0).real();
    const double rb = std::sqrt(b.rho1 * b.rho1 + b.rho2 * b.rho2 + b.rho3 * b.rho3);
    if (rb == 0.0) {
        b.defined = false;
        b.ratio = std::numeric_limits<double>::quiet_NaN();
    } else {
        b.ratio = b.rho3 / rb;
    }
    return b;
}

} // namespace mdl

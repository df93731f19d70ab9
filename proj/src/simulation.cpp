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

#include "mdl/simulation.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "mdl/errors.hpp"
#include "mdl/trace_io.hpp"

namespace fs = std::filesystem;

namespace mdl {

namespace {

constexpr std::size_t kChunk = 4096;

std::string hex64(std::uint64_t v)
{
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
    return buf;
}

std::string units_of(const std::string& quantity)
{
    if (quantity == "e_field")
        return "V/m";
    if (quantity == "intensity")
        return "V^2/m^2";
    if (quantity == "facet_power")
        return "W/m^2";
    if (quantity == "field_energy")
        return "J/m^2";
    return "1";
}

struct CellCheck {
    double min_eig = std::numeric_limits<double>::infinity();
    double max_trace_err = 0.0;
    int bad_cell = -1;
    double bad_value = 0.0;
    const char* bad_kind = nullptr;

    void flag(int cell, double value, const char* kind)
    {
        if (bad_cell < 0 || cell < bad_cell) {
            bad_cell = cell;
            bad_value = value;
            bad_kind = kind;
        }
    }
};

} // namespace

struct Simulation::Probe {
    ProbeSpec spec;
    int node = 0;
    int cell = 0;
    int level = -1;
    double acc = 0.0;
    int count = 0;
    std::vector<double> chunk;
    TraceRecord record;   // samples only when keep_traces
    int writer_id = -1;
};

std::string to_string(RunStatus s)
{
    return s == RunStatus::kOk ? "ok" : "invariant_violation";
}

const TraceRecord& RunSummary::trace(const std::string& probe) const
{
    for (const TraceRecord& t : traces)
        if (t.probe == probe)
            return t;
    throw DomainError("run summary: no trace for probe '" + probe + "'");
}

Simulation::Simulation(Scenario s, RunOptions o) : sc_(std::move(s)), opt_(std::move(o))
{
    if (opt_.seed)
        sc_.seed = *opt_.seed;
    if (opt_.duration_override_s) {
        if (!(*opt_.duration_override_s > 0.0))
            throw ConfigError("duration override must be > 0");
        sc_.duration_s = *opt_.duration_override_s;
    }
    sc_.validate();
    if (opt_.threads < 1)
        throw ConfigError("threads must be >= 1");

    const QuantumSystem sys = build_quantum_system(sc_.system);
    const ThreeLevelMap map = build_three_level_map(sc_, sys);
    const double dt = sc_.dt();
    prop_ = std::make_unique<Propagator>(sys, dt, sc_.noise_scheme, map);
    const std::vector<MaterialParams> mats(sc_.cells, sc_.material);
    solver_ = std::make_unique<FieldSolver>(mats, sc_.dx(), dt, resolved_boundary(sc_, true),
                                            resolved_boundary(sc_, false));
    grid_ = GridState::create(sc_.cells, sc_.dx(), dt, mats);
    grid_.n_cell = cell_carriers(sc_);
    stream_ = NoiseStream(sc_.seed);
    planned_ = sc_.steps();
    pool_ = std::make_unique<WorkerPool>(opt_.threads);
    worker_diag_.assign(opt_.threads, NoiseDiagnostics{});
    dp_.assign(sc_.cells, 0.0);
    e_old_.assign(sc_.cells + 1, 0.0);

    if (!opt_.out_dir.empty()) {
        std::error_code ec;
        fs::create_directories(fs::path(opt_.out_dir) / "traces", ec);
        fs::create_directories(fs::path(opt_.out_dir) / "snapshots", ec);
        if (ec)
            throw ConfigError("cannot create output directory '" + opt_.out_dir + "'");
        fs::remove(fs::path(opt_.out_dir) / "FAILED", ec);
        writer_ = std::make_unique<TraceWriter>(opt_.writer_queue);
        save_scenario(sc_, (fs::path(opt_.out_dir) / "scenario.json").string());
    }

    for (const ProbeSpec& ps : sc_.probes) {
        Probe p;
        p.spec = ps;
        p.node = std::clamp(static_cast<int>(std::lround(ps.position_m / grid_.dx)), 0, sc_.cells);
        p.cell = std::clamp(static_cast<int>(std::floor(ps.position_m / grid_.dx)), 0, sc_.cells - 1);
        if (ps.quantity == "population")
            p.level = sys.level_index(ps.level);
        const double d = static_cast<double>(ps.decimation);
        p.record.probe = ps.name;
        p.record.quantity = ps.quantity;
        p.record.units = units_of(ps.quantity);
        p.record.dt = d * dt;
        p.record.t0 = ps.reduce == "mean" ? 0.5 * (d + 1.0) * dt : d * dt;
        p.record.decimation = static_cast<std::uint32_t>(ps.decimation);
        if (writer_)
            p.writer_id = writer_->open(
                (fs::path(opt_.out_dir) / "traces" / (ps.name + ".mdltrace")).string(), p.record);
        probes_.push_back(std::move(p));
    }
    init_state();
}

Simulation::~Simulation()
{
    if (writer_) {
        try {
            writer_->close();
        } catch (...) {
        }
    }
}

void Simulation::init_state()
{
    const QuantumSystem& sys = prop_->system();
    const int n = sys.num_levels();
    grid_.rho.assign(sc_.cells, DensityMatrix::Zero(n, n));
    for (int k = 0; k < sc_.cells; ++k) {
        if (sc_.initial.kind == "tipped_inversion") {
            grid_.rho[k] = sc_.initial.force_zero_tipping
                               ? initial_condition_2lvl(0.0, 0.0)
                               : initial_condition_2lvl(grid_.n_cell[k], stream_,
                                                        static_cast<std::uint32_t>(k));
        } else {
            const int l = sys.level_index(sc_.initial.level);
            grid_.rho[k](l, l) = 1.0;
        }
        grid_.p_qm[k] = macroscopic_polarization(sys, grid_.rho[k]);
    }
    grid_.p_qm_prev = grid_.p_qm;
}

void Simulation::matter_step(const std::vector<double>& e_old, bool monitor)
{
    const QuantumSystem& sys = prop_->system();
    const double inv_dt = 1.0 / grid_.dt;
    std::vector<CellCheck> checks(opt_.threads);
    for (auto& d : worker_diag_)
        d = NoiseDiagnostics{};
    const double floor = sc_.positivity_floor;

    pool_->run(sc_.cells, [&](int begin, int end, int w) {
        NoiseDiagnostics& diag = worker_diag_[w];
        CellCheck& chk = checks[w];
        const double* en = e_old.data();
        const double* e1 = grid_.e_field.data();
        for (int k = begin; k < end; ++k) {
            const double e_mid = 0.25 * (en[k] + en[k + 1] + e1[k] + e1[k + 1]);
            DensityMatrix& rho = grid_.rho[k];
            const DrawKey key{&stream_, static_cast<std::uint32_t>(k), step_};
            prop_->full_step(rho, e_mid, grid_.n_cell[k], key, diag);
            const double p = macroscopic_polarization(sys, rho);
            grid_.p_qm_prev[k] = grid_.p_qm[k];
            grid_.p_qm[k] = p;
            dp_[k] = (p - grid_.p_qm_prev[k]) * inv_dt;
            if (monitor) {
                const double tr_err = std::abs(rho.trace() - cd(1.0, 0.0));
                const double lmin = min_eigenvalue(rho);
                if (!std::isfinite(tr_err) || !std::isfinite(lmin)) {
                    chk.flag(k, tr_err, "non-finite density matrix");
                    continue;
                }
                chk.max_trace_err = std::max(chk.max_trace_err, tr_err);
                chk.min_eig = std::min(chk.min_eig, lmin);
                if (tr_err > kTraceTolerance)
                    chk.flag(k, tr_err, "trace error");
                else if (lmin < floor)
                    chk.flag(k, lmin, "positivity floor breached, min eigenvalue");
            }
        }
    });

    for (const auto& d : worker_diag_)
        diag_.merge(d);
    if (!monitor)
        return;
    CellCheck all;
    for (const CellCheck& c : checks) {
        all.min_eig = std::min(all.min_eig, c.min_eig);
        all.max_trace_err = std::max(all.max_trace_err, c.max_trace_err);
        if (c.bad_cell >= 0)
            all.flag(c.bad_cell, c.bad_value, c.bad_kind);
    }
    min_eig_ = std::min(min_eig_, all.min_eig);
    max_trace_err_ = std::max(max_trace_err_, all.max_trace_err);
    if (all.bad_cell >= 0) {
        char buf[256];
        std::snprintf(buf, sizeof buf, "%s %.6g at cell %d, step %" PRIu64, all.bad_kind,
                      all.bad_value, all.bad_cell, step_);
        throw InvariantViolation(buf);
    }
}

void Simulation::check_field() const
{
    for (std::size_t k = 0; k < grid_.e_field.size(); ++k)
        if (!std::isfinite(grid_.e_field[k]))
            throw InvariantViolation("non-finite E field at node " + std::to_string(k) +
                                     ", step " + std::to_string(step_));
}

void Simulation::step()
{
    e_old_ = grid_.e_field;
    solver_->update_h(grid_);
    solver_->update_e(grid_, dp_);
    solver_->apply_boundaries(grid_, dp_, facets_);
    const bool monitor = (step_ + 1) % static_cast<std::uint64_t>(sc_.monitor_every_steps) == 0 ||
                         step_ + 1 == planned_;
    matter_step(e_old_, monitor);
    if (monitor)
        check_field();
    ++step_;
    sample_probes();
    if (sc_.snapshot_every_steps > 0 && step_ % sc_.snapshot_every_steps == 0)
        write_snapshot();
}

void Simulation::sample_probes()
{
    for (Probe& p : probes_) {
        const std::string& q = p.spec.quantity;
        const bool reduce_mean = p.spec.reduce == "mean";
        const bool due = (step_ % static_cast<std::uint64_t>(p.spec.decimation)) == 0;
        if (!reduce_mean && !due)
            continue;
        double v = 0.0;
        if (q == "e_field") {
            v = grid_.e_field[p.node];
        } else if (q == "intensity") {
            v = grid_.e_field[p.node] * grid_.e_field[p.node];
        } else if (q == "facet_power") {
            v = p.spec.side == "left" ? facets_.power_left : facets_.power_right;
        } else if (q == "field_energy") {
            v = solver_->field_energy(grid_);
        } else if (q == "population") {
            if (p.spec.medium_average) {
                for (const auto& r : grid_.rho)
                    v += r(p.level, p.level).real();
                v /= static_cast<double>(grid_.rho.size());
            } else {
                v = grid_.rho[p.cell](p.level, p.level).real();
            }
        } else if (q == "bloch_ratio") {
            if (p.spec.medium_average) {
                int n = 0;
                for (const auto& r : grid_.rho) {
                    const BlochVector b = bloch_vector_metric(r);
                    if (b.defined) {
                        v += b.ratio;
                        ++n;
                    }
                }
                v = n ? v / n : std::numeric_limits<double>::quiet_NaN();
            } else {
                v = bloch_vector_metric(grid_.rho[p.cell]).ratio;
            }
        }
        if (reduce_mean) {
            p.acc += v;
            if (++p.count < p.spec.decimation)
                continue;
            v = p.acc / static_cast<double>(p.spec.decimation);
            p.acc = 0.0;
            p.count = 0;
        }
        if (opt_.keep_traces)
            p.record.samples.push_back(v);
        if (writer_) {
            p.chunk.push_back(v);
            if (p.chunk.size() >= kChunk) {
                writer_->append(p.writer_id, std::move(p.chunk));
                p.chunk.clear();
            }
        }
    }
}

void Simulation::flush_probes(bool final)
{
    if (!writer_)
        return;
    for (Probe& p : probes_) {
        if (!p.chunk.empty()) {
            writer_->append(p.writer_id, std::move(p.chunk));
            p.chunk.clear();
        }
    }
    if (final)
        writer_->close();
}

std::string Simulation::snapshot_json() const
{
    const int n = prop_->system().num_levels();
    Json j;
    j["schema_version"] = 1;
    j["step"] = step_;
    j["time_s"] = time();
    j["e_field_V_per_m"] = grid_.e_field;
    j["h_field_A_per_m"] = grid_.h_field;
    Json pops = Json::object();
    Json coh = Json::object();
    const auto& names = prop_->system().level_names();
    for (int a = 0; a < n; ++a) {
        std::vector<double> v(grid_.rho.size());
        for (std::size_t k = 0; k < v.size(); ++k)
            v[k] = grid_.rho[k](a, a).real();
        pops[names[a]] = v;
        for (int b = 0; b < a; ++b) {
            std::vector<double> re(grid_.rho.size()), im(grid_.rho.size());
            for (std::size_t k = 0; k < re.size(); ++k) {
                re[k] = grid_.rho[k](a, b).real();
                im[k] = grid_.rho[k](a, b).imag();
            }
            coh[names[a] + "," + names[b]] = {{"re", re}, {"im", im}};
        }
    }
    j["populations"] = pops;
    j["coherences"] = coh;
    j["polarization_C_per_m2"] = grid_.p_qm;
    return j.dump();
}

void Simulation::write_snapshot()
{
    ++snapshots_;
    if (!writer_)
        return;
    char name[64];
    std::snprintf(name, sizeof name, "step_%012" PRIu64 ".json", step_);
    writer_->write_file((fs::path(opt_.out_dir) / "snapshots" / name).string(), snapshot_json());
}

RunSummary Simulation::summary() const
{
    RunSummary s;
    s.steps_planned = planned_;
    s.steps_done = step_;
    s.dt = grid_.dt;
    s.wall_time_s = wall_;
    s.config_hash = config_hash(sc_);
    s.seed = sc_.seed;
    s.noise = diag_;
    s.min_eigenvalue = min_eig_;
    s.max_trace_error = max_trace_err_;
    s.snapshots = snapshots_;
    s.facets = facets_;
    if (opt_.keep_traces)
        for (const Probe& p : probes_)
            s.traces.push_back(p.record);
    return s;
}

void Simulation::write_manifest(const RunSummary& s) const
{
    Json m;
    m["mdlang_version"] = MDL_VERSION;
    m["scenario_schema_version"] = kScenarioSchemaVersion;
    m["trace_schema_version"] = kTraceSchemaVersion;
    m["compiler"] = __VERSION__;
    m["eigen_version"] = std::to_string(EIGEN_WORLD_VERSION) + "." +
                         std::to_string(EIGEN_MAJOR_VERSION) + "." +
                         std::to_string(EIGEN_MINOR_VERSION);
    m["status"] = to_string(s.status);
    if (!s.message.empty())
        m["message"] = s.message;
    m["config_hash_fnv1a64"] = hex64(s.config_hash);
    m["seed"] = s.seed;
    m["threads"] = opt_.threads;
    if (opt_.duration_override_s)
        m["duration_override_s"] = *opt_.duration_override_s;
    m["dt_s"] = s.dt;
    m["steps_planned"] = s.steps_planned;
    m["steps_done"] = s.steps_done;
    m["wall_time_s"] = s.wall_time_s;
    m["noise"] = {{"scheme", to_string(sc_.noise_scheme)},
                  {"draws", s.noise.draws},
                  {"clamp_events", s.noise.clamp_events},
                  {"clamp_rate", s.noise.clamp_rate()},
                  {"most_negative_radicand", s.noise.most_negative_radicand}};
    m["invariants"] = {{"min_eigenvalue", std::isfinite(s.min_eigenvalue) ? Json(s.min_eigenvalue) : Json()},
                       {"max_trace_error", s.max_trace_error},
                       {"positivity_floor", sc_.positivity_floor},
                       {"monitor_every_steps", sc_.monitor_every_steps}};
    m["facets"] = {{"energy_left_J_per_m2", s.facets.energy_left},
                   {"energy_right_J_per_m2", s.facets.energy_right}};
    Json traces = Json::array();
    for (const Probe& p : probes_)
        traces.push_back({{"probe", p.spec.name},
                          {"file", "traces/" + p.spec.name + ".mdltrace"},
                          {"quantity", p.spec.quantity},
                          {"decimation", p.spec.decimation},
                          {"reduce", p.spec.reduce}});
    m["traces"] = traces;
    m["snapshots"] = s.snapshots;
    m["scenario"] = scenario_to_json(sc_);
    std::ofstream out(fs::path(opt_.out_dir) / "manifest.json");
    out << m.dump(2) << '\n';
    if (!out)
        throw ConfigError("cannot write run manifest in '" + opt_.out_dir + "'");
}

RunSummary Simulation::run()
{
    const auto t0 = std::chrono::steady_clock::now();
    RunStatus status = RunStatus::kOk;
    std::string message;
    try {
        while (step_ < planned_)
            step();
        if (sc_.snapshot_every_steps == 0 || step_ % sc_.snapshot_every_steps != 0)
            write_snapshot();
    } catch (const InvariantViolation& e) {
        status = RunStatus::kInvariantViolation;
        message = e.what();
        write_snapshot();
    }
    wall_ += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    flush_probes(true);
    RunSummary s = summary();
    s.status = status;
    s.message = message;
    if (!opt_.out_dir.empty()) {
        write_manifest(s);
        if (status != RunStatus::kOk) {
            std::ofstream f(fs::path(opt_.out_dir) / "FAILED");
            f << message << '\n';
        }
    }
    return s;
}

} // namespace mdl

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
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mdl/em_grid.hpp"
#include "mdl/langevin_noise.hpp"
#include "mdl/lindblad_propagator.hpp"
#include "mdl/parallel.hpp"
#include "mdl/scenario.hpp"
#include "mdl/trace.hpp"

namespace mdl {

struct RunOptions {
    int threads = 1;
    std::optional<std::uint64_t> seed;
    std::optional<double> duration_override_s;
    /** Artifact directory; empty writes nothing. */
    std::string out_dir;
    /** Keep every probe trace in memory for the summary. */
    bool keep_traces = true;
    std::size_t writer_queue = 64;
};

enum class RunStatus { kOk, kInvariantViolation };

struct RunSummary {
    RunStatus status = RunStatus::kOk;
    std::string message;
    std::uint64_t steps_planned = 0;
    std::uint64_t steps_done = 0;
    double dt = 0.0;
    double wall_time_s = 0.0;
    std::uint64_t config_hash = 0;
    std::uint64_t seed = 0;
    NoiseDiagnostics noise;
    double min_eigenvalue = std::numeric_limits<double>::infinity();
    double max_trace_error = 0.0;
    std::uint64_t snapshots = 0;
    FacetRecord facets;
    std::vector<TraceRecord> traces;

    const TraceRecord& trace(const std::string& probe) const;
};

std::string to_string(RunStatus s);

/**
 * One Maxwell-Bloch run. Each step: H update, E update with the polarization
 * current of the previous step, boundaries, per-cell matter step driven by
 * the space-time average of the surrounding E values, new polarization.
 * Probes sample after the full step.
 */
class Simulation {
public:
    explicit Simulation(Scenario s, RunOptions o = {});
    ~Simulation();
    Simulation(const Simulation&) = delete;
    Simulation& operator=(const Simulation&) = delete;

    const Scenario& scenario() const { return sc_; }
    const QuantumSystem& system() const { return prop_->system(); }
    const GridState& state() const { return grid_; }
    GridState& mutable_state() { return grid_; }
    const FieldSolver& solver() const { return *solver_; }
    std::uint64_t step_index() const { return step_; }
    std::uint64_t steps_planned() const { return planned_; }
    double time() const { return static_cast<double>(step_) * grid_.dt; }

    /** Advances one step; throws InvariantViolation when a check fails. */
    void step();
    /**
     * Steps to the planned count. Invariant violations end the run with a
     * failure marker and are reported in the summary, not thrown.
     */
    RunSummary run();

private:
    struct Probe;

    void init_state();
    void matter_step(const std::vector<double>& e_old, bool monitor);
    void sample_probes();
    void check_field() const;
    std::string snapshot_json() const;
    void write_snapshot();
    void write_manifest(const RunSummary& s) const;
    void flush_probes(bool final);
    RunSummary summary() const;

    Scenario sc_;
    RunOptions opt_;
    std::unique_ptr<Propagator> prop_;
    std::unique_ptr<FieldSolver> solver_;
    std::unique_ptr<WorkerPool> pool_;
    std::unique_ptr<class TraceWriter> writer_;
    NoiseStream stream_;
    GridState grid_;
    std::vector<double> dp_, e_old_;
    FacetRecord facets_;
    std::uint64_t step_ = 0, planned_ = 0, snapshots_ = 0;
    std::vector<Probe> probes_;
    std::vector<NoiseDiagnostics> worker_diag_;
    NoiseDiagnostics diag_;
    double min_eig_ = std::numeric_limits<double>::infinity();
    double max_trace_err_ = 0.0;
    double wall_ = 0.0;
};

/** Trace-error bound checked on every monitored step. */
constexpr double kTraceTolerance = 1e-6;

} // namespace mdl

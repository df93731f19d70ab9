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

// mdlang command-line entry point: run, analyze, verify, schema, preset.

#include <CLI11.hpp>

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "mdl/errors.hpp"
#include "mdl/scenario.hpp"
#include "mdl/signal_analysis.hpp"
#include "mdl/simulation.hpp"
#include "mdl/trace_io.hpp"
#include "mdl/verify.hpp"

namespace fs = std::filesystem;
using namespace mdl;

namespace {

/** "1ps", "2.5 ns", "1e-12" (seconds). */
double parse_duration(const std::string& text)
{
    static const std::map<std::string, double> units = {
        {"s", 1.0}, {"ms", 1e-3}, {"us", 1e-6}, {"ns", 1e-9}, {"ps", 1e-12}, {"fs", 1e-15}};
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &pos);
    } catch (const std::exception&) {
        throw ConfigError("duration override: cannot parse '" + text + "'");
    }
    std::string unit = text.substr(pos);
    unit.erase(0, unit.find_first_not_of(' '));
    double scale = 1.0;
    if (!unit.empty()) {
        const auto it = units.find(unit);
        if (it == units.end())
            throw ConfigError("duration override: unknown unit '" + unit + "'");
        scale = it->second;
    }
    if (!(v > 0.0) || !std::isfinite(v))
        throw ConfigError("duration override must be positive");
    return v * scale;
}

std::string provenance(const std::string& what, const std::string& input,
                       const std::vector<std::pair<std::string, std::string>>& params)
{
    std::ostringstream h;
    h << "# mdlang " << MDL_VERSION << " analyze " << what << "\n";
    h << "# input " << input << "\n";
    for (const auto& [k, v] : params)
        h << "# " << k << " " << v << "\n";
    return h.str();
}

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_spectrum(const std::string& path, const std::string& header, const Spectrum& s)
{
    std::ofstream out(path);
    if (!out)
        throw ConfigError("cannot write '" + path + "'");
    out << header;
    out << "# window " << s.window << "\n# sidedness " << s.sidedness << "\n# resolution_bw_Hz "
        << num(s.resolution_bw) << "\n# segments " << s.segments << "\n# columns frequency_Hz "
        << s.units << "\n";
    for (std::size_t k = 0; k < s.frequency.size(); ++k)
        out << num(s.frequency[k]) << ' ' << num(s.value[k]) << '\n';
}

std::string default_out(const std::string& input, const std::string& suffix)
{
    fs::path p(input);
    p.replace_extension();
    return p.string() + "." + suffix + ".txt";
}

int cmd_run(const std::string& config, std::optional<std::uint64_t> seed, int threads,
            const std::string& duration, std::string out)
{
    Scenario s = load_scenario(config);
    RunOptions o;
    o.threads = threads;
    o.seed = seed;
    if (!duration.empty())
        o.duration_override_s = parse_duration(duration);
    if (out.empty())
        out = (fs::path("runs") / s.name).string();
    o.out_dir = out;
    o.keep_traces = false;
    Simulation sim(std::move(s), o);
    std::fprintf(stderr, "mdlang run: %s, %" PRIu64 " steps of %.6g s, %d thread(s), out %s\n",
                 sim.scenario().name.c_str(), sim.steps_planned(), sim.state().dt, threads,
                 out.c_str());
    const RunSummary r = sim.run();
    std::printf("status %s\nsteps %" PRIu64 "/%" PRIu64 "\nwall_time_s %.3f\nclamp_rate %.3g\n"
                "min_eigenvalue %.3g\nmax_trace_error %.3g\nsnapshots %" PRIu64 "\n",
                to_string(r.status).c_str(), r.steps_done, r.steps_planned, r.wall_time_s,
                r.noise.clamp_rate(), r.min_eigenvalue, r.max_trace_error, r.snapshots);
    if (r.status != RunStatus::kOk) {
        std::fprintf(stderr, "mdlang run: invariant violation: %s\n", r.message.c_str());
        return kExitInvariant;
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"mdlang: stochastic Maxwell-Bloch simulator for quantum optoelectronic devices"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string("mdlang ") + MDL_VERSION);

    // run
    auto* run = app.add_subcommand("run", "Run a scenario and write traces, snapshots, manifest");
    std::string config, duration, out_dir;
    std::optional<std::uint64_t> seed;
    int threads = 0;
    run->add_option("config", config, "Scenario JSON file")->required()->check(CLI::ExistingFile);
    run->add_option("--seed", seed, "Override the noise seed");
    run->add_option("--threads", threads, "Worker threads (default: MDL_THREADS or 1)");
    run->add_option("--duration-override", duration, "Simulated duration, e.g. 1ps or 2e-9");
    run->add_option("--out", out_dir, "Artifact directory (default runs/<scenario name>)");

    // analyze
    auto* analyze = app.add_subcommand("analyze", "Spectral analysis of a trace file");
    analyze->require_subcommand(1);
    std::string trace_path, out_path, window = "hann";
    int segments = 1;
    double mask_fraction = 1e-3, center = 0.0, bandwidth = 0.0;
    auto add_common = [&](CLI::App* c) {
        c->add_option("trace", trace_path, "Trace file")->required();
        c->add_option("--out", out_path, "Output file");
    };
    auto* a_spec = analyze->add_subcommand("spectrum", "Optical intensity spectrum of a field trace");
    add_common(a_spec);
    a_spec->add_option("--window", window, "rectangular | hann");
    auto* a_rf = analyze->add_subcommand("rf", "RF power spectrum (dB) of a power trace");
    add_common(a_rf);
    a_rf->add_option("--window", window, "rectangular | hann");
    auto* a_rin = analyze->add_subcommand("rin", "Relative intensity noise of a power trace");
    add_common(a_rin);
    a_rin->add_option("--segments", segments, "Average this many equal segments");
    auto* a_if = analyze->add_subcommand("instfreq", "Instantaneous frequency of a field trace");
    add_common(a_if);
    a_if->add_option("--mask-fraction", mask_fraction, "Envelope threshold relative to its maximum");
    auto* a_filt = analyze->add_subcommand("filter", "Band-pass a trace (zero phase)");
    add_common(a_filt);
    a_filt->add_option("--center-hz", center, "Pass-band center")->required();
    a_filt->add_option("--bandwidth-hz", bandwidth, "3 dB bandwidth")->required();

    // verify
    auto* verify = app.add_subcommand("verify", "Oracle checks; JSON report on stdout");
    std::string suite;
    long samples = 0;
    std::uint64_t vseed = 1;
    verify->add_option("--suite", suite, "diffusion | noise-stats | solver")
        ->required()
        ->check(CLI::IsMember({"diffusion", "noise-stats", "solver"}));
    verify->add_option("--samples", samples, "States (diffusion) or draws (noise-stats)");
    verify->add_option("--seed", vseed, "Seed of the random states and draws");

    // schema
    app.add_subcommand("schema", "Print the scenario JSON schema");

    // preset
    auto* preset = app.add_subcommand("preset", "Write a built-in scenario file");
    preset->require_subcommand(1);
    double t2 = 0.0;
    std::string params_path, preset_out;
    auto* p_sf = preset->add_subcommand("sf", "Two-level superfluorescence scenario");
    p_sf->add_option("--t2", t2, "Dephasing time in seconds")->required();
    p_sf->add_option("--out", preset_out, "Output file")->required();
    auto* p_qcl = preset->add_subcommand("qcl", "QCL cavity scenario from a parameter file");
    p_qcl->add_option("--params", params_path, "Parameter file")->required();
    p_qcl->add_option("--out", preset_out, "Output file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (*run) {
            if (threads == 0)
                threads = default_thread_count();
            return cmd_run(config, seed, threads, duration, out_dir);
        }
        if (*analyze) {
            const TraceRecord t = read_trace(trace_path);
            if (*a_spec) {
                const Spectrum s = intensity_spectrum(t, window_from_string(window));
                write_spectrum(out_path.empty() ? default_out(trace_path, "spectrum") : out_path,
                               provenance("spectrum", trace_path, {{"window", window}}), s);
            } else if (*a_rf) {
                const Spectrum s = rf_spectrum(t, window_from_string(window));
                write_spectrum(out_path.empty() ? default_out(trace_path, "rf") : out_path,
                               provenance("rf", trace_path, {{"window", window}}), s);
            } else if (*a_rin) {
                const Spectrum s = rin_spectrum(t, segments);
                write_spectrum(out_path.empty() ? default_out(trace_path, "rin") : out_path,
                               provenance("rin", trace_path, {}), s);
            } else if (*a_if) {
                const InstantaneousFrequency f = instantaneous_frequency(t, mask_fraction);
                const std::string path =
                    out_path.empty() ? default_out(trace_path, "instfreq") : out_path;
                std::ofstream o(path);
                if (!o)
                    throw ConfigError("cannot write '" + path + "'");
                o << provenance("instfreq", trace_path, {{"mask_fraction", num(mask_fraction)}});
                o << "# columns time_s frequency_Hz envelope valid\n";
                for (std::size_t k = 0; k < f.time.size(); ++k)
                    o << num(f.time[k]) << ' ' << num(f.frequency[k]) << ' ' << num(f.envelope[k])
                      << ' ' << (f.valid[k] ? 1 : 0) << '\n';
            } else if (*a_filt) {
                TraceRecord f = bandpass_filter(t, center, bandwidth);
                const std::string path = out_path.empty()
                                             ? fs::path(trace_path).replace_extension(".filtered.mdltrace").string()
                                             : out_path;
                write_trace(path, f);
                std::ofstream o(path + ".txt");
                o << provenance("filter", trace_path,
                                {{"center_Hz", num(center)}, {"bandwidth_3dB_Hz", num(bandwidth)}});
            }
            return kExitOk;
        }
        if (*verify) {
            SuiteReport r;
            if (suite == "diffusion")
                r = verify_diffusion(samples > 0 ? static_cast<int>(samples) : 1000, vseed);
            else if (suite == "noise-stats")
                r = verify_noise_stats(samples > 0 ? samples : 1000000,
                                       samples > 0 ? samples : 100000, vseed);
            else
                r = verify_solver(samples > 0 ? samples : 100000);
            std::printf("%s\n", r.to_json().dump(2).c_str());
            return r.pass() ? kExitOk : kExitVerification;
        }
        if (app.got_subcommand("schema")) {
            std::printf("%s\n", scenario_schema().dump(2).c_str());
            return kExitOk;
        }
        if (*preset) {
            const Scenario s = *p_sf ? superfluorescence_scenario(t2) : qcl_hfc_scenario(params_path);
            save_scenario(s, preset_out);
            return kExitOk;
        }
    } catch (const InvariantViolation& e) {
        std::fprintf(stderr, "mdlang: invariant violation: %s\n", e.what());
        return kExitInvariant;
    } catch (const VerificationFailure& e) {
        std::fprintf(stderr, "mdlang: verification failed: %s\n", e.what());
        return kExitVerification;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "mdlang: %s\n", e.what());
        return kExitConfig;
    } catch (const DomainError& e) {
        std::fprintf(stderr, "mdlang: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "mdlang: error: %s\n", e.what());
        return 1;
    }
    return kExitOk;
}

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

#include "mdl/signal_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>

#include <fftw3.h>

#include "mdl/errors.hpp"

namespace mdl {

void TraceRecord::validate() const
{
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw DomainError("trace '" + probe + "': sample interval must be positive");
    if (samples.size() < 2)
        throw DomainError("trace '" + probe + "': need at least two samples");
}

TraceRecord trace_from_samples(const std::vector<double>& times, const std::vector<double>& values,
                               std::string quantity, std::string probe)
{
    if (times.size() != values.size() || times.size() < 2)
        throw DomainError("trace_from_samples: need matching times/values, >= 2 samples");
    const double dt = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
    for (std::size_t k = 1; k < times.size(); ++k)
        if (std::abs(times[k] - times[k - 1] - dt) > 1e-9 * std::abs(dt))
            throw DomainError("trace_from_samples: non-uniform sampling at index " +
                              std::to_string(k));
    TraceRecord t;
    t.probe = std::move(probe);
    t.quantity = std::move(quantity);
    t.dt = dt;
    t.t0 = times.front();
    t.samples = values;
    t.validate();
    return t;
}

std::string to_string(Window w) { return w == Window::kHann ? "hann" : "rectangular"; }

Window window_from_string(const std::string& s)
{
    if (s == "hann")
        return Window::kHann;
    if (s == "rectangular" || s == "rect")
        return Window::kRectangular;
    throw ConfigError("window must be hann|rectangular, got '" + s + "'");
}

namespace {

std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}

// forward complex DFT, X_k = sum x_n exp(-i 2 pi k n / N)
std::vector<cd> dft(std::vector<cd> x, bool inverse = false)
{
    const int n = static_cast<int>(x.size());
    std::vector<cd> out(n);
    fftw_plan p;
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        p = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(x.data()),
                             reinterpret_cast<fftw_complex*>(out.data()),
                             inverse ? FFTW_BACKWARD : FFTW_FORWARD, FFTW_ESTIMATE);
    }
    fftw_execute(p);
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(p);
    }
    if (inverse)
        for (auto& v : out)
            v /= static_cast<double>(n);
    return out;
}

std::vector<cd> rdft(const std::vector<double>& x)
{
    const int n = static_cast<int>(x.size());
    std::vector<double> in(x);
    std::vector<cd> out(n / 2 + 1);
    fftw_plan p;
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        p = fftw_plan_dft_r2c_1d(n, in.data(), reinterpret_cast<fftw_complex*>(out.data()),
                                 FFTW_ESTIMATE);
    }
    fftw_execute(p);
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(p);
    }
    return out;
}

std::vector<double> window_values(Window w, std::size_t n)
{
    std::vector<double> v(n, 1.0);
    if (w == Window::kHann)
        for (std::size_t k = 0; k < n; ++k)   // periodic Hann
            v[k] = 0.5 - 0.5 * std::cos(2.0 * kPi * static_cast<double>(k) / static_cast<double>(n));
    return v;
}

double signed_frequency(std::size_t k, std::size_t n, double dt)
{
    const double kk = (k <= n / 2) ? static_cast<double>(k)
                                   : static_cast<double>(k) - static_cast<double>(n);
    return kk / (static_cast<double>(n) * dt);
}

Spectrum one_sided_density(const std::vector<double>& x, double dt, Window w)
{
    const std::size_t n = x.size();
    const std::vector<double> win = window_values(w, n);
    double u = 0.0;
    std::vector<double> xw(n);
    for (std::size_t k = 0; k < n; ++k) {
        xw[k] = x[k] * win[k];
        u += win[k] * win[k];
    }
    u /= static_cast<double>(n);
    const std::vector<cd> f = rdft(xw);
    Spectrum s;
    s.resolution_bw = 1.0 / (static_cast<double>(n) * dt);
    s.window = to_string(w);
    s.frequency.resize(f.size());
    s.value.resize(f.size());
    for (std::size_t k = 0; k < f.size(); ++k) {
        s.frequency[k] = static_cast<double>(k) * s.resolution_bw;
        const bool edge = (k == 0) || (n % 2 == 0 && k == n / 2);
        s.value[k] = (edge ? 1.0 : 2.0) * dt * dt * std::norm(f[k]) / u;
    }
    return s;
}

} // namespace

Spectrum intensity_spectrum(const TraceRecord& trace, Window window)
{
    trace.validate();
    Spectrum s = one_sided_density(trace.samples, trace.dt, window);
    s.units = "(" + (trace.units.empty() ? std::string("unit") : trace.units) + ")^2 s/Hz";
    s.sidedness = "one-sided";
    return s;
}

InstantaneousFrequency instantaneous_frequency(const TraceRecord& trace, double mask_fraction)
{
    trace.validate();
    const std::size_t n = trace.samples.size();
    std::vector<cd> x(n);
    for (std::size_t k = 0; k < n; ++k)
        x[k] = trace.samples[k];
    std::vector<cd> f = dft(std::move(x));
    // analytic signal: keep DC and Nyquist, double positive, drop negative
    for (std::size_t k = 1; k < n; ++k) {
        if (n % 2 == 0 && k == n / 2)
            continue;
        f[k] = (k < (n + 1) / 2) ? 2.0 * f[k] : cd(0.0);
    }
    const std::vector<cd> z = dft(std::move(f), true);

    InstantaneousFrequency out;
    out.time.resize(n);
    out.frequency.assign(n, 0.0);
    out.envelope.resize(n);
    out.valid.assign(n, true);
    std::vector<double> phase(n);
    double emax = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        out.time[k] = trace.time(k);
        out.envelope[k] = std::abs(z[k]);
        emax = std::max(emax, out.envelope[k]);
        phase[k] = std::arg(z[k]);
    }
    for (std::size_t k = 1; k < n; ++k) {
        double d = phase[k] - phase[k - 1];
        d -= 2.0 * kPi * std::round(d / (2.0 * kPi));
        phase[k] = phase[k - 1] + d;
    }
    const double thr = mask_fraction * emax;
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t a = (k == 0) ? 0 : k - 1;
        const std::size_t b = (k + 1 == n) ? k : k + 1;
        out.frequency[k] = (phase[b] - phase[a]) / (2.0 * kPi * trace.dt * static_cast<double>(b - a));
        out.valid[k] = out.envelope[a] >= thr && out.envelope[k] >= thr && out.envelope[b] >= thr;
    }
    return out;
}

Spectrum rf_spectrum(const TraceRecord& power, Window window)
{
    power.validate();
    const double mean = std::accumulate(power.samples.begin(), power.samples.end(), 0.0) /
                        static_cast<double>(power.samples.size());
    std::vector<double> x(power.samples);
    for (double& v : x)
        v -= mean;
    Spectrum s = one_sided_density(x, power.dt, window);
    const double t = power.duration();
    for (std::size_t k = 0; k < s.value.size(); ++k) {
        const bool edge = (k == 0) || (x.size() % 2 == 0 && k == x.size() / 2);
        const double psd = s.value[k] / t / (edge ? 1.0 : 2.0);
        s.value[k] = psd > 0.0 ? 10.0 * std::log10(psd) : -std::numeric_limits<double>::infinity();
    }
    s.units = "dB(" + (power.units.empty() ? std::string("unit") : power.units) + "^2/Hz)";
    s.sidedness = "two-sided density on f >= 0";
    return s;
}

double bandpass_response(double f, double f_center, double bandwidth_3db, double edge_fraction)
{
    const double d = std::abs(f - f_center);
    const double w = edge_fraction * bandwidth_3db;
    const double a = 0.5 * bandwidth_3db - 0.5 * w, b = 0.5 * bandwidth_3db + 0.5 * w;
    if (d <= a)
        return 1.0;
    if (d >= b)
        return 0.0;
    return std::cos(0.5 * kPi * (d - a) / (b - a));
}

namespace {

void check_band(const TraceRecord& t, double fc, double bw, double edge_fraction)
{
    t.validate();
    const double nyq = 0.5 / t.dt;
    if (!(bw > 0.0) || !(edge_fraction >= 0.0 && edge_fraction < 2.0))
        throw DomainError("bandpass: bandwidth must be positive");
    const double half = 0.5 * bw * (1.0 + edge_fraction);
    if (fc - half < 0.0 || fc + half > nyq)
        throw DomainError("bandpass: band [" + std::to_string(fc - half) + ", " +
                          std::to_string(fc + half) + "] Hz outside [0, Nyquist]");
}

std::vector<cd> filtered_spectrum(const TraceRecord& t, double fc, double bw, double ef,
                                  bool analytic)
{
    const std::size_t n = t.samples.size();
    std::vector<cd> x(n);
    for (std::size_t k = 0; k < n; ++k)
        x[k] = t.samples[k];
    std::vector<cd> f = dft(std::move(x));
    for (std::size_t k = 0; k < n; ++k) {
        const double fk = signed_frequency(k, n, t.dt);
        double h = bandpass_response(std::abs(fk), fc, bw, ef);
        if (analytic)
            h = fk > 0.0 ? 2.0 * h : 0.0;
        f[k] *= h;
    }
    return dft(std::move(f), true);
}

} // namespace

TraceRecord bandpass_filter(const TraceRecord& trace, double f_center, double bandwidth_3db,
                            double edge_fraction)
{
    check_band(trace, f_center, bandwidth_3db, edge_fraction);
    const std::vector<cd> y = filtered_spectrum(trace, f_center, bandwidth_3db, edge_fraction, false);
    TraceRecord out = trace;
    for (std::size_t k = 0; k < y.size(); ++k)
        out.samples[k] = y[k].real();
    return out;
}

std::vector<cd> bandpass_extract(const TraceRecord& trace, double f_center, double bandwidth_3db,
                                 double edge_fraction)
{
    check_band(trace, f_center, bandwidth_3db, edge_fraction);
    std::vector<cd> z = filtered_spectrum(trace, f_center, bandwidth_3db, edge_fraction, true);
    for (std::size_t k = 0; k < z.size(); ++k)
        z[k] *= std::polar(1.0, -2.0 * kPi * f_center * trace.time(k));
    return z;
}

std::vector<double> rin_linear(const TraceRecord& power, int segments, std::vector<double>* frequency)
{
    power.validate();
    if (segments < 1)
        throw DomainError("rin: segments must be >= 1");
    const std::size_t len = power.samples.size() / static_cast<std::size_t>(segments);
    if (len < 2)
        throw DomainError("rin: segments too short");
    const double mean_all = std::accumulate(power.samples.begin(),
                                            power.samples.begin() + len * segments, 0.0) /
                            static_cast<double>(len * segments);
    if (!(mean_all > 0.0))
        throw DomainError("rin: mean power must be positive");
    const double t = static_cast<double>(len) * power.dt;
    std::vector<double> acc(len / 2 + 1, 0.0);
    for (int s = 0; s < segments; ++s) {
        const auto first = power.samples.begin() + static_cast<std::ptrdiff_t>(s * len);
        const double mean = std::accumulate(first, first + static_cast<std::ptrdiff_t>(len), 0.0) /
                            static_cast<double>(len);
        std::vector<double> x(first, first + static_cast<std::ptrdiff_t>(len));
        for (double& v : x)
            v -= mean;
        const std::vector<cd> f = rdft(x);
        // the mean-subtracted DC bin is zero by construction
        for (std::size_t k = 1; k < acc.size(); ++k)
            acc[k] += power.dt * power.dt * std::norm(f[k]) / t / (mean * mean);
    }
    for (double& v : acc)
        v /= segments;
    if (frequency) {
        frequency->resize(acc.size());
        for (std::size_t k = 0; k < acc.size(); ++k)
            (*frequency)[k] = static_cast<double>(k) / t;
    }
    return acc;
}

Spectrum rin_spectrum(const TraceRecord& power, int segments)
{
    Spectrum s;
    const std::vector<double> lin = rin_linear(power, segments, &s.frequency);
    s.value.resize(lin.size());
    // rounding-level fluctuations (relative 1e-14) count as empty bins
    const double t = s.frequency.size() > 1 ? 1.0 / s.frequency[1] : 0.0;
    const double floor = 1e-28 * t;
    for (std::size_t k = 0; k < lin.size(); ++k)
        s.value[k] = lin[k] > floor ? 10.0 * std::log10(lin[k])
                                    : -std::numeric_limits<double>::infinity();
    s.resolution_bw = s.frequency.size() > 1 ? s.frequency[1] : 0.0;
    s.window = "rectangular";
    s.units = "dBc/Hz";
    s.sidedness = "one-sided grid, unfolded (single-sided density = 2x)";
    s.segments = segments;
    return s;
}

TraceRecord decimate_mean(const TraceRecord& trace, int n)
{
    if (n < 1)
        throw DomainError("decimate_mean: n must be >= 1");
    TraceRecord out = trace;
    out.samples.clear();
    const std::size_t nn = static_cast<std::size_t>(n);
    for (std::size_t k = 0; k + nn <= trace.samples.size(); k += nn) {
        double s = 0.0;
        for (std::size_t j = 0; j < nn; ++j)
            s += trace.samples[k + j];
        out.samples.push_back(s / n);
    }
    out.dt = trace.dt * n;
    out.t0 = trace.t0 + 0.5 * trace.dt * (n - 1);
    out.decimation = trace.decimation * static_cast<std::uint32_t>(n);
    return out;
}

std::size_t peak_bin(const Spectrum& s, double f_lo, double f_hi)
{
    std::size_t best = 0;
    bool found = false;
    for (std::size_t k = 0; k < s.frequency.size(); ++k) {
        if (s.frequency[k] < f_lo || s.frequency[k] > f_hi)
            continue;
        if (!found || s.value[k] > s.value[best]) {
            best = k;
            found = true;
        }
    }
    if (!found)
        throw DomainError("peak_bin: empty frequency range");
    return best;
}

namespace {

std::pair<std::size_t, std::size_t> band(const Spectrum& s, double f_lo, double f_hi)
{
    std::size_t lo = s.frequency.size(), hi = 0;
    for (std::size_t k = 0; k < s.frequency.size(); ++k)
        if (s.frequency[k] >= f_lo && s.frequency[k] <= f_hi) {
            lo = std::min(lo, k);
            hi = k + 1;
        }
    if (lo >= hi)
        throw DomainError("spectrum: empty frequency range");
    return {lo, hi};
}

// vertex offset in (-0.5, 0.5) of the parabola through (-1, a), (0, b), (1, c)
double vertex(double a, double b, double c)
{
    const double den = a - 2.0 * b + c;
    if (!(den < 0.0))
        return 0.0;
    return std::clamp(0.5 * (a - c) / den, -0.5, 0.5);
}

} // namespace

std::vector<SpectralLine> spectral_lines(const Spectrum& s, double f_lo, double f_hi,
                                         double floor_db, double min_separation)
{
    if (s.frequency.size() < 3 || s.frequency.size() != s.value.size())
        throw DomainError("spectral_lines: need a spectrum of at least 3 bins");
    if (!(floor_db <= 0.0))
        throw DomainError("spectral_lines: floor_db must be <= 0");
    const auto [lo, hi] = band(s, f_lo, f_hi);
    const double df = s.frequency[1] - s.frequency[0];
    const auto half = static_cast<std::ptrdiff_t>(std::max(1.0, std::floor(0.5 * min_separation / df)));
    double top = 0.0;
    for (std::size_t k = lo; k < hi; ++k)
        top = std::max(top, s.value[k]);
    const double floor = top * std::pow(10.0, floor_db / 10.0);
    const auto n = static_cast<std::ptrdiff_t>(s.value.size());

    std::vector<SpectralLine> out;
    for (std::size_t k = lo; k < hi; ++k) {
        const double v = s.value[k];
        if (!(v > 0.0) || v < floor)
            continue;
        bool is_max = true;
        const auto kk = static_cast<std::ptrdiff_t>(k);
        for (std::ptrdiff_t j = std::max<std::ptrdiff_t>(0, kk - half);
             j <= std::min(n - 1, kk + half) && is_max; ++j)
            if (j != kk && (s.value[j] > v || (s.value[j] == v && j < kk)))
                is_max = false;
        if (!is_max)
            continue;
        double off = 0.0;
        if (k > 0 && k + 1 < s.value.size() && s.value[k - 1] > 0.0 && s.value[k + 1] > 0.0)
            off = vertex(std::log(s.value[k - 1]), std::log(v), std::log(s.value[k + 1]));
        out.push_back({s.frequency[k] + off * df, v, k});
    }
    return out;
}

double mode_spacing(const Spectrum& s, double f_lo, double f_hi, double spacing_lo,
                    double spacing_hi)
{
    if (s.frequency.size() < 3 || s.frequency.size() != s.value.size())
        throw DomainError("mode_spacing: need a spectrum of at least 3 bins");
    if (!(spacing_lo > 0.0) || !(spacing_hi > spacing_lo))
        throw DomainError("mode_spacing: need 0 < spacing_lo < spacing_hi");
    const auto [lo, hi] = band(s, f_lo, f_hi);
    const double df = s.frequency[1] - s.frequency[0];
    const auto m_lo = static_cast<std::size_t>(std::max(1.0, std::floor(spacing_lo / df)));
    const auto m_hi = static_cast<std::size_t>(std::ceil(spacing_hi / df));
    if (m_hi + 1 >= hi - lo)
        throw DomainError("mode_spacing: band narrower than the spacing range");

    std::vector<double> a(hi - lo);
    for (std::size_t k = lo; k < hi; ++k)
        a[k - lo] = std::sqrt(std::max(0.0, s.value[k]));
    auto corr = [&](std::size_t m) {
        double acc = 0.0;
        for (std::size_t k = 0; k + m < a.size(); ++k)
            acc += a[k] * a[k + m];
        return acc;
    };
    std::size_t best = m_lo;
    double best_v = -1.0;
    for (std::size_t m = m_lo; m <= m_hi; ++m) {
        const double v = corr(m);
        if (v > best_v) {
            best_v = v;
            best = m;
        }
    }
    if (!(best_v > 0.0))
        throw DomainError("mode_spacing: no spectral content in the band");
    const double off = vertex(corr(best - 1), best_v, corr(best + 1));
    return (static_cast<double>(best) + off) * df;
}

CombFit comb_fit(const std::vector<SpectralLine>& lines, double spacing_guess)
{
    if (lines.size() < 2 || !(spacing_guess > 0.0))
        throw DomainError("comb_fit: need two lines and a positive spacing guess");
    const double m = static_cast<double>(lines.size());
    CombFit fit;
    // indices from neighbour gaps, so the guess error does not accumulate
    fit.index.push_back(0);
    for (std::size_t k = 1; k < lines.size(); ++k)
        fit.index.push_back(fit.index.back() +
                            std::lround((lines[k].frequency - lines[k - 1].frequency) / spacing_guess));
    for (int pass = 0; pass < 8; ++pass) {
        double sn = 0.0, sf = 0.0, snn = 0.0, snf = 0.0;
        for (std::size_t k = 0; k < lines.size(); ++k) {
            const double n = static_cast<double>(fit.index[k]);
            sn += n;
            sf += lines[k].frequency;
            snn += n * n;
            snf += n * lines[k].frequency;
        }
        const double den = m * snn - sn * sn;
        if (!(den > 0.0))
            throw DomainError("comb_fit: all lines map to one mode index");
        fit.spacing = (m * snf - sn * sf) / den;
        fit.offset = (sf - fit.spacing * sn) / m;
        bool changed = false;
        for (std::size_t k = 0; k < lines.size(); ++k) {
            const long n = std::lround((lines[k].frequency - fit.offset) / fit.spacing);
            changed = changed || n != fit.index[k];
            fit.index[k] = n;
        }
        if (!changed)
            break;
    }
    double ss = 0.0;
    for (std::size_t k = 0; k < lines.size(); ++k) {
        const double r = lines[k].frequency - fit.offset - fit.spacing * static_cast<double>(fit.index[k]);
        ss += r * r;
    }
    fit.rms_residual = std::sqrt(ss / m);
    return fit;
}

} // namespace mdl

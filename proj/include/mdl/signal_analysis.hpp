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

#include <complex>
#include <string>
#include <vector>

#include "mdl/constants.hpp"
#include "mdl/trace.hpp"

namespace mdl {

enum class Window { kRectangular, kHann };

std::string to_string(Window w);
Window window_from_string(const std::string& s);

/** Spectrum on the nonnegative frequency grid k / T. */
struct Spectrum {
    std::vector<double> frequency;   // Hz
    std::vector<double> value;
    double resolution_bw = 0.0;      // Hz, 1 / T of one segment
    std::string window;
    std::string units;
    std::string sidedness;
    int segments = 1;
};

/**
 * One-sided energy spectral density dt^2 |X_k|^2 / <w^2> of the windowed
 * field, doubled for 0 < f < f_Nyquist. With the rectangular window the sum
 * over bins times 1/T equals sum |x|^2 dt.
 */
Spectrum intensity_spectrum(const TraceRecord& trace, Window window = Window::kHann);

struct InstantaneousFrequency {
    std::vector<double> time;
    std::vector<double> frequency;   // Hz
    std::vector<double> envelope;
    std::vector<bool> valid;         // false where the envelope is below threshold
};

/**
 * Analytic signal by FFT Hilbert transform; f = (1/2pi) dphi/dt from central
 * differences of the unwrapped phase. Samples whose envelope is below
 * mask_fraction of the maximum are flagged invalid.
 */
InstantaneousFrequency instantaneous_frequency(const TraceRecord& trace,
                                               double mask_fraction = 1e-3);

/**
 * Periodogram of the mean-subtracted power in dB (10 log10 of the
 * two-sided density, units^2/Hz).
 */
Spectrum rf_spectrum(const TraceRecord& power, Window window = Window::kHann);

/**
 * Frequency-domain band-pass: flat within |f - fc| <= bw/2 - w/2, zero
 * beyond bw/2 + w/2, quarter-cosine edges of width w = edge_fraction * bw so
 * that |H| = 1/sqrt(2) at fc +- bw/2. Zero phase.
 */
double bandpass_response(double f, double f_center, double bandwidth_3db,
                         double edge_fraction = 0.5);

/** Real band-passed trace (zero-phase filter). */
TraceRecord bandpass_filter(const TraceRecord& trace, double f_center, double bandwidth_3db,
                            double edge_fraction = 0.5);

/**
 * Complex mode envelope: positive-frequency band-passed analytic signal
 * shifted down by f_center. A tone A cos(2 pi f t) in band gives |env| = A.
 */
std::vector<cd> bandpass_extract(const TraceRecord& trace, double f_center,
                                 double bandwidth_3db, double edge_fraction = 0.5);

/**
 * RIN(f) = (1/T) |int (P - <P>) exp(-i 2 pi f t) dt|^2 / <P>^2 on f >= 0
 * (rectangular window). value holds dBc/Hz; bins below the rounding floor
 * 1e-28 T are -inf. Reported on the one-sided grid without folding: the single-sided
 * density is twice this. segments > 1 averages periodograms of equal
 * non-overlapping segments.
 */
Spectrum rin_spectrum(const TraceRecord& power, int segments = 1);

/** Linear RIN values (1/Hz) behind rin_spectrum. */
std::vector<double> rin_linear(const TraceRecord& power, int segments = 1,
                               std::vector<double>* frequency = nullptr);

/** Boxcar average of non-overlapping blocks of n samples. */
TraceRecord decimate_mean(const TraceRecord& trace, int n);

/** Index of the largest value with f in [f_lo, f_hi]. */
std::size_t peak_bin(const Spectrum& s, double f_lo, double f_hi);

struct SpectralLine {
    double frequency = 0.0;   // Hz, parabolic refinement on the dB values
    double value = 0.0;
    std::size_t bin = 0;
};

/**
 * Local maxima of a linear spectrum in [f_lo, f_hi] that are the largest
 * value within +-min_separation/2 and lie no more than floor_db below the
 * band maximum. Ascending in frequency.
 */
std::vector<SpectralLine> spectral_lines(const Spectrum& s, double f_lo, double f_hi,
                                         double floor_db, double min_separation);

/**
 * Line spacing of a comb-like linear spectrum: lag of the largest
 * autocorrelation of the spectral amplitude sqrt(S) over [f_lo, f_hi], searched
 * in [spacing_lo, spacing_hi] and refined by a parabola through the peak lag.
 */
double mode_spacing(const Spectrum& s, double f_lo, double f_hi, double spacing_lo,
                    double spacing_hi);

struct CombFit {
    double spacing = 0.0;     // Hz
    double offset = 0.0;      // Hz, frequency of mode index 0
    double rms_residual = 0.0;
    std::vector<long> index;  // mode index of each line
};

/**
 * Least-squares fit f = offset + index * spacing to line frequencies, with
 * integer mode indices assigned from spacing_guess relative to the first
 * line. Needs two lines with distinct indices.
 */
CombFit comb_fit(const std::vector<SpectralLine>& lines, double spacing_guess);

} // namespace mdl

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
#include <string>
#include <vector>

namespace mdl {

/** Uniformly sampled time series of one probed quantity. */
struct TraceRecord {
    std::string probe;
    std::string quantity;     // e_field, power, population, ...
    std::string units;
    double dt = 0.0;          // sample interval, s
    double t0 = 0.0;          // time of the first sample, s
    std::uint32_t decimation = 1;
    std::vector<double> samples;

    double duration() const { return dt * static_cast<double>(samples.size()); }
    double time(std::size_t k) const { return t0 + dt * static_cast<double>(k); }
    /** Throws DomainError unless dt > 0 and there are at least two samples. */
    void validate() const;
};

/**
 * Builds a trace from explicit sample times; throws DomainError if the
 * spacing is not uniform to 1e-9 relative.
 */
TraceRecord trace_from_samples(const std::vector<double>& times,
                               const std::vector<double>& values, std::string quantity,
                               std::string probe = "");

} // namespace mdl

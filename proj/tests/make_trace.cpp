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

// Writes synthetic traces for the CLI tests.
//   make_trace tone  <out>   power 2 mW with m = 1e-4 at 100 MHz, T = 10 us
//   make_trace chirp <out>   field, 1 GHz + 2e17 Hz/s * t, T = 100 ns

#include <cmath>
#include <cstdio>
#include <string>

#include "mdl/constants.hpp"
#include "mdl/trace_io.hpp"

int main(int argc, char** argv)
{
    if (argc != 3) {
        std::fprintf(stderr, "usage: make_trace tone|chirp <out>\n");
        return 2;
    }
    const std::string kind = argv[1];
    mdl::TraceRecord t;
    t.probe = kind;
    if (kind == "tone") {
        t.quantity = "facet_power";
        t.units = "W/m^2";
        t.dt = 1e-10;
        for (int k = 0; k < 100000; ++k)
            t.samples.push_back(2e-3 * (1.0 + 1e-4 * std::cos(2.0 * mdl::kPi * 1e8 * k * t.dt)));
    } else if (kind == "chirp") {
        t.quantity = "e_field";
        t.units = "V/m";
        t.dt = 1e-11;
        for (int k = 0; k < 10000; ++k) {
            const double s = k * t.dt;
            t.samples.push_back(std::cos(2.0 * mdl::kPi * (1e9 * s + 1e17 * s * s)));
        }
    } else {
        std::fprintf(stderr, "make_trace: unknown kind '%s'\n", kind.c_str());
        return 2;
    }
    mdl::write_trace(argv[2], t);
    return 0;
}

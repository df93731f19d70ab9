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

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "mdl/errors.hpp"
#include "mdl/trace_io.hpp"

namespace fs = std::filesystem;
using namespace mdl;

namespace {

fs::path temp_path(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / "mdl_trace_tests";
    fs::create_directories(dir);
    return dir / name;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

TraceRecord sample_trace()
{
    TraceRecord t;
    t.probe = "facet_right";
    t.quantity = "facet_power";
    t.units = "W/m^2";
    t.dt = 3.3356409519815204e-14;
    t.t0 = 1.0e-15;
    t.decimation = 7;
    for (int k = 0; k < 1000; ++k)
        t.samples.push_back(std::sin(0.1 * k) * 1e-3 + 1e-300 * k);
    t.samples.push_back(-0.0);
    t.samples.push_back(std::numeric_limits<double>::denorm_min());
    return t;
}

} // namespace

TEST_CASE("trace binary round trip is bit exact")
{
    const TraceRecord t = sample_trace();
    const fs::path p = temp_path("roundtrip.mdltrace");
    write_trace(p.string(), t);
    const TraceRecord r = read_trace(p.string());
    CHECK(r.probe == t.probe);
    CHECK(r.quantity == t.quantity);
    CHECK(r.units == t.units);
    CHECK(r.dt == t.dt);
    CHECK(r.t0 == t.t0);
    CHECK(r.decimation == t.decimation);
    REQUIRE(r.samples.size() == t.samples.size());
    for (std::size_t k = 0; k < t.samples.size(); ++k)
        CHECK(std::signbit(r.samples[k]) == std::signbit(t.samples[k]));
    CHECK(std::memcmp(r.samples.data(), t.samples.data(), t.samples.size() * 8) == 0);
}

TEST_CASE("trace parse errors carry byte offsets")
{
    const TraceRecord t = sample_trace();
    const fs::path p = temp_path("errors.mdltrace");
    write_trace(p.string(), t);
    const std::string good = slurp(p);

    SUBCASE("bad magic")
    {
        std::string b = good;
        b[0] = 'X';
        try {
            parse_trace(b);
            FAIL("no throw");
        } catch (const TraceFormatError& e) {
            CHECK(e.offset() == 0);
        }
    }
    SUBCASE("truncated payload")
    {
        const std::string b = good.substr(0, good.size() - 5);
        try {
            parse_trace(b);
            FAIL("no throw");
        } catch (const TraceFormatError& e) {
            CHECK(e.offset() > 0);
            CHECK(e.offset() <= b.size());
            CHECK(std::string(e.what()).find("at byte") != std::string::npos);
        }
    }
    SUBCASE("unknown dtype")
    {
        std::string b = good;
        const auto pos = b.find("f64le");
        REQUIRE(pos != std::string::npos);
        b.replace(pos, 5, "f32be");
        try {
            parse_trace(b);
            FAIL("no throw");
        } catch (const TraceFormatError& e) {
            CHECK(e.offset() >= pos - 6);
            CHECK(e.offset() <= pos + 5);
        }
    }
    SUBCASE("empty input") { CHECK_THROWS_AS(parse_trace(""), TraceFormatError); }
    SUBCASE("missing file") { CHECK_THROWS_AS(read_trace(temp_path("nope").string()), ConfigError); }
}

TEST_CASE("text export has header and two columns")
{
    TraceRecord t = sample_trace();
    t.samples.resize(10);
    const fs::path p = temp_path("trace.txt");
    write_trace_text(p.string(), t);
    std::ifstream in(p);
    std::string line;
    int comments = 0, rows = 0;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        if (line[0] == '#') {
            ++comments;
            continue;
        }
        std::istringstream s(line);
        double time = 0, v = 0;
        s >> time >> v;
        CHECK(!s.fail());
        CHECK(time == doctest::Approx(t.time(rows)).epsilon(1e-15));
        CHECK(v == t.samples[rows]);
        ++rows;
    }
    CHECK(comments >= 3);
    CHECK(rows == 10);
}

TEST_CASE("async writer with a small bound keeps every sample in order")
{
    TraceRecord meta = sample_trace();
    meta.samples.clear();
    const fs::path pa = temp_path("async_a.mdltrace");
    const fs::path pb = temp_path("async_b.mdltrace");
    std::vector<double> all_a, all_b;
    {
        TraceWriter w(2);
        const int a = w.open(pa.string(), meta);
        meta.probe = "other";
        const int b = w.open(pb.string(), meta);
        for (int c = 0; c < 200; ++c) {
            std::vector<double> ca(37), cb(5);
            for (std::size_t k = 0; k < ca.size(); ++k)
                ca[k] = c * 1000.0 + static_cast<double>(k);
            for (std::size_t k = 0; k < cb.size(); ++k)
                cb[k] = -c - 0.5 * static_cast<double>(k);
            all_a.insert(all_a.end(), ca.begin(), ca.end());
            all_b.insert(all_b.end(), cb.begin(), cb.end());
            w.append(a, std::move(ca));
            w.append(b, std::move(cb));
        }
        w.close();
    }
    const TraceRecord ra = read_trace(pa.string());
    const TraceRecord rb = read_trace(pb.string());
    CHECK(ra.samples == all_a);
    CHECK(rb.samples == all_b);
    CHECK(rb.probe == "other");
    CHECK(ra.dt == meta.dt);
}

TEST_CASE("writer closed without samples yields an empty readable trace")
{
    TraceRecord meta = sample_trace();
    meta.samples.clear();
    const fs::path p = temp_path("empty.mdltrace");
    {
        TraceWriter w;
        w.open(p.string(), meta);
    }
    const TraceRecord r = read_trace(p.string());
    CHECK(r.samples.empty());
}

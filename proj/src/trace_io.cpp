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

#include "mdl/trace_io.hpp"

#include <bit>
#include <cinttypes>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "mdl/errors.hpp"

namespace mdl {

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

void to_le(double* p, std::size_t n)
{
    if constexpr (std::endian::native == std::endian::big) {
        for (std::size_t k = 0; k < n; ++k) {
            std::uint64_t u;
            std::memcpy(&u, p + k, 8);
            u = __builtin_bswap64(u);
            std::memcpy(p + k, &u, 8);
        }
    }
}

std::string header_text(const TraceRecord& t, std::uint64_t count)
{
    char buf[64];
    std::ostringstream os;
    os << "MDLTRACE " << kTraceSchemaVersion << "\n";
    os << "probe " << t.probe << "\n";
    os << "quantity " << t.quantity << "\n";
    os << "units " << t.units << "\n";
    std::snprintf(buf, sizeof buf, "%.17g", t.dt);
    os << "dt " << buf << "\n";
    std::snprintf(buf, sizeof buf, "%.17g", t.t0);
    os << "t0 " << buf << "\n";
    os << "decimation " << t.decimation << "\n";
    std::snprintf(buf, sizeof buf, "%020" PRIu64, count);
    os << "count " << buf << "\n";
    os << "dtype f64le\n";
    os << "end\n";
    return os.str();
}

void check_name(const std::string& s, const char* what)
{
    if (s.find('\n') != std::string::npos)
        throw ConfigError(std::string("trace ") + what + " must not contain newlines");
}

} // namespace

void write_trace(const std::string& path, const TraceRecord& trace)
{
    check_name(trace.probe, "probe");
    check_name(trace.units, "units");
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw ConfigError("cannot write trace file '" + path + "'");
    const std::string h = header_text(trace, trace.samples.size());
    f.write(h.data(), static_cast<std::streamsize>(h.size()));
    std::vector<double> data(trace.samples);
    to_le(data.data(), data.size());
    f.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size() * sizeof(double)));
    if (!f)
        throw ConfigError("short write to trace file '" + path + "'");
}

TraceRecord parse_trace(const std::string& bytes)
{
    TraceRecord t;
    std::size_t pos = 0;
    bool have[6] = {false, false, false, false, false, false};   // dt t0 count dtype quantity probe
    std::uint64_t count = 0;
    int line_no = 0;
    for (;;) {
        const std::size_t eol = bytes.find('\n', pos);
        if (eol == std::string::npos)
            throw TraceFormatError("trace header: missing 'end' line", pos);
        const std::string line = bytes.substr(pos, eol - pos);
        const std::size_t sp = line.find(' ');
        const std::string key = line.substr(0, sp);
        const std::string val = sp == std::string::npos ? "" : line.substr(sp + 1);
        auto number = [&](double& out) {
            try {
                std::size_t used = 0;
                out = std::stod(val, &used);
                if (used != val.size())
                    throw std::invalid_argument(val);
            } catch (const std::exception&) {
                throw TraceFormatError("trace header: bad number for '" + key + "'", pos + sp + 1);
            }
        };
        if (line_no == 0) {
            if (key != "MDLTRACE")
                throw TraceFormatError("not a trace file (missing MDLTRACE magic)", pos);
            if (val != std::to_string(kTraceSchemaVersion))
                throw TraceFormatError("unsupported trace schema version '" + val + "'", pos + sp + 1);
        } else if (key == "end") {
            pos = eol + 1;
            break;
        } else if (key == "probe") {
            t.probe = val;
            have[5] = true;
        } else if (key == "quantity") {
            t.quantity = val;
            have[4] = true;
        } else if (key == "units") {
            t.units = val;
        } else if (key == "dt") {
            number(t.dt);
            have[0] = true;
        } else if (key == "t0") {
            number(t.t0);
            have[1] = true;
        } else if (key == "decimation") {
            double d = 0;
            number(d);
            t.decimation = static_cast<std::uint32_t>(d);
        } else if (key == "count") {
            double c = 0;
            number(c);
            count = static_cast<std::uint64_t>(c);
            have[2] = true;
        } else if (key == "dtype") {
            if (val != "f64le")
                throw TraceFormatError("unsupported dtype '" + val + "'", pos + sp + 1);
            have[3] = true;
        } else {
            throw TraceFormatError("unknown trace header key '" + key + "'", pos);
        }
        pos = eol + 1;
        ++line_no;
    }
    const char* names[6] = {"dt", "t0", "count", "dtype", "quantity", "probe"};
    for (int k = 0; k < 6; ++k)
        if (!have[k])
            throw TraceFormatError(std::string("trace header: missing '") + names[k] + "'", pos);
    const std::size_t need = count * sizeof(double);
    if (bytes.size() - pos != need)
        throw TraceFormatError("trace payload: expected " + std::to_string(need) + " bytes, found " +
                                   std::to_string(bytes.size() - pos),
                               bytes.size() < pos + need ? bytes.size() : pos + need);
    t.samples.resize(count);
    std::memcpy(t.samples.data(), bytes.data() + pos, need);
    to_le(t.samples.data(), t.samples.size());
    return t;
}

TraceRecord read_trace(const std::string& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw ConfigError("cannot open trace file '" + path + "'");
    const std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return parse_trace(bytes);
}

void write_trace_text(const std::string& path, const TraceRecord& trace)
{
    std::ofstream f(path);
    if (!f)
        throw ConfigError("cannot write '" + path + "'");
    std::istringstream h(header_text(trace, trace.samples.size()));
    for (std::string line; std::getline(h, line);)
        f << "# " << line << "\n";
    f << "# time_s value\n";
    char buf[64];
    for (std::size_t k = 0; k < trace.samples.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g\n", trace.time(k), trace.samples[k]);
        f << buf;
    }
}

TraceWriter::TraceWriter(std::size_t max_queued_chunks)
    : bound_(max_queued_chunks ? max_queued_chunks : 1), thread_([this] { worker(); })
{
}

TraceWriter::~TraceWriter()
{
    try {
        close();
    } catch (...) {
    }
}

int TraceWriter::open(const std::string& path, const TraceRecord& meta)
{
    check_name(meta.probe, "probe");
    check_name(meta.units, "units");
    std::FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp)
        throw ConfigError("cannot write trace file '" + path + "'");
    const std::string h = header_text(meta, 0);
    std::fwrite(h.data(), 1, h.size(), fp);
    File f;
    f.fp = fp;
    f.count_pos = static_cast<long>(h.find("count ") + 6);
    std::lock_guard<std::mutex> lock(mu_);
    files_.push_back(f);
    return static_cast<int>(files_.size()) - 1;
}

void TraceWriter::append(int id, std::vector<double> chunk)
{
    std::unique_lock<std::mutex> lock(mu_);
    not_full_.wait(lock, [&] { return queue_.size() < bound_ || error_; });
    if (error_)
        std::rethrow_exception(error_);
    queue_.push_back({id, std::move(chunk), {}, {}});
    not_empty_.notify_one();
}

void TraceWriter::write_file(std::string path, std::string content)
{
    std::unique_lock<std::mutex> lock(mu_);
    not_full_.wait(lock, [&] { return queue_.size() < bound_ || error_; });
    if (error_)
        std::rethrow_exception(error_);
    queue_.push_back({-1, {}, std::move(path), std::move(content)});
    not_empty_.notify_one();
}

void TraceWriter::worker()
{
    for (;;) {
        Job job;
        File* f = nullptr;
        {
            std::unique_lock<std::mutex> lock(mu_);
            not_empty_.wait(lock, [&] { return !queue_.empty() || stop_; });
            if (queue_.empty())
                return;
            job = std::move(queue_.front());
            queue_.pop_front();
            if (job.id >= 0)
                f = &files_.at(static_cast<std::size_t>(job.id));
            not_full_.notify_one();
        }
        if (job.id < 0) {
            std::FILE* fp = std::fopen(job.path.c_str(), "wb");
            const bool ok = fp && std::fwrite(job.content.data(), 1, job.content.size(), fp) ==
                                      job.content.size();
            if (fp)
                std::fclose(fp);
            if (!ok) {
                std::lock_guard<std::mutex> lock(mu_);
                if (!error_)
                    error_ = std::make_exception_ptr(
                        ConfigError("trace writer: cannot write '" + job.path + "'"));
                not_full_.notify_all();
            }
            continue;
        }
        to_le(job.data.data(), job.data.size());
        const std::size_t w = std::fwrite(job.data.data(), sizeof(double), job.data.size(), f->fp);
        std::lock_guard<std::mutex> lock(mu_);
        f->count += w;
        if (w != job.data.size() && !error_) {
            error_ = std::make_exception_ptr(ConfigError("trace writer: short write"));
            not_full_.notify_all();
        }
    }
}

void TraceWriter::close()
{
    {
        std::lock_guard<std::mutex> lock(mu_);
        if (closed_)
            return;
        closed_ = true;
        stop_ = true;
    }
    not_empty_.notify_all();
    thread_.join();
    for (File& f : files_) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%020" PRIu64, f.count);
        std::fseek(f.fp, f.count_pos, SEEK_SET);
        std::fwrite(buf, 1, 20, f.fp);
        std::fclose(f.fp);
        f.fp = nullptr;
    }
    if (error_)
        std::rethrow_exception(error_);
}

} // namespace mdl

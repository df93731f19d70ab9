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

#include <condition_variable>
#include <cstdio>
#include <deque>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "mdl/trace.hpp"

namespace mdl {

/*
 * Trace file layout: a text header of "key value" lines
 *
 *   MDLTRACE 1
 *   probe facet_right
 *   quantity e_field
 *   units V/m
 *   dt 1.2345e-15
 *   t0 0
 *   decimation 4
 *   count 00000000000000012345
 *   dtype f64le
 *   end
 *
 * followed by count little-endian IEEE doubles.
 */
constexpr int kTraceSchemaVersion = 1;

void write_trace(const std::string& path, const TraceRecord& trace);
/** Throws TraceFormatError with the byte offset of the first problem. */
TraceRecord read_trace(const std::string& path);
TraceRecord parse_trace(const std::string& bytes);
/** Columns "time value" with the header as '#' comments. */
void write_trace_text(const std::string& path, const TraceRecord& trace);

/**
 * Appends trace samples on a worker thread. The queue is bounded: append
 * blocks when it is full, so nothing is dropped.
 */
class TraceWriter {
public:
    explicit TraceWriter(std::size_t max_queued_chunks = 64);
    ~TraceWriter();
    TraceWriter(const TraceWriter&) = delete;
    TraceWriter& operator=(const TraceWriter&) = delete;

    /** Creates the file with the metadata of meta (samples ignored). */
    int open(const std::string& path, const TraceRecord& meta);
    void append(int id, std::vector<double> chunk);
    /** Queues a whole-file write (snapshots); same ordering and bound as chunks. */
    void write_file(std::string path, std::string content);
    /** Drains the queue, patches sample counts and closes every file. */
    void close();

private:
    struct Job {
        int id;   // -1 for a whole-file job
        std::vector<double> data;
        std::string path, content;
    };
    struct File {
        std::FILE* fp = nullptr;
        std::uint64_t count = 0;
        long count_pos = 0;
    };
    void worker();

    std::size_t bound_;
    std::deque<File> files_;   // stable addresses while the worker writes
    std::deque<Job> queue_;
    std::mutex mu_;
    std::condition_variable not_empty_, not_full_;
    bool stop_ = false;
    bool closed_ = false;
    std::exception_ptr error_;
    std::thread thread_;
};

} // namespace mdl

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

#include "mdl/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

#include "mdl/errors.hpp"

namespace mdl {

int default_thread_count()
{
    const char* v = std::getenv("MDL_THREADS");
    if (!v || !*v)
        return 1;
    char* end = nullptr;
    const long n = std::strtol(v, &end, 10);
    if (*end != '\0' || n < 1 || n > 1024)
        throw ConfigError(std::string("MDL_THREADS must be an integer in [1, 1024], got '") + v + "'");
    return static_cast<int>(n);
}

WorkerPool::WorkerPool(int workers) : workers_(workers)
{
    if (workers_ < 1)
        throw DomainError("WorkerPool: need at least one worker");
    // worker 0 is the calling thread
    for (int id = 1; id < workers_; ++id)
        threads_.emplace_back([this, id] { loop(id); });
}

WorkerPool::~WorkerPool()
{
    {
        std::lock_guard<std::mutex> lk(mu_);
        stop_ = true;
    }
    start_cv_.notify_all();
    for (auto& t : threads_)
        t.join();
}

void WorkerPool::chunk(int count, int workers, int id, int& begin, int& end)
{
    const int base = count / workers, extra = count % workers;
    begin = id * base + std::min(id, extra);
    end = begin + base + (id < extra ? 1 : 0);
}

void WorkerPool::run(int count, const Task& task)
{
    if (workers_ == 1 || count < 2) {
        task(0, count, 0);
        return;
    }
    {
        std::lock_guard<std::mutex> lk(mu_);
        task_ = &task;
        count_ = count;
        pending_ = workers_ - 1;
        error_ = nullptr;
        ++generation_;
    }
    start_cv_.notify_all();

    std::exception_ptr mine;
    try {
        int b, e;
        chunk(count, workers_, 0, b, e);
        task(b, e, 0);
    } catch (...) {
        mine = std::current_exception();
    }

    std::unique_lock<std::mutex> lk(mu_);
    done_cv_.wait(lk, [&] { return pending_ == 0; });
    task_ = nullptr;
    if (mine)
        std::rethrow_exception(mine);
    if (error_)
        std::rethrow_exception(error_);
}

void WorkerPool::loop(int id)
{
    std::uint64_t seen = 0;
    for (;;) {
        const Task* task;
        int count;
        {
            std::unique_lock<std::mutex> lk(mu_);
            start_cv_.wait(lk, [&] { return stop_ || generation_ != seen; });
            if (stop_)
                return;
            seen = generation_;
            task = task_;
            count = count_;
        }
        std::exception_ptr err;
        try {
            int b, e;
            chunk(count, workers_, id, b, e);
            if (b < e)
                (*task)(b, e, id);
        } catch (...) {
            err = std::current_exception();
        }
        {
            std::lock_guard<std::mutex> lk(mu_);
            if (err && !error_)
                error_ = err;
            if (--pending_ == 0)
                done_cv_.notify_one();
        }
    }
}

} // namespace mdl

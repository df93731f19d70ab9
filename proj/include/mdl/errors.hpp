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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mdl {

// bad input values to a pure function
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// malformed or incomplete configuration (exit code 2)
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// malformed trace or data file; offset is the byte where parsing failed
class TraceFormatError : public ConfigError {
public:
    TraceFormatError(const std::string& what, std::size_t offset)
        : ConfigError(what + " (at byte " + std::to_string(offset) + ")"), offset_(offset)
    {
    }
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

// physicality or finiteness broken during a run (exit code 3)
class InvariantViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// an oracle check did not pass (exit code 4)
class VerificationFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum ExitCode : int {
    kExitOk = 0,
    kExitConfig = 2,
    kExitInvariant = 3,
    kExitVerification = 4,
};

} // namespace mdl

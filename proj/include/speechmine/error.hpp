// Copyright 2026-present the speechmine project
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace speechmine {

// Failure categories surfaced by the library. The CLI maps kIo to exit
// code 1 and everything else to exit code 2.
enum class ErrorKind {
    kFormat,      // malformed file structure or unparsable field
    kTruncation,  // declared payload size disagrees with file length
    kData,        // non-finite values, zero rows, unit-norm violations
    kValidation,  // invariant violations across records
    kConfig,      // bad parameters (k = 0, dimension mismatch, empty grid)
    kIo,          // filesystem failures
};

inline const char*
to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::kFormat:
            return "format";
        case ErrorKind::kTruncation:
            return "truncation";
        case ErrorKind::kData:
            return "data";
        case ErrorKind::kValidation:
            return "validation";
        case ErrorKind::kConfig:
            return "config";
        case ErrorKind::kIo:
            return "io";
    }
    return "unknown";
}

class Error : public std::runtime_error {
 public:
    Error(ErrorKind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {
    }

    ErrorKind
    kind() const noexcept {
        return kind_;
    }

 private:
    ErrorKind kind_;
};

struct FormatError : Error {
    explicit FormatError(const std::string& msg) : Error(ErrorKind::kFormat, msg) {
    }
};

struct TruncationError : Error {
    explicit TruncationError(const std::string& msg) : Error(ErrorKind::kTruncation, msg) {
    }
};

struct DataError : Error {
    explicit DataError(const std::string& msg) : Error(ErrorKind::kData, msg) {
    }
};

struct ValidationError : Error {
    explicit ValidationError(const std::string& msg) : Error(ErrorKind::kValidation, msg) {
    }
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error(ErrorKind::kConfig, msg) {
    }
};

struct IoError : Error {
    explicit IoError(const std::string& msg) : Error(ErrorKind::kIo, msg) {
    }
};

}  // namespace speechmine

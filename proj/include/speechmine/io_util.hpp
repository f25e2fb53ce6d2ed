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

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace speechmine {

// Reads a whole file as bytes. Throws IoError if the file cannot be read.
std::string
read_file(const std::filesystem::path& path);

// Writes contents to `path` via a temp file in the same directory followed
// by a rename, so readers never observe a torn file. Throws IoError.
void
atomic_write_file(const std::filesystem::path& path, std::string_view contents);

// Splits one line on tab characters. Keeps empty fields.
std::vector<std::string_view>
split_tsv_line(std::string_view line);

// Strict integer parse of a whole field. Throws FormatError mentioning
// `context` (typically "line N") on any non-numeric content.
std::int64_t
parse_int_field(std::string_view field, const std::string& context);

// Strict floating-point parse of a whole field. Throws FormatError.
double
parse_double_field(std::string_view field, const std::string& context);

// Fixed-point formatting with exactly `places` decimals, used for every
// score printed to a TSV. Negative zero is normalized to "0.000000".
std::string
format_fixed(double value, int places = 6);

}  // namespace speechmine

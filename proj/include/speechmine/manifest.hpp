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
#include <unordered_map>
#include <vector>

namespace speechmine {

class EmbeddingMatrix;

struct Segment {
    std::string segment_id;
    std::string recording_id;
    std::string lang;  // ISO-639-1 code
    std::int64_t start_ms = 0;
    std::int64_t end_ms = 0;

    std::int64_t
    duration_ms() const noexcept {
        return end_ms - start_ms;
    }
};

// Ordered segment metadata; entry i describes embedding row i of the matrix
// it is paired with.
class SegmentManifest {
 public:
    SegmentManifest() = default;

    // Validates per-segment invariants and segment_id uniqueness.
    explicit SegmentManifest(std::vector<Segment> entries);

    std::size_t
    size() const noexcept {
        return entries_.size();
    }

    const Segment&
    operator[](std::size_t i) const noexcept {
        return entries_[i];
    }

    const std::vector<Segment>&
    entries() const noexcept {
        return entries_;
    }

    // Index of a segment id; throws ValidationError if absent.
    std::size_t
    index_of(std::string_view segment_id) const;

    auto
    begin() const noexcept {
        return entries_.begin();
    }

    auto
    end() const noexcept {
        return entries_.end();
    }

 private:
    std::vector<Segment> entries_;
    std::unordered_map<std::string, std::size_t> by_id_;
};

// Manifest TSV: UTF-8, LF endings, header line
// `segment_id\trecording_id\tlang\tstart_ms\tend_ms`, one row per segment.
SegmentManifest
load_manifest(const std::filesystem::path& path);

void
save_manifest(const std::filesystem::path& path, const SegmentManifest& manifest);

std::string
encode_manifest(const SegmentManifest& manifest);

SegmentManifest
decode_manifest(std::string_view text, const std::string& source_name);

// Binding a manifest of n entries to a matrix of m rows fails iff n != m.
void
validate_pairing(const SegmentManifest& manifest, const EmbeddingMatrix& matrix);

}  // namespace speechmine

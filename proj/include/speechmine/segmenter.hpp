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
#include <span>
#include <string>
#include <vector>

#include "speechmine/manifest.hpp"

namespace speechmine {

struct VadInterval {
    std::int64_t start_ms = 0;
    std::int64_t end_ms = 0;
};

// Ordered, non-overlapping speech intervals of one recording.
struct VadTimeline {
    std::string recording_id;
    std::vector<VadInterval> intervals;
};

// Span-duration window for candidate segments, 1 s to 20 s by default.
struct DurationBounds {
    std::int64_t min_ms = 1000;
    std::int64_t max_ms = 20000;
};

// A contiguous run of VAD intervals [first_interval .. last_interval]; the
// span covers interior silences.
struct CandidateSegment {
    std::string recording_id;
    std::size_t first_interval = 0;
    std::size_t last_interval = 0;
    std::int64_t start_ms = 0;
    std::int64_t end_ms = 0;
};

// Throws ValidationError if intervals are empty spans, unordered, or
// overlapping (end_ms[i] <= start_ms[i+1] must hold).
void
validate_timeline(const VadTimeline& timeline);

// Over-segmentation: every contiguous interval run whose span duration lies
// in [min_ms, max_ms], ordered by (first_interval, last_interval). The
// miner, not a sentence splitter, later decides which candidates match.
std::vector<CandidateSegment>
generate_candidates(const VadTimeline& timeline, const DurationBounds& bounds);

// Timeline TSV: header `recording_id\tstart_ms\tend_ms`, rows grouped by
// recording and sorted by start within each group.
std::vector<VadTimeline>
load_timelines(const std::filesystem::path& path);

std::vector<VadTimeline>
decode_timelines(std::string_view text, const std::string& source_name);

// Candidates rendered as a manifest with segment ids
// `<recording_id>:<first>:<last>` and the given language code.
SegmentManifest
candidates_to_manifest(std::span<const CandidateSegment> candidates, std::string_view lang);

}  // namespace speechmine

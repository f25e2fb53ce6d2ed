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

#include "speechmine/segmenter.hpp"

#include <unordered_set>

#include "speechmine/error.hpp"
#include "speechmine/io_util.hpp"

namespace speechmine {

namespace {

constexpr std::string_view kTimelineHeader = "recording_id\tstart_ms\tend_ms";

void
validate_bounds(const DurationBounds& bounds) {
    if (bounds.min_ms <= 0 || bounds.min_ms >= bounds.max_ms) {
        throw ConfigError("duration bounds need 0 < min_ms < max_ms, got [" + std::to_string(bounds.min_ms) +
                          ", " + std::to_string(bounds.max_ms) + "]");
    }
}

}  // namespace

void
validate_timeline(const VadTimeline& timeline) {
    if (timeline.recording_id.empty()) {
        throw ValidationError("timeline has empty recording_id");
    }
    for (std::size_t i = 0; i < timeline.intervals.size(); ++i) {
        const auto& iv = timeline.intervals[i];
        if (iv.end_ms <= iv.start_ms) {
            throw ValidationError("recording \"" + timeline.recording_id + "\": interval " + std::to_string(i) +
                                  " is empty (" + std::to_string(iv.start_ms) + ", " + std::to_string(iv.end_ms) +
                                  ")");
        }
        if (i > 0 && timeline.intervals[i - 1].end_ms > iv.start_ms) {
            throw ValidationError("recording \"" + timeline.recording_id + "\": interval " + std::to_string(i) +
                                  " overlaps or precedes interval " + std::to_string(i - 1));
        }
    }
}

std::vector<CandidateSegment>
generate_candidates(const VadTimeline& timeline, const DurationBounds& bounds) {
    validate_timeline(timeline);
    validate_bounds(bounds);
    std::vector<CandidateSegment> out;
    const auto& ivs = timeline.intervals;
    for (std::size_t first = 0; first < ivs.size(); ++first) {
        for (std::size_t last = first; last < ivs.size(); ++last) {
            const std::int64_t span = ivs[last].end_ms - ivs[first].start_ms;
            if (span > bounds.max_ms) {
                break;  // span grows with last, nothing longer can fit
            }
            if (span >= bounds.min_ms) {
                out.push_back({timeline.recording_id, first, last, ivs[first].start_ms, ivs[last].end_ms});
            }
        }
    }
    return out;
}

std::vector<VadTimeline>
decode_timelines(std::string_view text, const std::string& source_name) {
    std::vector<VadTimeline> timelines;
    std::unordered_set<std::string> closed_groups;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        std::string_view line = eol == std::string_view::npos ? text.substr(pos) : text.substr(pos, eol - pos);
        ++line_no;
        if (line_no == 1) {
            if (line != kTimelineHeader) {
                throw FormatError(source_name +
                                  ": bad header line, expected \"recording_id<TAB>start_ms<TAB>end_ms\"");
            }
        } else if (line.empty()) {
            if (eol != std::string_view::npos) {
                throw FormatError(source_name + ": empty line " + std::to_string(line_no));
            }
        } else {
            const std::string context = source_name + ": line " + std::to_string(line_no);
            const auto fields = split_tsv_line(line);
            if (fields.size() != 3) {
                throw FormatError(context + ": expected 3 tab-separated fields, got " +
                                  std::to_string(fields.size()));
            }
            std::string rec(fields[0]);
            const std::int64_t start = parse_int_field(fields[1], context);
            const std::int64_t end = parse_int_field(fields[2], context);
            if (timelines.empty() || timelines.back().recording_id != rec) {
                if (closed_groups.contains(rec)) {
                    throw ValidationError(context + ": recording \"" + rec +
                                          "\" reappears after its group ended; rows must be grouped");
                }
                if (!timelines.empty()) {
                    closed_groups.insert(timelines.back().recording_id);
                }
                timelines.push_back({std::move(rec), {}});
            }
            timelines.back().intervals.push_back({start, end});
        }
        if (eol == std::string_view::npos) {
            break;
        }
        pos = eol + 1;
    }
    for (const auto& t : timelines) {
        validate_timeline(t);
    }
    return timelines;
}

std::vector<VadTimeline>
load_timelines(const std::filesystem::path& path) {
    return decode_timelines(read_file(path), path.string());
}

SegmentManifest
candidates_to_manifest(std::span<const CandidateSegment> candidates, std::string_view lang) {
    std::vector<Segment> entries;
    entries.reserve(candidates.size());
    for (const auto& c : candidates) {
        Segment s;
        s.segment_id =
            c.recording_id + ":" + std::to_string(c.first_interval) + ":" + std::to_string(c.last_interval);
        s.recording_id = c.recording_id;
        s.lang = std::string(lang);
        s.start_ms = c.start_ms;
        s.end_ms = c.end_ms;
        entries.push_back(std::move(s));
    }
    return SegmentManifest(std::move(entries));
}

}  // namespace speechmine

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

#include "speechmine/postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "speechmine/error.hpp"

namespace speechmine {

namespace {

void
validate_indices(const AlignmentSet& set, const SegmentManifest& src_manifest) {
    for (const Alignment& a : set.alignments) {
        if (a.src_index >= src_manifest.size()) {
            throw ValidationError("alignment src_index " + std::to_string(a.src_index) +
                                  " does not resolve in a manifest of " + std::to_string(src_manifest.size()));
        }
    }
}

// more than `fraction` of BOTH spans' durations
bool
mutually_overlapping(const Segment& a, const Segment& b, double fraction) noexcept {
    const std::int64_t inter =
        std::min(a.end_ms, b.end_ms) - std::max(a.start_ms, b.start_ms);
    if (inter <= 0) {
        return false;
    }
    const auto x = static_cast<double>(inter);
    return x > fraction * static_cast<double>(a.duration_ms()) &&
           x > fraction * static_cast<double>(b.duration_ms());
}

}  // namespace

AlignmentSet
remove_overlaps(const AlignmentSet& set, const SegmentManifest& src_manifest, const OverlapPolicy& policy) {
    if (!(policy.mutual_fraction > 0.0) || policy.mutual_fraction > 1.0) {
        throw ConfigError("mutual_fraction must be in (0, 1], got " + std::to_string(policy.mutual_fraction));
    }
    validate_indices(set, src_manifest);

    // greedy order is fully determined by score and the pair tie rule, so
    // the result does not depend on input order
    std::vector<Alignment> sorted = set.alignments;
    std::sort(sorted.begin(), sorted.end(), alignment_order_less);

    // the rule only relates segments of the same recording, so recordings
    // are independent greedy problems
    std::unordered_map<std::string_view, std::size_t> group_of;
    std::vector<std::vector<std::size_t>> groups;  // positions into sorted
    for (std::size_t pos = 0; pos < sorted.size(); ++pos) {
        const Segment& seg = src_manifest[sorted[pos].src_index];
        const auto [it, inserted] = group_of.emplace(std::string_view(seg.recording_id), groups.size());
        if (inserted) {
            groups.emplace_back();
        }
        groups[it->second].push_back(pos);
    }

    std::vector<char> keep(sorted.size(), 0);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (std::ptrdiff_t g = 0; g < static_cast<std::ptrdiff_t>(groups.size()); ++g) {
        std::vector<const Segment*> kept;
        for (const std::size_t pos : groups[g]) {
            const Segment& seg = src_manifest[sorted[pos].src_index];
            bool discard = false;
            for (const Segment* other : kept) {
                if (mutually_overlapping(seg, *other, policy.mutual_fraction)) {
                    discard = true;
                    break;
                }
            }
            if (!discard) {
                kept.push_back(&seg);
                keep[pos] = 1;
            }
        }
    }

    AlignmentSet out;
    for (std::size_t pos = 0; pos < sorted.size(); ++pos) {
        if (keep[pos]) {
            out.alignments.push_back(sorted[pos]);
        }
    }
    return out;
}

AlignmentSet
exclude_sessions(const AlignmentSet& set, const SegmentManifest& src_manifest,
                 std::span<const std::string> sessions) {
    validate_indices(set, src_manifest);
    const std::unordered_set<std::string_view> excluded(sessions.begin(), sessions.end());
    AlignmentSet out;
    for (const Alignment& a : set.alignments) {
        if (!excluded.contains(std::string_view(src_manifest[a.src_index].recording_id))) {
            out.alignments.push_back(a);
        }
    }
    return out;
}

double
duration_stats(const AlignmentSet& set, const SegmentManifest& src_manifest) {
    validate_indices(set, src_manifest);
    std::int64_t total_ms = 0;
    for (const Alignment& a : set.alignments) {
        total_ms += src_manifest[a.src_index].duration_ms();
    }
    return static_cast<double>(total_ms) / 3'600'000.0;
}

ThresholdChoice
select_threshold(const AlignmentSet& set, const SegmentManifest& src_manifest, double target_hours,
                 std::span<const double> grid) {
    if (grid.empty()) {
        throw ConfigError("threshold grid is empty");
    }
    if (!std::is_sorted(grid.begin(), grid.end())) {
        throw ConfigError("threshold grid must be sorted ascending");
    }
    validate_indices(set, src_manifest);

    auto hours_at = [&](double t) {
        std::int64_t ms = 0;
        for (const Alignment& a : set.alignments) {
            if (a.score >= t) {
                ms += src_manifest[a.src_index].duration_ms();
            }
        }
        return static_cast<double>(ms) / 3'600'000.0;
    };

    for (std::size_t i = grid.size(); i-- > 0;) {
        const double hours = hours_at(grid[i]);
        if (hours >= target_hours) {
            return {grid[i], hours, false};
        }
    }
    return {grid.front(), hours_at(grid.front()), true};
}

EvalSelection
curate_eval_set(std::vector<SessionScore> sessions, std::size_t target_size) {
    if (target_size == 0) {
        throw ConfigError("target_size must be at least 1");
    }
    EvalSelection selection;
    if (sessions.empty()) {
        selection.shortfall = true;
        return selection;
    }
    for (const SessionScore& s : sessions) {
        if (s.sample_count() == 0) {
            throw ValidationError("session \"" + s.session_id + "\" has no samples");
        }
    }
    std::sort(sessions.begin(), sessions.end(), [](const SessionScore& a, const SessionScore& b) {
        if (a.mean_score != b.mean_score) {
            return a.mean_score > b.mean_score;
        }
        return a.session_id < b.session_id;
    });
    std::size_t total = 0;
    for (const SessionScore& s : sessions) {
        if (total >= target_size) {
            break;
        }
        selection.sample_ids.insert(selection.sample_ids.end(), s.sample_ids.begin(), s.sample_ids.end());
        total += s.sample_count();
    }
    selection.shortfall = total < target_size;
    return selection;
}

std::vector<SessionScore>
sessions_from_alignments(const AlignmentSet& set, const SegmentManifest& src_manifest) {
    validate_indices(set, src_manifest);
    std::vector<SessionScore> sessions;
    std::unordered_map<std::string_view, std::size_t> by_id;
    std::vector<double> score_sums;
    for (std::size_t i = 0; i < set.alignments.size(); ++i) {
        const Alignment& a = set.alignments[i];
        const std::string& rec = src_manifest[a.src_index].recording_id;
        auto [it, inserted] = by_id.emplace(std::string_view(rec), sessions.size());
        if (inserted) {
            sessions.push_back({rec, 0.0, {}});
            score_sums.push_back(0.0);
        }
        sessions[it->second].sample_ids.push_back(std::to_string(i));
        score_sums[it->second] += a.score;
    }
    for (std::size_t s = 0; s < sessions.size(); ++s) {
        sessions[s].mean_score = score_sums[s] / static_cast<double>(sessions[s].sample_count());
    }
    return sessions;
}

}  // namespace speechmine

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

#include <array>
#include <span>
#include <string>
#include <vector>

#include "speechmine/manifest.hpp"
#include "speechmine/miner.hpp"

namespace speechmine {

// Mutual overlap rule for mined source spans: an alignment is discarded
// only when its source segment overlaps a higher-scored kept segment in the
// same recording by more than this fraction of BOTH segments' durations.
struct OverlapPolicy {
    double mutual_fraction = 0.20;
};

// Greedy by score descending (ties by pair order); output keeps the sorted
// order. The result is independent of input order. Recordings are
// independent and processed in parallel.
AlignmentSet
remove_overlaps(const AlignmentSet& set, const SegmentManifest& src_manifest, const OverlapPolicy& policy);

// Leakage guard for evaluation sets: drops every alignment whose source
// segment belongs to one of the named sessions (recording ids).
AlignmentSet
exclude_sessions(const AlignmentSet& set, const SegmentManifest& src_manifest,
                 std::span<const std::string> sessions);

// Total source speech of a mined set, in hours. Milliseconds accumulate
// exactly in integers before the single conversion.
double
duration_stats(const AlignmentSet& set, const SegmentManifest& src_manifest);

// Range analyzed for threshold ablations.
inline constexpr std::array<double, 4> kDefaultThresholdGrid = {1.06, 1.07, 1.08, 1.09};

struct ThresholdChoice {
    double threshold = 0.0;
    double retained_hours = 0.0;
    bool shortfall = false;  // no grid point kept target_hours
};

// The largest grid threshold t with duration_stats({score >= t}) at or
// above target_hours; if none qualifies, the grid minimum with the
// shortfall flag set.
ThresholdChoice
select_threshold(const AlignmentSet& set, const SegmentManifest& src_manifest, double target_hours,
                 std::span<const double> grid);

// One session (recording event) with the ids of its samples and the mean
// mining score used to rank sessions for evaluation-set curation.
struct SessionScore {
    std::string session_id;
    double mean_score = 0.0;
    std::vector<std::string> sample_ids;

    std::size_t
    sample_count() const noexcept {
        return sample_ids.size();
    }
};

struct EvalSelection {
    std::vector<std::string> sample_ids;
    bool shortfall = false;  // fewer samples than target_size exist
};

// Whole sessions in decreasing mean-score order (ties by session_id) until
// the cumulative sample count reaches target_size; the boundary session is
// included in full.
EvalSelection
curate_eval_set(std::vector<SessionScore> sessions, std::size_t target_size);

// Groups alignments by source recording_id (the session key) in input
// order; sample ids are the decimal ordinals of the alignments within
// `set`. Mean scores are per-session averages.
std::vector<SessionScore>
sessions_from_alignments(const AlignmentSet& set, const SegmentManifest& src_manifest);

}  // namespace speechmine

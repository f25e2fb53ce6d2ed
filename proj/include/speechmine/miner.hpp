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
#include <vector>

#include "speechmine/manifest.hpp"
#include "speechmine/margin.hpp"
#include "speechmine/matrix.hpp"

namespace speechmine {

struct MiningConfig {
    MarginParams params{16};
    double threshold = 1.06;  // default margin cutoff
    KnnOptions knn;
};

struct Alignment {
    std::uint32_t src_index = 0;
    std::uint32_t tgt_index = 0;
    double score = 0.0;

    bool
    operator==(const Alignment&) const = default;
};

// Contract ordering of mined output: score descending, ties by
// (src_index, tgt_index) ascending. Byte-stable artifacts depend on it.
inline bool
alignment_order_less(const Alignment& a, const Alignment& b) noexcept {
    if (a.score != b.score) {
        return a.score > b.score;
    }
    if (a.src_index != b.src_index) {
        return a.src_index < b.src_index;
    }
    return a.tgt_index < b.tgt_index;
}

// Mined pairs in contract order; no duplicate (src_index, tgt_index), every
// score at or above the threshold that produced the set.
struct AlignmentSet {
    std::vector<Alignment> alignments;

    std::size_t
    size() const noexcept {
        return alignments.size();
    }
};

// Global bidirectional mining: each source row's best target by margin,
// each target row's best source, union deduplicated keeping the maximum
// score per pair, thresholded, sorted in contract order.
AlignmentSet
mine(const UnitEmbeddingMatrix& src, const UnitEmbeddingMatrix& tgt, const MiningConfig& cfg = {});

// Alignment TSV: header `score\tsrc_segment_id\ttgt_segment_id`, score with
// exactly 6 decimal places, rows in contract order.
std::string
encode_alignments(const AlignmentSet& set, const SegmentManifest& src_manifest,
                  const SegmentManifest& tgt_manifest);

void
save_alignments(const std::filesystem::path& path, const AlignmentSet& set, const SegmentManifest& src_manifest,
                const SegmentManifest& tgt_manifest);

AlignmentSet
decode_alignments(std::string_view text, const SegmentManifest& src_manifest, const SegmentManifest& tgt_manifest,
                  const std::string& source_name);

AlignmentSet
load_alignments(const std::filesystem::path& path, const SegmentManifest& src_manifest,
                const SegmentManifest& tgt_manifest);

}  // namespace speechmine

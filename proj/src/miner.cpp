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

#include "speechmine/miner.hpp"

#include <algorithm>
#include <cmath>

#include "speechmine/error.hpp"
#include "speechmine/io_util.hpp"

namespace speechmine {

AlignmentSet
mine(const UnitEmbeddingMatrix& src, const UnitEmbeddingMatrix& tgt, const MiningConfig& cfg) {
    if (!std::isfinite(cfg.threshold)) {
        throw ConfigError("mining threshold must be finite");
    }
    if (src.rows() == 0 || tgt.rows() == 0) {
        throw ConfigError("mining needs non-empty pools");
    }

    // One kNN table per direction feeds both the candidate lists and the
    // penalty terms of the other direction.
    const NeighborTable forward_table = knn(src, tgt, cfg.params.k, cfg.knn);
    const NeighborTable backward_table = knn(tgt, src, cfg.params.k, cfg.knn);
    const std::vector<double> src_penalty = neighborhood_penalties(forward_table, cfg.params.k);
    const std::vector<double> tgt_penalty = neighborhood_penalties(backward_table, cfg.params.k);

    const ScoredCandidates forward = score_from_tables(forward_table, src_penalty, tgt_penalty);
    const ScoredCandidates backward = score_from_tables(backward_table, tgt_penalty, src_penalty);

    std::vector<Alignment> pairs;
    pairs.reserve(forward.size() + backward.size());
    for (std::size_t i = 0; i < forward.size(); ++i) {
        pairs.push_back({static_cast<std::uint32_t>(i), forward[i].best_index, forward[i].margin});
    }
    for (std::size_t j = 0; j < backward.size(); ++j) {
        pairs.push_back({backward[j].best_index, static_cast<std::uint32_t>(j), backward[j].margin});
    }

    // dedup keeping the maximum score per (src, tgt)
    std::sort(pairs.begin(), pairs.end(), [](const Alignment& a, const Alignment& b) {
        if (a.src_index != b.src_index) {
            return a.src_index < b.src_index;
        }
        if (a.tgt_index != b.tgt_index) {
            return a.tgt_index < b.tgt_index;
        }
        return a.score > b.score;
    });
    AlignmentSet out;
    out.alignments.reserve(pairs.size());
    for (const Alignment& a : pairs) {
        if (!out.alignments.empty() && out.alignments.back().src_index == a.src_index &&
            out.alignments.back().tgt_index == a.tgt_index) {
            continue;
        }
        if (a.score >= cfg.threshold) {
            out.alignments.push_back(a);
        }
    }
    std::sort(out.alignments.begin(), out.alignments.end(), alignment_order_less);
    return out;
}

std::string
encode_alignments(const AlignmentSet& set, const SegmentManifest& src_manifest,
                  const SegmentManifest& tgt_manifest) {
    std::string out = "score\tsrc_segment_id\ttgt_segment_id\n";
    for (const Alignment& a : set.alignments) {
        if (a.src_index >= src_manifest.size()) {
            throw ValidationError("alignment src_index " + std::to_string(a.src_index) +
                                  " does not resolve in a manifest of " + std::to_string(src_manifest.size()));
        }
        if (a.tgt_index >= tgt_manifest.size()) {
            throw ValidationError("alignment tgt_index " + std::to_string(a.tgt_index) +
                                  " does not resolve in a manifest of " + std::to_string(tgt_manifest.size()));
        }
        out += format_fixed(a.score, 6);
        out.push_back('\t');
        out += src_manifest[a.src_index].segment_id;
        out.push_back('\t');
        out += tgt_manifest[a.tgt_index].segment_id;
        out.push_back('\n');
    }
    return out;
}

void
save_alignments(const std::filesystem::path& path, const AlignmentSet& set, const SegmentManifest& src_manifest,
                const SegmentManifest& tgt_manifest) {
    atomic_write_file(path, encode_alignments(set, src_manifest, tgt_manifest));
}

AlignmentSet
decode_alignments(std::string_view text, const SegmentManifest& src_manifest, const SegmentManifest& tgt_manifest,
                  const std::string& source_name) {
    constexpr std::string_view kHeader = "score\tsrc_segment_id\ttgt_segment_id";
    AlignmentSet set;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        std::string_view line = eol == std::string_view::npos ? text.substr(pos) : text.substr(pos, eol - pos);
        ++line_no;
        if (line_no == 1) {
            if (line != kHeader) {
                throw FormatError(source_name +
                                  ": bad header line, expected \"score<TAB>src_segment_id<TAB>tgt_segment_id\"");
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
            Alignment a;
            a.score = parse_double_field(fields[0], context);
            a.src_index = static_cast<std::uint32_t>(src_manifest.index_of(fields[1]));
            a.tgt_index = static_cast<std::uint32_t>(tgt_manifest.index_of(fields[2]));
            set.alignments.push_back(a);
        }
        if (eol == std::string_view::npos) {
            break;
        }
        pos = eol + 1;
    }
    return set;
}

AlignmentSet
load_alignments(const std::filesystem::path& path, const SegmentManifest& src_manifest,
                const SegmentManifest& tgt_manifest) {
    return decode_alignments(read_file(path), src_manifest, tgt_manifest, path.string());
}

}  // namespace speechmine

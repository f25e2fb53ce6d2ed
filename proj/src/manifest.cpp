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

#include "speechmine/manifest.hpp"

#include "speechmine/error.hpp"
#include "speechmine/io_util.hpp"
#include "speechmine/matrix.hpp"

namespace speechmine {

namespace {

constexpr std::string_view kHeader = "segment_id\trecording_id\tlang\tstart_ms\tend_ms";

void
validate_segment(const Segment& s, const std::string& context) {
    if (s.segment_id.empty()) {
        throw ValidationError("empty segment_id (" + context + ")");
    }
    if (s.recording_id.empty()) {
        throw ValidationError("empty recording_id (" + context + ")");
    }
    if (s.lang.empty()) {
        throw ValidationError("empty lang (" + context + ")");
    }
    if (s.end_ms <= s.start_ms) {
        throw ValidationError("segment \"" + s.segment_id + "\" has end_ms " + std::to_string(s.end_ms) +
                              " <= start_ms " + std::to_string(s.start_ms) + " (" + context + ")");
    }
}

}  // namespace

SegmentManifest::SegmentManifest(std::vector<Segment> entries) : entries_(std::move(entries)) {
    by_id_.reserve(entries_.size());
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        validate_segment(entries_[i], "entry " + std::to_string(i));
        const auto [it, inserted] = by_id_.emplace(entries_[i].segment_id, i);
        if (!inserted) {
            throw ValidationError("duplicate segment_id \"" + entries_[i].segment_id + "\" at entries " +
                                  std::to_string(it->second) + " and " + std::to_string(i));
        }
    }
}

std::size_t
SegmentManifest::index_of(std::string_view segment_id) const {
    const auto it = by_id_.find(std::string(segment_id));
    if (it == by_id_.end()) {
        throw ValidationError("unknown segment_id \"" + std::string(segment_id) + "\"");
    }
    return it->second;
}

SegmentManifest
decode_manifest(std::string_view text, const std::string& source_name) {
    std::vector<Segment> entries;
    std::unordered_map<std::string, std::size_t> first_line_of_id;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        std::string_view line = eol == std::string_view::npos ? text.substr(pos) : text.substr(pos, eol - pos);
        ++line_no;
        if (line_no == 1) {
            if (line != kHeader) {
                throw FormatError(source_name + ": bad header line, expected \"segment_id<TAB>recording_id" +
                                  "<TAB>lang<TAB>start_ms<TAB>end_ms\"");
            }
        } else if (line.empty()) {
            // only a trailing newline may leave an empty final chunk
            if (eol != std::string_view::npos) {
                throw FormatError(source_name + ": empty line " + std::to_string(line_no));
            }
        } else {
            const std::string context = source_name + ": line " + std::to_string(line_no);
            const auto fields = split_tsv_line(line);
            if (fields.size() != 5) {
                throw FormatError(context + ": expected 5 tab-separated fields, got " +
                                  std::to_string(fields.size()));
            }
            Segment s;
            s.segment_id = std::string(fields[0]);
            s.recording_id = std::string(fields[1]);
            s.lang = std::string(fields[2]);
            s.start_ms = parse_int_field(fields[3], context);
            s.end_ms = parse_int_field(fields[4], context);
            validate_segment(s, context);
            const auto [it, inserted] = first_line_of_id.emplace(s.segment_id, line_no);
            if (!inserted) {
                throw ValidationError(source_name + ": duplicate segment_id \"" + s.segment_id + "\" on lines " +
                                      std::to_string(it->second) + " and " + std::to_string(line_no));
            }
            entries.push_back(std::move(s));
        }
        if (eol == std::string_view::npos) {
            break;
        }
        pos = eol + 1;
    }
    return SegmentManifest(std::move(entries));
}

std::string
encode_manifest(const SegmentManifest& manifest) {
    std::string out(kHeader);
    out.push_back('\n');
    for (const Segment& s : manifest) {
        out += s.segment_id;
        out.push_back('\t');
        out += s.recording_id;
        out.push_back('\t');
        out += s.lang;
        out.push_back('\t');
        out += std::to_string(s.start_ms);
        out.push_back('\t');
        out += std::to_string(s.end_ms);
        out.push_back('\n');
    }
    return out;
}

SegmentManifest
load_manifest(const std::filesystem::path& path) {
    return decode_manifest(read_file(path), path.string());
}

void
save_manifest(const std::filesystem::path& path, const SegmentManifest& manifest) {
    atomic_write_file(path, encode_manifest(manifest));
}

void
validate_pairing(const SegmentManifest& manifest, const EmbeddingMatrix& matrix) {
    if (manifest.size() != matrix.rows()) {
        throw ValidationError("manifest has " + std::to_string(manifest.size()) + " entries but matrix has " +
                              std::to_string(matrix.rows()) + " rows");
    }
}

}  // namespace speechmine

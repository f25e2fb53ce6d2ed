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

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "speechmine/manifest.hpp"
#include "speechmine/matrix.hpp"
#include "speechmine/segmenter.hpp"

namespace smtest {

// Self-cleaning temporary directory for file-format fixtures.
class TempDir {
 public:
    TempDir() {
        auto base = std::filesystem::temp_directory_path();
        std::mt19937_64 rng(std::random_device{}());
        path_ = base / ("speechmine_test_" + std::to_string(rng()));
        std::filesystem::create_directories(path_);
    }

    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }

    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::filesystem::path
    file(const std::string& name) const {
        return path_ / name;
    }

    const std::filesystem::path&
    path() const {
        return path_;
    }

 private:
    std::filesystem::path path_;
};

inline void
write_bytes(const std::filesystem::path& p, std::string_view bytes) {
    std::ofstream out(p, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

inline std::string
read_bytes(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline speechmine::EmbeddingMatrix
random_matrix(std::size_t rows, std::size_t dim, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<float> gauss(0.f, 1.f);
    speechmine::EmbeddingMatrix m(rows, dim);
    for (std::size_t i = 0; i < rows; ++i) {
        float* r = m.row(i);
        for (std::size_t t = 0; t < dim; ++t) {
            r[t] = gauss(rng);
        }
    }
    return m;
}

inline speechmine::UnitEmbeddingMatrix
random_unit(std::size_t rows, std::size_t dim, std::uint64_t seed) {
    return speechmine::l2_normalize(random_matrix(rows, dim, seed));
}

// tgt row perm[i] is src row i plus Gaussian noise of the given scale,
// re-normalized. noise_scale 0 plants exact copies.
struct PlantedPools {
    speechmine::UnitEmbeddingMatrix src;
    speechmine::UnitEmbeddingMatrix tgt;
    std::vector<std::uint32_t> perm;  // src i -> tgt perm[i]
};

inline PlantedPools
make_planted(std::size_t rows, std::size_t dim, std::uint64_t seed, double noise_scale) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<float> gauss(0.f, 1.f);
    speechmine::UnitEmbeddingMatrix src = random_unit(rows, dim, seed + 1);
    std::vector<std::uint32_t> perm(rows);
    for (std::size_t i = 0; i < rows; ++i) {
        perm[i] = static_cast<std::uint32_t>(i);
    }
    std::shuffle(perm.begin(), perm.end(), rng);
    speechmine::EmbeddingMatrix tgt(rows, dim);
    for (std::size_t i = 0; i < rows; ++i) {
        float* dst = tgt.row(perm[i]);
        const float* s = src.row(i);
        for (std::size_t t = 0; t < dim; ++t) {
            dst[t] = s[t] + static_cast<float>(noise_scale) * gauss(rng);
        }
    }
    return {std::move(src), speechmine::l2_normalize(tgt), std::move(perm)};
}

inline speechmine::VadTimeline
random_timeline(const std::string& recording_id, std::size_t max_intervals, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> count(0, max_intervals);
    std::uniform_int_distribution<std::int64_t> gap(0, 4000);
    std::uniform_int_distribution<std::int64_t> len(1, 9000);
    speechmine::VadTimeline t{recording_id, {}};
    const std::size_t n = count(rng);
    std::int64_t cursor = gap(rng);
    for (std::size_t i = 0; i < n; ++i) {
        const std::int64_t start = cursor;
        const std::int64_t end = start + len(rng);
        t.intervals.push_back({start, end});
        cursor = end + gap(rng);
    }
    return t;
}

// Synthetic manifest of `count` segments spread over `recordings` ids.
inline speechmine::SegmentManifest
synthetic_manifest(std::size_t count, std::size_t recordings, std::uint64_t seed, const std::string& lang = "xx") {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::int64_t> start(0, 400000);
    std::uniform_int_distribution<std::int64_t> len(500, 20000);
    std::vector<speechmine::Segment> entries;
    entries.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        speechmine::Segment s;
        s.segment_id = "seg" + std::to_string(i);
        s.recording_id = "rec" + std::to_string(i % std::max<std::size_t>(recordings, 1));
        s.lang = lang;
        s.start_ms = start(rng);
        s.end_ms = s.start_ms + len(rng);
        entries.push_back(std::move(s));
    }
    return speechmine::SegmentManifest(std::move(entries));
}

}  // namespace smtest

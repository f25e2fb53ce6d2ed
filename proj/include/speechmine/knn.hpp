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

#include <cstddef>
#include <cstdint>
#include <vector>

#include "speechmine/matrix.hpp"

namespace speechmine {

struct KnnOptions {
    std::size_t workers = 0;        // 0 = all hardware threads
    std::size_t query_block = 128;  // queries per parallel work item
    std::size_t corpus_block = 256; // corpus rows converted per scratch pass

    // Output is bitwise identical for any workers/query_block/corpus_block:
    // per-pair scores depend only on dim, and top-k selection is a total
    // order (score desc, then corpus index asc).
};

// Exact k-nearest-neighbor result by cosine. Row q holds the top
// min(k, corpus_rows) corpus indices for query q, scores non-increasing,
// ties broken by ascending corpus index.
class NeighborTable {
 public:
    NeighborTable() = default;

    NeighborTable(std::size_t num_queries, std::size_t row_len, std::size_t k)
        : num_queries_(num_queries),
          row_len_(row_len),
          k_(k),
          indices_(num_queries * row_len, 0),
          scores_(num_queries * row_len, 0.0) {
    }

    std::size_t
    num_queries() const noexcept {
        return num_queries_;
    }

    // Entries actually stored per row: min(k, corpus rows).
    std::size_t
    row_len() const noexcept {
        return row_len_;
    }

    // The k that was requested (the margin divisor stays 2k even when
    // row_len is smaller).
    std::size_t
    k() const noexcept {
        return k_;
    }

    std::uint32_t
    index(std::size_t q, std::size_t r) const noexcept {
        return indices_[q * row_len_ + r];
    }

    double
    score(std::size_t q, std::size_t r) const noexcept {
        return scores_[q * row_len_ + r];
    }

    // Left-to-right sum of one row's scores (the Sigma over NN_k in the
    // margin's penalty term).
    double
    row_score_sum(std::size_t q) const noexcept {
        double s = 0.0;
        for (std::size_t r = 0; r < row_len_; ++r) {
            s += scores_[q * row_len_ + r];
        }
        return s;
    }

    std::uint32_t*
    row_indices(std::size_t q) noexcept {
        return indices_.data() + q * row_len_;
    }

    double*
    row_scores(std::size_t q) noexcept {
        return scores_.data() + q * row_len_;
    }

    const std::vector<std::uint32_t>&
    indices() const noexcept {
        return indices_;
    }

    const std::vector<double>&
    scores() const noexcept {
        return scores_;
    }

 private:
    std::size_t num_queries_ = 0;
    std::size_t row_len_ = 0;
    std::size_t k_ = 0;
    std::vector<std::uint32_t> indices_;
    std::vector<double> scores_;
};

// Neighbor ordering: higher score wins, equal scores go to the lower
// corpus index. This is the tie rule for every top-k in the engine.
inline bool
neighbor_better(double score_a, std::uint32_t index_a, double score_b, std::uint32_t index_b) noexcept {
    return score_a > score_b || (score_a == score_b && index_a < index_b);
}

// Exact blocked search, parallel over query blocks. Scores accumulate in
// float64 with a lane order that depends only on dim, so results do not
// change with block size or worker count.
NeighborTable
knn(const UnitEmbeddingMatrix& queries, const UnitEmbeddingMatrix& corpus, std::size_t k,
    const KnnOptions& opts = {});

// Serial triple-loop reference. Defines ground truth for the tie rule;
// kept independent of the blocked kernel for testing and benchmarking.
NeighborTable
knn_oracle(const UnitEmbeddingMatrix& queries, const UnitEmbeddingMatrix& corpus, std::size_t k);

}  // namespace speechmine

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
#include <span>
#include <vector>

#include "speechmine/knn.hpp"
#include "speechmine/matrix.hpp"

namespace speechmine {

struct MarginParams {
    std::size_t k = 16;  // neighborhood size for the penalty terms
};

// Best target per source row under the margin criterion.
struct ScoredCandidate {
    std::uint32_t best_index = 0;
    double margin = 0.0;
};

using ScoredCandidates = std::vector<ScoredCandidate>;

// Margin similarity: cosine of the pair minus the average cosine of each
// side to its k nearest neighbors in the opposite pool,
//
//     margin = cos_xy - (sum(nn_x_scores)/2k + sum(nn_y_scores)/2k).
//
// Neighbor lists include the contribution of the pair itself when it falls
// in the neighborhood (no exclusion), and the divisor stays 2k even when a
// pool has fewer than k rows. Sums run left to right in list order.
double
margin_score(double cos_xy, std::span<const double> nn_x_scores, std::span<const double> nn_y_scores,
             std::size_t k);

// Penalty term sum(row)/2k for every query row of a neighbor table.
std::vector<double>
neighborhood_penalties(const NeighborTable& table, std::size_t k);

// Margin argmax over the forward table's candidates. query_penalty[i] and
// candidate_penalty[j] are the two penalty terms; ties go to the lower
// candidate index. Exposed so the miner can reuse kNN tables for both
// directions.
ScoredCandidates
score_from_tables(const NeighborTable& forward, std::span<const double> query_penalty,
                  std::span<const double> candidate_penalty);

// One mining direction: for each source row, its k nearest targets are the
// candidates, and the best candidate maximizes the margin. The reverse
// direction is score_pairs(tgt, src, ...).
ScoredCandidates
score_pairs(const UnitEmbeddingMatrix& src, const UnitEmbeddingMatrix& tgt, const MarginParams& params,
            const KnnOptions& opts = {});

// Retrieval evaluation: row i of refs is the expected match of row i of
// src; the result is the fraction of rows whose margin-argmax reference is
// not their own index.
double
similarity_search_error(const UnitEmbeddingMatrix& src, const UnitEmbeddingMatrix& refs,
                        const MarginParams& params, const KnnOptions& opts = {});

}  // namespace speechmine

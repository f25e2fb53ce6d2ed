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

#include "speechmine/margin.hpp"

#include "speechmine/error.hpp"

namespace speechmine {

double
margin_score(double cos_xy, std::span<const double> nn_x_scores, std::span<const double> nn_y_scores,
             std::size_t k) {
    if (k == 0) {
        throw ConfigError("margin k must be at least 1");
    }
    if (nn_x_scores.size() > k || nn_y_scores.size() > k) {
        throw ConfigError("neighbor list longer than k");
    }
    const double divisor = 2.0 * static_cast<double>(k);
    double sum_x = 0.0;
    for (double s : nn_x_scores) {
        sum_x += s;
    }
    double sum_y = 0.0;
    for (double s : nn_y_scores) {
        sum_y += s;
    }
    return cos_xy - (sum_x / divisor + sum_y / divisor);
}

std::vector<double>
neighborhood_penalties(const NeighborTable& table, std::size_t k) {
    if (k == 0) {
        throw ConfigError("margin k must be at least 1");
    }
    const double divisor = 2.0 * static_cast<double>(k);
    std::vector<double> penalties(table.num_queries());
    for (std::size_t q = 0; q < table.num_queries(); ++q) {
        penalties[q] = table.row_score_sum(q) / divisor;
    }
    return penalties;
}

ScoredCandidates
score_from_tables(const NeighborTable& forward, std::span<const double> query_penalty,
                  std::span<const double> candidate_penalty) {
    ScoredCandidates result(forward.num_queries());
    for (std::size_t q = 0; q < forward.num_queries(); ++q) {
        std::uint32_t best_index = 0;
        double best_margin = 0.0;
        bool have = false;
        for (std::size_t r = 0; r < forward.row_len(); ++r) {
            const std::uint32_t j = forward.index(q, r);
            // same expression as margin_score: cos - (px + py)
            const double m = forward.score(q, r) - (query_penalty[q] + candidate_penalty[j]);
            if (!have || m > best_margin || (m == best_margin && j < best_index)) {
                best_index = j;
                best_margin = m;
                have = true;
            }
        }
        result[q] = {best_index, best_margin};
    }
    return result;
}

ScoredCandidates
score_pairs(const UnitEmbeddingMatrix& src, const UnitEmbeddingMatrix& tgt, const MarginParams& params,
            const KnnOptions& opts) {
    if (src.rows() == 0) {
        throw ConfigError("source pool is empty");
    }
    const NeighborTable forward = knn(src, tgt, params.k, opts);
    const NeighborTable backward = knn(tgt, src, params.k, opts);
    const std::vector<double> src_penalty = neighborhood_penalties(forward, params.k);
    const std::vector<double> tgt_penalty = neighborhood_penalties(backward, params.k);
    return score_from_tables(forward, src_penalty, tgt_penalty);
}

double
similarity_search_error(const UnitEmbeddingMatrix& src, const UnitEmbeddingMatrix& refs,
                        const MarginParams& params, const KnnOptions& opts) {
    if (src.rows() != refs.rows()) {
        throw ConfigError("evaluation needs src.rows == refs.rows, got " + std::to_string(src.rows()) + " and " +
                          std::to_string(refs.rows()));
    }
    const ScoredCandidates best = score_pairs(src, refs, params, opts);
    std::size_t errors = 0;
    for (std::size_t i = 0; i < best.size(); ++i) {
        if (best[i].best_index != i) {
            ++errors;
        }
    }
    return static_cast<double>(errors) / static_cast<double>(best.size());
}

}  // namespace speechmine

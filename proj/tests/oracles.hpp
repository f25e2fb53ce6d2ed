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

// Brute-force reference computations for tests. Everything here works from
// dense score matrices with its own accumulation (Kahan-compensated sums),
// independent of the blocked kernel and of the library's table plumbing.

#pragma once

#include <algorithm>
#include <cstdint>
#include <tuple>
#include <vector>

#include "speechmine/manifest.hpp"
#include "speechmine/matrix.hpp"
#include "speechmine/miner.hpp"
#include "speechmine/segmenter.hpp"

namespace smtest {

// Dense a.rows x b.rows cosine matrix, Kahan-compensated accumulation.
inline std::vector<double>
dense_cosines(const speechmine::UnitEmbeddingMatrix& a, const speechmine::UnitEmbeddingMatrix& b) {
    const std::size_t na = a.rows(), nb = b.rows(), d = a.dim();
    std::vector<double> cos(na * nb);
    for (std::size_t i = 0; i < na; ++i) {
        const float* x = a.row(i);
        for (std::size_t j = 0; j < nb; ++j) {
            const float* y = b.row(j);
            double sum = 0.0, comp = 0.0;
            for (std::size_t t = 0; t < d; ++t) {
                const double term = static_cast<double>(x[t]) * static_cast<double>(y[t]) - comp;
                const double next = sum + term;
                comp = (next - sum) - term;
                sum = next;
            }
            cos[i * nb + j] = sum;
        }
    }
    return cos;
}

// Top-k of one dense row under the tie rule (score desc, index asc).
inline std::vector<std::pair<double, std::uint32_t>>
dense_topk(const double* row, std::size_t n, std::size_t k) {
    std::vector<std::pair<double, std::uint32_t>> all(n);
    for (std::size_t j = 0; j < n; ++j) {
        all[j] = {row[j], static_cast<std::uint32_t>(j)};
    }
    std::sort(all.begin(), all.end(), [](const auto& p, const auto& q) {
        return p.first > q.first || (p.first == q.first && p.second < q.second);
    });
    all.resize(std::min(k, n));
    return all;
}

// Penalty term sum(top-k)/2k for every row of a dense matrix.
inline std::vector<double>
dense_penalties(const std::vector<double>& cos, std::size_t rows, std::size_t cols, std::size_t k) {
    std::vector<double> penalties(rows);
    for (std::size_t i = 0; i < rows; ++i) {
        double sum = 0.0;
        for (const auto& [score, idx] : dense_topk(cos.data() + i * cols, cols, k)) {
            sum += score;
        }
        penalties[i] = sum / (2.0 * static_cast<double>(k));
    }
    return penalties;
}

struct MarginRescore {
    std::vector<std::uint32_t> best;   // per source row
    std::vector<double> margin;
};

// Full margin protocol from dense cosines: forward candidates are the k
// nearest targets of each source row, penalties come from both directions,
// the best candidate maximizes margin (ties to the lower index).
inline MarginRescore
margin_rescore(const std::vector<double>& cos, std::size_t n_src, std::size_t n_tgt, std::size_t k) {
    std::vector<double> transposed(n_src * n_tgt);
    for (std::size_t i = 0; i < n_src; ++i) {
        for (std::size_t j = 0; j < n_tgt; ++j) {
            transposed[j * n_src + i] = cos[i * n_tgt + j];
        }
    }
    const std::vector<double> fwd_pen = dense_penalties(cos, n_src, n_tgt, k);
    const std::vector<double> bwd_pen = dense_penalties(transposed, n_tgt, n_src, k);

    MarginRescore out;
    out.best.resize(n_src);
    out.margin.resize(n_src);
    for (std::size_t i = 0; i < n_src; ++i) {
        bool have = false;
        std::uint32_t best_idx = 0;
        double best_margin = 0.0;
        for (const auto& [score, j] : dense_topk(cos.data() + i * n_tgt, n_tgt, k)) {
            const double m = score - (fwd_pen[i] + bwd_pen[j]);
            if (!have || m > best_margin || (m == best_margin && j < best_idx)) {
                have = true;
                best_idx = j;
                best_margin = m;
            }
        }
        out.best[i] = best_idx;
        out.margin[i] = best_margin;
    }
    return out;
}

// margin(i, j) for every pair, used to place planted-matching thresholds.
inline std::vector<double>
full_margin_matrix(const std::vector<double>& cos, std::size_t n_src, std::size_t n_tgt, std::size_t k) {
    std::vector<double> transposed(n_src * n_tgt);
    for (std::size_t i = 0; i < n_src; ++i) {
        for (std::size_t j = 0; j < n_tgt; ++j) {
            transposed[j * n_src + i] = cos[i * n_tgt + j];
        }
    }
    const std::vector<double> fwd_pen = dense_penalties(cos, n_src, n_tgt, k);
    const std::vector<double> bwd_pen = dense_penalties(transposed, n_tgt, n_src, k);
    std::vector<double> margins(n_src * n_tgt);
    for (std::size_t i = 0; i < n_src; ++i) {
        for (std::size_t j = 0; j < n_tgt; ++j) {
            margins[i * n_tgt + j] = cos[i * n_tgt + j] - (fwd_pen[i] + bwd_pen[j]);
        }
    }
    return margins;
}

// Exhaustive contiguous-run enumeration for the segmenter: every (first,
// last) with span duration inside the bounds, in lexicographic order.
inline std::vector<std::pair<std::size_t, std::size_t>>
enumerate_runs(const speechmine::VadTimeline& t, const speechmine::DurationBounds& b) {
    std::vector<std::pair<std::size_t, std::size_t>> runs;
    for (std::size_t first = 0; first < t.intervals.size(); ++first) {
        for (std::size_t last = first; last < t.intervals.size(); ++last) {
            const std::int64_t span = t.intervals[last].end_ms - t.intervals[first].start_ms;
            if (span >= b.min_ms && span <= b.max_ms) {
                runs.emplace_back(first, last);
            }
        }
    }
    return runs;
}

// True when two kept source segments violate the mutual overlap rule.
inline bool
violates_mutual_rule(const speechmine::Segment& a, const speechmine::Segment& b, double fraction) {
    if (a.recording_id != b.recording_id) {
        return false;
    }
    const std::int64_t inter = std::min(a.end_ms, b.end_ms) - std::max(a.start_ms, b.start_ms);
    if (inter <= 0) {
        return false;
    }
    return static_cast<double>(inter) > fraction * static_cast<double>(a.duration_ms()) &&
           static_cast<double>(inter) > fraction * static_cast<double>(b.duration_ms());
}

// Exhaustive pairwise scan of a kept set.
inline bool
any_mutual_violation(const speechmine::AlignmentSet& set, const speechmine::SegmentManifest& manifest,
                     double fraction) {
    for (std::size_t i = 0; i < set.alignments.size(); ++i) {
        for (std::size_t j = i + 1; j < set.alignments.size(); ++j) {
            if (violates_mutual_rule(manifest[set.alignments[i].src_index], manifest[set.alignments[j].src_index],
                                     fraction)) {
                return true;
            }
        }
    }
    return false;
}

}  // namespace smtest

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

#include "speechmine/knn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

#if defined(__AVX512F__)
#include <immintrin.h>
#endif

#include "speechmine/error.hpp"

namespace speechmine {

namespace {

struct Neighbor {
    double score;
    std::uint32_t index;
};

inline bool
better(const Neighbor& a, const Neighbor& b) noexcept {
    return neighbor_better(a.score, a.index, b.score, b.index);
}

// Bounded worst-on-top heap over a caller-provided buffer of capacity k.
// offer() rejects most candidates with a single compare against the cached
// worst kept score; everything else takes the out-of-line slow path.
class TopK {
 public:
    TopK(Neighbor* buf, std::size_t k) : buf_(buf), k_(k) {
    }

    void
    reset() noexcept {
        size_ = 0;
        worst_score_ = -std::numeric_limits<double>::infinity();
    }

    void
    offer(double score, std::uint32_t index) noexcept {
        if (score < worst_score_) {
            return;
        }
        offer_slow(score, index);
    }

    // Best-first order into the output row.
    void
    drain(std::uint32_t* indices, double* scores) noexcept {
        std::sort(buf_, buf_ + size_, better);
        for (std::size_t r = 0; r < size_; ++r) {
            indices[r] = buf_[r].index;
            scores[r] = buf_[r].score;
        }
    }

 private:
    __attribute__((noinline)) void
    offer_slow(double score, std::uint32_t index) noexcept {
        if (size_ < k_) {
            buf_[size_++] = {score, index};
            std::push_heap(buf_, buf_ + size_, better);
            if (size_ == k_) {
                worst_score_ = buf_[0].score;
            }
        } else if (neighbor_better(score, index, buf_[0].score, buf_[0].index)) {
            std::pop_heap(buf_, buf_ + size_, better);
            buf_[size_ - 1] = {score, index};
            std::push_heap(buf_, buf_ + size_, better);
            worst_score_ = buf_[0].score;
        }
    }

    Neighbor* buf_;
    std::size_t k_;
    std::size_t size_ = 0;
    double worst_score_ = -std::numeric_limits<double>::infinity();
};

// ---------------------------------------------------------------------------
// Dot-product kernels. All kernels accumulate in float64 over 8 lanes with
// lane = t mod 8 and a fixed pairwise combine, so a pair's score is a pure
// function of the two rows and dim. f32 -> f64 conversion is exact, which
// lets blocks be pre-converted without changing any bit of the result.
// ---------------------------------------------------------------------------

inline double
combine_lanes(const double lanes[8]) noexcept {
    return ((lanes[0] + lanes[1]) + (lanes[2] + lanes[3])) + ((lanes[4] + lanes[5]) + (lanes[6] + lanes[7]));
}

#if defined(__AVX512F__)

inline double
reduce_fixed(__m512d acc) noexcept {
    alignas(64) double lanes[8];
    _mm512_store_pd(lanes, acc);
    return combine_lanes(lanes);
}

// 4 query rows x 4 corpus rows, both sides already f64.
inline void
dot_tile_4x4(const double* const q[4], const double* const c[4], std::size_t d, double out[4][4]) noexcept {
    __m512d acc[4][4];
    for (int u = 0; u < 4; ++u) {
        for (int v = 0; v < 4; ++v) {
            acc[u][v] = _mm512_setzero_pd();
        }
    }
    std::size_t t = 0;
    for (; t + 8 <= d; t += 8) {
        __m512d cv[4];
        for (int v = 0; v < 4; ++v) {
            cv[v] = _mm512_loadu_pd(c[v] + t);
        }
        for (int u = 0; u < 4; ++u) {
            const __m512d qv = _mm512_loadu_pd(q[u] + t);
            for (int v = 0; v < 4; ++v) {
                acc[u][v] = _mm512_fmadd_pd(qv, cv[v], acc[u][v]);
            }
        }
    }
    if (t < d) {
        const __mmask8 m = static_cast<__mmask8>((1u << (d - t)) - 1u);
        __m512d cv[4];
        for (int v = 0; v < 4; ++v) {
            cv[v] = _mm512_maskz_loadu_pd(m, c[v] + t);
        }
        for (int u = 0; u < 4; ++u) {
            const __m512d qv = _mm512_maskz_loadu_pd(m, q[u] + t);
            for (int v = 0; v < 4; ++v) {
                acc[u][v] = _mm512_fmadd_pd(qv, cv[v], acc[u][v]);
            }
        }
    }
    for (int u = 0; u < 4; ++u) {
        for (int v = 0; v < 4; ++v) {
            out[u][v] = reduce_fixed(acc[u][v]);
        }
    }
}

inline double
dot_single(const double* a, const double* b, std::size_t d) noexcept {
    __m512d acc = _mm512_setzero_pd();
    std::size_t t = 0;
    for (; t + 8 <= d; t += 8) {
        acc = _mm512_fmadd_pd(_mm512_loadu_pd(a + t), _mm512_loadu_pd(b + t), acc);
    }
    if (t < d) {
        const __mmask8 m = static_cast<__mmask8>((1u << (d - t)) - 1u);
        acc = _mm512_fmadd_pd(_mm512_maskz_loadu_pd(m, a + t), _mm512_maskz_loadu_pd(m, b + t), acc);
    }
    return reduce_fixed(acc);
}

#else  // portable fallback, same lane structure and fused multiply-add

inline double
dot_single(const double* a, const double* b, std::size_t d) noexcept {
    double lanes[8] = {0, 0, 0, 0, 0, 0, 0, 0};
    std::size_t t = 0;
    for (; t + 8 <= d; t += 8) {
        for (int l = 0; l < 8; ++l) {
            lanes[l] = std::fma(a[t + l], b[t + l], lanes[l]);
        }
    }
    for (; t < d; ++t) {
        lanes[t % 8] = std::fma(a[t], b[t], lanes[t % 8]);
    }
    return combine_lanes(lanes);
}

inline void
dot_tile_4x4(const double* const q[4], const double* const c[4], std::size_t d, double out[4][4]) noexcept {
    for (int u = 0; u < 4; ++u) {
        for (int v = 0; v < 4; ++v) {
            out[u][v] = dot_single(q[u], c[v], d);
        }
    }
}

#endif

void
convert_block(const float* src, std::size_t count, double* dst) noexcept {
    for (std::size_t i = 0; i < count; ++i) {
        dst[i] = static_cast<double>(src[i]);
    }
}

std::size_t
resolve_workers(std::size_t requested) noexcept {
#ifdef _OPENMP
    return requested == 0 ? static_cast<std::size_t>(omp_get_max_threads()) : requested;
#else
    (void)requested;
    return 1;
#endif
}

void
validate_knn_args(const UnitEmbeddingMatrix& queries, const UnitEmbeddingMatrix& corpus, std::size_t k) {
    if (k == 0) {
        throw ConfigError("k must be at least 1");
    }
    if (corpus.rows() == 0) {
        throw ConfigError("corpus is empty");
    }
    if (queries.dim() != corpus.dim()) {
        throw ConfigError("dimension mismatch: queries have dim " + std::to_string(queries.dim()) +
                          ", corpus has dim " + std::to_string(corpus.dim()));
    }
    if (corpus.rows() > std::numeric_limits<std::uint32_t>::max()) {
        throw ConfigError("corpus exceeds 2^32-1 rows");
    }
}

}  // namespace

NeighborTable
knn(const UnitEmbeddingMatrix& queries, const UnitEmbeddingMatrix& corpus, std::size_t k, const KnnOptions& opts) {
    validate_knn_args(queries, corpus, k);
    const std::size_t nq = queries.rows();
    const std::size_t nc = corpus.rows();
    const std::size_t d = queries.dim();
    const std::size_t row_len = std::min(k, nc);
    const std::size_t qb_size = std::max<std::size_t>(1, opts.query_block);
    const std::size_t cb_size = std::max<std::size_t>(1, opts.corpus_block);
    const std::size_t num_qblocks = (nq + qb_size - 1) / qb_size;

    NeighborTable table(nq, row_len, k);
    if (nq == 0) {
        return table;
    }

    const int workers = static_cast<int>(std::min(resolve_workers(opts.workers), num_qblocks));

#ifdef _OPENMP
#pragma omp parallel num_threads(std::max(workers, 1))
#endif
    {
        // per-thread scratch: converted blocks and one heap per block query
        std::vector<double> qbuf(qb_size * d);
        std::vector<double> cbuf(cb_size * d);
        std::vector<Neighbor> heap_storage(qb_size * k);
        std::vector<TopK> heaps;
        heaps.reserve(qb_size);
        for (std::size_t i = 0; i < qb_size; ++i) {
            heaps.emplace_back(heap_storage.data() + i * k, k);
        }

#ifdef _OPENMP
#pragma omp for schedule(dynamic)
#endif
        for (std::ptrdiff_t qb = 0; qb < static_cast<std::ptrdiff_t>(num_qblocks); ++qb) {
            const std::size_t q0 = static_cast<std::size_t>(qb) * qb_size;
            const std::size_t qn = std::min(qb_size, nq - q0);
            convert_block(queries.row(q0), qn * d, qbuf.data());
            for (std::size_t i = 0; i < qn; ++i) {
                heaps[i].reset();
            }

            for (std::size_t c0 = 0; c0 < nc; c0 += cb_size) {
                const std::size_t cn = std::min(cb_size, nc - c0);
                convert_block(corpus.row(c0), cn * d, cbuf.data());

                std::size_t i = 0;
                for (; i + 4 <= qn; i += 4) {
                    const double* qrows[4] = {&qbuf[i * d], &qbuf[(i + 1) * d], &qbuf[(i + 2) * d],
                                              &qbuf[(i + 3) * d]};
                    std::size_t j = 0;
                    for (; j + 4 <= cn; j += 4) {
                        const double* crows[4] = {&cbuf[j * d], &cbuf[(j + 1) * d], &cbuf[(j + 2) * d],
                                                  &cbuf[(j + 3) * d]};
                        double out[4][4];
                        dot_tile_4x4(qrows, crows, d, out);
                        for (int u = 0; u < 4; ++u) {
                            for (int v = 0; v < 4; ++v) {
                                heaps[i + u].offer(out[u][v], static_cast<std::uint32_t>(c0 + j + v));
                            }
                        }
                    }
                    for (; j < cn; ++j) {
                        for (int u = 0; u < 4; ++u) {
                            heaps[i + u].offer(dot_single(qrows[u], &cbuf[j * d], d),
                                               static_cast<std::uint32_t>(c0 + j));
                        }
                    }
                }
                for (; i < qn; ++i) {
                    for (std::size_t j = 0; j < cn; ++j) {
                        heaps[i].offer(dot_single(&qbuf[i * d], &cbuf[j * d], d),
                                       static_cast<std::uint32_t>(c0 + j));
                    }
                }
            }

            for (std::size_t i = 0; i < qn; ++i) {
                heaps[i].drain(table.row_indices(q0 + i), table.row_scores(q0 + i));
            }
        }
    }
    return table;
}

NeighborTable
knn_oracle(const UnitEmbeddingMatrix& queries, const UnitEmbeddingMatrix& corpus, std::size_t k) {
    validate_knn_args(queries, corpus, k);
    const std::size_t nq = queries.rows();
    const std::size_t nc = corpus.rows();
    const std::size_t d = queries.dim();
    const std::size_t row_len = std::min(k, nc);

    NeighborTable table(nq, row_len, k);
    std::vector<Neighbor> all(nc);
    for (std::size_t q = 0; q < nq; ++q) {
        const float* x = queries.row(q);
        for (std::size_t j = 0; j < nc; ++j) {
            const float* y = corpus.row(j);
            double s = 0.0;
            for (std::size_t t = 0; t < d; ++t) {
                s += static_cast<double>(x[t]) * static_cast<double>(y[t]);
            }
            all[j] = {s, static_cast<std::uint32_t>(j)};
        }
        std::sort(all.begin(), all.end(), better);
        for (std::size_t r = 0; r < row_len; ++r) {
            table.row_indices(q)[r] = all[r].index;
            table.row_scores(q)[r] = all[r].score;
        }
    }
    return table;
}

}  // namespace speechmine

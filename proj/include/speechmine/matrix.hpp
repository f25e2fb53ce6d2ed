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
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace speechmine {

// Dense row-major float32 matrix; row i holds the embedding of segment i.
// Loaded matrices are immutable in practice and safe to share across threads.
class EmbeddingMatrix {
 public:
    EmbeddingMatrix() = default;

    EmbeddingMatrix(std::size_t rows, std::size_t dim);

    // Takes ownership of row-major data; data.size() must equal rows * dim.
    EmbeddingMatrix(std::size_t rows, std::size_t dim, std::vector<float> data);

    static EmbeddingMatrix
    from_rows(const std::vector<std::vector<float>>& rows);

    std::size_t
    rows() const noexcept {
        return rows_;
    }

    std::size_t
    dim() const noexcept {
        return dim_;
    }

    const float*
    row(std::size_t i) const noexcept {
        return data_.data() + i * dim_;
    }

    float*
    row(std::size_t i) noexcept {
        return data_.data() + i * dim_;
    }

    std::span<const float>
    row_span(std::size_t i) const noexcept {
        return {row(i), dim_};
    }

    const std::vector<float>&
    data() const noexcept {
        return data_;
    }

 private:
    std::size_t rows_ = 0;
    std::size_t dim_ = 0;
    std::vector<float> data_;
};

// An EmbeddingMatrix whose rows are unit length, so cosine similarity is a
// plain dot product. The constructor enforces the norm invariant.
class UnitEmbeddingMatrix {
 public:
    static constexpr double kNormTolerance = 1e-4;

    UnitEmbeddingMatrix() = default;

    // Validates that every row's L2 norm is within kNormTolerance of 1.
    explicit UnitEmbeddingMatrix(EmbeddingMatrix m);

    std::size_t
    rows() const noexcept {
        return m_.rows();
    }

    std::size_t
    dim() const noexcept {
        return m_.dim();
    }

    const float*
    row(std::size_t i) const noexcept {
        return m_.row(i);
    }

    const EmbeddingMatrix&
    matrix() const noexcept {
        return m_;
    }

 private:
    EmbeddingMatrix m_;
};

// Divides every row by its L2 norm (accumulated in float64). A row with
// norm below 1e-12 is a hard error naming the row index; silently dropping
// it would shift manifest row bindings.
UnitEmbeddingMatrix
l2_normalize(const EmbeddingMatrix& m);

// EMB1 container: bytes 0-3 ASCII "EMB1", bytes 4-7 u32 LE dim, bytes 8-15
// u64 LE row count, then rows*dim float32 LE row-major. No padding, no
// trailer. save(load(f)) is byte-identical for every valid f.
EmbeddingMatrix
load_embeddings(const std::filesystem::path& path);

void
save_embeddings(const std::filesystem::path& path, const EmbeddingMatrix& m);

// In-memory codec used by save/load; exposed for tests and tools.
std::string
encode_embeddings(const EmbeddingMatrix& m);

EmbeddingMatrix
decode_embeddings(std::string_view bytes, const std::string& source_name);

}  // namespace speechmine

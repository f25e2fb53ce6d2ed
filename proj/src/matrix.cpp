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

#include "speechmine/matrix.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>

#include "speechmine/error.hpp"
#include "speechmine/io_util.hpp"

namespace speechmine {

namespace {

constexpr char kMagic[4] = {'E', 'M', 'B', '1'};
constexpr std::size_t kHeaderBytes = 16;

std::uint32_t
read_u32_le(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
           static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

std::uint64_t
read_u64_le(const unsigned char* p) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) {
        v = v << 8 | p[i];
    }
    return v;
}

void
append_u32_le(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) {
        out.push_back(static_cast<char>(v >> (8 * i) & 0xff));
    }
}

void
append_u64_le(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
        out.push_back(static_cast<char>(v >> (8 * i) & 0xff));
    }
}

}  // namespace

EmbeddingMatrix::EmbeddingMatrix(std::size_t rows, std::size_t dim) : rows_(rows), dim_(dim), data_(rows * dim, 0.f) {
}

EmbeddingMatrix::EmbeddingMatrix(std::size_t rows, std::size_t dim, std::vector<float> data)
    : rows_(rows), dim_(dim), data_(std::move(data)) {
    if (data_.size() != rows_ * dim_) {
        throw ConfigError("matrix data length " + std::to_string(data_.size()) + " does not match " +
                          std::to_string(rows_) + "x" + std::to_string(dim_));
    }
}

EmbeddingMatrix
EmbeddingMatrix::from_rows(const std::vector<std::vector<float>>& rows) {
    const std::size_t n = rows.size();
    const std::size_t d = n == 0 ? 1 : rows.front().size();
    std::vector<float> data;
    data.reserve(n * d);
    for (const auto& r : rows) {
        if (r.size() != d) {
            throw ConfigError("ragged rows in from_rows");
        }
        data.insert(data.end(), r.begin(), r.end());
    }
    return {n, d, std::move(data)};
}

UnitEmbeddingMatrix::UnitEmbeddingMatrix(EmbeddingMatrix m) : m_(std::move(m)) {
    for (std::size_t i = 0; i < m_.rows(); ++i) {
        double sq = 0.0;
        const float* r = m_.row(i);
        for (std::size_t t = 0; t < m_.dim(); ++t) {
            sq += static_cast<double>(r[t]) * static_cast<double>(r[t]);
        }
        const double norm = std::sqrt(sq);
        if (std::fabs(norm - 1.0) > kNormTolerance) {
            throw DataError("row " + std::to_string(i) + " has L2 norm " + std::to_string(norm) +
                            ", not unit length");
        }
    }
}

UnitEmbeddingMatrix
l2_normalize(const EmbeddingMatrix& m) {
    EmbeddingMatrix out(m.rows(), m.dim());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const float* src = m.row(i);
        double sq = 0.0;
        for (std::size_t t = 0; t < m.dim(); ++t) {
            sq += static_cast<double>(src[t]) * static_cast<double>(src[t]);
        }
        const double norm = std::sqrt(sq);
        if (norm < 1e-12) {
            throw DataError("row " + std::to_string(i) + " is a zero vector and cannot be normalized");
        }
        float* dst = out.row(i);
        for (std::size_t t = 0; t < m.dim(); ++t) {
            dst[t] = static_cast<float>(static_cast<double>(src[t]) / norm);
        }
    }
    return UnitEmbeddingMatrix(std::move(out));
}

EmbeddingMatrix
decode_embeddings(std::string_view bytes, const std::string& source_name) {
    if (bytes.size() < kHeaderBytes) {
        throw FormatError(source_name + ": file shorter than the 16-byte EMB1 header");
    }
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
    if (std::memcmp(p, kMagic, 4) != 0) {
        throw FormatError(source_name + ": bad magic, expected \"EMB1\"");
    }
    const std::uint32_t dim = read_u32_le(p + 4);
    const std::uint64_t rows = read_u64_le(p + 8);
    if (dim == 0) {
        throw FormatError(source_name + ": declared dim is 0");
    }
    if (rows > (std::numeric_limits<std::uint64_t>::max() - kHeaderBytes) / 4 / dim) {
        throw TruncationError(source_name + ": declared size overflows");
    }
    const std::uint64_t expected = kHeaderBytes + rows * dim * 4;
    if (bytes.size() != expected) {
        throw TruncationError(source_name + ": declared " + std::to_string(rows) + "x" + std::to_string(dim) +
                              " needs " + std::to_string(expected) + " bytes, file has " +
                              std::to_string(bytes.size()));
    }
    std::vector<float> data(static_cast<std::size_t>(rows) * dim);
    const unsigned char* payload = p + kHeaderBytes;
    if constexpr (std::endian::native == std::endian::little) {
        std::memcpy(data.data(), payload, data.size() * 4);
    } else {
        for (std::size_t i = 0; i < data.size(); ++i) {
            data[i] = std::bit_cast<float>(read_u32_le(payload + i * 4));
        }
    }
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (!std::isfinite(data[i])) {
            throw DataError(source_name + ": non-finite value at row " + std::to_string(i / dim) + ", column " +
                            std::to_string(i % dim));
        }
    }
    return {static_cast<std::size_t>(rows), dim, std::move(data)};
}

std::string
encode_embeddings(const EmbeddingMatrix& m) {
    std::string out;
    out.reserve(kHeaderBytes + m.data().size() * 4);
    out.append(kMagic, 4);
    append_u32_le(out, static_cast<std::uint32_t>(m.dim()));
    append_u64_le(out, static_cast<std::uint64_t>(m.rows()));
    if constexpr (std::endian::native == std::endian::little) {
        const auto* p = reinterpret_cast<const char*>(m.data().data());
        out.append(p, m.data().size() * 4);
    } else {
        for (float v : m.data()) {
            append_u32_le(out, std::bit_cast<std::uint32_t>(v));
        }
    }
    return out;
}

EmbeddingMatrix
load_embeddings(const std::filesystem::path& path) {
    return decode_embeddings(read_file(path), path.string());
}

void
save_embeddings(const std::filesystem::path& path, const EmbeddingMatrix& m) {
    atomic_write_file(path, encode_embeddings(m));
}

}  // namespace speechmine

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

#include <cmath>
#include <cstring>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "speechmine/error.hpp"
#include "speechmine/matrix.hpp"
#include "support.hpp"

using namespace speechmine;

namespace {

// byte-level writer independent of encode_embeddings
std::string
raw_emb1(std::uint32_t dim, std::uint64_t rows, const std::vector<float>& payload) {
    std::string bytes = "EMB1";
    for (int i = 0; i < 4; ++i) {
        bytes.push_back(static_cast<char>(dim >> (8 * i) & 0xff));
    }
    for (int i = 0; i < 8; ++i) {
        bytes.push_back(static_cast<char>(rows >> (8 * i) & 0xff));
    }
    for (float v : payload) {
        std::uint32_t u;
        std::memcpy(&u, &v, 4);
        for (int i = 0; i < 4; ++i) {
            bytes.push_back(static_cast<char>(u >> (8 * i) & 0xff));
        }
    }
    return bytes;
}

}  // namespace

TEST_CASE("load_embeddings reads a minimal well-formed file") {
    smtest::TempDir dir;
    const std::vector<float> payload = {1.f, 2.f, 3.f, 4.f, 5.f, 6.f, 7.f, 8.f};
    smtest::write_bytes(dir.file("a.emb"), raw_emb1(4, 2, payload));
    const EmbeddingMatrix m = load_embeddings(dir.file("a.emb"));
    CHECK(m.rows() == 2);
    CHECK(m.dim() == 4);
    CHECK(m.row(0)[0] == 1.f);
    CHECK(m.row(1)[3] == 8.f);
}

TEST_CASE("load_embeddings rejects a corrupted magic") {
    smtest::TempDir dir;
    std::string bytes = raw_emb1(4, 2, std::vector<float>(8, 0.5f));
    bytes[0] = 'X';
    bytes[1] = 'X';
    bytes[2] = 'X';
    bytes[3] = 'X';
    smtest::write_bytes(dir.file("bad.emb"), bytes);
    CHECK_THROWS_AS(load_embeddings(dir.file("bad.emb")), FormatError);
}

TEST_CASE("load_embeddings rejects truncated payloads") {
    smtest::TempDir dir;
    // declares 3 rows but carries only 2 rows of floats
    smtest::write_bytes(dir.file("short.emb"), raw_emb1(4, 3, std::vector<float>(8, 0.5f)));
    CHECK_THROWS_AS(load_embeddings(dir.file("short.emb")), TruncationError);

    // trailing garbage is a size mismatch too
    smtest::write_bytes(dir.file("long.emb"), raw_emb1(4, 2, std::vector<float>(8, 0.5f)) + "xx");
    CHECK_THROWS_AS(load_embeddings(dir.file("long.emb")), TruncationError);
}

TEST_CASE("load_embeddings rejects non-finite payloads and dim 0") {
    smtest::TempDir dir;
    std::vector<float> payload(8, 0.5f);
    payload[5] = std::numeric_limits<float>::quiet_NaN();
    smtest::write_bytes(dir.file("nan.emb"), raw_emb1(4, 2, payload));
    CHECK_THROWS_AS(load_embeddings(dir.file("nan.emb")), DataError);

    payload[5] = std::numeric_limits<float>::infinity();
    smtest::write_bytes(dir.file("inf.emb"), raw_emb1(4, 2, payload));
    CHECK_THROWS_AS(load_embeddings(dir.file("inf.emb")), DataError);

    smtest::write_bytes(dir.file("dim0.emb"), raw_emb1(0, 0, {}));
    CHECK_THROWS_AS(load_embeddings(dir.file("dim0.emb")), FormatError);
}

TEST_CASE("load_embeddings accepts zero rows") {
    smtest::TempDir dir;
    smtest::write_bytes(dir.file("empty.emb"), raw_emb1(16, 0, {}));
    const EmbeddingMatrix m = load_embeddings(dir.file("empty.emb"));
    CHECK(m.rows() == 0);
    CHECK(m.dim() == 16);
}

TEST_CASE("save/load round trip is byte identical") {
    smtest::TempDir dir;
    std::mt19937_64 rng(99);
    for (int iter = 0; iter < 40; ++iter) {
        const std::size_t rows = rng() % 20;
        const std::size_t dim = 1 + rng() % 33;
        const EmbeddingMatrix m = smtest::random_matrix(rows, dim, rng());
        const auto path = dir.file("rt.emb");
        save_embeddings(path, m);
        const std::string original = smtest::read_bytes(path);
        const EmbeddingMatrix loaded = load_embeddings(path);
        CHECK(loaded.rows() == rows);
        CHECK(loaded.dim() == dim);
        CHECK(loaded.data() == m.data());
        save_embeddings(path, loaded);
        CHECK(smtest::read_bytes(path) == original);
    }
}

TEST_CASE("l2_normalize scales the 3-4-5 row") {
    const EmbeddingMatrix m = EmbeddingMatrix::from_rows({{3.f, 4.f}});
    const UnitEmbeddingMatrix u = l2_normalize(m);
    CHECK(u.row(0)[0] == doctest::Approx(0.6).epsilon(1e-7));
    CHECK(u.row(0)[1] == doctest::Approx(0.8).epsilon(1e-7));
}

TEST_CASE("l2_normalize keeps unit rows and rejects zero rows") {
    const EmbeddingMatrix unit = EmbeddingMatrix::from_rows({{1.f, 0.f, 0.f}});
    const UnitEmbeddingMatrix u = l2_normalize(unit);
    CHECK(u.row(0)[0] == 1.f);
    CHECK(u.row(0)[1] == 0.f);
    CHECK(u.row(0)[2] == 0.f);

    const EmbeddingMatrix zero = EmbeddingMatrix::from_rows({{1.f, 0.f}, {0.f, 0.f}});
    CHECK_THROWS_WITH_AS(l2_normalize(zero), doctest::Contains("row 1"), DataError);
}

TEST_CASE("l2_normalize is idempotent and yields unit norms") {
    std::mt19937_64 rng(7);
    for (int iter = 0; iter < 20; ++iter) {
        const EmbeddingMatrix m = smtest::random_matrix(1 + rng() % 40, 1 + rng() % 64, rng());
        const UnitEmbeddingMatrix once = l2_normalize(m);
        const UnitEmbeddingMatrix twice = l2_normalize(once.matrix());
        for (std::size_t i = 0; i < once.rows(); ++i) {
            double sq = 0.0;
            for (std::size_t t = 0; t < once.dim(); ++t) {
                sq += static_cast<double>(once.row(i)[t]) * static_cast<double>(once.row(i)[t]);
                CHECK(std::fabs(static_cast<double>(once.row(i)[t]) - static_cast<double>(twice.row(i)[t])) <=
                      1e-6);
            }
            CHECK(std::fabs(std::sqrt(sq) - 1.0) <= 1e-4);
        }
    }
}

TEST_CASE("UnitEmbeddingMatrix validates the norm invariant") {
    CHECK_THROWS_AS(UnitEmbeddingMatrix(EmbeddingMatrix::from_rows({{0.5f, 0.5f}})), DataError);
    CHECK_NOTHROW(UnitEmbeddingMatrix(EmbeddingMatrix::from_rows({{1.f, 0.f}})));
}

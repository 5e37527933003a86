// Copyright 2026 The ERS Toolkit Authors
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
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ers {

/// Tolerance on the unit-norm invariant of a constructed Embedding.
inline constexpr double kUnitNormTolerance = 1e-6;
/// Vector norms below this are treated as numerically zero.
inline constexpr double kDegenerateNorm = 1e-9;

/// A unit-norm point on the hypersphere. The only way to build one is
/// through normalization, so every instance satisfies |v| = 1 and has
/// finite components.
class Embedding {
public:
    /// Scales `raw` to unit length. Throws InvalidArgument on empty or
    /// non-finite input and DegenerateError on the zero vector.
    static Embedding normalize(std::span<const double> raw);

    std::size_t dimension() const noexcept { return values_.size(); }
    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }

    friend bool operator==(const Embedding&, const Embedding&) = default;

private:
    explicit Embedding(std::vector<double> values) : values_(std::move(values)) {}

    std::vector<double> values_;
};

/// Free-function spelling of Embedding::normalize.
Embedding normalize(std::span<const double> raw);

/// Inner product with a fixed left-to-right summation order.
double dot(const Embedding& a, const Embedding& b);

/// Cosine similarity of two embeddings, clamped to [-1, 1].
double cosine_similarity(const Embedding& a, const Embedding& b);

/// Euclidean distance between unit vectors, sqrt(2 - 2 cos).
double chordal_distance(const Embedding& a, const Embedding& b);

/// Arithmetic mean of `set`, renormalized. Summation runs in list order.
Embedding mean_direction(std::span<const Embedding> set);

struct LabeledEmbedding {
    Embedding embedding;
    std::string item_id;
    std::string subject_id;
    std::optional<std::string> media_id;
};

/// The embedding as stored in a float32 file and read back: each component
/// rounded to float, then renormalized.
Embedding round_to_float(const Embedding& e);

/// Throws InvalidArgument if two records share an item_id or if the
/// dimensions are not uniform.
void check_dataset(std::span<const LabeledEmbedding> items);

/// Throws InvalidArgument unless a and b have equal dimension.
void require_same_dimension(std::size_t a, std::size_t b, const char* context);

} // namespace ers

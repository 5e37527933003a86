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

#include "ers/embedding.hpp"
#include "ers/score.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ers {

struct TemplateMember {
    Embedding embedding;
    ErsValue ers;
    std::optional<std::string> media_id;
};

/// A set of embeddings known to share one identity.
struct Template {
    std::string template_id;
    std::string subject_id;
    std::vector<TemplateMember> members;

    /// Throws InvalidArgument on an empty template or mixed dimensions.
    void validate() const;
};

/// How member ERS values turn into pooling weights. `uniform` ignores ERS
/// and is the plain average-pooling baseline.
struct WeightingStrategy {
    enum class Kind { uniform, identity, square, softmax, top_one, top_fraction };

    Kind kind = Kind::square;
    double fraction = 0.1; // top_fraction only, in (0, 1]

    static WeightingStrategy uniform() { return {Kind::uniform, 1.0}; }
    static WeightingStrategy identity() { return {Kind::identity, 1.0}; }
    static WeightingStrategy square() { return {Kind::square, 1.0}; }
    static WeightingStrategy softmax() { return {Kind::softmax, 1.0}; }
    static WeightingStrategy top_one() { return {Kind::top_one, 1.0}; }
    static WeightingStrategy top_fraction(double p) { return {Kind::top_fraction, p}; }

    friend bool operator==(const WeightingStrategy&, const WeightingStrategy&) = default;
};

/// "uniform", "identity", "square", "softmax", "top_one", "top_fraction:<p>".
std::string to_string(const WeightingStrategy& strategy);
WeightingStrategy parse_strategy(std::string_view text);

struct AggregateResult {
    Embedding embedding;
    double ers = 0.0; // mean capped member ERS
};

/// Per-member weights computed from capped ERS. top_one puts weight 1 on the
/// highest score (ties: smallest index); top_fraction(p) puts 1/k on the
/// k = ceil(p n) highest scores (at least one member).
std::vector<double> compute_weights(std::span<const ErsValue> ers_list, const WeightingStrategy& strategy);

/// Weighted mean of the member embeddings, normalized by the weight sum and
/// then projected back to unit length; ERS is the plain mean of capped
/// member scores.
AggregateResult aggregate(const Template& t, const WeightingStrategy& strategy);

/// Two-stage pooling: uniform average within each media group (members
/// without media_id form their own group), then `aggregate` across groups
/// with `strategy`, each group carrying its mean member ERS. Groups are
/// visited in order of first appearance.
AggregateResult media_pool(const Template& t, const WeightingStrategy& strategy);

} // namespace ers

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

#include <cstddef>
#include <optional>
#include <span>

namespace ers {

/// ERS gate used when none is configured.
inline constexpr double kDefaultGamma = 0.60;

/// Thresholds for the match decisions. All comparisons are inclusive.
struct DecisionConfig {
    double tau = 0.5;           // cosine similarity threshold
    double gamma = kDefaultGamma; // ERS threshold
    bool gate_gallery = false;  // apply gamma to gallery entries as well

    /// Throws InvalidArgument unless tau in [-1, 1] and gamma in [0, 1].
    void validate() const;
};

/// Result of an open-set search. `gallery_index` is 1-based and present
/// exactly when `matched` is true.
struct SearchOutcome {
    bool matched = false;
    std::optional<std::size_t> gallery_index;
    double best_similarity = -1.0;

    friend bool operator==(const SearchOutcome&, const SearchOutcome&) = default;
};

bool verify(const Embedding& f1, const Embedding& f2, const DecisionConfig& cfg);

/// verify() further requiring both capped ERS values to reach gamma.
bool verify_with_ers(const Embedding& f1, const Embedding& f2, const ErsValue& e1, const ErsValue& e2,
                     const DecisionConfig& cfg);

/// Best gallery match by cosine similarity; ties go to the smallest index.
/// `best_similarity` is reported even when the match is rejected by tau.
SearchOutcome identify(const Embedding& query, std::span<const Embedding> gallery,
                       const DecisionConfig& cfg);

/// identify() with the query gate. If cfg.gate_gallery is set, gallery
/// entries whose capped ERS is below gamma are removed before the argmax
/// (and `gallery_ers` is required); the returned index still refers to the
/// full gallery. A rejected query keeps its best_similarity for reporting.
SearchOutcome identify_with_ers(const Embedding& query, const ErsValue& query_ers,
                                std::span<const Embedding> gallery,
                                std::optional<std::span<const ErsValue>> gallery_ers,
                                const DecisionConfig& cfg);

} // namespace ers

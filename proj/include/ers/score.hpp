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

#include "ers/cluster.hpp"
#include "ers/embedding.hpp"

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ers {

/// Embedding recognizability score. `raw` is 1 - <f_ui, f> in [0, 2];
/// `capped` is min(raw, 1). Higher means more recognizable.
struct ErsValue {
    double capped = 1.0;
    double raw = 1.0;

    /// Builds both fields from a raw score.
    static ErsValue from_raw(double raw);

    friend bool operator==(const ErsValue&, const ErsValue&) = default;
};

ErsValue compute_ers(const Embedding& f, const Embedding& ui_centroid);
ErsValue compute_ers(const Embedding& f, const UiModel& ui);

/// Removes the component of f along the UI direction and renormalizes.
/// Throws DegenerateError when f is (anti)parallel to the centroid.
Embedding enhance_embedding(const Embedding& f, const UiModel& ui);
Embedding enhance_embedding(const Embedding& f, const Embedding& ui_centroid);

/// compute_ers over a corpus, in input order.
std::vector<std::pair<std::string, ErsValue>> batch_ers(std::span<const LabeledEmbedding> corpus,
                                                        const UiModel& ui, unsigned threads = 1);

} // namespace ers

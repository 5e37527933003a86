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

#include "ers/score.hpp"

#include "ers/error.hpp"
#include "ers/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace ers {

namespace {

constexpr double kParallelTolerance = 1e-9;

} // namespace

ErsValue ErsValue::from_raw(double raw)
{
    return {std::min(raw, 1.0), raw};
}

ErsValue compute_ers(const Embedding& f, const Embedding& ui_centroid)
{
    require_same_dimension(f.dimension(), ui_centroid.dimension(), "compute_ers");
    return ErsValue::from_raw(1.0 - cosine_similarity(ui_centroid, f));
}

ErsValue compute_ers(const Embedding& f, const UiModel& ui)
{
    return compute_ers(f, ui.centroid);
}

Embedding enhance_embedding(const Embedding& f, const Embedding& ui_centroid)
{
    require_same_dimension(f.dimension(), ui_centroid.dimension(), "enhance_embedding");
    const double along = dot(f, ui_centroid);
    if (std::abs(along) >= 1.0 - kParallelTolerance) {
        throw DegenerateError("enhance_embedding: embedding is parallel to the UI centroid");
    }
    const auto x = f.values();
    const auto u = ui_centroid.values();
    std::vector<double> residual(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        residual[i] = x[i] - along * u[i];
    }
    return Embedding::normalize(residual);
}

Embedding enhance_embedding(const Embedding& f, const UiModel& ui)
{
    return enhance_embedding(f, ui.centroid);
}

std::vector<std::pair<std::string, ErsValue>> batch_ers(std::span<const LabeledEmbedding> corpus,
                                                        const UiModel& ui, unsigned threads)
{
    std::vector<std::pair<std::string, ErsValue>> out(corpus.size());
    parallel_for(corpus.size(), threads, [&](std::size_t i) {
        out[i] = {corpus[i].item_id, compute_ers(corpus[i].embedding, ui)};
    });
    return out;
}

} // namespace ers

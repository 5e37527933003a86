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

#include "ers/decision.hpp"

#include "ers/error.hpp"

#include <fmt/format.h>

namespace ers {

void DecisionConfig::validate() const
{
    if (!(tau >= -1.0 && tau <= 1.0)) {
        throw InvalidArgument(fmt::format("tau {} outside [-1, 1]", tau));
    }
    if (!(gamma >= 0.0 && gamma <= 1.0)) {
        throw InvalidArgument(fmt::format("gamma {} outside [0, 1]", gamma));
    }
}

bool verify(const Embedding& f1, const Embedding& f2, const DecisionConfig& cfg)
{
    return cosine_similarity(f1, f2) >= cfg.tau;
}

bool verify_with_ers(const Embedding& f1, const Embedding& f2, const ErsValue& e1, const ErsValue& e2,
                     const DecisionConfig& cfg)
{
    const bool similar = verify(f1, f2, cfg);
    return similar && e1.capped >= cfg.gamma && e2.capped >= cfg.gamma;
}

namespace {

SearchOutcome search(const Embedding& query, std::span<const Embedding> gallery,
                     std::span<const ErsValue> gallery_ers, const DecisionConfig& cfg, bool gated)
{
    SearchOutcome out;
    std::optional<std::size_t> best;
    for (std::size_t j = 0; j < gallery.size(); ++j) {
        const double s = cosine_similarity(query, gallery[j]);
        if (gated && gallery_ers[j].capped < cfg.gamma) {
            continue;
        }
        if (!best || s > out.best_similarity) {
            best = j;
            out.best_similarity = s;
        }
    }
    if (best && out.best_similarity >= cfg.tau) {
        out.matched = true;
        out.gallery_index = *best + 1;
    }
    return out;
}

} // namespace

SearchOutcome identify(const Embedding& query, std::span<const Embedding> gallery,
                       const DecisionConfig& cfg)
{
    if (gallery.empty()) {
        throw InvalidArgument("identify: empty gallery");
    }
    return search(query, gallery, {}, cfg, false);
}

SearchOutcome identify_with_ers(const Embedding& query, const ErsValue& query_ers,
                                std::span<const Embedding> gallery,
                                std::optional<std::span<const ErsValue>> gallery_ers,
                                const DecisionConfig& cfg)
{
    if (gallery.empty()) {
        throw InvalidArgument("identify_with_ers: empty gallery");
    }
    if (cfg.gate_gallery) {
        if (!gallery_ers) {
            throw InvalidArgument("identify_with_ers: gallery gating requires gallery ERS values");
        }
        if (gallery_ers->size() != gallery.size()) {
            throw InvalidArgument("identify_with_ers: gallery ERS count does not match gallery size");
        }
    }
    auto out = search(query, gallery, gallery_ers.value_or(std::span<const ErsValue>{}), cfg,
                      cfg.gate_gallery);
    if (query_ers.capped < cfg.gamma) {
        out.matched = false;
        out.gallery_index.reset();
    }
    return out;
}

} // namespace ers

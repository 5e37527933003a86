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

#include "ers/aggregate.hpp"
#include "ers/cluster.hpp"
#include "ers/decision.hpp"
#include "ers/embedding.hpp"
#include "ers/metrics.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ers {

/// Membership of one template, by item_id.
struct TemplateSpec {
    std::string template_id;
    std::string subject_id;
    std::vector<std::string> item_ids;
};

/// Embeddings plus template definitions. Ids of items and templates share
/// one namespace when resolved by a pipeline.
struct Dataset {
    std::vector<LabeledEmbedding> items;
    std::vector<TemplateSpec> templates;
};

struct Pair {
    std::string a;
    std::string b;
    bool genuine = false;
};

struct PairProtocol {
    std::vector<Pair> pairs;
};

struct SearchEntry {
    std::string id;
    std::string subject_id;
};

/// Probes whose subject appears in the gallery are mated.
struct SearchProtocol {
    std::vector<SearchEntry> gallery;
    std::vector<SearchEntry> probes;
};

/// How protocol ids become scored vectors.
///  - single: ids are items, plain cosine score.
///  - single_gated: as single, scored kGatedScore unless both ERS >= gamma.
///  - template_pool: ids are templates (or items, as singleton templates)
///    pooled with `strategy`.
///  - template_gated: template_pool gated on the pooled ERS.
///  - enhanced_avg: members are ERS-enhanced, then uniformly averaged.
struct Pipeline {
    enum class Kind { single, single_gated, template_pool, template_gated, enhanced_avg };

    Kind kind = Kind::single;
    WeightingStrategy strategy = WeightingStrategy::square();
    bool media_pool = false;

    /// Kind names: single, single_gated, template, template_gated, enhanced_avg.
    static Pipeline parse(std::string_view kind, std::string_view strategy = "square", bool media_pool = false);
    std::string describe() const;
    bool gated() const;
    bool needs_ui() const;
};

EvalReport eval_verification(const Dataset& dataset, const PairProtocol& protocol, const Pipeline& pipeline,
                             const std::optional<UiModel>& ui, const DecisionConfig& cfg,
                             std::span<const double> far_targets, unsigned threads = 1);

/// Per-probe open-set results under a pipeline. Query gating (gated
/// pipelines) and gallery gating (cfg.gate_gallery) follow identify_with_ers.
std::vector<ProbeResult> score_search(const Dataset& dataset, const SearchProtocol& protocol,
                                      const Pipeline& pipeline, const std::optional<UiModel>& ui,
                                      const DecisionConfig& cfg, unsigned threads = 1);

EvalReport eval_search(const Dataset& dataset, const SearchProtocol& protocol, const Pipeline& pipeline,
                       const std::optional<UiModel>& ui, const DecisionConfig& cfg,
                       std::span<const double> fpir_targets, std::span<const std::size_t> ks,
                       unsigned threads = 1);

/// Resolved vector for an id under a pipeline, as used by the evaluators.
struct ResolvedEntry {
    Embedding embedding;
    ErsValue ers;
};

/// Resolves every id in `ids` (in order) under `pipeline`. Throws
/// InvalidArgument naming the first id that is neither an item nor a
/// template usable by the pipeline.
std::vector<ResolvedEntry> resolve_ids(const Dataset& dataset, std::span<const std::string> ids,
                                       const Pipeline& pipeline, const std::optional<UiModel>& ui,
                                       unsigned threads = 1);

} // namespace ers

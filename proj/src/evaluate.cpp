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

#include "ers/evaluate.hpp"

#include "ers/error.hpp"
#include "ers/parallel.hpp"
#include "ers/score.hpp"

#include <fmt/format.h>
#include <unordered_map>

namespace ers {

Pipeline Pipeline::parse(std::string_view kind, std::string_view strategy, bool media_pool)
{
    Pipeline p;
    p.strategy = parse_strategy(strategy);
    p.media_pool = media_pool;
    if (kind == "single") {
        p.kind = Kind::single;
    } else if (kind == "single_gated") {
        p.kind = Kind::single_gated;
    } else if (kind == "template") {
        p.kind = Kind::template_pool;
    } else if (kind == "template_gated") {
        p.kind = Kind::template_gated;
    } else if (kind == "enhanced_avg") {
        p.kind = Kind::enhanced_avg;
        p.strategy = WeightingStrategy::uniform();
    } else {
        throw InvalidArgument(fmt::format("unknown pipeline '{}'", kind));
    }
    return p;
}

std::string Pipeline::describe() const
{
    const char* pooling = media_pool ? ",media_pool" : "";
    switch (kind) {
    case Kind::single:
        return "single";
    case Kind::single_gated:
        return "single_gated";
    case Kind::template_pool:
        return fmt::format("template({}{})", to_string(strategy), pooling);
    case Kind::template_gated:
        return fmt::format("template_gated({}{})", to_string(strategy), pooling);
    case Kind::enhanced_avg:
        return fmt::format("enhanced_avg({})", media_pool ? "media_pool" : "uniform");
    }
    return "unknown";
}

bool Pipeline::gated() const
{
    return kind == Kind::single_gated || kind == Kind::template_gated;
}

bool Pipeline::needs_ui() const
{
    switch (kind) {
    case Kind::single:
        return false;
    case Kind::template_pool:
        return strategy.kind != WeightingStrategy::Kind::uniform;
    default:
        return true;
    }
}

namespace {

class Resolver {
public:
    Resolver(const Dataset& dataset, const Pipeline& pipeline, const std::optional<UiModel>& ui)
        : dataset_(dataset), pipeline_(pipeline), ui_(ui)
    {
        if (pipeline.needs_ui() && !ui) {
            throw InvalidArgument(fmt::format("pipeline {} requires a UI model", pipeline.describe()));
        }
        for (std::size_t i = 0; i < dataset.items.size(); ++i) {
            if (!items_.emplace(dataset.items[i].item_id, i).second) {
                throw InvalidArgument(fmt::format("duplicate item_id '{}'", dataset.items[i].item_id));
            }
        }
        for (std::size_t i = 0; i < dataset.templates.size(); ++i) {
            if (!templates_.emplace(dataset.templates[i].template_id, i).second) {
                throw InvalidArgument(
                    fmt::format("duplicate template_id '{}'", dataset.templates[i].template_id));
            }
        }
    }

    ResolvedEntry resolve(const std::string& id) const
    {
        using Kind = Pipeline::Kind;
        const bool single = pipeline_.kind == Kind::single || pipeline_.kind == Kind::single_gated;
        if (single) {
            const auto it = items_.find(id);
            if (it == items_.end()) {
                throw InvalidArgument(fmt::format("unresolvable item id '{}'", id));
            }
            const auto& e = dataset_.items[it->second].embedding;
            return {e, ers_of(e)};
        }

        Template t;
        if (const auto it = templates_.find(id); it != templates_.end()) {
            const auto& spec = dataset_.templates[it->second];
            t.template_id = spec.template_id;
            t.subject_id = spec.subject_id;
            for (const auto& member_id : spec.item_ids) {
                const auto m = items_.find(member_id);
                if (m == items_.end()) {
                    throw InvalidArgument(
                        fmt::format("template '{}' references unknown item id '{}'", id, member_id));
                }
                t.members.push_back(member(dataset_.items[m->second]));
            }
        } else if (const auto m = items_.find(id); m != items_.end()) {
            const auto& item = dataset_.items[m->second];
            t.template_id = item.item_id;
            t.subject_id = item.subject_id;
            t.members.push_back(member(item));
        } else {
            throw InvalidArgument(fmt::format("unresolvable template or item id '{}'", id));
        }

        const auto pooled = pipeline_.media_pool ? media_pool(t, pipeline_.strategy)
                                                 : aggregate(t, pipeline_.strategy);
        return {pooled.embedding, ErsValue{pooled.ers, pooled.ers}};
    }

private:
    ErsValue ers_of(const Embedding& e) const { return ui_ ? compute_ers(e, *ui_) : ErsValue{}; }

    TemplateMember member(const LabeledEmbedding& item) const
    {
        if (pipeline_.kind == Pipeline::Kind::enhanced_avg) {
            auto enhanced = enhance_embedding(item.embedding, *ui_);
            const auto e = ers_of(enhanced);
            return {std::move(enhanced), e, item.media_id};
        }
        return {item.embedding, ers_of(item.embedding), item.media_id};
    }

    const Dataset& dataset_;
    const Pipeline& pipeline_;
    const std::optional<UiModel>& ui_;
    std::unordered_map<std::string, std::size_t> items_;
    std::unordered_map<std::string, std::size_t> templates_;
};

// Distinct ids in order of first appearance and a lookup from id to slot.
struct IdTable {
    std::vector<std::string> ids;
    std::unordered_map<std::string, std::size_t> slot;

    std::size_t add(const std::string& id)
    {
        const auto [it, inserted] = slot.emplace(id, ids.size());
        if (inserted) {
            ids.push_back(id);
        }
        return it->second;
    }
};

std::vector<ResolvedEntry> resolve_all(const Resolver& resolver, std::span<const std::string> ids,
                                       unsigned threads)
{
    std::vector<std::optional<ResolvedEntry>> slots(ids.size());
    parallel_for(ids.size(), threads, [&](std::size_t i) { slots[i] = resolver.resolve(ids[i]); });
    std::vector<ResolvedEntry> out;
    out.reserve(ids.size());
    for (auto& s : slots) {
        out.push_back(std::move(*s));
    }
    return out;
}

} // namespace

std::vector<ResolvedEntry> resolve_ids(const Dataset& dataset, std::span<const std::string> ids,
                                       const Pipeline& pipeline, const std::optional<UiModel>& ui,
                                       unsigned threads)
{
    const Resolver resolver(dataset, pipeline, ui);
    return resolve_all(resolver, ids, threads);
}

EvalReport eval_verification(const Dataset& dataset, const PairProtocol& protocol, const Pipeline& pipeline,
                             const std::optional<UiModel>& ui, const DecisionConfig& cfg,
                             std::span<const double> far_targets, unsigned threads)
{
    cfg.validate();
    const Resolver resolver(dataset, pipeline, ui);
    IdTable table;
    std::vector<std::pair<std::size_t, std::size_t>> slots;
    slots.reserve(protocol.pairs.size());
    for (const auto& p : protocol.pairs) {
        const auto a = table.add(p.a);
        slots.emplace_back(a, table.add(p.b));
    }
    const auto resolved = resolve_all(resolver, table.ids, threads);

    const bool gated = pipeline.gated();
    std::vector<double> scores(protocol.pairs.size());
    parallel_for(scores.size(), threads, [&](std::size_t i) {
        const auto& a = resolved[slots[i].first];
        const auto& b = resolved[slots[i].second];
        const bool pass = !gated || (a.ers.capped >= cfg.gamma && b.ers.capped >= cfg.gamma);
        scores[i] = pass ? cosine_similarity(a.embedding, b.embedding) : kGatedScore;
    });

    std::vector<double> genuine;
    std::vector<double> impostor;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        (protocol.pairs[i].genuine ? genuine : impostor).push_back(scores[i]);
    }
    std::size_t gated_count = 0;
    for (double s : scores) {
        gated_count += s == kGatedScore ? 1 : 0;
    }

    EvalReport report;
    report.operating_points = roc_sweep(genuine, impostor, far_targets);
    report.metadata = fmt::format("verification pipeline={} gamma={} genuine={} impostor={} gated={}",
                                  pipeline.describe(), cfg.gamma, genuine.size(), impostor.size(), gated_count);
    return report;
}

std::vector<ProbeResult> score_search(const Dataset& dataset, const SearchProtocol& protocol,
                                      const Pipeline& pipeline, const std::optional<UiModel>& ui,
                                      const DecisionConfig& cfg, unsigned threads)
{
    cfg.validate();
    if (protocol.gallery.empty()) {
        throw InvalidArgument("search protocol has an empty gallery");
    }
    const Resolver resolver(dataset, pipeline, ui);

    std::unordered_map<std::string, std::size_t> mate_of;
    std::vector<std::string> gallery_ids;
    for (std::size_t j = 0; j < protocol.gallery.size(); ++j) {
        if (!mate_of.emplace(protocol.gallery[j].subject_id, j).second) {
            throw InvalidArgument(
                fmt::format("gallery subject '{}' appears more than once", protocol.gallery[j].subject_id));
        }
        gallery_ids.push_back(protocol.gallery[j].id);
    }
    std::vector<std::string> probe_ids;
    for (const auto& p : protocol.probes) {
        probe_ids.push_back(p.id);
    }
    const auto gallery = resolve_all(resolver, gallery_ids, threads);
    const auto probes = resolve_all(resolver, probe_ids, threads);

    const bool gated = pipeline.gated();
    std::vector<char> eligible(gallery.size(), 1);
    if (gated && cfg.gate_gallery) {
        for (std::size_t j = 0; j < gallery.size(); ++j) {
            eligible[j] = gallery[j].ers.capped >= cfg.gamma ? 1 : 0;
        }
    }

    std::vector<ProbeResult> out(probes.size());
    parallel_for(probes.size(), threads, [&](std::size_t i) {
        ProbeResult r;
        const auto mate = mate_of.find(protocol.probes[i].subject_id);
        r.mated = mate != mate_of.end();
        if (gated && probes[i].ers.capped < cfg.gamma) {
            out[i] = r;
            return;
        }
        std::vector<double> sims(gallery.size());
        std::optional<std::size_t> best;
        for (std::size_t j = 0; j < gallery.size(); ++j) {
            sims[j] = cosine_similarity(probes[i].embedding, gallery[j].embedding);
            if (eligible[j] && (!best || sims[j] > sims[*best])) {
                best = j;
            }
        }
        if (!best) {
            out[i] = r;
            return;
        }
        r.best_score = sims[*best];
        if (r.mated && eligible[mate->second]) {
            const std::size_t m = mate->second;
            std::size_t rank = 1;
            for (std::size_t j = 0; j < gallery.size(); ++j) {
                if (eligible[j] && (sims[j] > sims[m] || (sims[j] == sims[m] && j < m))) {
                    ++rank;
                }
            }
            r.mate_rank = rank;
        }
        out[i] = r;
    });
    return out;
}

EvalReport eval_search(const Dataset& dataset, const SearchProtocol& protocol, const Pipeline& pipeline,
                       const std::optional<UiModel>& ui, const DecisionConfig& cfg,
                       std::span<const double> fpir_targets, std::span<const std::size_t> ks, unsigned threads)
{
    const auto probes = score_search(dataset, protocol, pipeline, ui, cfg, threads);
    std::size_t mated = 0;
    for (const auto& p : probes) {
        mated += p.mated ? 1 : 0;
    }
    EvalReport report;
    report.identification_points = open_set_sweep(probes, fpir_targets);
    report.rank_accuracy = rank_accuracy(probes, ks);
    report.metadata = fmt::format("search pipeline={} gamma={} gate_gallery={} gallery={} mated={} non_mated={}",
                                  pipeline.describe(), cfg.gamma, cfg.gate_gallery ? 1 : 0,
                                  protocol.gallery.size(), mated, probes.size() - mated);
    return report;
}

} // namespace ers

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

#include "ers/synthetic.hpp"

#include "ers/error.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <set>

namespace ers {

namespace {

constexpr std::size_t kMeanRetries = 10000;

void require(bool ok, const char* what)
{
    if (!ok) {
        throw InvalidArgument(fmt::format("generator config: {}", what));
    }
}

std::string subject_name(std::size_t s)
{
    return fmt::format("id{:04}", s);
}

} // namespace

void GeneratorConfig::validate() const
{
    require(dimension >= 2, "dimension must be at least 2");
    require(num_identities >= 1, "num_identities must be at least 1");
    require(samples_per_identity >= 1, "samples_per_identity must be at least 1");
    require(corpus_identities >= 1, "corpus_identities must be at least 1");
    require(corpus_samples_per_identity >= 1, "corpus_samples_per_identity must be at least 1");
    require(ui_size >= 1, "ui_size must be at least 1");
    require(identity_spread > 0.0 && std::isfinite(identity_spread), "identity_spread must be positive");
    require(ui_spread > 0.0 && std::isfinite(ui_spread), "ui_spread must be positive");
    require(degradation_noise >= 0.0 && std::isfinite(degradation_noise), "degradation_noise must be >= 0");
    require(separation > -1.0 && separation <= 1.0, "separation must be in (-1, 1]");
    require(!degradation_levels.empty(), "degradation_levels must not be empty");
    require(std::is_sorted(degradation_levels.begin(), degradation_levels.end()),
            "degradation_levels must be sorted ascending");
    require(degradation_levels.front() >= 0.0 && degradation_levels.back() <= 1.0,
            "degradation_levels must lie in [0, 1]");
    require(degraded_fraction >= 0.0 && degraded_fraction <= 1.0, "degraded_fraction must be in [0, 1]");
    require(templates_per_identity >= 1, "templates_per_identity must be at least 1");
    require(template_clean + template_degraded >= 1, "templates need at least one member");
    require(gallery_fraction >= 0.0 && gallery_fraction <= 1.0, "gallery_fraction must be in [0, 1]");
}

Embedding generator_ui_mean(const GeneratorConfig& cfg)
{
    Rng rng(cfg.seed);
    return random_direction(rng, cfg.dimension);
}

std::vector<Embedding> gen_means(Rng& rng, std::size_t count, std::size_t dimension, double separation,
                                 std::span<const Embedding> avoid)
{
    std::vector<Embedding> means;
    means.reserve(count);
    auto separated = [&](const Embedding& c) {
        auto ok = [&](const Embedding& other) { return cosine_similarity(c, other) <= separation; };
        return std::all_of(avoid.begin(), avoid.end(), ok) && std::all_of(means.begin(), means.end(), ok);
    };
    for (std::size_t k = 0; k < count; ++k) {
        bool placed = false;
        for (std::size_t attempt = 0; attempt < kMeanRetries && !placed; ++attempt) {
            auto candidate = random_direction(rng, dimension);
            if (separated(candidate)) {
                means.push_back(std::move(candidate));
                placed = true;
            }
        }
        if (!placed) {
            throw InvalidArgument(fmt::format(
                "cannot place mean {} of {} with cosine <= {} in dimension {}", k + 1, count, separation,
                dimension));
        }
    }
    return means;
}

Embedding sample_around(const Embedding& mean, double spread, Rng& rng)
{
    const std::size_t d = mean.dimension();
    const double scale = spread / std::sqrt(static_cast<double>(d));
    std::vector<double> v(mean.values().begin(), mean.values().end());
    for (double& x : v) {
        x += scale * rng.normal();
    }
    return Embedding::normalize(v);
}

Embedding gen_degradation(const Embedding& emb, const Embedding& ui_mean, double t, double noise, Rng& rng)
{
    if (!(t >= 0.0 && t <= 1.0)) {
        throw InvalidArgument(fmt::format("gen_degradation: t = {} outside [0, 1]", t));
    }
    require_same_dimension(emb.dimension(), ui_mean.dimension(), "gen_degradation");
    const std::size_t d = emb.dimension();
    std::vector<double> v(d);
    for (std::size_t i = 0; i < d; ++i) {
        v[i] = (1.0 - t) * emb[i] + t * ui_mean[i];
    }
    if (noise > 0.0) {
        const double scale = noise / std::sqrt(static_cast<double>(d));
        for (double& x : v) {
            x += scale * rng.normal();
        }
    }
    double sum_sq = 0.0;
    for (double x : v) {
        sum_sq += x * x;
    }
    if (std::sqrt(sum_sq) < kDegenerateNorm) {
        throw DegenerateError("gen_degradation: mixture cancels to zero");
    }
    return Embedding::normalize(v);
}

namespace {

// Shared prefix of gen_identities and gen_benchmark.
struct World {
    Embedding ui_mean;
    std::vector<Embedding> means;
    std::vector<LabeledEmbedding> singles;
};

World draw_world(const GeneratorConfig& cfg, Rng& rng)
{
    cfg.validate();
    World w{random_direction(rng, cfg.dimension), {}, {}};
    const Embedding avoid[] = {w.ui_mean};
    w.means = gen_means(rng, cfg.num_identities, cfg.dimension, cfg.separation, avoid);
    for (std::size_t s = 0; s < cfg.num_identities; ++s) {
        for (std::size_t k = 0; k < cfg.samples_per_identity; ++k) {
            w.singles.push_back({sample_around(w.means[s], cfg.identity_spread, rng),
                                 fmt::format("p{:04}_{:03}", s, k), subject_name(s), std::nullopt});
        }
    }
    return w;
}

double pick_level(const GeneratorConfig& cfg, Rng& rng)
{
    return cfg.degradation_levels[rng.below(cfg.degradation_levels.size())];
}

} // namespace

IdentitySet gen_identities(const GeneratorConfig& cfg)
{
    Rng rng(cfg.seed);
    auto w = draw_world(cfg, rng);
    IdentitySet out;
    out.items = std::move(w.singles);
    for (std::size_t s = 0; s < w.means.size(); ++s) {
        out.means.emplace_back(subject_name(s), w.means[s]);
    }
    return out;
}

Benchmark gen_benchmark(const GeneratorConfig& cfg)
{
    Rng rng(cfg.seed);
    auto w = draw_world(cfg, rng);
    const std::size_t d = cfg.dimension;

    // Clustering corpus.
    std::vector<Embedding> avoid{w.ui_mean};
    avoid.insert(avoid.end(), w.means.begin(), w.means.end());
    const auto corpus_means = gen_means(rng, cfg.corpus_identities, d, cfg.separation, avoid);
    std::vector<LabeledEmbedding> corpus;
    for (std::size_t s = 0; s < cfg.corpus_identities; ++s) {
        for (std::size_t k = 0; k < cfg.corpus_samples_per_identity; ++k) {
            corpus.push_back({sample_around(corpus_means[s], cfg.identity_spread, rng),
                              fmt::format("c{:04}_{:03}", s, k), fmt::format("cid{:04}", s), std::nullopt});
        }
    }
    std::vector<std::string> ui_ids;
    std::vector<double> corpus_t(corpus.size(), 0.0);
    for (std::size_t k = 0; k < cfg.ui_size; ++k) {
        corpus.push_back(
            {sample_around(w.ui_mean, cfg.ui_spread, rng), fmt::format("u{:05}", k), "ui", std::nullopt});
        ui_ids.push_back(corpus.back().item_id);
        corpus_t.push_back(1.0);
    }

    // Degrade a fixed share of the single probes.
    std::vector<LabeledEmbedding> items = std::move(w.singles);
    std::vector<double> item_t(items.size(), 0.0);
    std::vector<std::size_t> order(items.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    rng.shuffle(order);
    const auto degraded = static_cast<std::size_t>(
        std::llround(cfg.degraded_fraction * static_cast<double>(items.size())));
    for (std::size_t r = 0; r < degraded; ++r) {
        const std::size_t i = order[r];
        const double t = pick_level(cfg, rng);
        items[i].embedding = gen_degradation(items[i].embedding, w.ui_mean, t, cfg.degradation_noise, rng);
        item_t[i] = t;
    }
    const std::size_t single_count = items.size();

    // Templates.
    std::vector<TemplateSpec> templates;
    for (std::size_t s = 0; s < cfg.num_identities; ++s) {
        for (std::size_t j = 0; j < cfg.templates_per_identity; ++j) {
            TemplateSpec spec{fmt::format("T{:04}_{}", s, j), subject_name(s), {}};
            const std::string video = fmt::format("v{:04}_{}", s, j);
            for (std::size_t k = 0; k < cfg.template_clean + cfg.template_degraded; ++k) {
                const std::string id = fmt::format("t{:04}_{}_{:02}", s, j, k);
                auto e = sample_around(w.means[s], cfg.identity_spread, rng);
                double t = 0.0;
                std::string media = "m" + id.substr(1);
                if (k >= cfg.template_clean) {
                    t = pick_level(cfg, rng);
                    e = gen_degradation(e, w.ui_mean, t, cfg.degradation_noise, rng);
                    media = video;
                }
                items.push_back({std::move(e), id, subject_name(s), media});
                item_t.push_back(t);
                spec.item_ids.push_back(id);
            }
            templates.push_back(std::move(spec));
        }
    }

    // Single-image pairs: every genuine pair, impostors exhaustive or sampled.
    PairProtocol pairs;
    for (std::size_t a = 0; a < single_count; ++a) {
        for (std::size_t b = a + 1; b < single_count; ++b) {
            const bool genuine = items[a].subject_id == items[b].subject_id;
            if (genuine || cfg.impostor_pairs == 0) {
                pairs.pairs.push_back({items[a].item_id, items[b].item_id, genuine});
            }
        }
    }
    if (cfg.impostor_pairs > 0 && single_count > 1) {
        std::set<std::pair<std::size_t, std::size_t>> chosen;
        std::size_t attempts = 0;
        const std::size_t budget = cfg.impostor_pairs * 100;
        while (chosen.size() < cfg.impostor_pairs && attempts++ < budget) {
            std::size_t a = rng.below(single_count);
            std::size_t b = rng.below(single_count);
            if (a == b || items[a].subject_id == items[b].subject_id) {
                continue;
            }
            if (a > b) {
                std::swap(a, b);
            }
            if (chosen.emplace(a, b).second) {
                pairs.pairs.push_back({items[a].item_id, items[b].item_id, false});
            }
        }
    }

    PairProtocol template_pairs;
    for (std::size_t a = 0; a < templates.size(); ++a) {
        for (std::size_t b = a + 1; b < templates.size(); ++b) {
            template_pairs.pairs.push_back({templates[a].template_id, templates[b].template_id,
                                            templates[a].subject_id == templates[b].subject_id});
        }
    }

    SearchProtocol search;
    const auto enrolled = static_cast<std::size_t>(
        std::llround(cfg.gallery_fraction * static_cast<double>(cfg.num_identities)));
    for (std::size_t s = 0; s < enrolled; ++s) {
        search.gallery.push_back({templates[s * cfg.templates_per_identity].template_id, subject_name(s)});
    }
    for (std::size_t i = 0; i < single_count; ++i) {
        search.probes.push_back({items[i].item_id, items[i].subject_id});
    }

    Benchmark bench{cfg, w.ui_mean, {}, std::move(corpus), std::move(ui_ids), {}, std::move(pairs),
                    std::move(template_pairs), std::move(search), {}};
    for (std::size_t s = 0; s < w.means.size(); ++s) {
        bench.identity_means.emplace_back(subject_name(s), w.means[s]);
    }
    bench.eval.items = std::move(items);
    bench.eval.templates = std::move(templates);

    if (cfg.encoding == Encoding::binary_f32) {
        bench.ui_mean = round_to_float(bench.ui_mean);
        for (auto& [id, m] : bench.identity_means) {
            m = round_to_float(m);
        }
        for (auto& item : bench.corpus) {
            item.embedding = round_to_float(item.embedding);
        }
        for (auto& item : bench.eval.items) {
            item.embedding = round_to_float(item.embedding);
        }
    }

    for (std::size_t i = 0; i < bench.corpus.size(); ++i) {
        const auto& item = bench.corpus[i];
        bench.truth.push_back(
            {item.item_id, item.subject_id, corpus_t[i], compute_ers(item.embedding, bench.ui_mean)});
    }
    for (std::size_t i = 0; i < bench.eval.items.size(); ++i) {
        const auto& item = bench.eval.items[i];
        bench.truth.push_back(
            {item.item_id, item.subject_id, item_t[i], compute_ers(item.embedding, bench.ui_mean)});
    }
    return bench;
}

} // namespace ers

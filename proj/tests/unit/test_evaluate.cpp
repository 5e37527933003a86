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

#include "ers/error.hpp"
#include "ers/evaluate.hpp"
#include "ers/score.hpp"
#include "ers/synthetic.hpp"
#include "oracles.hpp"
#include "support.hpp"

#include <algorithm>
#include <doctest.h>
#include <fmt/format.h>
#include <set>

using namespace ers;
using ers::test::vec;

namespace {

GeneratorConfig small_config(std::uint64_t seed)
{
    GeneratorConfig cfg;
    cfg.dimension = 32;
    cfg.num_identities = 20;
    cfg.samples_per_identity = 5;
    cfg.corpus_identities = 2;
    cfg.corpus_samples_per_identity = 2;
    cfg.ui_size = 10;
    cfg.seed = seed;
    return cfg;
}

UiModel ui_of(const Benchmark& b)
{
    return UiModel{b.ui_mean, 1, {}, "generator"};
}

DecisionConfig gamma_config(double gamma, bool gate_gallery = false)
{
    DecisionConfig c;
    c.gamma = gamma;
    c.gate_gallery = gate_gallery;
    return c;
}

bool same_points(const EvalReport& a, const EvalReport& b)
{
    if (a.operating_points.size() != b.operating_points.size()
        || a.identification_points.size() != b.identification_points.size()
        || a.rank_accuracy.size() != b.rank_accuracy.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.operating_points.size(); ++i) {
        const auto& x = a.operating_points[i];
        const auto& y = b.operating_points[i];
        if (x.threshold != y.threshold || x.achieved_far != y.achieved_far || x.frr != y.frr) {
            return false;
        }
    }
    for (std::size_t i = 0; i < a.identification_points.size(); ++i) {
        const auto& x = a.identification_points[i];
        const auto& y = b.identification_points[i];
        if (x.threshold != y.threshold || x.achieved_fpir != y.achieved_fpir || x.miss_rate != y.miss_rate) {
            return false;
        }
    }
    for (std::size_t i = 0; i < a.rank_accuracy.size(); ++i) {
        if (a.rank_accuracy[i].accuracy != b.rank_accuracy[i].accuracy) {
            return false;
        }
    }
    return true;
}

} // namespace

TEST_SUITE("evaluate")
{
    TEST_CASE("pipeline names")
    {
        CHECK(Pipeline::parse("single").describe() == "single");
        CHECK(Pipeline::parse("template", "identity", true).describe() == "template(identity,media_pool)");
        CHECK(Pipeline::parse("template_gated", "top_fraction:0.1").describe() == "template_gated(top_fraction:0.1)");
        CHECK(Pipeline::parse("enhanced_avg", "square").strategy == WeightingStrategy::uniform());
        CHECK_FALSE(Pipeline::parse("single").needs_ui());
        CHECK_FALSE(Pipeline::parse("template", "uniform").needs_ui());
        CHECK(Pipeline::parse("template", "square").needs_ui());
        CHECK(Pipeline::parse("single_gated").needs_ui());
        CHECK(Pipeline::parse("single_gated").gated());
        CHECK_FALSE(Pipeline::parse("enhanced_avg").gated());
        CHECK_THROWS_AS(Pipeline::parse("pairwise"), InvalidArgument);
    }

    TEST_CASE("separated identities verify perfectly")
    {
        auto cfg = small_config(3);
        cfg.identity_spread = 0.05;
        cfg.separation = 0.3;
        cfg.degraded_fraction = 0.0;
        const auto b = gen_benchmark(cfg);
        const std::vector<double> targets{1e-3, 0.01, 0.1};
        const auto r = eval_verification(b.eval, b.pairs, Pipeline::parse("single"), std::nullopt, {}, targets);
        for (const auto& p : r.operating_points) {
            if (p.attainable) {
                CHECK(p.frr == 0.0);
            }
        }
    }

    TEST_CASE("without degradation the gate never fires")
    {
        auto cfg = small_config(4);
        cfg.dimension = 128;
        cfg.identity_spread = 0.2;
        cfg.degraded_fraction = 0.0;
        const auto b = gen_benchmark(cfg);
        const std::vector<double> targets{1e-3, 0.01, 0.1};
        const auto plain = eval_verification(b.eval, b.pairs, Pipeline::parse("single"), ui_of(b), {}, targets);
        const auto gated =
            eval_verification(b.eval, b.pairs, Pipeline::parse("single_gated"), ui_of(b), {}, targets);
        CHECK(same_points(plain, gated));
        CHECK(gated.metadata.find("gated=0") != std::string::npos);
    }

    TEST_CASE("gating never raises the false accept count at a fixed threshold")
    {
        const auto b = gen_benchmark(small_config(5));
        const auto ui = ui_of(b);
        const auto single = Pipeline::parse("single");
        const auto gated = Pipeline::parse("single_gated");
        std::vector<std::string> ids;
        for (const auto& item : b.eval.items) {
            ids.push_back(item.item_id);
        }
        const auto plain = resolve_ids(b.eval, ids, single, ui);
        const auto scored = resolve_ids(b.eval, ids, gated, ui);
        for (std::size_t i = 0; i < ids.size(); ++i) {
            CHECK(plain[i].embedding == scored[i].embedding);
            CHECK(scored[i].ers == compute_ers(b.eval.items[i].embedding, ui));
        }
    }

    TEST_CASE("search agrees with the exhaustive reference")
    {
        for (std::uint64_t seed : {6u, 7u, 8u}) {
            auto cfg = small_config(seed);
            cfg.templates_per_identity = 1;
            const auto b = gen_benchmark(cfg);
            const auto ui = ui_of(b);
            const std::vector<double> targets{0.01, 0.05, 0.1, 0.3};
            const std::vector<std::size_t> ks{1, 2, 5};
            for (const char* kind : {"single", "single_gated"}) {
                for (bool gate_gallery : {false, true}) {
                    // Gallery of single items so the reference needs no pooling.
                    SearchProtocol protocol;
                    std::set<std::string> enrolled;
                    oracle::SearchCase c;
                    for (const auto& item : b.eval.items) {
                        if (item.item_id[0] != 'p' || enrolled.count(item.subject_id)
                            || enrolled.size() == 10) {
                            continue;
                        }
                        enrolled.insert(item.subject_id);
                        protocol.gallery.push_back({item.item_id, item.subject_id});
                        c.gallery.push_back(item.embedding);
                        c.gallery_ers.push_back(compute_ers(item.embedding, ui));
                        c.gallery_subjects.push_back(item.subject_id);
                    }
                    for (const auto& item : b.eval.items) {
                        if (item.item_id[0] != 'p') {
                            continue;
                        }
                        protocol.probes.push_back({item.item_id, item.subject_id});
                        c.probes.push_back(item.embedding);
                        c.probe_ers.push_back(compute_ers(item.embedding, ui));
                        c.probe_subjects.push_back(item.subject_id);
                    }
                    const auto pipeline = Pipeline::parse(kind);
                    const auto cfg_d = gamma_config(kDefaultGamma, gate_gallery);
                    const auto probes = score_search(b.eval, protocol, pipeline, ui, cfg_d);
                    const auto expected = oracle::search_scan(c, pipeline.gated(), kDefaultGamma, gate_gallery);
                    REQUIRE(probes.size() == expected.size());
                    for (std::size_t i = 0; i < probes.size(); ++i) {
                        CHECK(probes[i].mated == expected[i].mated);
                        CHECK(probes[i].best_score == expected[i].best_score);
                        CHECK(probes[i].mate_rank == expected[i].mate_rank);
                    }
                    const auto report = eval_search(b.eval, protocol, pipeline, ui, cfg_d, targets, ks);
                    EvalReport want;
                    want.identification_points = oracle::open_set_scan(expected, targets);
                    want.rank_accuracy = oracle::rank_scan(expected, ks);
                    CHECK(same_points(report, want));
                }
            }
        }
    }

    TEST_CASE("orthogonal gallery gives perfect rank-1")
    {
        Dataset ds;
        SearchProtocol protocol;
        for (int i = 0; i < 4; ++i) {
            std::vector<double> v(6, 0.0);
            v[i] = 1.0;
            ds.items.push_back({Embedding::normalize(v), fmt::format("g{}", i), fmt::format("s{}", i), std::nullopt});
            protocol.gallery.push_back({fmt::format("g{}", i), fmt::format("s{}", i)});
            protocol.probes.push_back({fmt::format("g{}", i), fmt::format("s{}", i)});
        }
        ds.items.push_back({vec({0, 0, 0, 0, 1, 0}), "stranger", "x", std::nullopt});
        protocol.probes.push_back({"stranger", "x"});
        const std::vector<double> targets{0.5};
        const std::vector<std::size_t> ks{1};
        const auto r = eval_search(ds, protocol, Pipeline::parse("single"), std::nullopt, {}, targets, ks);
        CHECK(r.rank_accuracy[0].accuracy == std::optional<double>(1.0));
        CHECK(r.identification_points[0].miss_rate == std::optional<double>(0.0));

        SearchProtocol strangers{protocol.gallery, {{"stranger", "x"}}};
        const auto u = eval_search(ds, strangers, Pipeline::parse("single"), std::nullopt, {}, targets, ks);
        CHECK_FALSE(u.identification_points[0].miss_rate);
        CHECK_FALSE(u.rank_accuracy[0].accuracy);

        SearchProtocol no_strangers{protocol.gallery, {{"g0", "s0"}}};
        CHECK_THROWS_AS(eval_search(ds, no_strangers, Pipeline::parse("single"), std::nullopt, {}, targets, ks),
                        InvalidArgument);
        SearchProtocol twice{{{"g0", "s0"}, {"g1", "s0"}}, protocol.probes};
        CHECK_THROWS_AS(score_search(ds, twice, Pipeline::parse("single"), std::nullopt, {}), InvalidArgument);
    }

    TEST_CASE("resolution errors name the id")
    {
        const auto b = gen_benchmark(small_config(9));
        PairProtocol bad{{{"p0000_000", "nobody", false}}};
        const std::vector<double> targets{0.1};
        try {
            eval_verification(b.eval, bad, Pipeline::parse("single"), std::nullopt, {}, targets);
            FAIL("expected an error");
        } catch (const InvalidArgument& e) {
            CHECK(std::string(e.what()).find("nobody") != std::string::npos);
        }
        CHECK_THROWS_AS(eval_verification(b.eval, b.pairs, Pipeline::parse("single_gated"), std::nullopt, {},
                                          targets),
                        InvalidArgument);
    }

    TEST_CASE("template pipelines pool members")
    {
        const auto b = gen_benchmark(small_config(10));
        const auto ui = ui_of(b);
        const auto& spec = b.eval.templates.front();
        std::vector<std::string> ids{spec.template_id, spec.item_ids.front()};

        Template t{spec.template_id, spec.subject_id, {}};
        Template enhanced = t;
        for (const auto& id : spec.item_ids) {
            const auto it = std::find_if(b.eval.items.begin(), b.eval.items.end(),
                                         [&](const auto& x) { return x.item_id == id; });
            t.members.push_back({it->embedding, compute_ers(it->embedding, ui), it->media_id});
            const auto v = enhance_embedding(it->embedding, ui);
            enhanced.members.push_back({v, compute_ers(v, ui), it->media_id});
        }

        const auto sq = resolve_ids(b.eval, ids, Pipeline::parse("template", "square"), ui);
        CHECK(sq[0].embedding == aggregate(t, WeightingStrategy::square()).embedding);
        CHECK(sq[0].ers.capped == aggregate(t, WeightingStrategy::square()).ers);
        const Template lone{spec.item_ids.front(), spec.subject_id, {t.members.front()}};
        CHECK(sq[1].embedding == aggregate(lone, WeightingStrategy::square()).embedding);

        const auto mp = resolve_ids(b.eval, ids, Pipeline::parse("template", "identity", true), ui);
        CHECK(mp[0].embedding == media_pool(t, WeightingStrategy::identity()).embedding);

        const auto en = resolve_ids(b.eval, ids, Pipeline::parse("enhanced_avg"), ui);
        CHECK(en[0].embedding == aggregate(enhanced, WeightingStrategy::uniform()).embedding);

        const auto avg = resolve_ids(b.eval, ids, Pipeline::parse("template", "uniform"), std::nullopt);
        CHECK(avg[0].embedding == aggregate(t, WeightingStrategy::uniform()).embedding);
    }

    TEST_CASE("reports do not depend on the thread count")
    {
        const auto b = gen_benchmark(small_config(11));
        const auto ui = ui_of(b);
        const std::vector<double> targets{1e-3, 0.01, 0.1};
        const std::vector<std::size_t> ks{1, 5};
        for (const char* kind : {"single", "single_gated", "template_gated", "enhanced_avg"}) {
            const auto p = Pipeline::parse(kind, "square");
            const auto& pairs = p.kind == Pipeline::Kind::single || p.kind == Pipeline::Kind::single_gated
                ? b.pairs
                : b.template_pairs;
            const auto one = eval_verification(b.eval, pairs, p, ui, {}, targets, 1);
            const auto four = eval_verification(b.eval, pairs, p, ui, {}, targets, 4);
            CHECK(format_report_csv(one) == format_report_csv(four));
            CHECK(one.metadata == four.metadata);
            if (&pairs == &b.pairs) {
                continue;
            }
            const auto s1 = eval_search(b.eval, b.search, p, ui, gamma_config(0.6, true), targets, ks, 1);
            const auto s4 = eval_search(b.eval, b.search, p, ui, gamma_config(0.6, true), targets, ks, 4);
            CHECK(format_report_csv(s1) == format_report_csv(s4));
        }
    }
}

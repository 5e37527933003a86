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

#include "ers/cluster.hpp"
#include "ers/error.hpp"
#include "ers/random.hpp"
#include "ers/score.hpp"
#include "ers/synthetic.hpp"
#include "support.hpp"

#include <cmath>
#include <doctest.h>

using namespace ers;
using ers::test::vec;

namespace {

UiModel model(const Embedding& e)
{
    return UiModel{e, 1, {}, ""};
}

// Householder reflection: preserves all inner products.
Embedding reflect(const Embedding& f, const Embedding& v)
{
    const double p = dot(f, v);
    std::vector<double> out(f.dimension());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = f[i] - 2.0 * p * v[i];
    }
    return Embedding::normalize(out);
}

} // namespace

TEST_SUITE("score")
{
    TEST_CASE("ERS at reference geometries")
    {
        const auto ui = model(vec({1, 0, 0}));
        CHECK(compute_ers(vec({1, 0, 0}), ui) == ErsValue{0.0, 0.0});
        CHECK(compute_ers(vec({0, 1, 0}), ui) == ErsValue{1.0, 1.0});
        CHECK(compute_ers(vec({-1, 0, 0}), ui) == ErsValue{1.0, 2.0});
        const auto e = compute_ers(vec({0.4, std::sqrt(0.84), 0}), ui);
        CHECK(e.capped == doctest::Approx(0.6).epsilon(1e-9));
        CHECK(e.raw == e.capped);
        CHECK(ErsValue::from_raw(1.3) == ErsValue{1.0, 1.3});
        CHECK_THROWS_AS(compute_ers(vec({1, 0}), ui), InvalidArgument);
    }

    TEST_CASE("enhancement removes the UI component")
    {
        const auto ui = model(vec({1, 0, 0}));
        const auto same = enhance_embedding(vec({0, 0.6, 0.8}), ui);
        CHECK(same[0] == 0.0);
        CHECK(same[1] == doctest::Approx(0.6).epsilon(1e-15));
        CHECK(same[2] == doctest::Approx(0.8).epsilon(1e-15));
        const auto v = enhance_embedding(vec({0.6, 0.8, 0}), ui);
        CHECK(v[0] == 0.0);
        CHECK(v[1] == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(v[2] == 0.0);
        CHECK_THROWS_AS(enhance_embedding(vec({1, 0, 0}), ui), DegenerateError);
        CHECK_THROWS_AS(enhance_embedding(vec({-1, 0, 0}), ui), DegenerateError);
        CHECK_THROWS_AS(enhance_embedding(vec({1, 0}), ui), InvalidArgument);
    }

    TEST_CASE("batch scoring")
    {
        const auto ui = model(vec({0.2, 0.3, -0.9}));
        CHECK(batch_ers(std::vector<LabeledEmbedding>{}, ui).empty());
        const std::vector<LabeledEmbedding> only{test::item("u", ui.centroid)};
        const auto rows = batch_ers(only, ui);
        REQUIRE(rows.size() == 1);
        CHECK(rows[0].first == "u");
        CHECK(rows[0].second.capped == doctest::Approx(0.0).epsilon(1e-15));

        Rng rng(4);
        std::vector<LabeledEmbedding> many;
        for (int i = 0; i < 257; ++i) {
            many.push_back(test::item("i" + std::to_string(i), random_direction(rng, 3)));
        }
        const auto serial = batch_ers(many, ui, 1);
        CHECK(batch_ers(many, ui, 4) == serial);
        for (std::size_t i = 0; i < many.size(); ++i) {
            CHECK(serial[i].first == many[i].item_id);
            CHECK(serial[i].second == compute_ers(many[i].embedding, ui));
        }
    }

    TEST_CASE("ERS falls along a degradation trajectory")
    {
        Rng rng(9);
        for (int trial = 0; trial < 50; ++trial) {
            const auto ui = random_direction(rng, 24);
            const auto f = random_direction(rng, 24);
            double previous = 2.0;
            for (int step = 0; step <= 20; ++step) {
                const double t = step / 20.0;
                const auto g = gen_degradation(f, ui, t, 0.0, rng);
                const double e = compute_ers(g, ui).raw;
                CHECK(e <= previous + 1e-12);
                previous = e;
            }
            CHECK(compute_ers(gen_degradation(f, ui, 0.8, 0.0, rng), ui).capped
                  < compute_ers(gen_degradation(f, ui, 0.2, 0.0, rng), ui).capped);
        }
    }

    TEST_CASE("property: ranges, enhancement and rotation invariance")
    {
        Rng rng(10);
        for (int trial = 0; trial < 1000; ++trial) {
            const std::size_t d = 2 + rng.below(30);
            const auto ui = model(random_direction(rng, d));
            const auto f = random_direction(rng, d);
            const auto e = compute_ers(f, ui);
            CHECK(e.capped >= 0.0);
            CHECK(e.capped <= 1.0);
            CHECK(e.raw >= 0.0);
            CHECK(e.raw <= 2.0);
            CHECK(e.capped == std::min(e.raw, 1.0));

            const auto v = enhance_embedding(f, ui);
            CHECK(std::abs(compute_ers(v, ui).raw - 1.0) <= 1e-9);
            const auto vv = enhance_embedding(v, ui);
            for (std::size_t i = 0; i < d; ++i) {
                CHECK(std::abs(vv[i] - v[i]) <= 1e-9);
            }

            const auto axis = random_direction(rng, d);
            const auto rotated = compute_ers(reflect(f, axis), model(reflect(ui.centroid, axis)));
            CHECK(std::abs(rotated.raw - e.raw) <= 1e-9);
        }
    }
}

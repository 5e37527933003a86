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

#include "ers/embedding.hpp"
#include "ers/error.hpp"
#include "ers/random.hpp"
#include "support.hpp"

#include <cmath>
#include <doctest.h>

using namespace ers;
using ers::test::vec;

TEST_SUITE("embedding")
{
    TEST_CASE("normalize scales to unit length")
    {
        const auto e = vec({3, 4});
        CHECK(e[0] == doctest::Approx(0.6).epsilon(1e-12));
        CHECK(e[1] == doctest::Approx(0.8).epsilon(1e-12));
        CHECK(vec({1, 0, 0}) == vec({1, 0, 0}));
        CHECK(vec({1, 0, 0})[0] == 1.0);
    }

    TEST_CASE("normalize rejects degenerate and non-finite input")
    {
        CHECK_THROWS_AS(vec({0, 0}), DegenerateError);
        CHECK_THROWS_AS(Embedding::normalize(std::vector<double>{}), InvalidArgument);
        CHECK_THROWS_AS(vec({1, NAN}), InvalidArgument);
        CHECK_THROWS_AS(vec({INFINITY, 1}), InvalidArgument);
    }

    TEST_CASE("normalize survives extreme magnitudes")
    {
        const auto big = vec({3e300, 4e300});
        CHECK(big[0] == doctest::Approx(0.6));
        const auto small = vec({3e-300, 4e-300});
        CHECK(small[1] == doctest::Approx(0.8));
    }

    TEST_CASE("cosine similarity of identical, orthogonal and antipodal vectors")
    {
        const auto a = vec({1, 2, 3});
        CHECK(cosine_similarity(a, a) == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(cosine_similarity(vec({1, 0}), vec({0, 1})) == 0.0);
        CHECK(cosine_similarity(vec({1, 2, 3}), vec({-1, -2, -3})) == doctest::Approx(-1.0).epsilon(1e-15));
        CHECK_THROWS_AS(cosine_similarity(vec({1, 0}), vec({1, 0, 0})), InvalidArgument);
    }

    TEST_CASE("chordal distance of identical, orthogonal and antipodal vectors")
    {
        const auto a = vec({0.3, -0.2, 0.9});
        CHECK(chordal_distance(a, a) == 0.0);
        CHECK(chordal_distance(vec({1, 0}), vec({0, 1})) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
        CHECK(chordal_distance(vec({1, 0}), vec({-1, 0})) == 2.0);
        CHECK_THROWS_AS(chordal_distance(vec({1, 0}), vec({1, 0, 0})), InvalidArgument);
    }

    TEST_CASE("mean direction")
    {
        CHECK(mean_direction(std::vector{vec({1, 0})}) == vec({1, 0}));
        const auto m = mean_direction(std::vector{vec({1, 0}), vec({0, 1})});
        CHECK(m[0] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
        CHECK(m[1] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
        CHECK_THROWS_AS(mean_direction(std::vector{vec({1, 0}), vec({-1, 0})}), DegenerateError);
        CHECK_THROWS_AS(mean_direction(std::vector<Embedding>{}), InvalidArgument);
        CHECK_THROWS_AS(mean_direction(std::vector{vec({1, 0}), vec({1, 0, 0})}), InvalidArgument);
    }

    TEST_CASE("dataset checks")
    {
        std::vector<LabeledEmbedding> ok{test::item("a", vec({1, 0})), test::item("b", vec({0, 1}))};
        CHECK_NOTHROW(check_dataset(ok));
        auto dup = ok;
        dup[1].item_id = "a";
        CHECK_THROWS_AS(check_dataset(dup), InvalidArgument);
        auto mixed = ok;
        mixed[1].embedding = vec({0, 1, 0});
        CHECK_THROWS_AS(check_dataset(mixed), InvalidArgument);
    }

    TEST_CASE("round_to_float is a fixed point of float storage")
    {
        Rng rng(5);
        for (int trial = 0; trial < 200; ++trial) {
            const auto q = round_to_float(random_direction(rng, 17));
            std::vector<double> stored;
            for (double x : q.values()) {
                stored.push_back(static_cast<float>(x));
            }
            CHECK(Embedding::normalize(stored) == q);
        }
    }

    TEST_CASE("property: geometric identities on random pairs")
    {
        Rng rng(11);
        for (int trial = 0; trial < 1000; ++trial) {
            const std::size_t d = 1 + rng.below(40);
            const auto a = random_direction(rng, d);
            const auto b = random_direction(rng, d);
            double norm = 0.0;
            for (double x : a.values()) {
                norm += x * x;
            }
            CHECK(std::abs(std::sqrt(norm) - 1.0) <= kUnitNormTolerance);
            const double c = cosine_similarity(a, b);
            const double dist = chordal_distance(a, b);
            CHECK(c >= -1.0);
            CHECK(c <= 1.0);
            CHECK(c == cosine_similarity(b, a));
            CHECK(dist >= 0.0);
            CHECK(dist <= 2.0);
            CHECK(std::abs(dist * dist - (2.0 - 2.0 * c)) <= 1e-9);
            CHECK(cosine_similarity(a, a) == doctest::Approx(1.0).epsilon(1e-15));
        }
    }

    TEST_CASE("property: mean direction ignores order and duplication")
    {
        Rng rng(12);
        for (int trial = 0; trial < 200; ++trial) {
            const std::size_t d = 2 + rng.below(20);
            const std::size_t n = 1 + rng.below(8);
            std::vector<Embedding> set;
            for (std::size_t i = 0; i < n; ++i) {
                set.push_back(random_direction(rng, d));
            }
            const auto m = mean_direction(set);
            auto shuffled = set;
            rng.shuffle(shuffled);
            auto doubled = set;
            doubled.insert(doubled.end(), set.begin(), set.end());
            for (const auto& other : {mean_direction(shuffled), mean_direction(doubled)}) {
                for (std::size_t i = 0; i < d; ++i) {
                    CHECK(std::abs(other[i] - m[i]) <= 1e-12);
                }
            }
        }
    }
}

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
#include "ers/metrics.hpp"
#include "ers/random.hpp"
#include "oracles.hpp"

#include <cmath>
#include <doctest.h>

using namespace ers;

namespace {

bool same(const OperatingPoint& a, const OperatingPoint& b)
{
    return a.far_target == b.far_target && a.threshold == b.threshold && a.achieved_far == b.achieved_far
        && a.frr == b.frr && a.attainable == b.attainable;
}

bool same(const IdentificationPoint& a, const IdentificationPoint& b)
{
    return a.fpir_target == b.fpir_target && a.threshold == b.threshold && a.achieved_fpir == b.achieved_fpir
        && a.miss_rate == b.miss_rate && a.attainable == b.attainable;
}

// Scores on a coarse grid so that ties are common, with some gated entries.
std::vector<double> scores(Rng& rng, std::size_t n, double shift)
{
    std::vector<double> out;
    for (std::size_t i = 0; i < n; ++i) {
        if (rng.below(10) == 0) {
            out.push_back(kGatedScore);
            continue;
        }
        const double s = std::round((std::clamp(rng.normal() * 0.3 + shift, -1.0, 1.0)) * 200.0) / 200.0;
        out.push_back(s);
    }
    return out;
}

} // namespace

TEST_SUITE("metrics")
{
    TEST_CASE("perfect separation gives zero FRR")
    {
        const std::vector<double> genuine(50, 0.9);
        const std::vector<double> impostor(500, 0.1);
        const std::vector<double> targets{0.01};
        const auto p = roc_sweep(genuine, impostor, targets);
        REQUIRE(p.size() == 1);
        CHECK(p[0].frr == 0.0);
        CHECK(p[0].achieved_far == 0.0);
        CHECK(p[0].attainable);
        CHECK(p[0].threshold > 0.1);
        CHECK(p[0].threshold <= 0.9);
    }

    TEST_CASE("identical distributions give chance behavior")
    {
        Rng rng(41);
        std::vector<double> genuine;
        std::vector<double> impostor;
        for (int i = 0; i < 20000; ++i) {
            genuine.push_back(2.0 * rng.uniform() - 1.0);
            impostor.push_back(2.0 * rng.uniform() - 1.0);
        }
        const std::vector<double> targets{0.05, 0.1, 0.3, 0.5};
        for (const auto& p : roc_sweep(genuine, impostor, targets)) {
            CHECK(p.achieved_far <= p.far_target);
            CHECK(p.frr == doctest::Approx(1.0 - p.far_target).epsilon(0.03));
        }
    }

    TEST_CASE("unattainable targets are flagged, not rejected")
    {
        const std::vector<double> genuine{0.9, 0.2};
        const std::vector<double> impostor{0.5, 0.1, 0.3};
        const std::vector<double> targets{0.1, 0.34};
        const auto p = roc_sweep(genuine, impostor, targets);
        CHECK_FALSE(p[0].attainable);
        CHECK(p[0].achieved_far == 0.0);
        CHECK(p[0].threshold > 0.5);
        CHECK(p[0].frr == 0.5);
        CHECK(p[1].attainable);
        CHECK(p[1].threshold == 0.5);
        CHECK(p[1].achieved_far == doctest::Approx(1.0 / 3.0));
        CHECK(p[1].frr == 0.5);
    }

    TEST_CASE("invalid sweep input")
    {
        const std::vector<double> some{0.5};
        const std::vector<double> none;
        const std::vector<double> ok{0.1};
        CHECK_THROWS_AS(roc_sweep(none, some, ok), InvalidArgument);
        CHECK_THROWS_AS(roc_sweep(some, none, ok), InvalidArgument);
        for (double bad : {0.0, 1.0, -0.1, 1.5}) {
            const std::vector<double> t{bad};
            CHECK_THROWS_AS(roc_sweep(some, some, t), InvalidArgument);
        }
    }

    TEST_CASE("gated scores never pass any threshold")
    {
        const std::vector<double> genuine{kGatedScore, kGatedScore, 0.7};
        const std::vector<double> impostor{kGatedScore, kGatedScore, kGatedScore, -1.0};
        const std::vector<double> targets{0.2, 0.5};
        const auto p = roc_sweep(genuine, impostor, targets);
        CHECK(p[0].threshold == 0.7);
        CHECK(p[0].achieved_far == 0.0);
        CHECK(p[0].frr == doctest::Approx(2.0 / 3.0));
        CHECK(p[1].threshold == -1.0);
        CHECK(p[1].achieved_far == 0.25);
        CHECK(p[1].frr == doctest::Approx(2.0 / 3.0));
    }

    TEST_CASE("sweep equals the exhaustive threshold scan")
    {
        Rng rng(42);
        const auto genuine = scores(rng, 200, 0.6);
        const auto impostor = scores(rng, 2000, 0.0);
        const std::vector<double> targets{1e-4, 5e-4, 1e-3, 0.01, 0.05, 0.1, 0.5, 0.9};
        const auto got = roc_sweep(genuine, impostor, targets);
        const auto want = oracle::roc_scan(genuine, impostor, targets);
        REQUIRE(got.size() == want.size());
        for (std::size_t i = 0; i < got.size(); ++i) {
            CHECK(same(got[i], want[i]));
        }
    }

    TEST_CASE("property: sweep agrees with the scan and FRR is monotone")
    {
        Rng rng(43);
        for (int trial = 0; trial < 200; ++trial) {
            const auto genuine = scores(rng, 1 + rng.below(60), 0.5);
            const auto impostor = scores(rng, 1 + rng.below(300), 0.0);
            std::vector<double> targets;
            for (int k = 0; k < 6; ++k) {
                targets.push_back(0.001 + 0.998 * rng.uniform());
            }
            std::sort(targets.begin(), targets.end());
            const auto got = roc_sweep(genuine, impostor, targets);
            const auto want = oracle::roc_scan(genuine, impostor, targets);
            for (std::size_t i = 0; i < got.size(); ++i) {
                CHECK(same(got[i], want[i]));
                CHECK(got[i].achieved_far <= got[i].far_target);
                if (i > 0) {
                    CHECK(got[i].frr <= got[i - 1].frr);
                }
            }
        }
    }

    TEST_CASE("open-set sweep and rank accuracy")
    {
        std::vector<ProbeResult> probes{{true, 0.9, 1}, {true, 0.4, 1}, {true, 0.8, 2}, {true, kGatedScore, {}},
                                        {false, 0.5, {}}, {false, 0.3, {}}, {false, kGatedScore, {}},
                                        {false, 0.2, {}}};
        const std::vector<double> targets{0.25, 0.5};
        const auto p = open_set_sweep(probes, targets);
        CHECK(p[0].threshold == 0.4);
        CHECK(p[0].achieved_fpir == 0.25);
        CHECK(p[0].miss_rate == std::optional<double>(0.5));
        CHECK(p[1].threshold == 0.3);
        CHECK(p[1].miss_rate == std::optional<double>(0.5));
        const std::vector<std::size_t> ks{1, 2, 5};
        const auto r = rank_accuracy(probes, ks);
        CHECK(r[0].accuracy == std::optional<double>(0.5));
        CHECK(r[1].accuracy == std::optional<double>(0.75));
        CHECK(r[2].accuracy == std::optional<double>(0.75));

        std::vector<ProbeResult> non_mated{{false, 0.5, {}}, {false, 0.1, {}}};
        const auto q = open_set_sweep(non_mated, targets);
        CHECK_FALSE(q[0].miss_rate);
        CHECK_FALSE(rank_accuracy(non_mated, ks)[0].accuracy);

        std::vector<ProbeResult> mated_only{{true, 0.5, 1}};
        CHECK_THROWS_AS(open_set_sweep(mated_only, targets), InvalidArgument);
        const std::vector<std::size_t> zero{0};
        CHECK_THROWS_AS(rank_accuracy(probes, zero), InvalidArgument);
    }

    TEST_CASE("property: open-set sweep agrees with the scan")
    {
        Rng rng(44);
        for (int trial = 0; trial < 200; ++trial) {
            std::vector<ProbeResult> probes;
            const std::size_t n = 1 + rng.below(80);
            for (std::size_t i = 0; i < n; ++i) {
                ProbeResult p;
                p.mated = i > 0 && rng.below(2) == 0;
                p.best_score = rng.below(8) == 0 ? kGatedScore : std::round((2.0 * rng.uniform() - 1.0) * 50) / 50;
                if (p.mated && p.best_score != kGatedScore && rng.below(4) != 0) {
                    p.mate_rank = 1 + rng.below(3);
                }
                probes.push_back(p);
            }
            std::vector<double> targets{0.01, 0.1, 0.2 + 0.7 * rng.uniform()};
            const auto got = open_set_sweep(probes, targets);
            const auto want = oracle::open_set_scan(probes, targets);
            for (std::size_t i = 0; i < got.size(); ++i) {
                CHECK(same(got[i], want[i]));
            }
            const std::vector<std::size_t> ks{1, 2, 3, 10};
            const auto ra = rank_accuracy(probes, ks);
            const auto rb = oracle::rank_scan(probes, ks);
            for (std::size_t i = 0; i < ks.size(); ++i) {
                CHECK(ra[i].accuracy == rb[i].accuracy);
            }
        }
    }

    TEST_CASE("error reduction")
    {
        CHECK(*error_reduction(0.1140, 0.0627) == doctest::Approx(0.45).epsilon(0.001 / 0.45));
        CHECK(*error_reduction(0.2, 0.1) == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(*error_reduction(0.3, 0.3) == 0.0);
        CHECK_FALSE(error_reduction(0.0, 0.1));

        EvalReport a;
        a.operating_points = {{1e-3, 0.5, 1e-3, 0.2, true}};
        EvalReport b;
        b.operating_points = {{1e-3, 0.6, 1e-3, 0.1, true}};
        CHECK(*error_reduction(a, b, 1e-3) == doctest::Approx(0.5));
        CHECK(*error_reduction(a, a, 1e-3) == 0.0);
        CHECK_THROWS_AS(error_reduction(a, b, 1e-2), InvalidArgument);
    }

    TEST_CASE("report formats")
    {
        EvalReport r;
        r.metadata = "demo";
        r.operating_points = {{1e-3, 0.5, 0.0005, 0.25, true}, {1e-5, 0.75, 0.0, 0.5, false}};
        r.identification_points = {{0.1, 0.4, 0.1, std::nullopt, true}};
        r.rank_accuracy = {{1, 0.875}, {5, std::nullopt}};
        CHECK(r.any_unattainable());
        CHECK(format_report_csv(r)
              == "metric,key,threshold,achieved,value,attainable\n"
                 "far,0.001,0.5,0.0005,0.25,1\n"
                 "far,1e-05,0.75,0,0.5,0\n"
                 "fpir,0.1,0.4,0.1,undefined,1\n"
                 "rank,1,,,0.875,1\n"
                 "rank,5,,,undefined,1\n");
        const auto table = format_report_table(r);
        CHECK(table.find("# demo") == 0);
        CHECK(table.find("unattainable") != std::string::npos);
        CHECK(table.find("Rank-K") != std::string::npos);
    }
}

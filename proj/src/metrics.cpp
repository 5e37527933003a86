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

#include "ers/metrics.hpp"

#include "ers/error.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <functional>
#include <limits>

namespace ers {

namespace {

// Observed scores inside the valid similarity range, descending and
// distinct, preceded by a threshold that rejects everything.
std::vector<double> candidate_thresholds(std::span<const double> a, std::span<const double> b)
{
    std::vector<double> out;
    out.reserve(a.size() + b.size() + 1);
    double top = -1.0;
    for (auto scores : {a, b}) {
        for (double s : scores) {
            if (s >= -1.0 && s <= 1.0) {
                out.push_back(s);
                top = std::max(top, s);
            }
        }
    }
    std::sort(out.begin(), out.end(), std::greater<>());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    out.insert(out.begin(), std::nextafter(top, std::numeric_limits<double>::infinity()));
    return out;
}

void check_target(double target, const char* what)
{
    if (!(target > 0.0 && target < 1.0)) {
        throw InvalidArgument(fmt::format("{} target {} outside (0, 1)", what, target));
    }
}

struct Selection {
    double threshold;
    std::size_t accepted; // negatives at or above the threshold
};

// Smallest candidate whose acceptance rate over `negatives_desc` is within
// `target`. Acceptance only grows as the threshold falls, so the scan stops
// at the first violation.
Selection select_threshold(std::span<const double> candidates, std::span<const double> negatives_desc,
                           double target)
{
    const double n = static_cast<double>(negatives_desc.size());
    Selection chosen{candidates.front(), 0};
    std::size_t accepted = 0;
    for (double c : candidates) {
        while (accepted < negatives_desc.size() && negatives_desc[accepted] >= c) {
            ++accepted;
        }
        if (static_cast<double>(accepted) / n > target) {
            break;
        }
        chosen = {c, accepted};
    }
    return chosen;
}

std::string fmt_real(double x)
{
    return fmt::format("{:.10g}", x);
}

std::string fmt_optional(const std::optional<double>& x)
{
    return x ? fmt_real(*x) : std::string("undefined");
}

} // namespace

std::vector<OperatingPoint> roc_sweep(std::span<const double> genuine, std::span<const double> impostor,
                                      std::span<const double> far_targets)
{
    if (genuine.empty() || impostor.empty()) {
        throw InvalidArgument("roc_sweep needs at least one genuine and one impostor score");
    }
    for (double t : far_targets) {
        check_target(t, "FAR");
    }
    std::vector<double> imp(impostor.begin(), impostor.end());
    std::sort(imp.begin(), imp.end(), std::greater<>());
    std::vector<double> gen(genuine.begin(), genuine.end());
    std::sort(gen.begin(), gen.end());
    const auto candidates = candidate_thresholds(genuine, impostor);

    std::vector<OperatingPoint> out;
    out.reserve(far_targets.size());
    for (double target : far_targets) {
        const auto sel = select_threshold(candidates, imp, target);
        const auto rejected = static_cast<std::size_t>(
            std::lower_bound(gen.begin(), gen.end(), sel.threshold) - gen.begin());
        out.push_back({target, sel.threshold,
                       static_cast<double>(sel.accepted) / static_cast<double>(imp.size()),
                       static_cast<double>(rejected) / static_cast<double>(gen.size()),
                       1.0 / static_cast<double>(imp.size()) <= target});
    }
    return out;
}

std::vector<IdentificationPoint> open_set_sweep(std::span<const ProbeResult> probes,
                                                std::span<const double> fpir_targets)
{
    std::vector<double> non_mated;
    std::vector<double> hits; // mated probes whose mate ranks first
    std::size_t mated = 0;
    for (const auto& p : probes) {
        if (!p.mated) {
            non_mated.push_back(p.best_score);
            continue;
        }
        ++mated;
        if (p.mate_rank && *p.mate_rank == 1) {
            hits.push_back(p.best_score);
        }
    }
    if (non_mated.empty()) {
        throw InvalidArgument("open-set evaluation needs at least one non-mated probe");
    }
    for (double t : fpir_targets) {
        check_target(t, "FPIR");
    }
    std::sort(non_mated.begin(), non_mated.end(), std::greater<>());
    std::sort(hits.begin(), hits.end());
    const auto candidates = candidate_thresholds(non_mated, hits);

    std::vector<IdentificationPoint> out;
    out.reserve(fpir_targets.size());
    for (double target : fpir_targets) {
        const auto sel = select_threshold(candidates, non_mated, target);
        IdentificationPoint point{target, sel.threshold,
                                  static_cast<double>(sel.accepted) / static_cast<double>(non_mated.size()),
                                  std::nullopt, 1.0 / static_cast<double>(non_mated.size()) <= target};
        if (mated > 0) {
            const auto below = static_cast<std::size_t>(
                std::lower_bound(hits.begin(), hits.end(), sel.threshold) - hits.begin());
            const std::size_t found = hits.size() - below;
            point.miss_rate = 1.0 - static_cast<double>(found) / static_cast<double>(mated);
        }
        out.push_back(point);
    }
    return out;
}

std::vector<RankAccuracy> rank_accuracy(std::span<const ProbeResult> probes, std::span<const std::size_t> ks)
{
    std::size_t mated = 0;
    for (const auto& p : probes) {
        mated += p.mated ? 1 : 0;
    }
    std::vector<RankAccuracy> out;
    out.reserve(ks.size());
    for (std::size_t k : ks) {
        if (k == 0) {
            throw InvalidArgument("rank K must be at least 1");
        }
        RankAccuracy r{k, std::nullopt};
        if (mated > 0) {
            std::size_t within = 0;
            for (const auto& p : probes) {
                if (p.mated && p.mate_rank && *p.mate_rank <= k) {
                    ++within;
                }
            }
            r.accuracy = static_cast<double>(within) / static_cast<double>(mated);
        }
        out.push_back(r);
    }
    return out;
}

bool EvalReport::any_unattainable() const
{
    return std::any_of(operating_points.begin(), operating_points.end(),
                       [](const auto& p) { return !p.attainable; })
        || std::any_of(identification_points.begin(), identification_points.end(),
                       [](const auto& p) { return !p.attainable; });
}

std::string format_report_table(const EvalReport& report)
{
    std::string out;
    if (!report.metadata.empty()) {
        out += fmt::format("# {}\n", report.metadata);
    }
    if (!report.operating_points.empty()) {
        out += "\nVerification (FRR = 1 - TAR)\n";
        out += fmt::format("{:>12}  {:>14}  {:>14}  {:>14}  {}\n", "FAR target", "threshold", "achieved FAR",
                           "FRR", "note");
        for (const auto& p : report.operating_points) {
            out += fmt::format("{:>12}  {:>14}  {:>14}  {:>14}  {}\n", fmt_real(p.far_target),
                               fmt_real(p.threshold), fmt_real(p.achieved_far), fmt_real(p.frr),
                               p.attainable ? "" : "unattainable");
        }
    }
    if (!report.identification_points.empty()) {
        out += "\nOpen-set identification (1 - TPIR)\n";
        out += fmt::format("{:>12}  {:>14}  {:>14}  {:>14}  {}\n", "FPIR target", "threshold",
                           "achieved FPIR", "1 - TPIR", "note");
        for (const auto& p : report.identification_points) {
            out += fmt::format("{:>12}  {:>14}  {:>14}  {:>14}  {}\n", fmt_real(p.fpir_target),
                               fmt_real(p.threshold), fmt_real(p.achieved_fpir), fmt_optional(p.miss_rate),
                               p.attainable ? "" : "unattainable");
        }
    }
    if (!report.rank_accuracy.empty()) {
        out += "\nRank-K accuracy\n";
        out += fmt::format("{:>12}  {:>14}\n", "K", "accuracy");
        for (const auto& r : report.rank_accuracy) {
            out += fmt::format("{:>12}  {:>14}\n", r.k, fmt_optional(r.accuracy));
        }
    }
    return out;
}

std::string format_report_csv(const EvalReport& report)
{
    std::string out = "metric,key,threshold,achieved,value,attainable\n";
    for (const auto& p : report.operating_points) {
        out += fmt::format("far,{},{},{},{},{}\n", fmt_real(p.far_target), fmt_real(p.threshold),
                           fmt_real(p.achieved_far), fmt_real(p.frr), p.attainable ? 1 : 0);
    }
    for (const auto& p : report.identification_points) {
        out += fmt::format("fpir,{},{},{},{},{}\n", fmt_real(p.fpir_target), fmt_real(p.threshold),
                           fmt_real(p.achieved_fpir), fmt_optional(p.miss_rate), p.attainable ? 1 : 0);
    }
    for (const auto& r : report.rank_accuracy) {
        out += fmt::format("rank,{},,,{},1\n", r.k, fmt_optional(r.accuracy));
    }
    return out;
}

std::optional<double> error_reduction(double frr_a, double frr_b)
{
    if (frr_a == 0.0) {
        return std::nullopt;
    }
    return (frr_a - frr_b) / frr_a;
}

std::optional<double> error_reduction(const EvalReport& a, const EvalReport& b, double far_target)
{
    auto find = [&](const EvalReport& r, const char* name) {
        const auto it = std::find_if(r.operating_points.begin(), r.operating_points.end(),
                                     [&](const auto& p) { return p.far_target == far_target; });
        if (it == r.operating_points.end()) {
            throw InvalidArgument(fmt::format("report {} has no operating point at FAR {}", name, far_target));
        }
        return it->frr;
    };
    return error_reduction(find(a, "a"), find(b, "b"));
}

} // namespace ers

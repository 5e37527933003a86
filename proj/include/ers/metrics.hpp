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

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ers {

/// Score assigned to a comparison whose ERS gate failed. It lies below every
/// valid cosine similarity, so gated pairs stay in the population but are
/// never accepted.
inline constexpr double kGatedScore = -2.0;

/// One point of a verification ROC. The threshold is the smallest observed
/// score in [-1, 1] whose empirical FAR (impostors >= threshold) stays within
/// the target; if none qualifies the threshold sits just above every score.
struct OperatingPoint {
    double far_target = 0.0;
    double threshold = 0.0;
    double achieved_far = 0.0;
    double frr = 0.0;       // genuine scores < threshold
    bool attainable = true; // false when far_target < 1 / #impostors
};

std::vector<OperatingPoint> roc_sweep(std::span<const double> genuine, std::span<const double> impostor,
                                      std::span<const double> far_targets);

/// Per-probe summary of an open-set search.
struct ProbeResult {
    bool mated = false;
    /// Best similarity over the (possibly gated) gallery; kGatedScore when the
    /// query gate rejected the probe or no gallery entry remained.
    double best_score = kGatedScore;
    /// 1-based position of the mate in the ranked gallery (ties by gallery
    /// index). Empty for non-mated or gated probes.
    std::optional<std::size_t> mate_rank;
};

struct IdentificationPoint {
    double fpir_target = 0.0;
    double threshold = 0.0;
    double achieved_fpir = 0.0;
    std::optional<double> miss_rate; // 1 - TPIR; empty without mated probes
    bool attainable = true;
};

struct RankAccuracy {
    std::size_t k = 1;
    std::optional<double> accuracy; // empty without mated probes
};

/// Calibrates thresholds on non-mated best scores and reports 1 - TPIR, where
/// a mated probe counts as a hit when its mate ranks first with score at or
/// above the threshold. Throws InvalidArgument without non-mated probes.
std::vector<IdentificationPoint> open_set_sweep(std::span<const ProbeResult> probes,
                                                std::span<const double> fpir_targets);

std::vector<RankAccuracy> rank_accuracy(std::span<const ProbeResult> probes, std::span<const std::size_t> ks);

struct EvalReport {
    std::vector<OperatingPoint> operating_points;
    std::vector<IdentificationPoint> identification_points;
    std::vector<RankAccuracy> rank_accuracy;
    std::string metadata;

    bool any_unattainable() const;
};

/// Aligned plain-text tables.
std::string format_report_table(const EvalReport& report);
/// Header line `metric,key,threshold,achieved,value,attainable`, then one row
/// per operating point, identification point and rank.
std::string format_report_csv(const EvalReport& report);

/// Relative FRR reduction from a to b, (FRR_a - FRR_b) / FRR_a.
/// Empty when FRR_a is zero.
std::optional<double> error_reduction(double frr_a, double frr_b);
/// Same, at the operating point of both reports whose FAR target equals
/// `far_target`. Throws InvalidArgument if either report lacks it.
std::optional<double> error_reduction(const EvalReport& a, const EvalReport& b, double far_target);

} // namespace ers

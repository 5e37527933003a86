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

#include "ers/embedding.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ers {

enum class Linkage { average, complete, single };

std::string_view to_string(Linkage linkage);
/// Parses "average", "complete" or "single". Throws InvalidArgument otherwise.
Linkage parse_linkage(std::string_view name);

/// Merge threshold in chordal units; 1.0 corresponds to cosine similarity 0.5.
inline constexpr double kDefaultMergeThreshold = 1.0;
/// The UI cluster is expected to exceed the median cluster size by this factor.
inline constexpr double kUiGapFactor = 10.0;

struct ClusterParameters {
    Linkage linkage = Linkage::average;
    double threshold = kDefaultMergeThreshold;

    friend bool operator==(const ClusterParameters&, const ClusterParameters&) = default;
};

/// Flat clustering of a corpus. Clusters are ordered by decreasing size,
/// ties by their smallest item_id; members within a cluster are sorted.
struct ClusterResult {
    std::vector<std::vector<std::string>> clusters;
    std::vector<std::size_t> sizes_descending;
    ClusterParameters parameters;
};

/// Bottom-up agglomerative clustering under chordal distance. Clusters keep
/// merging while the closest pair is at distance <= threshold. Equal merge
/// distances are resolved by the lexicographically smallest pair of cluster
/// representatives (the least item_id of each cluster), which makes the
/// output independent of input order and of `threads`.
///
/// Memory is one double per point pair.
ClusterResult hac_cluster(std::span<const LabeledEmbedding> corpus, double threshold,
                          Linkage linkage = Linkage::average, unsigned threads = 1);

/// Unrecognizable-identity model: the normalized mean of the largest cluster.
struct UiModel {
    Embedding centroid;
    std::size_t source_cluster_size = 0;
    ClusterParameters clustering_parameters;
    std::string source_tag;
};

/// Builds the UiModel from the largest cluster (ties: the cluster holding the
/// smallest item_id). The centroid is mean_direction over the cluster's
/// members in their listed order.
UiModel find_ui_cluster(const ClusterResult& result, std::span<const LabeledEmbedding> corpus,
                        std::string source_tag = {});

/// Returns a warning message when the largest cluster is smaller than
/// kUiGapFactor times the median cluster size, which suggests the corpus
/// holds few unrecognizable images.
std::optional<std::string> ui_gap_warning(const ClusterResult& result);

/// (rank, size) pairs, rank starting at 1 for the largest cluster.
std::vector<std::pair<std::size_t, std::size_t>> cluster_size_histogram(const ClusterResult& result);

/// Pairwise chordal distances between model centroids.
std::vector<std::vector<double>> centroid_stability(std::span<const UiModel> models);

} // namespace ers

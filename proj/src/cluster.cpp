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
#include "ers/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <numeric>
#include <unordered_map>

namespace ers {

std::string_view to_string(Linkage linkage)
{
    switch (linkage) {
    case Linkage::average:
        return "average";
    case Linkage::complete:
        return "complete";
    case Linkage::single:
        return "single";
    }
    return "unknown";
}

Linkage parse_linkage(std::string_view name)
{
    if (name == "average") {
        return Linkage::average;
    }
    if (name == "complete") {
        return Linkage::complete;
    }
    if (name == "single") {
        return Linkage::single;
    }
    throw InvalidArgument(fmt::format("unknown linkage '{}'", name));
}

namespace {

// Upper-triangular distance storage, row-major, i < j.
class CondensedMatrix {
public:
    explicit CondensedMatrix(std::size_t n) : n_(n), data_(n * (n - 1) / 2) {}

    double& at(std::size_t i, std::size_t j) { return data_[index(i, j)]; }
    double at(std::size_t i, std::size_t j) const { return data_[index(i, j)]; }

private:
    std::size_t index(std::size_t i, std::size_t j) const
    {
        if (i > j) {
            std::swap(i, j);
        }
        return i * (2 * n_ - i - 1) / 2 + (j - i - 1);
    }

    std::size_t n_;
    std::vector<double> data_;
};

// Candidate merge ordered by distance, then by the (smaller, larger)
// representative pair. Indices are ranks in item_id order, so comparing
// indices compares item_ids.
struct Candidate {
    double distance;
    std::size_t lo;
    std::size_t hi;

    static Candidate of(double distance, std::size_t a, std::size_t b)
    {
        return {distance, std::min(a, b), std::max(a, b)};
    }

    bool operator<(const Candidate& o) const
    {
        if (distance != o.distance) {
            return distance < o.distance;
        }
        if (lo != o.lo) {
            return lo < o.lo;
        }
        return hi < o.hi;
    }
};

double lance_williams(Linkage linkage, double d_ka, double d_kb, std::size_t n_a, std::size_t n_b)
{
    switch (linkage) {
    case Linkage::single:
        return std::min(d_ka, d_kb);
    case Linkage::complete:
        return std::max(d_ka, d_kb);
    case Linkage::average:
        break;
    }
    const double wa = static_cast<double>(n_a);
    const double wb = static_cast<double>(n_b);
    return (wa * d_ka + wb * d_kb) / (wa + wb);
}

constexpr std::size_t kNone = static_cast<std::size_t>(-1);

} // namespace

ClusterResult hac_cluster(std::span<const LabeledEmbedding> corpus, double threshold, Linkage linkage,
                          unsigned threads)
{
    if (corpus.empty()) {
        throw InvalidArgument("hac_cluster: empty corpus");
    }
    if (!(threshold > 0.0 && threshold <= 2.0)) {
        throw InvalidArgument(fmt::format("hac_cluster: threshold {} outside (0, 2]", threshold));
    }
    check_dataset(corpus);

    const std::size_t n = corpus.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return corpus[a].item_id < corpus[b].item_id; });

    std::vector<std::vector<std::size_t>> members(n);
    for (std::size_t i = 0; i < n; ++i) {
        members[i] = {i};
    }

    if (n > 1) {
        CondensedMatrix dist(n);
        parallel_for(n, threads, [&](std::size_t i) {
            const auto& a = corpus[order[i]].embedding;
            for (std::size_t j = i + 1; j < n; ++j) {
                dist.at(i, j) = chordal_distance(a, corpus[order[j]].embedding);
            }
        });

        std::vector<char> active(n, 1);
        std::vector<std::size_t> nn(n, kNone);
        std::vector<double> nn_dist(n, 0.0);

        auto refresh = [&](std::size_t i) {
            nn[i] = kNone;
            Candidate best{0.0, 0, 0};
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i || !active[j]) {
                    continue;
                }
                const auto c = Candidate::of(dist.at(i, j), i, j);
                if (nn[i] == kNone || c < best) {
                    best = c;
                    nn[i] = j;
                }
            }
            nn_dist[i] = best.distance;
        };
        for (std::size_t i = 0; i < n; ++i) {
            refresh(i);
        }

        std::size_t remaining = n;
        while (remaining > 1) {
            std::size_t pick = kNone;
            Candidate best{0.0, 0, 0};
            for (std::size_t i = 0; i < n; ++i) {
                if (!active[i] || nn[i] == kNone) {
                    continue;
                }
                const auto c = Candidate::of(nn_dist[i], i, nn[i]);
                if (pick == kNone || c < best) {
                    best = c;
                    pick = i;
                }
            }
            if (best.distance > threshold) {
                break;
            }

            // The merged cluster keeps the smaller slot, which is also its
            // representative rank.
            const std::size_t a = best.lo;
            const std::size_t b = best.hi;
            const std::size_t n_a = members[a].size();
            const std::size_t n_b = members[b].size();
            for (std::size_t k = 0; k < n; ++k) {
                if (!active[k] || k == a || k == b) {
                    continue;
                }
                dist.at(a, k) = lance_williams(linkage, dist.at(a, k), dist.at(b, k), n_a, n_b);
            }
            active[b] = 0;
            members[a].insert(members[a].end(), members[b].begin(), members[b].end());
            members[b].clear();
            --remaining;

            for (std::size_t k = 0; k < n; ++k) {
                if (!active[k] || k == a) {
                    continue;
                }
                if (nn[k] == a || nn[k] == b) {
                    refresh(k);
                } else if (Candidate::of(dist.at(k, a), k, a) < Candidate::of(nn_dist[k], k, nn[k])) {
                    nn[k] = a;
                    nn_dist[k] = dist.at(k, a);
                }
            }
            refresh(a);
        }
    }

    ClusterResult result;
    result.parameters = {linkage, threshold};
    for (auto& m : members) {
        if (m.empty()) {
            continue;
        }
        std::sort(m.begin(), m.end());
        std::vector<std::string> ids;
        ids.reserve(m.size());
        for (std::size_t rank : m) {
            ids.push_back(corpus[order[rank]].item_id);
        }
        result.clusters.push_back(std::move(ids));
    }
    std::stable_sort(result.clusters.begin(), result.clusters.end(), [](const auto& x, const auto& y) {
        if (x.size() != y.size()) {
            return x.size() > y.size();
        }
        return x.front() < y.front();
    });
    for (const auto& c : result.clusters) {
        result.sizes_descending.push_back(c.size());
    }
    return result;
}

UiModel find_ui_cluster(const ClusterResult& result, std::span<const LabeledEmbedding> corpus,
                        std::string source_tag)
{
    const std::vector<std::string>* chosen = nullptr;
    std::string chosen_min;
    for (const auto& cluster : result.clusters) {
        if (cluster.empty()) {
            continue;
        }
        const std::string& min_id = *std::min_element(cluster.begin(), cluster.end());
        if (chosen == nullptr || cluster.size() > chosen->size()
            || (cluster.size() == chosen->size() && min_id < chosen_min)) {
            chosen = &cluster;
            chosen_min = min_id;
        }
    }
    if (chosen == nullptr) {
        throw InvalidArgument("find_ui_cluster: cluster result is empty");
    }

    std::unordered_map<std::string_view, const Embedding*> by_id;
    by_id.reserve(corpus.size());
    for (const auto& item : corpus) {
        by_id.emplace(item.item_id, &item.embedding);
    }
    std::vector<Embedding> member_embeddings;
    member_embeddings.reserve(chosen->size());
    for (const auto& id : *chosen) {
        const auto it = by_id.find(id);
        if (it == by_id.end()) {
            throw InvalidArgument(fmt::format("find_ui_cluster: item '{}' not in corpus", id));
        }
        member_embeddings.push_back(*it->second);
    }

    return UiModel{mean_direction(member_embeddings), chosen->size(), result.parameters,
                   std::move(source_tag)};
}

std::optional<std::string> ui_gap_warning(const ClusterResult& result)
{
    if (result.sizes_descending.empty()) {
        return std::nullopt;
    }
    auto sizes = result.sizes_descending;
    std::sort(sizes.begin(), sizes.end());
    const std::size_t m = sizes.size();
    const double median = m % 2 == 1 ? static_cast<double>(sizes[m / 2])
                                     : 0.5 * static_cast<double>(sizes[m / 2 - 1] + sizes[m / 2]);
    const double largest = static_cast<double>(sizes.back());
    if (largest >= kUiGapFactor * median) {
        return std::nullopt;
    }
    return fmt::format("largest cluster ({}) is less than {}x the median cluster size ({}); "
                       "the corpus may contain few unrecognizable images",
                       sizes.back(), kUiGapFactor, median);
}

std::vector<std::pair<std::size_t, std::size_t>> cluster_size_histogram(const ClusterResult& result)
{
    auto sizes = result.sizes_descending;
    std::sort(sizes.begin(), sizes.end(), std::greater<>());
    std::vector<std::pair<std::size_t, std::size_t>> out;
    out.reserve(sizes.size());
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        out.emplace_back(i + 1, sizes[i]);
    }
    return out;
}

std::vector<std::vector<double>> centroid_stability(std::span<const UiModel> models)
{
    if (models.size() < 2) {
        throw InvalidArgument("centroid_stability needs at least two models");
    }
    const std::size_t m = models.size();
    std::vector<std::vector<double>> out(m, std::vector<double>(m, 0.0));
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            const double d = chordal_distance(models[i].centroid, models[j].centroid);
            out[i][j] = d;
            out[j][i] = d;
        }
    }
    return out;
}

} // namespace ers

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

#include "ers/aggregate.hpp"

#include "ers/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fmt/format.h>
#include <map>
#include <numeric>

namespace ers {

void Template::validate() const
{
    if (members.empty()) {
        throw InvalidArgument(fmt::format("template '{}' has no members", template_id));
    }
    for (const auto& m : members) {
        require_same_dimension(members.front().embedding.dimension(), m.embedding.dimension(),
                               "template members");
    }
}

std::string to_string(const WeightingStrategy& strategy)
{
    using Kind = WeightingStrategy::Kind;
    switch (strategy.kind) {
    case Kind::uniform:
        return "uniform";
    case Kind::identity:
        return "identity";
    case Kind::square:
        return "square";
    case Kind::softmax:
        return "softmax";
    case Kind::top_one:
        return "top_one";
    case Kind::top_fraction:
        return fmt::format("top_fraction:{}", strategy.fraction);
    }
    return "unknown";
}

WeightingStrategy parse_strategy(std::string_view text)
{
    if (text == "uniform") {
        return WeightingStrategy::uniform();
    }
    if (text == "identity") {
        return WeightingStrategy::identity();
    }
    if (text == "square") {
        return WeightingStrategy::square();
    }
    if (text == "softmax") {
        return WeightingStrategy::softmax();
    }
    if (text == "top_one") {
        return WeightingStrategy::top_one();
    }
    constexpr std::string_view prefix = "top_fraction:";
    if (text.starts_with(prefix)) {
        const auto arg = text.substr(prefix.size());
        double p = 0.0;
        const auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), p);
        if (ec != std::errc{} || ptr != arg.data() + arg.size() || !(p > 0.0 && p <= 1.0)) {
            throw InvalidArgument(fmt::format("top_fraction needs p in (0, 1], got '{}'", arg));
        }
        return WeightingStrategy::top_fraction(p);
    }
    throw InvalidArgument(fmt::format("unknown weighting strategy '{}'", text));
}

std::vector<double> compute_weights(std::span<const ErsValue> ers_list, const WeightingStrategy& strategy)
{
    using Kind = WeightingStrategy::Kind;
    if (ers_list.empty()) {
        throw InvalidArgument("compute_weights: empty ERS list");
    }
    const std::size_t n = ers_list.size();
    std::vector<double> w(n, 0.0);
    switch (strategy.kind) {
    case Kind::uniform:
        std::fill(w.begin(), w.end(), 1.0);
        break;
    case Kind::identity:
        for (std::size_t i = 0; i < n; ++i) {
            w[i] = ers_list[i].capped;
        }
        break;
    case Kind::square:
        for (std::size_t i = 0; i < n; ++i) {
            w[i] = ers_list[i].capped * ers_list[i].capped;
        }
        break;
    case Kind::softmax: {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            w[i] = std::exp(ers_list[i].capped);
            total += w[i];
        }
        for (double& x : w) {
            x /= total;
        }
        break;
    }
    case Kind::top_one:
    case Kind::top_fraction: {
        if (strategy.kind == Kind::top_fraction && !(strategy.fraction > 0.0 && strategy.fraction <= 1.0)) {
            throw InvalidArgument(fmt::format("top_fraction needs p in (0, 1], got {}", strategy.fraction));
        }
        // The small offset keeps products such as 0.7 * 10 from rounding up
        // to the next integer.
        const std::size_t k = strategy.kind == Kind::top_one
            ? 1
            : std::clamp<std::size_t>(
                  static_cast<std::size_t>(std::ceil(strategy.fraction * static_cast<double>(n) - 1e-9)), 1,
                  n);
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::stable_sort(idx.begin(), idx.end(),
                         [&](std::size_t a, std::size_t b) { return ers_list[a].capped > ers_list[b].capped; });
        for (std::size_t i = 0; i < k; ++i) {
            w[idx[i]] = 1.0 / static_cast<double>(k);
        }
        break;
    }
    }
    return w;
}

namespace {

AggregateResult pool(std::span<const Embedding> vectors, std::span<const ErsValue> ers,
                     const WeightingStrategy& strategy)
{
    const auto w = compute_weights(ers, strategy);
    const std::size_t d = vectors.front().dimension();
    double total = 0.0;
    for (double x : w) {
        total += x;
    }
    if (!(total > 0.0)) {
        throw DegenerateError("aggregate: all weights are zero");
    }
    std::vector<double> sum(d, 0.0);
    for (std::size_t l = 0; l < vectors.size(); ++l) {
        const auto v = vectors[l].values();
        for (std::size_t i = 0; i < d; ++i) {
            sum[i] += w[l] * v[i];
        }
    }
    double sum_sq = 0.0;
    for (double& x : sum) {
        x /= total;
        sum_sq += x * x;
    }
    if (std::sqrt(sum_sq) < kDegenerateNorm) {
        throw DegenerateError("aggregate: weighted mean is numerically zero");
    }
    double ers_total = 0.0;
    for (const auto& e : ers) {
        ers_total += e.capped;
    }
    return {Embedding::normalize(sum), ers_total / static_cast<double>(ers.size())};
}

} // namespace

AggregateResult aggregate(const Template& t, const WeightingStrategy& strategy)
{
    t.validate();
    std::vector<Embedding> vectors;
    std::vector<ErsValue> ers;
    vectors.reserve(t.members.size());
    ers.reserve(t.members.size());
    for (const auto& m : t.members) {
        vectors.push_back(m.embedding);
        ers.push_back(m.ers);
    }
    return pool(vectors, ers, strategy);
}

AggregateResult media_pool(const Template& t, const WeightingStrategy& strategy)
{
    t.validate();
    std::vector<std::vector<std::size_t>> groups;
    std::map<std::string, std::size_t> group_of;
    for (std::size_t i = 0; i < t.members.size(); ++i) {
        const auto& media = t.members[i].media_id;
        if (!media) {
            groups.push_back({i});
            continue;
        }
        const auto [it, inserted] = group_of.emplace(*media, groups.size());
        if (inserted) {
            groups.emplace_back();
        }
        groups[it->second].push_back(i);
    }

    Template pooled{t.template_id, t.subject_id, {}};
    pooled.members.reserve(groups.size());
    for (const auto& g : groups) {
        std::vector<Embedding> vectors;
        std::vector<ErsValue> ers;
        double raw_total = 0.0;
        for (std::size_t i : g) {
            vectors.push_back(t.members[i].embedding);
            ers.push_back(t.members[i].ers);
            raw_total += t.members[i].ers.raw;
        }
        const auto stage_one = pool(vectors, ers, WeightingStrategy::uniform());
        const ErsValue group_ers{stage_one.ers, raw_total / static_cast<double>(g.size())};
        pooled.members.push_back({stage_one.embedding, group_ers, t.members[g.front()].media_id});
    }
    return aggregate(pooled, strategy);
}

} // namespace ers

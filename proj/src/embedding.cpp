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

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <unordered_set>

namespace ers {

DataError::DataError(std::string file, std::size_t line, const std::string& what)
    : Error(line > 0 ? fmt::format("{}:{}: {}", file, line, what) : fmt::format("{}: {}", file, what)),
      file_(std::move(file)),
      line_(line)
{
}

Embedding Embedding::normalize(std::span<const double> raw)
{
    if (raw.empty()) {
        throw InvalidArgument("cannot normalize an empty vector");
    }
    double max_abs = 0.0;
    for (double x : raw) {
        if (!std::isfinite(x)) {
            throw InvalidArgument("cannot normalize a vector with non-finite entries");
        }
        max_abs = std::max(max_abs, std::abs(x));
    }
    if (max_abs == 0.0) {
        throw DegenerateError("cannot normalize the zero vector");
    }

    // Pre-scaling by the largest magnitude keeps the sum of squares away
    // from overflow and underflow.
    std::vector<double> values(raw.begin(), raw.end());
    double sum_sq = 0.0;
    for (double& x : values) {
        x /= max_abs;
        sum_sq += x * x;
    }
    const double norm = std::sqrt(sum_sq);
    for (double& x : values) {
        x /= norm;
    }
    return Embedding(std::move(values));
}

Embedding normalize(std::span<const double> raw)
{
    return Embedding::normalize(raw);
}

void require_same_dimension(std::size_t a, std::size_t b, const char* context)
{
    if (a != b) {
        throw InvalidArgument(fmt::format("{}: dimension mismatch ({} vs {})", context, a, b));
    }
}

double dot(const Embedding& a, const Embedding& b)
{
    require_same_dimension(a.dimension(), b.dimension(), "dot");
    const auto x = a.values();
    const auto y = b.values();
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sum += x[i] * y[i];
    }
    return sum;
}

double cosine_similarity(const Embedding& a, const Embedding& b)
{
    return std::clamp(dot(a, b), -1.0, 1.0);
}

double chordal_distance(const Embedding& a, const Embedding& b)
{
    // Direct Euclidean form: equal to sqrt(2 - 2 cos) for unit vectors, and
    // exactly zero for identical inputs.
    require_same_dimension(a.dimension(), b.dimension(), "chordal_distance");
    const auto x = a.values();
    const auto y = b.values();
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double diff = x[i] - y[i];
        sum += diff * diff;
    }
    return std::min(2.0, std::sqrt(sum));
}

Embedding mean_direction(std::span<const Embedding> set)
{
    if (set.empty()) {
        throw InvalidArgument("mean_direction of an empty set");
    }
    const std::size_t d = set.front().dimension();
    std::vector<double> sum(d, 0.0);
    for (const auto& e : set) {
        require_same_dimension(d, e.dimension(), "mean_direction");
        const auto v = e.values();
        for (std::size_t i = 0; i < d; ++i) {
            sum[i] += v[i];
        }
    }
    double sum_sq = 0.0;
    for (double& x : sum) {
        x /= static_cast<double>(set.size());
        sum_sq += x * x;
    }
    if (std::sqrt(sum_sq) < kDegenerateNorm) {
        throw DegenerateError("mean_direction: inputs cancel, mean is numerically zero");
    }
    return Embedding::normalize(sum);
}

Embedding round_to_float(const Embedding& e)
{
    // Iterate q <- float(normalize(q)) until it settles, so that writing the
    // result as float32 and normalizing it again reproduces it exactly.
    std::vector<float> q(e.dimension());
    for (std::size_t i = 0; i < q.size(); ++i) {
        q[i] = static_cast<float>(e[i]);
    }
    std::vector<double> widened(q.begin(), q.end());
    auto current = Embedding::normalize(widened);
    for (int iter = 0; iter < 8; ++iter) {
        bool stable = true;
        for (std::size_t i = 0; i < q.size(); ++i) {
            const auto f = static_cast<float>(current[i]);
            stable = stable && f == q[i];
            q[i] = f;
        }
        if (stable) {
            break;
        }
        widened.assign(q.begin(), q.end());
        current = Embedding::normalize(widened);
    }
    return current;
}

void check_dataset(std::span<const LabeledEmbedding> items)
{
    std::unordered_set<std::string_view> seen;
    seen.reserve(items.size());
    for (const auto& item : items) {
        if (!seen.insert(item.item_id).second) {
            throw InvalidArgument(fmt::format("duplicate item_id '{}'", item.item_id));
        }
        require_same_dimension(items.front().embedding.dimension(), item.embedding.dimension(),
                               "dataset");
    }
}

} // namespace ers

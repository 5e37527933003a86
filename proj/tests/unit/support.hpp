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
#include "ers/random.hpp"

#include <filesystem>
#include <initializer_list>
#include <string>
#include <vector>

namespace ers::test {

inline Embedding vec(std::initializer_list<double> v)
{
    return Embedding::normalize(std::vector<double>(v));
}

inline LabeledEmbedding item(std::string id, Embedding e, std::string subject = {})
{
    return {std::move(e), std::move(id), std::move(subject), std::nullopt};
}

// Unit vector whose inner product with the unit vector `u` is exactly
// representable as `c` up to rounding: c*u + sqrt(1-c^2)*w, w orthogonal to u.
inline Embedding at_cosine(const Embedding& u, double c, Rng& rng)
{
    const std::size_t d = u.dimension();
    auto g = gaussian_vector(rng, d);
    double p = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        p += g[i] * u[i];
    }
    double n = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        g[i] -= p * u[i];
        n += g[i] * g[i];
    }
    n = std::sqrt(n);
    const double s = std::sqrt(1.0 - c * c);
    std::vector<double> out(d);
    for (std::size_t i = 0; i < d; ++i) {
        out[i] = c * u[i] + s * g[i] / n;
    }
    return Embedding::normalize(out);
}

// Directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& name)
        : path_(std::filesystem::temp_directory_path() / ("ers_test_" + name))
    {
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() { std::filesystem::remove_all(path_); }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& leaf) const { return path_ / leaf; }

private:
    std::filesystem::path path_;
};

} // namespace ers::test

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
#include <cstdint>
#include <optional>
#include <random>
#include <utility>
#include <vector>

namespace ers {

/// Seeded pseudo-random stream with a fully specified output sequence.
///
/// The engine is std::mt19937_64, whose output the C++ standard fixes bit for
/// bit. The standard distributions are implementation-defined, so all
/// transforms are written out here:
///   uniform()  top 53 bits of one draw times 2^-53, in [0, 1)
///   below(n)   rejection sampling on the top bits, unbiased in [0, n)
///   normal()   Marsaglia polar method on 2 u - 1 pairs, one value cached
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }
    double uniform();
    std::size_t below(std::size_t n);
    double normal();

    template <typename T>
    void shuffle(std::vector<T>& v)
    {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[below(i)]);
        }
    }

private:
    std::mt19937_64 engine_;
    std::optional<double> spare_;
};

/// d independent standard normal draws.
std::vector<double> gaussian_vector(Rng& rng, std::size_t d);

/// Direction drawn uniformly from the unit sphere in d dimensions.
Embedding random_direction(Rng& rng, std::size_t d);

} // namespace ers

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
#include "ers/evaluate.hpp"
#include "ers/random.hpp"
#include "ers/score.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace ers {

enum class Encoding { binary_f32, text };

/// Parameters of a synthetic hypersphere world.
///
/// Samples around a mean m are normalize(m + spread * g / sqrt(d)) with g
/// standard normal, so `spread` is roughly the tangent offset: members sit
/// at cosine ~1/sqrt(1 + spread^2) from their mean.
struct GeneratorConfig {
    std::size_t dimension = 128;

    // Evaluation identities.
    std::size_t num_identities = 100;
    std::size_t samples_per_identity = 10;
    double identity_spread = 0.5;
    /// Largest cosine allowed between any two generated mean directions.
    double separation = 0.5;

    // Clustering corpus: separate identities plus the unrecognizable blob.
    std::size_t corpus_identities = 100;
    std::size_t corpus_samples_per_identity = 10;
    std::size_t ui_size = 1000;
    double ui_spread = 0.8;

    // Degradation toward the UI mean.
    std::vector<double> degradation_levels{0.3, 0.5, 0.7, 0.9};
    double degradation_noise = 0.05;
    double degraded_fraction = 0.3;

    // Templates: clean members each in their own media, degraded members
    // sharing one media group per template.
    std::size_t templates_per_identity = 2;
    std::size_t template_clean = 1;
    std::size_t template_degraded = 3;

    /// Share of identities enrolled in the open-set gallery.
    double gallery_fraction = 0.5;
    /// Impostor pairs sampled for the single-image protocol; 0 emits all.
    std::size_t impostor_pairs = 0;

    Encoding encoding = Encoding::text;
    std::uint64_t seed = 1;

    /// Throws InvalidArgument on out-of-range values.
    void validate() const;
};

struct IdentitySet {
    std::vector<LabeledEmbedding> items;
    std::vector<std::pair<std::string, Embedding>> means; // subject_id -> mean direction
};

/// Unit vector of the UI blob: the first draw of the seed's stream.
Embedding generator_ui_mean(const GeneratorConfig& cfg);

/// Draws `count` mean directions whose pairwise cosines (and cosines to
/// `avoid`) stay at or below `separation`. Throws InvalidArgument when a
/// direction cannot be placed within the retry budget.
std::vector<Embedding> gen_means(Rng& rng, std::size_t count, std::size_t dimension, double separation,
                                 std::span<const Embedding> avoid);

/// normalize(mean + spread * g / sqrt(d)).
Embedding sample_around(const Embedding& mean, double spread, Rng& rng);

/// Identity clusters of the evaluation world: num_identities means, each
/// with samples_per_identity clean members. Same stream as gen_benchmark.
IdentitySet gen_identities(const GeneratorConfig& cfg);

/// normalize((1 - t) emb + t ui_mean + noise * g / sqrt(d)). No random
/// draws are consumed when noise is zero.
Embedding gen_degradation(const Embedding& emb, const Embedding& ui_mean, double t, double noise, Rng& rng);

struct TruthRecord {
    std::string item_id;
    std::string subject_id;
    double t = 0.0; // 0 for clean samples, 1 for UI blob members
    ErsValue ers;   // against the generator's ui_mean
};

/// A complete synthetic benchmark held in memory.
struct Benchmark {
    GeneratorConfig config;
    Embedding ui_mean;
    std::vector<std::pair<std::string, Embedding>> identity_means;
    std::vector<LabeledEmbedding> corpus;   // corpus identities + UI blob
    std::vector<std::string> corpus_ui_ids; // blob members within `corpus`
    Dataset eval;                           // single probes + template members, template specs
    PairProtocol pairs;                     // over single probes
    PairProtocol template_pairs;            // over templates
    SearchProtocol search;                  // template gallery, single-image probes
    std::vector<TruthRecord> truth;         // every corpus and eval item
};

/// Builds the benchmark from the seed. With binary encoding every emitted
/// vector is rounded to float32 (and renormalized) before ground truth is
/// computed, so the sidecar matches what readers of the files see.
Benchmark gen_benchmark(const GeneratorConfig& cfg);

} // namespace ers

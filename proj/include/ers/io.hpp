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

#include "ers/cluster.hpp"
#include "ers/embedding.hpp"
#include "ers/evaluate.hpp"
#include "ers/score.hpp"
#include "ers/synthetic.hpp"

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ers::io {

namespace fs = std::filesystem;

// Embedding files ------------------------------------------------------------
//
// Header line: `ERSK1 <encoding> <d> <n>` with encoding `text` or `f32le`.
//   text:  n lines `item_id,v1,...,vd` (values with 17 significant digits)
//   f32le: n records of u32 little-endian id length, id bytes, d float32
//          little-endian values
// Item ids may not contain commas, quotes or line breaks.

inline constexpr std::string_view kEmbeddingMagic = "ERSK1";

/// Raw file contents; values are stored row-major and are not normalized.
struct EmbeddingFile {
    Encoding encoding = Encoding::text;
    std::size_t dimension = 0;
    std::vector<std::string> ids;
    std::vector<double> values;

    std::size_t count() const noexcept { return ids.size(); }
    std::span<const double> row(std::size_t i) const { return {values.data() + i * dimension, dimension}; }
};

EmbeddingFile read_embedding_file(const fs::path& path);
void write_embedding_file(const fs::path& path, const EmbeddingFile& file);

/// Normalizes every row; subject and media stay empty.
std::vector<LabeledEmbedding> to_embeddings(const EmbeddingFile& file, const fs::path& source);
EmbeddingFile from_embeddings(std::span<const LabeledEmbedding> items, Encoding encoding);

std::vector<LabeledEmbedding> read_embeddings(const fs::path& path);
void write_embeddings(const fs::path& path, std::span<const LabeledEmbedding> items, Encoding encoding);

// Comma-separated protocol files (first line is the column header) ------------

/// labels: item_id,subject_id,media_id (media_id may be empty). Every labeled
/// item must exist in `items`.
void apply_labels(const fs::path& path, std::vector<LabeledEmbedding>& items);
void write_labels(const fs::path& path, std::span<const LabeledEmbedding> items);

/// pairs: id_a,id_b,genuine with genuine in {0, 1}.
PairProtocol read_pairs(const fs::path& path);
void write_pairs(const fs::path& path, const PairProtocol& protocol);

/// templates: template_id,subject_id,item_id, one row per member.
std::vector<TemplateSpec> read_templates(const fs::path& path);
void write_templates(const fs::path& path, std::span<const TemplateSpec> templates);

/// gallery / probe manifests: id,subject_id.
std::vector<SearchEntry> read_manifest(const fs::path& path);
void write_manifest(const fs::path& path, std::span<const SearchEntry> entries);

/// ERS table: item_id,capped,raw.
void write_ers_table(const fs::path& path, std::span<const std::pair<std::string, ErsValue>> rows);

/// Ground-truth sidecar: item_id,subject_id,t,ers_capped,ers_raw.
void write_truth(const fs::path& path, std::span<const TruthRecord> truth);

// Key-value files: `key = value` lines, `#` starts a comment ------------------

class KeyValues {
public:
    static KeyValues read(const fs::path& path);
    static KeyValues parse(std::string_view text, const std::string& source);

    void set(std::string key, std::string value);
    std::optional<std::string> get(std::string_view key) const;
    const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }
    std::string source() const { return source_; }

    std::string str() const;
    void write(const fs::path& path) const;

private:
    std::vector<std::pair<std::string, std::string>> entries_;
    std::string source_;
};

/// Reads a generator config; keys are the GeneratorConfig field names and
/// unknown keys are rejected.
GeneratorConfig read_generator_config(const fs::path& path);
GeneratorConfig generator_config_from(const KeyValues& kv);
KeyValues to_key_values(const GeneratorConfig& cfg);

// Cluster results and UI models ----------------------------------------------

/// Writes clusters.csv (cluster,item_id), cluster_sizes.csv (rank,size) and
/// cluster.cfg (linkage, threshold) into `dir`.
void write_cluster_result(const fs::path& dir, const ClusterResult& result);
ClusterResult read_cluster_result(const fs::path& dir);

void write_ui_model(const fs::path& path, const UiModel& model);
UiModel read_ui_model(const fs::path& path);

// Datasets -------------------------------------------------------------------

/// Embeddings with optional labels and template definitions.
Dataset load_dataset(const fs::path& embeddings, const std::optional<fs::path>& labels,
                     const std::optional<fs::path>& templates);

/// Writes a benchmark directory: config.cfg, corpus.ersk, corpus_labels.csv,
/// embeddings.ersk, labels.csv, pairs.csv, templates.csv, template_pairs.csv,
/// gallery.csv, probes.csv, truth.csv and truth_means.ersk.
void write_benchmark(const fs::path& dir, const Benchmark& bench);

/// Writes `data` verbatim, creating parent directories.
void write_text(const fs::path& path, std::string_view data);

/// Lossless decimal form of a double.

std::string format_real(double x);
/// Parses a finite double; throws DataError naming `where` otherwise.
double parse_real(std::string_view text, const std::string& where, std::size_t line);

} // namespace ers::io

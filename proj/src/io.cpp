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

#include "ers/io.hpp"

#include "ers/error.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fmt/format.h>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

namespace ers::io {

namespace {

std::string read_all(const fs::path& path, bool binary)
{
    std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
    if (!in) {
        throw DataError(path.string(), 0, "cannot open file for reading");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return std::move(ss).str();
}

} // namespace

void write_text(const fs::path& path, std::string_view data)
{
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw DataError(path.string(), 0, "cannot open file for writing");
    }
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) {
        throw DataError(path.string(), 0, "write failed");
    }
}

namespace {

std::vector<std::string_view> split(std::string_view line, char delim)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(delim, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

// Line-oriented reader over a whole file; tracks 1-based line numbers.
class LineReader {
public:
    LineReader(const fs::path& path) : path_(path.string()), data_(read_all(path, false)) {}

    bool next(std::string_view& line)
    {
        if (pos_ >= data_.size()) {
            return false;
        }
        auto end = data_.find('\n', pos_);
        if (end == std::string::npos) {
            end = data_.size();
        }
        line = std::string_view(data_).substr(pos_, end - pos_);
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        pos_ = end + 1;
        ++line_;
        return true;
    }

    std::size_t line() const { return line_; }
    const std::string& path() const { return path_; }

    [[noreturn]] void fail(const std::string& what) const { throw DataError(path_, line_, what); }

private:
    std::string path_;
    std::string data_;
    std::size_t pos_ = 0;
    std::size_t line_ = 0;
};

// Comma-separated file with a fixed header and column count.
class CsvReader {
public:
    CsvReader(const fs::path& path, std::vector<std::string_view> header)
        : lines_(path), columns_(header.size())
    {
        std::string_view first;
        if (!lines_.next(first)) {
            lines_.fail("missing header line");
        }
        const auto got = split(first, ',');
        if (got.size() != header.size() || !std::equal(got.begin(), got.end(), header.begin())) {
            std::string expected;
            for (std::size_t i = 0; i < header.size(); ++i) {
                expected += (i ? "," : "") + std::string(header[i]);
            }
            lines_.fail(fmt::format("expected header '{}'", expected));
        }
    }

    bool next()
    {
        std::string_view line;
        while (lines_.next(line)) {
            if (trim(line).empty()) {
                continue;
            }
            fields_ = split(line, ',');
            if (fields_.size() != columns_) {
                lines_.fail(fmt::format("expected {} fields, found {}", columns_, fields_.size()));
            }
            return true;
        }
        return false;
    }

    std::string field(std::size_t i, bool allow_empty = false) const
    {
        if (!allow_empty && fields_[i].empty()) {
            fail(fmt::format("empty value in column {}", i + 1));
        }
        return std::string(fields_[i]);
    }

    std::size_t line() const { return lines_.line(); }
    const std::string& path() const { return lines_.path(); }
    [[noreturn]] void fail(const std::string& what) const { lines_.fail(what); }

private:
    LineReader lines_;
    std::size_t columns_;
    std::vector<std::string_view> fields_;
};

void check_id(std::string_view id, const fs::path& path)
{
    if (id.empty() || id.find_first_of(",\"\r\n") != std::string_view::npos) {
        throw DataError(path.string(), 0, fmt::format("invalid id '{}': ids must be non-empty and contain "
                                                      "no commas, quotes or line breaks",
                                                      id));
    }
}

std::string_view encoding_name(Encoding e)
{
    return e == Encoding::text ? "text" : "f32le";
}

std::size_t parse_count(std::string_view text, const std::string& where, std::size_t line)
{
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw DataError(where, line, fmt::format("expected a non-negative integer, found '{}'", text));
    }
    return v;
}

void put_u32(std::string& out, std::uint32_t v)
{
    for (int i = 0; i < 4; ++i) {
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
    }
}

std::uint32_t get_u32(const unsigned char* p)
{
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8)
        | (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

} // namespace

std::string format_real(double x)
{
    return fmt::format("{:.17g}", x);
}

double parse_real(std::string_view text, const std::string& where, std::size_t line)
{
    text = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v)) {
        throw DataError(where, line, fmt::format("expected a finite number, found '{}'", text));
    }
    return v;
}

// Embedding files ------------------------------------------------------------

EmbeddingFile read_embedding_file(const fs::path& path)
{
    const std::string where = path.string();
    const std::string data = read_all(path, true);
    const auto header_end = data.find('\n');
    if (header_end == std::string::npos) {
        throw DataError(where, 1, "missing header line");
    }
    const auto header = split(trim(std::string_view(data).substr(0, header_end)), ' ');
    if (header.size() != 4 || header[0] != kEmbeddingMagic) {
        throw DataError(where, 1, fmt::format("expected header '{} <text|f32le> <d> <n>'", kEmbeddingMagic));
    }
    EmbeddingFile file;
    if (header[1] == "text") {
        file.encoding = Encoding::text;
    } else if (header[1] == "f32le") {
        file.encoding = Encoding::binary_f32;
    } else {
        throw DataError(where, 1, fmt::format("unknown encoding '{}'", header[1]));
    }
    file.dimension = parse_count(header[2], where, 1);
    const std::size_t n = parse_count(header[3], where, 1);
    if (file.dimension == 0) {
        throw DataError(where, 1, "dimension must be at least 1");
    }
    file.ids.reserve(n);
    file.values.reserve(n * file.dimension);

    if (file.encoding == Encoding::text) {
        std::size_t line_no = 1;
        std::size_t pos = header_end + 1;
        while (pos < data.size()) {
            auto end = data.find('\n', pos);
            if (end == std::string::npos) {
                end = data.size();
            }
            const auto line = trim(std::string_view(data).substr(pos, end - pos));
            pos = end + 1;
            ++line_no;
            if (line.empty()) {
                continue;
            }
            if (file.ids.size() == n) {
                throw DataError(where, line_no, fmt::format("more records than the {} declared", n));
            }
            const auto fields = split(line, ',');
            if (fields.size() != file.dimension + 1) {
                throw DataError(where, line_no,
                                fmt::format("expected id and {} values, found {} fields", file.dimension,
                                            fields.size()));
            }
            if (fields[0].empty()) {
                throw DataError(where, line_no, "empty item id");
            }
            file.ids.emplace_back(fields[0]);
            for (std::size_t i = 1; i < fields.size(); ++i) {
                file.values.push_back(parse_real(fields[i], where, line_no));
            }
        }
        if (file.ids.size() != n) {
            throw DataError(where, line_no, fmt::format("declared {} records, found {}", n, file.ids.size()));
        }
    } else {
        const auto* p = reinterpret_cast<const unsigned char*>(data.data()) + header_end + 1;
        const auto* end = reinterpret_cast<const unsigned char*>(data.data()) + data.size();
        for (std::size_t r = 0; r < n; ++r) {
            auto fail = [&](const std::string& what) {
                throw DataError(where, 0, fmt::format("record {}: {}", r + 1, what));
            };
            if (end - p < 4) {
                fail("truncated id length");
            }
            const std::uint32_t len = get_u32(p);
            p += 4;
            if (len == 0 || static_cast<std::size_t>(end - p) < len) {
                fail("invalid or truncated item id");
            }
            file.ids.emplace_back(reinterpret_cast<const char*>(p), len);
            p += len;
            if (static_cast<std::size_t>(end - p) < 4 * file.dimension) {
                fail("truncated values");
            }
            for (std::size_t i = 0; i < file.dimension; ++i) {
                const float f = std::bit_cast<float>(get_u32(p));
                p += 4;
                if (!std::isfinite(f)) {
                    fail("non-finite value");
                }
                file.values.push_back(static_cast<double>(f));
            }
        }
        if (p != end) {
            throw DataError(where, 0, fmt::format("trailing bytes after the {} declared records", n));
        }
    }
    return file;
}

void write_embedding_file(const fs::path& path, const EmbeddingFile& file)
{
    if (file.values.size() != file.ids.size() * file.dimension) {
        throw InvalidArgument("write_embedding_file: value count does not match ids x dimension");
    }
    std::string out = fmt::format("{} {} {} {}\n", kEmbeddingMagic, encoding_name(file.encoding),
                                  file.dimension, file.count());
    for (std::size_t r = 0; r < file.count(); ++r) {
        check_id(file.ids[r], path);
        const auto row = file.row(r);
        if (file.encoding == Encoding::text) {
            out += file.ids[r];
            for (double v : row) {
                out += ',';
                out += format_real(v);
            }
            out += '\n';
        } else {
            put_u32(out, static_cast<std::uint32_t>(file.ids[r].size()));
            out += file.ids[r];
            for (double v : row) {
                put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
            }
        }
    }
    write_text(path, out);
}

std::vector<LabeledEmbedding> to_embeddings(const EmbeddingFile& file, const fs::path& source)
{
    std::vector<LabeledEmbedding> out;
    out.reserve(file.count());
    std::set<std::string_view> seen;
    for (std::size_t r = 0; r < file.count(); ++r) {
        if (!seen.insert(file.ids[r]).second) {
            throw DataError(source.string(), 0, fmt::format("duplicate item id '{}'", file.ids[r]));
        }
        try {
            out.push_back({Embedding::normalize(file.row(r)), file.ids[r], {}, std::nullopt});
        } catch (const Error& e) {
            throw DataError(source.string(), 0, fmt::format("record '{}': {}", file.ids[r], e.what()));
        }
    }
    return out;
}

EmbeddingFile from_embeddings(std::span<const LabeledEmbedding> items, Encoding encoding)
{
    EmbeddingFile file;
    file.encoding = encoding;
    file.dimension = items.empty() ? 1 : items.front().embedding.dimension();
    for (const auto& item : items) {
        require_same_dimension(file.dimension, item.embedding.dimension(), "from_embeddings");
        file.ids.push_back(item.item_id);
        const auto v = item.embedding.values();
        file.values.insert(file.values.end(), v.begin(), v.end());
    }
    return file;
}

std::vector<LabeledEmbedding> read_embeddings(const fs::path& path)
{
    return to_embeddings(read_embedding_file(path), path);
}

void write_embeddings(const fs::path& path, std::span<const LabeledEmbedding> items, Encoding encoding)
{
    write_embedding_file(path, from_embeddings(items, encoding));
}

// Protocol files -------------------------------------------------------------

void apply_labels(const fs::path& path, std::vector<LabeledEmbedding>& items)
{
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < items.size(); ++i) {
        index.emplace(items[i].item_id, i);
    }
    CsvReader csv(path, {"item_id", "subject_id", "media_id"});
    std::set<std::string> seen;
    while (csv.next()) {
        const auto id = csv.field(0);
        const auto it = index.find(id);
        if (it == index.end()) {
            csv.fail(fmt::format("unknown item id '{}'", id));
        }
        if (!seen.insert(id).second) {
            csv.fail(fmt::format("item id '{}' labeled twice", id));
        }
        auto& item = items[it->second];
        item.subject_id = csv.field(1);
        const auto media = csv.field(2, true);
        item.media_id = media.empty() ? std::nullopt : std::optional<std::string>(media);
    }
}

void write_labels(const fs::path& path, std::span<const LabeledEmbedding> items)
{
    std::string out = "item_id,subject_id,media_id\n";
    for (const auto& item : items) {
        check_id(item.item_id, path);
        check_id(item.subject_id, path);
        out += fmt::format("{},{},{}\n", item.item_id, item.subject_id, item.media_id.value_or(""));
    }
    write_text(path, out);
}

PairProtocol read_pairs(const fs::path& path)
{
    CsvReader csv(path, {"id_a", "id_b", "genuine"});
    PairProtocol protocol;
    while (csv.next()) {
        const auto flag = csv.field(2);
        if (flag != "0" && flag != "1") {
            csv.fail(fmt::format("genuine must be 0 or 1, found '{}'", flag));
        }
        protocol.pairs.push_back({csv.field(0), csv.field(1), flag == "1"});
    }
    return protocol;
}

void write_pairs(const fs::path& path, const PairProtocol& protocol)
{
    std::string out = "id_a,id_b,genuine\n";
    for (const auto& p : protocol.pairs) {
        out += fmt::format("{},{},{}\n", p.a, p.b, p.genuine ? 1 : 0);
    }
    write_text(path, out);
}

std::vector<TemplateSpec> read_templates(const fs::path& path)
{
    CsvReader csv(path, {"template_id", "subject_id", "item_id"});
    std::vector<TemplateSpec> out;
    std::unordered_map<std::string, std::size_t> index;
    while (csv.next()) {
        const auto id = csv.field(0);
        const auto subject = csv.field(1);
        auto [it, inserted] = index.emplace(id, out.size());
        if (inserted) {
            out.push_back({id, subject, {}});
        } else if (out[it->second].subject_id != subject) {
            csv.fail(fmt::format("template '{}' has conflicting subject ids", id));
        }
        out[it->second].item_ids.push_back(csv.field(2));
    }
    return out;
}

void write_templates(const fs::path& path, std::span<const TemplateSpec> templates)
{
    std::string out = "template_id,subject_id,item_id\n";
    for (const auto& t : templates) {
        for (const auto& id : t.item_ids) {
            out += fmt::format("{},{},{}\n", t.template_id, t.subject_id, id);
        }
    }
    write_text(path, out);
}

std::vector<SearchEntry> read_manifest(const fs::path& path)
{
    CsvReader csv(path, {"id", "subject_id"});
    std::vector<SearchEntry> out;
    while (csv.next()) {
        out.push_back({csv.field(0), csv.field(1)});
    }
    return out;
}

void write_manifest(const fs::path& path, std::span<const SearchEntry> entries)
{
    std::string out = "id,subject_id\n";
    for (const auto& e : entries) {
        out += fmt::format("{},{}\n", e.id, e.subject_id);
    }
    write_text(path, out);
}

void write_ers_table(const fs::path& path, std::span<const std::pair<std::string, ErsValue>> rows)
{
    std::string out = "item_id,capped,raw\n";
    for (const auto& [id, e] : rows) {
        out += fmt::format("{},{},{}\n", id, format_real(e.capped), format_real(e.raw));
    }
    write_text(path, out);
}

void write_truth(const fs::path& path, std::span<const TruthRecord> truth)
{
    std::string out = "item_id,subject_id,t,ers_capped,ers_raw\n";
    for (const auto& r : truth) {
        out += fmt::format("{},{},{},{},{}\n", r.item_id, r.subject_id, format_real(r.t),
                           format_real(r.ers.capped), format_real(r.ers.raw));
    }
    write_text(path, out);
}

// Key-value files ------------------------------------------------------------

KeyValues KeyValues::read(const fs::path& path)
{
    return parse(read_all(path, false), path.string());
}

KeyValues KeyValues::parse(std::string_view text, const std::string& source)
{
    KeyValues kv;
    kv.source_ = source;
    std::size_t line_no = 0;
    for (auto raw : split(text, '\n')) {
        ++line_no;
        if (const auto hash = raw.find('#'); hash != std::string_view::npos) {
            raw = raw.substr(0, hash);
        }
        const auto line = trim(raw);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw DataError(source, line_no, "expected 'key = value'");
        }
        const auto key = trim(line.substr(0, eq));
        if (key.empty()) {
            throw DataError(source, line_no, "empty key");
        }
        if (kv.get(key)) {
            throw DataError(source, line_no, fmt::format("duplicate key '{}'", key));
        }
        kv.entries_.emplace_back(std::string(key), std::string(trim(line.substr(eq + 1))));
    }
    return kv;
}

void KeyValues::set(std::string key, std::string value)
{
    for (auto& [k, v] : entries_) {
        if (k == key) {
            v = std::move(value);
            return;
        }
    }
    entries_.emplace_back(std::move(key), std::move(value));
}

std::optional<std::string> KeyValues::get(std::string_view key) const
{
    for (const auto& [k, v] : entries_) {
        if (k == key) {
            return v;
        }
    }
    return std::nullopt;
}

std::string KeyValues::str() const
{
    std::string out;
    for (const auto& [k, v] : entries_) {
        out += fmt::format("{} = {}\n", k, v);
    }
    return out;
}

void KeyValues::write(const fs::path& path) const
{
    write_text(path, str());
}

namespace {

std::string join_reals(std::span<const double> values)
{
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        out += (i ? "," : "") + format_real(values[i]);
    }
    return out;
}

std::vector<double> parse_reals(std::string_view text, const std::string& where)
{
    std::vector<double> out;
    for (auto part : split(text, ',')) {
        out.push_back(parse_real(part, where, 0));
    }
    return out;
}

} // namespace

GeneratorConfig generator_config_from(const KeyValues& kv)
{
    GeneratorConfig cfg;
    const std::string where = kv.source();
    auto count = [&](std::string_view v) { return parse_count(trim(v), where, 0); };
    auto real = [&](std::string_view v) { return parse_real(v, where, 0); };

    for (const auto& [key, value] : kv.entries()) {
        if (key == "dimension") {
            cfg.dimension = count(value);
        } else if (key == "num_identities") {
            cfg.num_identities = count(value);
        } else if (key == "samples_per_identity") {
            cfg.samples_per_identity = count(value);
        } else if (key == "identity_spread") {
            cfg.identity_spread = real(value);
        } else if (key == "separation") {
            cfg.separation = real(value);
        } else if (key == "corpus_identities") {
            cfg.corpus_identities = count(value);
        } else if (key == "corpus_samples_per_identity") {
            cfg.corpus_samples_per_identity = count(value);
        } else if (key == "ui_size") {
            cfg.ui_size = count(value);
        } else if (key == "ui_spread") {
            cfg.ui_spread = real(value);
        } else if (key == "degradation_levels") {
            cfg.degradation_levels = parse_reals(value, where);
        } else if (key == "degradation_noise") {
            cfg.degradation_noise = real(value);
        } else if (key == "degraded_fraction") {
            cfg.degraded_fraction = real(value);
        } else if (key == "templates_per_identity") {
            cfg.templates_per_identity = count(value);
        } else if (key == "template_clean") {
            cfg.template_clean = count(value);
        } else if (key == "template_degraded") {
            cfg.template_degraded = count(value);
        } else if (key == "gallery_fraction") {
            cfg.gallery_fraction = real(value);
        } else if (key == "impostor_pairs") {
            cfg.impostor_pairs = count(value);
        } else if (key == "encoding") {
            if (value == "text") {
                cfg.encoding = Encoding::text;
            } else if (value == "f32le" || value == "binary") {
                cfg.encoding = Encoding::binary_f32;
            } else {
                throw DataError(where, 0, fmt::format("unknown encoding '{}'", value));
            }
        } else if (key == "seed") {
            cfg.seed = count(value);
        } else {
            throw DataError(where, 0, fmt::format("unknown generator key '{}'", key));
        }
    }
    try {
        cfg.validate();
    } catch (const InvalidArgument& e) {
        throw DataError(where, 0, e.what());
    }
    return cfg;
}

GeneratorConfig read_generator_config(const fs::path& path)
{
    return generator_config_from(KeyValues::read(path));
}

KeyValues to_key_values(const GeneratorConfig& cfg)
{
    KeyValues kv;
    kv.set("dimension", std::to_string(cfg.dimension));
    kv.set("num_identities", std::to_string(cfg.num_identities));
    kv.set("samples_per_identity", std::to_string(cfg.samples_per_identity));
    kv.set("identity_spread", format_real(cfg.identity_spread));
    kv.set("separation", format_real(cfg.separation));
    kv.set("corpus_identities", std::to_string(cfg.corpus_identities));
    kv.set("corpus_samples_per_identity", std::to_string(cfg.corpus_samples_per_identity));
    kv.set("ui_size", std::to_string(cfg.ui_size));
    kv.set("ui_spread", format_real(cfg.ui_spread));
    kv.set("degradation_levels", join_reals(cfg.degradation_levels));
    kv.set("degradation_noise", format_real(cfg.degradation_noise));
    kv.set("degraded_fraction", format_real(cfg.degraded_fraction));
    kv.set("templates_per_identity", std::to_string(cfg.templates_per_identity));
    kv.set("template_clean", std::to_string(cfg.template_clean));
    kv.set("template_degraded", std::to_string(cfg.template_degraded));
    kv.set("gallery_fraction", format_real(cfg.gallery_fraction));
    kv.set("impostor_pairs", std::to_string(cfg.impostor_pairs));
    kv.set("encoding", cfg.encoding == Encoding::text ? "text" : "f32le");
    kv.set("seed", std::to_string(cfg.seed));
    return kv;
}

// Cluster results and UI models ----------------------------------------------

void write_cluster_result(const fs::path& dir, const ClusterResult& result)
{
    std::string clusters = "cluster,item_id\n";
    for (std::size_t c = 0; c < result.clusters.size(); ++c) {
        for (const auto& id : result.clusters[c]) {
            clusters += fmt::format("{},{}\n", c + 1, id);
        }
    }
    write_text(dir / "clusters.csv", clusters);

    std::string sizes = "rank,size\n";
    for (const auto& [rank, size] : cluster_size_histogram(result)) {
        sizes += fmt::format("{},{}\n", rank, size);
    }
    write_text(dir / "cluster_sizes.csv", sizes);

    KeyValues kv;
    kv.set("linkage", std::string(to_string(result.parameters.linkage)));
    kv.set("threshold", format_real(result.parameters.threshold));
    kv.write(dir / "cluster.cfg");
}

ClusterResult read_cluster_result(const fs::path& dir)
{
    const auto kv = KeyValues::read(dir / "cluster.cfg");
    const std::string cfg_path = (dir / "cluster.cfg").string();
    ClusterResult result;
    const auto linkage = kv.get("linkage");
    const auto threshold = kv.get("threshold");
    if (!linkage || !threshold) {
        throw DataError(cfg_path, 0, "expected keys 'linkage' and 'threshold'");
    }
    try {
        result.parameters.linkage = parse_linkage(*linkage);
    } catch (const InvalidArgument& e) {
        throw DataError(cfg_path, 0, e.what());
    }
    result.parameters.threshold = parse_real(*threshold, cfg_path, 0);

    CsvReader csv(dir / "clusters.csv", {"cluster", "item_id"});
    std::map<std::size_t, std::vector<std::string>> by_cluster;
    std::set<std::string> seen;
    while (csv.next()) {
        const auto c = parse_count(csv.field(0), csv.path(), csv.line());
        const auto id = csv.field(1);
        if (!seen.insert(id).second) {
            csv.fail(fmt::format("item id '{}' appears in more than one cluster", id));
        }
        by_cluster[c].push_back(id);
    }
    for (auto& [c, ids] : by_cluster) {
        std::sort(ids.begin(), ids.end());
        result.clusters.push_back(std::move(ids));
    }
    std::stable_sort(result.clusters.begin(), result.clusters.end(), [](const auto& x, const auto& y) {
        return x.size() != y.size() ? x.size() > y.size() : x.front() < y.front();
    });
    for (const auto& c : result.clusters) {
        result.sizes_descending.push_back(c.size());
    }
    return result;
}

void write_ui_model(const fs::path& path, const UiModel& model)
{
    KeyValues kv;
    kv.set("format", "ERSUI1");
    kv.set("dimension", std::to_string(model.centroid.dimension()));
    kv.set("source_cluster_size", std::to_string(model.source_cluster_size));
    kv.set("linkage", std::string(to_string(model.clustering_parameters.linkage)));
    kv.set("threshold", format_real(model.clustering_parameters.threshold));
    kv.set("source_tag", model.source_tag);
    kv.set("centroid", join_reals(model.centroid.values()));
    kv.write(path);
}

UiModel read_ui_model(const fs::path& path)
{
    const auto kv = KeyValues::read(path);
    const std::string where = path.string();
    auto need = [&](std::string_view key) {
        auto v = kv.get(key);
        if (!v) {
            throw DataError(where, 0, fmt::format("missing key '{}'", key));
        }
        return *v;
    };
    if (need("format") != "ERSUI1") {
        throw DataError(where, 0, "not a UI model file (format must be ERSUI1)");
    }
    const auto dimension = parse_count(need("dimension"), where, 0);
    const auto values = parse_reals(need("centroid"), where);
    if (values.size() != dimension) {
        throw DataError(where, 0,
                        fmt::format("centroid has {} values, dimension says {}", values.size(), dimension));
    }
    UiModel model{Embedding::normalize(values), parse_count(need("source_cluster_size"), where, 0), {}, ""};
    try {
        model.clustering_parameters.linkage = parse_linkage(need("linkage"));
    } catch (const InvalidArgument& e) {
        throw DataError(where, 0, e.what());
    }
    model.clustering_parameters.threshold = parse_real(need("threshold"), where, 0);
    model.source_tag = kv.get("source_tag").value_or("");
    return model;
}

// Datasets -------------------------------------------------------------------

Dataset load_dataset(const fs::path& embeddings, const std::optional<fs::path>& labels,
                     const std::optional<fs::path>& templates)
{
    Dataset ds;
    ds.items = read_embeddings(embeddings);
    if (labels) {
        apply_labels(*labels, ds.items);
    }
    if (templates) {
        ds.templates = read_templates(*templates);
        std::set<std::string_view> known;
        for (const auto& item : ds.items) {
            known.insert(item.item_id);
        }
        for (const auto& t : ds.templates) {
            for (const auto& id : t.item_ids) {
                if (!known.count(id)) {
                    throw DataError(templates->string(), 0,
                                    fmt::format("template '{}' references unknown item id '{}'", t.template_id, id));
                }
            }
        }
    }
    return ds;
}

void write_benchmark(const fs::path& dir, const Benchmark& bench)
{
    fs::create_directories(dir);
    const auto enc = bench.config.encoding;
    to_key_values(bench.config).write(dir / "config.cfg");
    write_embeddings(dir / "corpus.ersk", bench.corpus, enc);
    write_labels(dir / "corpus_labels.csv", bench.corpus);
    write_embeddings(dir / "embeddings.ersk", bench.eval.items, enc);
    write_labels(dir / "labels.csv", bench.eval.items);
    write_pairs(dir / "pairs.csv", bench.pairs);
    write_templates(dir / "templates.csv", bench.eval.templates);
    write_pairs(dir / "template_pairs.csv", bench.template_pairs);
    write_manifest(dir / "gallery.csv", bench.search.gallery);
    write_manifest(dir / "probes.csv", bench.search.probes);
    write_truth(dir / "truth.csv", bench.truth);

    std::vector<LabeledEmbedding> means;
    means.push_back({bench.ui_mean, "ui_mean", "ui", std::nullopt});
    for (const auto& [subject, m] : bench.identity_means) {
        means.push_back({m, subject, subject, std::nullopt});
    }
    write_embeddings(dir / "truth_means.ersk", means, enc);
}

} // namespace ers::io

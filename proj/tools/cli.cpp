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

#include "cli.hpp"

#include "ers/aggregate.hpp"
#include "ers/cluster.hpp"
#include "ers/decision.hpp"
#include "ers/error.hpp"
#include "ers/evaluate.hpp"
#include "ers/io.hpp"
#include "ers/metrics.hpp"
#include "ers/parallel.hpp"
#include "ers/score.hpp"
#include "ers/synthetic.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace ers::cli {

namespace {

namespace fs = std::filesystem;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Context {
    std::ostream& out;
    std::ostream& err;
};

constexpr const char* kSnapshotName = "run.cfg";

// Converts precondition failures raised while interpreting flag values into
// usage errors, so that a bad --tau exits 1 rather than 2.
template <typename F>
auto usage_guard(F&& f)
{
    try {
        return f();
    } catch (const InvalidArgument& e) {
        throw UsageError(e.what());
    }
}

Encoding parse_encoding(const std::string& name)
{
    if (name == "text") {
        return Encoding::text;
    }
    if (name == "f32le" || name == "binary") {
        return Encoding::binary_f32;
    }
    throw UsageError(fmt::format("unknown encoding '{}' (expected text or f32le)", name));
}

class Command {
public:
    Command(CLI::App& app, const std::string& name, const std::string& description)
        : name_(name), app_(app.add_subcommand(name, description))
    {
        app_->add_option("--run-config", run_config_,
                         "Key-value file supplying option values; explicit flags take precedence");
    }
    virtual ~Command() = default;

    bool parsed() const { return app_->parsed(); }

    int invoke(Context& ctx)
    {
        apply_run_config();
        for (const auto& name : required_) {
            if (app_->get_option(name)->count() == 0) {
                throw UsageError(fmt::format("{} requires {}", name_, name));
            }
        }
        if (threads_ == 0) {
            throw UsageError("--threads must be at least 1");
        }
        check();
        return execute(ctx);
    }

protected:
    template <typename T>
    CLI::Option* option(const std::string& name, T& value, const std::string& description)
    {
        return app_->add_option(name, value, description);
    }

    CLI::Option* required(const std::string& name, std::string& value, const std::string& description)
    {
        required_.push_back(name.substr(0, name.find(',')));
        return app_->add_option(name, value, description + " (required)");
    }

    CLI::Option* flag(const std::string& name, bool& value, const std::string& description)
    {
        auto* opt = app_->add_flag(name, value, description);
        flags_.insert(opt);
        return opt;
    }

    void threads_option()
    {
        option("--threads", threads_, "Worker threads; results do not depend on this value");
    }

    virtual void check() {}
    virtual int execute(Context& ctx) = 0;

    // Option values in effect, in declaration order. Thread count is omitted
    // because it never changes results.
    io::KeyValues snapshot() const
    {
        io::KeyValues kv;
        kv.set("command", name_);
        for (const auto* opt : app_->get_options()) {
            const auto name = opt->get_single_name();
            if (name == "help" || name == "run-config" || name == "threads") {
                continue;
            }
            std::string value;
            if (!opt->results().empty()) {
                for (const auto& r : opt->results()) {
                    value += (value.empty() ? "" : ",") + r;
                }
            } else if (flags_.count(opt)) {
                value = "false";
            } else {
                value = opt->get_default_str();
                if (value.size() >= 2 && value.front() == '[' && value.back() == ']') {
                    value = value.substr(1, value.size() - 2);
                }
            }
            if (!value.empty()) {
                kv.set(name, value);
            }
        }
        return kv;
    }

    void write_snapshot(const fs::path& dir) const { snapshot().write(dir / kSnapshotName); }

    unsigned threads_ = 1;

private:
    void apply_run_config()
    {
        if (run_config_.empty()) {
            return;
        }
        const auto kv = io::KeyValues::read(run_config_);
        for (const auto& [key, value] : kv.entries()) {
            if (key == "command") {
                if (value != name_) {
                    throw DataError(run_config_, 0,
                                    fmt::format("run config is for command '{}', not '{}'", value, name_));
                }
                continue;
            }
            auto* opt = key == "help" || key == "run-config" ? nullptr : app_->get_option_no_throw("--" + key);
            if (opt == nullptr) {
                throw DataError(run_config_, 0, fmt::format("unknown option '{}' for command '{}'", key, name_));
            }
            if (opt->count() > 0) {
                continue;
            }
            opt->add_result(value);
            try {
                opt->run_callback();
            } catch (const CLI::ParseError& e) {
                throw DataError(run_config_, 0, fmt::format("bad value for '{}': {}", key, e.what()));
            }
        }
    }

    std::string name_;
    CLI::App* app_;
    std::string run_config_;
    std::vector<std::string> required_;
    std::set<const CLI::Option*> flags_;
};

std::optional<fs::path> optional_path(const std::string& s)
{
    return s.empty() ? std::nullopt : std::optional<fs::path>(s);
}

std::optional<UiModel> optional_ui(const std::string& path)
{
    return path.empty() ? std::nullopt : std::optional<UiModel>(io::read_ui_model(path));
}

void prepare_out(const fs::path& dir)
{
    fs::create_directories(dir);
}

void report_unattainable(const EvalReport& report, Context& ctx)
{
    if (report.any_unattainable()) {
        ctx.err << "warning: some requested operating points are below the resolution of the data\n";
    }
}

// cluster --------------------------------------------------------------------

class ClusterCommand : public Command {
public:
    explicit ClusterCommand(CLI::App& app)
        : Command(app, "cluster", "Agglomerative clustering of an embedding corpus")
    {
        required("--embeddings", embeddings_, "Embedding file");
        option("--threshold", threshold_, "Chordal-distance merge threshold in (0, 2]");
        option("--linkage", linkage_, "Linkage rule: average, complete or single");
        threads_option();
        required("--out", out_, "Output directory");
    }

private:
    void check() override
    {
        if (!(threshold_ > 0.0 && threshold_ <= 2.0)) {
            throw UsageError("--threshold must lie in (0, 2]");
        }
        usage_guard([&] { return parse_linkage(linkage_); });
    }

    int execute(Context& ctx) override
    {
        const auto items = io::read_embeddings(embeddings_);
        const auto result = hac_cluster(items, threshold_, parse_linkage(linkage_), threads_);
        prepare_out(out_);
        io::write_cluster_result(out_, result);
        write_snapshot(out_);

        ctx.out << fmt::format("{} items in {} clusters; largest sizes:", items.size(), result.clusters.size());
        for (std::size_t i = 0; i < std::min<std::size_t>(5, result.sizes_descending.size()); ++i) {
            ctx.out << ' ' << result.sizes_descending[i];
        }
        ctx.out << '\n';
        if (const auto warning = ui_gap_warning(result)) {
            ctx.err << "warning: " << *warning << '\n';
        }
        return kExitOk;
    }

    std::string embeddings_;
    double threshold_ = kDefaultMergeThreshold;
    std::string linkage_ = "average";
    std::string out_;
};

// ui-centroid ----------------------------------------------------------------

class UiCentroidCommand : public Command {
public:
    explicit UiCentroidCommand(CLI::App& app)
        : Command(app, "ui-centroid", "Build the UI model from the largest cluster")
    {
        required("--clusters", clusters_, "Directory written by 'ers cluster'");
        required("--embeddings", embeddings_, "Embedding file that was clustered");
        option("--source-tag", tag_, "Label stored with the model (default: embedding file name)");
        required("--out", out_, "Output directory");
    }

private:
    int execute(Context& ctx) override
    {
        const auto result = io::read_cluster_result(clusters_);
        const auto items = io::read_embeddings(embeddings_);
        const auto tag = tag_.empty() ? fs::path(embeddings_).filename().string() : tag_;
        const auto model = find_ui_cluster(result, items, tag);
        prepare_out(out_);
        io::write_ui_model(fs::path(out_) / "ui_model.cfg", model);
        write_snapshot(out_);
        ctx.out << fmt::format("UI cluster of {} items (of {} clustered)\n", model.source_cluster_size,
                               items.size());
        if (const auto warning = ui_gap_warning(result)) {
            ctx.err << "warning: " << *warning << '\n';
        }
        return kExitOk;
    }

    std::string clusters_;
    std::string embeddings_;
    std::string tag_;
    std::string out_;
};

// score ----------------------------------------------------------------------

class ScoreCommand : public Command {
public:
    explicit ScoreCommand(CLI::App& app) : Command(app, "score", "Recognizability score of every embedding")
    {
        required("--embeddings", embeddings_, "Embedding file");
        required("--ui", ui_, "UI model file");
        threads_option();
        required("--out", out_, "Output directory");
    }

private:
    int execute(Context& ctx) override
    {
        const auto items = io::read_embeddings(embeddings_);
        const auto ui = io::read_ui_model(ui_);
        const auto rows = batch_ers(items, ui, threads_);
        prepare_out(out_);
        io::write_ers_table(fs::path(out_) / "ers.csv", rows);
        write_snapshot(out_);
        std::size_t below = 0;
        for (const auto& [id, e] : rows) {
            below += e.capped < kDefaultGamma ? 1 : 0;
        }
        ctx.out << fmt::format("scored {} items; {} below {}\n", rows.size(), below, kDefaultGamma);
        return kExitOk;
    }

    std::string embeddings_;
    std::string ui_;
    std::string out_;
};

// enhance --------------------------------------------------------------------

class EnhanceCommand : public Command {
public:
    explicit EnhanceCommand(CLI::App& app)
        : Command(app, "enhance", "Remove the UI component from every embedding")
    {
        required("--embeddings", embeddings_, "Embedding file");
        required("--ui", ui_, "UI model file");
        option("--encoding", encoding_, "Output encoding: text or f32le (default: same as input)");
        threads_option();
        required("--out", out_, "Output directory");
    }

private:
    void check() override
    {
        if (!encoding_.empty()) {
            parse_encoding(encoding_);
        }
    }

    int execute(Context& ctx) override
    {
        const auto file = io::read_embedding_file(embeddings_);
        const auto items = io::to_embeddings(file, embeddings_);
        const auto ui = io::read_ui_model(ui_);
        std::vector<std::optional<LabeledEmbedding>> slots(items.size());
        parallel_for(items.size(), threads_, [&](std::size_t i) {
            slots[i] = LabeledEmbedding{enhance_embedding(items[i].embedding, ui), items[i].item_id,
                                        items[i].subject_id, items[i].media_id};
        });
        std::vector<LabeledEmbedding> enhanced;
        for (auto& s : slots) {
            enhanced.push_back(std::move(*s));
        }
        prepare_out(out_);
        io::write_embeddings(fs::path(out_) / "enhanced.ersk", enhanced,
                             encoding_.empty() ? file.encoding : parse_encoding(encoding_));
        write_snapshot(out_);
        ctx.out << fmt::format("enhanced {} items\n", enhanced.size());
        return kExitOk;
    }

    std::string embeddings_;
    std::string ui_;
    std::string encoding_;
    std::string out_;
};

// verify ---------------------------------------------------------------------

class VerifyCommand : public Command {
public:
    explicit VerifyCommand(CLI::App& app) : Command(app, "verify", "1:1 decisions for a list of pairs")
    {
        required("--embeddings", embeddings_, "Embedding file");
        required("--pairs", pairs_, "Pair list (id_a,id_b,genuine)");
        option("--ui", ui_, "UI model file; when given, both sides must pass the ERS gate");
        option("--tau", cfg_.tau, "Cosine similarity threshold");
        option("--gamma", cfg_.gamma, "ERS threshold");
        required("--out", out_, "Output directory");
    }

private:
    void check() override
    {
        usage_guard([&] {
            cfg_.validate();
            return 0;
        });
    }

    int execute(Context& ctx) override
    {
        const auto items = io::read_embeddings(embeddings_);
        const auto protocol = io::read_pairs(pairs_);
        const auto ui = optional_ui(ui_);
        std::unordered_map<std::string, std::size_t> index;
        for (std::size_t i = 0; i < items.size(); ++i) {
            index.emplace(items[i].item_id, i);
        }
        auto lookup = [&](const std::string& id) -> const Embedding& {
            const auto it = index.find(id);
            if (it == index.end()) {
                throw DataError(pairs_, 0, fmt::format("unknown item id '{}'", id));
            }
            return items[it->second].embedding;
        };

        std::string table = "id_a,id_b,genuine,similarity,accepted\n";
        std::size_t genuine = 0, impostor = 0, genuine_rejected = 0, impostor_accepted = 0, accepted = 0;
        for (const auto& p : protocol.pairs) {
            const auto& a = lookup(p.a);
            const auto& b = lookup(p.b);
            const bool ok = ui ? verify_with_ers(a, b, compute_ers(a, *ui), compute_ers(b, *ui), cfg_)
                               : verify(a, b, cfg_);
            accepted += ok ? 1 : 0;
            if (p.genuine) {
                ++genuine;
                genuine_rejected += ok ? 0 : 1;
            } else {
                ++impostor;
                impostor_accepted += ok ? 1 : 0;
            }
            table += fmt::format("{},{},{},{},{}\n", p.a, p.b, p.genuine ? 1 : 0,
                                 io::format_real(cosine_similarity(a, b)), ok ? 1 : 0);
        }
        auto rate = [](std::size_t k, std::size_t n) { return n ? io::format_real(double(k) / double(n)) : "undefined"; };

        io::KeyValues summary;
        summary.set("pairs", std::to_string(protocol.pairs.size()));
        summary.set("accepted", std::to_string(accepted));
        summary.set("gated", ui ? "true" : "false");
        summary.set("far", rate(impostor_accepted, impostor));
        summary.set("frr", rate(genuine_rejected, genuine));

        prepare_out(out_);
        io::write_text(fs::path(out_) / "decisions.csv", table);
        summary.write(fs::path(out_) / "summary.cfg");
        write_snapshot(out_);
        ctx.out << summary.str();
        return kExitOk;
    }

    std::string embeddings_;
    std::string pairs_;
    std::string ui_;
    DecisionConfig cfg_;
    std::string out_;
};

// search ---------------------------------------------------------------------

class SearchCommand : public Command {
public:
    explicit SearchCommand(CLI::App& app) : Command(app, "search", "Open-set 1:N search of probes against a gallery")
    {
        required("--embeddings", embeddings_, "Embedding file holding gallery and probe items");
        option("--labels", labels_, "Labels file (item_id,subject_id,media_id)");
        option("--templates", templates_, "Template file; gallery or probe ids may then name templates");
        required("--gallery", gallery_, "Gallery manifest (id,subject_id)");
        required("--probes", probes_, "Probe manifest (id,subject_id)");
        option("--ui", ui_, "UI model file; when given, the ERS gate applies to probes");
        option("--strategy", strategy_, "Template weighting: uniform, identity, square, softmax, top_one, top_fraction:<p>");
        flag("--media-pool", media_pool_, "Average within media before combining across media");
        option("--tau", cfg_.tau, "Cosine similarity threshold");
        option("--gamma", cfg_.gamma, "ERS threshold");
        flag("--gate-gallery", cfg_.gate_gallery, "Exclude gallery entries whose ERS is below gamma");
        threads_option();
        required("--out", out_, "Output directory");
    }

private:
    Pipeline pipeline() const
    {
        const bool templates = !templates_.empty();
        const char* kind = templates ? (ui_.empty() ? "template" : "template_gated") : (ui_.empty() ? "single" : "single_gated");
        return Pipeline::parse(kind, strategy_, media_pool_);
    }

    void check() override
    {
        usage_guard([&] {
            cfg_.validate();
            return 0;
        });
        if (cfg_.gate_gallery && ui_.empty()) {
            throw UsageError("--gate-gallery requires --ui");
        }
        const auto p = usage_guard([&] { return pipeline(); });
        if (p.needs_ui() && ui_.empty()) {
            throw UsageError(fmt::format("strategy {} requires --ui", to_string(p.strategy)));
        }
    }

    int execute(Context& ctx) override
    {
        const auto dataset = io::load_dataset(embeddings_, optional_path(labels_), optional_path(templates_));
        const auto gallery_entries = io::read_manifest(gallery_);
        const auto probe_entries = io::read_manifest(probes_);
        if (gallery_entries.empty()) {
            throw DataError(gallery_, 0, "gallery manifest lists no entries");
        }
        const auto ui = optional_ui(ui_);
        const auto p = pipeline();

        auto ids = [](const std::vector<SearchEntry>& entries) {
            std::vector<std::string> out;
            for (const auto& e : entries) {
                out.push_back(e.id);
            }
            return out;
        };
        const auto gallery = resolve_ids(dataset, ids(gallery_entries), p, ui, threads_);
        const auto probes = resolve_ids(dataset, ids(probe_entries), p, ui, threads_);

        std::vector<Embedding> gallery_embeddings;
        std::vector<ErsValue> gallery_ers;
        for (const auto& g : gallery) {
            gallery_embeddings.push_back(g.embedding);
            gallery_ers.push_back(g.ers);
        }
        std::vector<SearchOutcome> outcomes(probes.size());
        parallel_for(probes.size(), threads_, [&](std::size_t i) {
            if (!ui) {
                outcomes[i] = identify(probes[i].embedding, gallery_embeddings, cfg_);
                return;
            }
            std::optional<std::span<const ErsValue>> gate;
            if (cfg_.gate_gallery) {
                gate = std::span<const ErsValue>(gallery_ers);
            }
            outcomes[i] = identify_with_ers(probes[i].embedding, probes[i].ers, gallery_embeddings, gate, cfg_);
        });

        std::string table = "probe_id,subject_id,matched,gallery_index,gallery_id,best_similarity\n";
        std::size_t matched = 0;
        for (std::size_t i = 0; i < outcomes.size(); ++i) {
            const auto& o = outcomes[i];
            matched += o.matched ? 1 : 0;
            const std::size_t index = o.matched ? *o.gallery_index : 0;
            table += fmt::format("{},{},{},{},{},{}\n", probe_entries[i].id, probe_entries[i].subject_id,
                                 o.matched ? 1 : 0, index, index ? gallery_entries[index - 1].id : "",
                                 io::format_real(o.best_similarity));
        }
        prepare_out(out_);
        io::write_text(fs::path(out_) / "search.csv", table);
        write_snapshot(out_);
        ctx.out << fmt::format("{} probes, {} matched, gallery of {}\n", outcomes.size(), matched, gallery.size());
        return kExitOk;
    }

    std::string embeddings_;
    std::string labels_;
    std::string templates_;
    std::string gallery_;
    std::string probes_;
    std::string ui_;
    std::string strategy_ = "square";
    bool media_pool_ = false;
    DecisionConfig cfg_;
    std::string out_;
};

// aggregate ------------------------------------------------------------------

class AggregateCommand : public Command {
public:
    explicit AggregateCommand(CLI::App& app)
        : Command(app, "aggregate", "Pool every template into one embedding")
    {
        required("--embeddings", embeddings_, "Embedding file");
        option("--labels", labels_, "Labels file (item_id,subject_id,media_id); media ids drive --media-pool");
        required("--templates", templates_, "Template file (template_id,subject_id,item_id)");
        option("--ui", ui_, "UI model file; required unless --strategy uniform");
        option("--strategy", strategy_, "Weighting: uniform, identity, square, softmax, top_one, top_fraction:<p>");
        flag("--media-pool", media_pool_, "Average within media before combining across media");
        flag("--enhance", enhance_, "Enhance members against the UI centroid and average them uniformly");
        option("--encoding", encoding_, "Output encoding: text or f32le (default: same as input)");
        threads_option();
        required("--out", out_, "Output directory");
    }

private:
    Pipeline pipeline() const
    {
        return Pipeline::parse(enhance_ ? "enhanced_avg" : "template", strategy_, media_pool_);
    }

    void check() override
    {
        const auto p = usage_guard([&] { return pipeline(); });
        if (p.needs_ui() && ui_.empty()) {
            throw UsageError(fmt::format("{} requires --ui", p.describe()));
        }
        if (!encoding_.empty()) {
            parse_encoding(encoding_);
        }
    }

    int execute(Context& ctx) override
    {
        const auto dataset = io::load_dataset(embeddings_, optional_path(labels_), templates_);
        const auto ui = optional_ui(ui_);
        std::vector<std::string> ids;
        for (const auto& t : dataset.templates) {
            ids.push_back(t.template_id);
        }
        const auto pooled = resolve_ids(dataset, ids, pipeline(), ui, threads_);

        std::vector<LabeledEmbedding> out;
        std::string table = "template_id,subject_id,ers\n";
        for (std::size_t i = 0; i < pooled.size(); ++i) {
            const auto& t = dataset.templates[i];
            out.push_back({pooled[i].embedding, t.template_id, t.subject_id, std::nullopt});
            table += fmt::format("{},{},{}\n", t.template_id, t.subject_id, io::format_real(pooled[i].ers.capped));
        }
        const auto encoding = encoding_.empty() ? io::read_embedding_file(embeddings_).encoding
                                                : parse_encoding(encoding_);
        prepare_out(out_);
        io::write_embeddings(fs::path(out_) / "templates.ersk", out, encoding);
        io::write_text(fs::path(out_) / "template_ers.csv", table);
        write_snapshot(out_);
        ctx.out << fmt::format("aggregated {} templates with {}\n", out.size(), pipeline().describe());
        return kExitOk;
    }

    std::string embeddings_;
    std::string labels_;
    std::string templates_;
    std::string ui_;
    std::string strategy_ = "square";
    bool media_pool_ = false;
    bool enhance_ = false;
    std::string encoding_;
    std::string out_;
};

// eval-verification / eval-search --------------------------------------------

class EvalCommand : public Command {
public:
    EvalCommand(CLI::App& app, const std::string& name, const std::string& description)
        : Command(app, name, description)
    {
        required("--embeddings", embeddings_, "Embedding file");
        option("--labels", labels_, "Labels file (item_id,subject_id,media_id)");
        option("--templates", templates_, "Template file (template_id,subject_id,item_id)");
        option("--ui", ui_, "UI model file");
        option("--pipeline", pipeline_, "single, single_gated, template, template_gated or enhanced_avg");
        option("--strategy", strategy_, "Template weighting: uniform, identity, square, softmax, top_one, top_fraction:<p>");
        flag("--media-pool", media_pool_, "Average within media before combining across media");
        option("--gamma", cfg_.gamma, "ERS threshold");
        flag("--strict", strict_, "Exit with status 3 when a requested operating point is unattainable");
    }

protected:
    Pipeline pipeline() const { return Pipeline::parse(pipeline_, strategy_, media_pool_); }

    void check_common()
    {
        usage_guard([&] {
            cfg_.validate();
            return 0;
        });
        const auto p = usage_guard([&] { return pipeline(); });
        if (p.needs_ui() && ui_.empty()) {
            throw UsageError(fmt::format("pipeline {} requires --ui", p.describe()));
        }
    }

    Dataset load() const
    {
        return io::load_dataset(embeddings_, optional_path(labels_), optional_path(templates_));
    }

    int finish(const EvalReport& report, const std::string& out, Context& ctx)
    {
        const auto table = format_report_table(report);
        prepare_out(out);
        io::write_text(fs::path(out) / "report.txt", table);
        io::write_text(fs::path(out) / "report.csv", format_report_csv(report));
        write_snapshot(out);
        ctx.out << table;
        report_unattainable(report, ctx);
        return strict_ && report.any_unattainable() ? kExitUnattainable : kExitOk;
    }

    std::string embeddings_;
    std::string labels_;
    std::string templates_;
    std::string ui_;
    std::string pipeline_ = "single";
    std::string strategy_ = "square";
    bool media_pool_ = false;
    DecisionConfig cfg_;
    bool strict_ = false;
};

class EvalVerificationCommand : public EvalCommand {
public:
    explicit EvalVerificationCommand(CLI::App& app)
        : EvalCommand(app, "eval-verification", "FRR at fixed FAR targets over a pair list")
    {
        required("--pairs", pairs_, "Pair list (id_a,id_b,genuine)");
        option("--far-targets", targets_, "Comma-separated FAR targets in (0, 1)")->delimiter(',');
        threads_option();
        required("--out", out_, "Output directory");
    }

private:
    void check() override
    {
        check_common();
        for (double t : targets_) {
            if (!(t > 0.0 && t < 1.0)) {
                throw UsageError("--far-targets must lie in (0, 1)");
            }
        }
    }

    int execute(Context& ctx) override
    {
        const auto report = eval_verification(load(), io::read_pairs(pairs_), pipeline(), optional_ui(ui_), cfg_,
                                              targets_, threads_);
        return finish(report, out_, ctx);
    }

    std::string pairs_;
    std::vector<double> targets_{1e-4, 1e-3, 1e-2};
    std::string out_;
};

class EvalSearchCommand : public EvalCommand {
public:
    explicit EvalSearchCommand(CLI::App& app)
        : EvalCommand(app, "eval-search", "Open-set identification and rank-K accuracy")
    {
        required("--gallery", gallery_, "Gallery manifest (id,subject_id)");
        required("--probes", probes_, "Probe manifest (id,subject_id)");
        flag("--gate-gallery", cfg_.gate_gallery, "Exclude gallery entries whose ERS is below gamma");
        option("--fpir-targets", targets_, "Comma-separated FPIR targets in (0, 1)")->delimiter(',');
        option("--ranks", ranks_, "Comma-separated ranks K for rank-K accuracy")->delimiter(',');
        threads_option();
        required("--out", out_, "Output directory");
    }

private:
    void check() override
    {
        check_common();
        for (double t : targets_) {
            if (!(t > 0.0 && t < 1.0)) {
                throw UsageError("--fpir-targets must lie in (0, 1)");
            }
        }
        for (auto k : ranks_) {
            if (k == 0) {
                throw UsageError("--ranks must be at least 1");
            }
        }
    }

    int execute(Context& ctx) override
    {
        const SearchProtocol protocol{io::read_manifest(gallery_), io::read_manifest(probes_)};
        const auto report =
            eval_search(load(), protocol, pipeline(), optional_ui(ui_), cfg_, targets_, ranks_, threads_);
        return finish(report, out_, ctx);
    }

    std::string gallery_;
    std::string probes_;
    std::vector<double> targets_{1e-2, 1e-1};
    std::vector<std::size_t> ranks_{1, 5, 10};
    std::string out_;
};

// synth ----------------------------------------------------------------------

class SynthCommand : public Command {
public:
    explicit SynthCommand(CLI::App& app) : Command(app, "synth", "Generate a synthetic benchmark directory")
    {
        option("--config", config_, "Generator config file (key = value); defaults apply to omitted keys");
        seed_opt_ = option("--seed", seed_, "Override the generator seed");
        option("--encoding", encoding_, "Override the embedding encoding: text or f32le");
        required("--out,--out-dir", out_, "Output directory");
    }

private:
    void check() override
    {
        if (!encoding_.empty()) {
            parse_encoding(encoding_);
        }
    }

    int execute(Context& ctx) override
    {
        auto cfg = config_.empty() ? GeneratorConfig{} : io::read_generator_config(config_);
        if (seed_opt_->count() > 0) {
            cfg.seed = seed_;
        }
        if (!encoding_.empty()) {
            cfg.encoding = parse_encoding(encoding_);
        }
        usage_guard([&] {
            cfg.validate();
            return 0;
        });
        const auto bench = gen_benchmark(cfg);
        io::write_benchmark(out_, bench);
        write_snapshot(out_);
        ctx.out << fmt::format("wrote {} corpus items, {} evaluation items, {} templates, {} pairs to {}\n",
                               bench.corpus.size(), bench.eval.items.size(), bench.eval.templates.size(),
                               bench.pairs.pairs.size(), out_);
        return kExitOk;
    }

    std::string config_;
    std::uint64_t seed_ = 1;
    CLI::Option* seed_opt_ = nullptr;
    std::string encoding_;
    std::string out_;
};

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Embedding recognizability toolkit", "ers"};
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();

    std::vector<std::unique_ptr<Command>> commands;
    commands.push_back(std::make_unique<ClusterCommand>(app));
    commands.push_back(std::make_unique<UiCentroidCommand>(app));
    commands.push_back(std::make_unique<ScoreCommand>(app));
    commands.push_back(std::make_unique<EnhanceCommand>(app));
    commands.push_back(std::make_unique<VerifyCommand>(app));
    commands.push_back(std::make_unique<SearchCommand>(app));
    commands.push_back(std::make_unique<AggregateCommand>(app));
    commands.push_back(std::make_unique<EvalVerificationCommand>(app));
    commands.push_back(std::make_unique<EvalSearchCommand>(app));
    commands.push_back(std::make_unique<SynthCommand>(app));

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
    }

    Context ctx{out, err};
    for (auto& command : commands) {
        if (!command->parsed()) {
            continue;
        }
        try {
            return command->invoke(ctx);
        } catch (const UsageError& e) {
            err << "error: " << e.what() << "\nRun with --help for usage.\n";
            return kExitUsage;
        } catch (const std::exception& e) {
            err << "error: " << e.what() << '\n';
            return kExitData;
        }
    }
    return kExitUsage;
}

} // namespace ers::cli

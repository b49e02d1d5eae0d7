#include "topicbench/run.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "topicbench/hash.hpp"
#include "topicbench/topics.hpp"
#include "topicbench/vectorize.hpp"

namespace topicbench {

namespace fs = std::filesystem;
using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

std::uint64_t stage_seed(std::uint64_t seed, SeedStage stage) noexcept {
    return seed + static_cast<std::uint64_t>(stage);
}

void apply_override(json& config, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos || eq == 0)
        throw ConfigError("--set expects key=value, got '" + std::string(assignment) + "'");
    const std::string key(assignment.substr(0, eq));
    const std::string text(assignment.substr(eq + 1));
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;

    if (!config.is_object()) throw ConfigError("config must be a JSON object");
    json* node = &config;
    std::size_t start = 0;
    while (true) {
        const auto dot = key.find('.', start);
        const std::string part = key.substr(start, dot - start);
        if (part.empty()) throw ConfigError("--set key '" + key + "' has an empty component");
        if (dot == std::string::npos) {
            (*node)[part] = std::move(value);
            return;
        }
        json& child = (*node)[part];
        if (child.is_null()) child = json::object();
        if (!child.is_object())
            throw ConfigError("--set key '" + key + "': '" + part + "' is not an object");
        node = &child;
        start = dot + 1;
    }
}

namespace {

class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError("config: '" + path_ + "' must be an object");
    }

    void allow(std::initializer_list<std::string_view> keys) const {
        for (const auto& item : j_.items())
            if (std::find(keys.begin(), keys.end(), item.key()) == keys.end())
                throw ConfigError("config: unknown key '" + qualified(item.key()) + "'");
    }

    bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }

    std::optional<Section> section(const std::string& key) const {
        if (!has(key)) return std::nullopt;
        return Section(j_.at(key), qualified(key));
    }

    std::optional<std::string> text(const std::string& key) const {
        if (!has(key)) return std::nullopt;
        if (!j_.at(key).is_string()) fail(key, "a string");
        return j_.at(key).get<std::string>();
    }

    std::optional<double> number(const std::string& key) const {
        if (!has(key)) return std::nullopt;
        if (!j_.at(key).is_number()) fail(key, "a number");
        return j_.at(key).get<double>();
    }

    std::optional<std::uint64_t> count(const std::string& key) const {
        if (!has(key)) return std::nullopt;
        const json& v = j_.at(key);
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
            fail(key, "a non-negative integer");
        return v.get<std::uint64_t>();
    }

    std::optional<bool> flag(const std::string& key) const {
        if (!has(key)) return std::nullopt;
        if (!j_.at(key).is_boolean()) fail(key, "true or false");
        return j_.at(key).get<bool>();
    }

    std::optional<std::vector<std::string>> texts(const std::string& key) const {
        if (!has(key)) return std::nullopt;
        const json& v = j_.at(key);
        if (!v.is_array()) fail(key, "an array of strings");
        std::vector<std::string> out;
        for (const auto& item : v) {
            if (!item.is_string()) fail(key, "an array of strings");
            out.push_back(item.get<std::string>());
        }
        return out;
    }

    std::string qualified(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

private:
    [[noreturn]] void fail(const std::string& key, const char* what) const {
        throw ConfigError("config: '" + qualified(key) + "' must be " + what);
    }

    const json& j_;
    std::string path_;
};

template <typename T, typename U>
void assign(T& target, const std::optional<U>& value) {
    if (value) target = static_cast<T>(*value);
}

fs::path resolve(const fs::path& base, const std::string& p) {
    const fs::path path(p);
    return path.is_absolute() ? path : (base / path).lexically_normal();
}

std::string valid_methods() { return "lsa, lda, bertopic"; }

} // namespace

RunConfig parse_run_config(const json& config, const fs::path& base_dir) {
    const Section root(config, "");
    root.allow({"input", "columns", "preprocess", "method", "seed", "n_words", "lsa", "lda",
                "bertopic", "provider", "eval", "output"});
    RunConfig cfg;

    const auto input = root.text("input");
    if (!input) throw ConfigError("config: 'input' is required");
    cfg.input = resolve(base_dir, *input);

    if (const auto s = root.section("columns")) {
        s->allow({"id", "narrative", "date", "product", "company"});
        assign(cfg.columns.id, s->text("id"));
        assign(cfg.columns.narrative, s->text("narrative"));
        assign(cfg.columns.date, s->text("date"));
        assign(cfg.columns.product, s->text("product"));
        assign(cfg.columns.company, s->text("company"));
    }

    if (const auto s = root.section("preprocess")) {
        s->allow({"stopwords", "stem", "lemma_dict", "min_df", "max_df_ratio"});
        if (const auto p = s->text("stopwords")) cfg.preprocess.stopwords = resolve(base_dir, *p);
        if (const auto p = s->text("lemma_dict")) cfg.preprocess.lemma_dict = resolve(base_dir, *p);
        assign(cfg.preprocess.stem, s->flag("stem"));
        assign(cfg.preprocess.min_df, s->count("min_df"));
        assign(cfg.preprocess.max_df_ratio, s->number("max_df_ratio"));
    }
    if (cfg.preprocess.min_df < 1) throw ConfigError("config: 'preprocess.min_df' must be >= 1");
    if (!(cfg.preprocess.max_df_ratio > 0.0 && cfg.preprocess.max_df_ratio <= 1.0))
        throw ConfigError("config: 'preprocess.max_df_ratio' must be in (0, 1]");

    const auto method = root.text("method");
    if (!method) throw ConfigError("config: 'method' is required (one of " + valid_methods() + ")");
    const auto parsed = parse_method(*method);
    if (!parsed)
        throw ConfigError("config: method '" + *method + "' is not one of " + valid_methods());
    cfg.method = *parsed;

    const auto seed = root.count("seed");
    if (!seed) throw ConfigError("config: 'seed' is required");
    cfg.seed = *seed;

    assign(cfg.n_words, root.count("n_words"));
    if (cfg.n_words < 1) throw ConfigError("config: 'n_words' must be >= 1");

    if (const auto s = root.section("lsa")) {
        s->allow({"num_topics", "oversampling", "power_iterations"});
        assign(cfg.lsa.num_topics, s->count("num_topics"));
        assign(cfg.lsa.svd.oversampling, s->count("oversampling"));
        assign(cfg.lsa.svd.power_iterations, s->count("power_iterations"));
    }
    if (cfg.lsa.num_topics < 1) throw ConfigError("config: 'lsa.num_topics' must be >= 1");

    if (const auto s = root.section("lda")) {
        s->allow({"num_topics", "alpha", "eta", "kappa", "tau0", "batch_size", "epochs",
                  "inference_tolerance", "inference_max_iterations"});
        assign(cfg.lda.num_topics, s->count("num_topics"));
        if (const auto a = s->number("alpha")) cfg.lda.alpha = *a;
        assign(cfg.lda.eta, s->number("eta"));
        assign(cfg.lda.kappa, s->number("kappa"));
        assign(cfg.lda.tau0, s->number("tau0"));
        assign(cfg.lda.batch_size, s->count("batch_size"));
        assign(cfg.lda.epochs, s->count("epochs"));
        assign(cfg.lda.inference.tolerance, s->number("inference_tolerance"));
        assign(cfg.lda.inference.max_iterations, s->count("inference_max_iterations"));
    }
    cfg.lda.seed = stage_seed(cfg.seed, SeedStage::lda);
    cfg.lda.validate();

    if (const auto s = root.section("bertopic")) {
        s->allow({"reduce", "cluster"});
        if (const auto r = s->section("reduce")) {
            r->allow({"n_neighbors", "n_components", "min_dist", "n_epochs", "negative_samples", "method"});
            auto& rc = cfg.bertopic.reduce;
            assign(rc.n_neighbors, r->count("n_neighbors"));
            assign(rc.n_components, r->count("n_components"));
            assign(rc.min_dist, r->number("min_dist"));
            assign(rc.n_epochs, r->count("n_epochs"));
            assign(rc.negative_samples, r->count("negative_samples"));
            if (const auto m = r->text("method")) {
                if (*m == "umap")
                    rc.method = ReduceMethod::umap;
                else if (*m == "pca")
                    rc.method = ReduceMethod::pca;
                else
                    throw ConfigError("config: 'bertopic.reduce.method' must be umap or pca, got '" + *m + "'");
            }
        }
        if (const auto c = s->section("cluster")) {
            c->allow({"min_cluster_size", "min_samples"});
            assign(cfg.bertopic.cluster.min_cluster_size, c->count("min_cluster_size"));
            if (const auto ms = c->count("min_samples")) cfg.bertopic.cluster.min_samples = *ms;
        }
    }
    cfg.bertopic.reduce.seed = stage_seed(cfg.seed, SeedStage::reduce);
    cfg.bertopic.reduce.validate();
    cfg.bertopic.cluster.validate();

    if (const auto s = root.section("provider")) {
        s->allow({"kind", "location", "model", "batch_size", "retries", "max_in_flight", "backoff_ms",
                  "timeout_s"});
        ProviderSpec p;
        const std::string kind = s->text("kind").value_or("file");
        if (kind == "file")
            p.kind = ProviderKind::file;
        else if (kind == "service")
            p.kind = ProviderKind::service;
        else
            throw ConfigError("config: 'provider.kind' must be file or service, got '" + kind + "'");
        const auto location = s->text("location");
        if (!location) throw ConfigError("config: 'provider.location' is required");
        p.location = p.kind == ProviderKind::file ? resolve(base_dir, *location).string() : *location;
        assign(p.model_name, s->text("model"));
        assign(p.batch_size, s->count("batch_size"));
        assign(p.retries, s->count("retries"));
        assign(p.max_in_flight, s->count("max_in_flight"));
        if (const auto ms = s->count("backoff_ms")) p.backoff = std::chrono::milliseconds(*ms);
        if (const auto sec = s->count("timeout_s")) p.timeout = std::chrono::seconds(*sec);
        p.validate();
        cfg.provider = p;
    }

    if (const auto s = root.section("eval")) {
        s->allow({"top_n", "window", "epsilon", "models"});
        assign(cfg.eval.top_n, s->count("top_n"));
        assign(cfg.eval.window, s->count("window"));
        assign(cfg.eval.epsilon, s->number("epsilon"));
        if (const auto models = s->texts("models"))
            for (const auto& m : *models) cfg.eval_models.push_back(resolve(base_dir, m));
    }
    cfg.eval.validate();

    if (const auto out = root.text("output")) cfg.output = resolve(base_dir, *out);
    else cfg.output = resolve(base_dir, "out");

    cfg.effective = config;
    json hashed = config;
    hashed.erase("output");
    cfg.fingerprint = sha256_hex(hashed.dump());
    return cfg;
}

RunConfig resolve_config(const ConfigSources& sources) {
    std::ifstream in(sources.config_path);
    if (!in) throw ConfigError("cannot open config file: " + sources.config_path.string());
    json config = json::parse(in, nullptr, false);
    if (config.is_discarded() || !config.is_object())
        throw ConfigError("config file is not a JSON object: " + sources.config_path.string());

    if (sources.embed_url && !sources.embed_url->empty()) {
        json& provider = config["provider"];
        if (provider.is_null()) provider = json::object();
        if (provider.is_object() && !provider.contains("location")) {
            provider["location"] = *sources.embed_url;
            if (!provider.contains("kind")) provider["kind"] = "service";
        }
    }
    for (const auto& s : sources.overrides) apply_override(config, s);
    if (sources.method) config["method"] = *sources.method;

    const fs::path base = fs::absolute(sources.config_path).parent_path();
    RunConfig cfg = parse_run_config(config, base);
    if (sources.output) cfg.output = fs::absolute(*sources.output).lexically_normal();
    return cfg;
}

NormalizeOptions branch_options(const RunConfig& cfg, Method method) {
    NormalizeOptions opts;
    if (cfg.preprocess.stopwords) opts.stopwords = load_stopwords(*cfg.preprocess.stopwords);
    if (method == Method::bertopic) {
        opts.stem = false;
        return opts;
    }
    opts.stem = cfg.preprocess.stem;
    if (cfg.preprocess.lemma_dict) opts.lemmas = load_lemmas(*cfg.preprocess.lemma_dict);
    return opts;
}

Corpus load_corpus(const RunConfig& cfg, const NormalizeOptions& options, CorpusStats* stats) {
    IngestOptions ingest;
    ingest.columns = cfg.columns;
    const LoadResult loaded = load_csv(cfg.input, ingest);
    if (loaded.complaints.empty()) throw InputError("input has no complaints with a narrative");
    if (stats) {
        stats->total_rows = loaded.total_rows;
        stats->kept_rows = loaded.complaints.size();
        stats->dropped_rows = loaded.dropped_rows;
    }
    return build_corpus(loaded.complaints, options, cfg.input.string());
}

std::string error_line(std::string_view stage, std::string_view message) {
    ojson err = {{"error", {{"stage", stage}, {"message", message}}}};
    return err.dump(-1, ' ', false, ojson::error_handler_t::replace);
}

namespace {

template <typename F>
auto in_stage(const std::string& name, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const StageError&) {
        throw;
    } catch (const ConfigError& e) {
        throw StageError(name, e.what(), 2);
    } catch (const InputError& e) {
        throw StageError(name, e.what(), 3);
    } catch (const ServiceError& e) {
        throw StageError(name, e.what(), 4);
    } catch (const std::exception& e) {
        throw StageError(name, e.what(), 1);
    }
}

/// Collects outputs and timings for one run; the manifest goes last.
class RunOutput {
public:
    RunOutput(fs::path dir, std::string command) : dir_(std::move(dir)), command_(std::move(command)) {
        in_stage("output", [&] { fs::create_directories(dir_); });
    }

    template <typename F>
    auto timed(const std::string& stage, F&& f) -> decltype(f()) {
        const auto start = std::chrono::steady_clock::now();
        struct Record {
            RunOutput& self;
            const std::string& stage;
            std::chrono::steady_clock::time_point start;
            ~Record() {
                const std::chrono::duration<double, std::milli> ms = std::chrono::steady_clock::now() - start;
                self.timings_.emplace_back(stage, ms.count());
            }
        } record{*this, stage, start};
        return in_stage(stage, std::forward<F>(f));
    }

    void write(const std::string& name, const std::string& content) {
        in_stage("output", [&] {
            const fs::path target = dir_ / name;
            const fs::path tmp = dir_ / (name + ".tmp");
            {
                std::ofstream out(tmp, std::ios::binary);
                if (!out) throw InputError("cannot write " + target.string());
                out << content;
                if (!out.flush()) throw InputError("cannot write " + target.string());
            }
            fs::rename(tmp, target);
        });
        files_.push_back(name);
    }

    void finish(const RunConfig& cfg, const CorpusStats& stats, ojson extra = ojson::object()) {
        ojson manifest;
        manifest["artifact"] = "topicbench";
        manifest["version"] = TOPICBENCH_VERSION;
        manifest["command"] = command_;
        manifest["method"] = to_string(cfg.method);
        manifest["seed"] = cfg.seed;
        manifest["config_fingerprint"] = cfg.fingerprint;
        manifest["corpus"] = {{"total_rows", stats.total_rows},
                              {"kept_rows", stats.kept_rows},
                              {"dropped_rows", stats.dropped_rows}};
        for (auto& [k, v] : extra.items()) manifest[k] = v;
        ojson timings = ojson::object();
        for (const auto& [stage, ms] : timings_) {
            const double prior = timings.contains(stage) ? timings[stage].get<double>() : 0.0;
            timings[stage] = prior + ms;
        }
        for (auto& [stage, ms] : timings.items()) ms = std::round(ms.get<double>() * 1000.0) / 1000.0;
        manifest["timings_ms"] = timings;
        manifest["outputs"] = files_;
        write("manifest.json", manifest.dump(2) + "\n");
    }

private:
    fs::path dir_;
    std::string command_;
    std::vector<std::string> files_;
    std::vector<std::pair<std::string, double>> timings_;
};

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("missing model file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string assignments_json(const Corpus& corpus, const std::vector<int>& labels) {
    ojson out = ojson::array();
    for (std::size_t i = 0; i < corpus.size(); ++i)
        out.push_back({{"id", corpus.documents[i].id}, {"topic", labels[i]}});
    return out.dump(2) + "\n";
}

std::string vocabulary_text(const Vocabulary& vocab) {
    std::string out;
    for (const auto& t : vocab.terms()) {
        out += t;
        out += '\n';
    }
    return out;
}

std::string weights_text(const Matrix& m) {
    std::ostringstream ss;
    write_triplets(ss, m);
    return ss.str();
}

} // namespace

void run_ingest(const RunConfig& cfg) {
    RunOutput out(cfg.output, "ingest");
    CorpusStats stats;
    const auto options = out.timed("config", [&] { return branch_options(cfg, cfg.method); });
    const Corpus corpus = out.timed("ingest", [&] { return load_corpus(cfg, options, &stats); });
    std::string lines;
    for (const auto& d : corpus.documents) {
        ojson rec = {{"id", d.id}, {"tokens", d.tokens}};
        lines += rec.dump() + "\n";
    }
    out.write("corpus.jsonl", lines);
    out.finish(cfg, stats, {{"normalization", corpus.options_fingerprint}});
}

void run_embed(const RunConfig& cfg) {
    RunOutput out(cfg.output, "embed");
    if (!cfg.provider) throw StageError("config", "embed requires a 'provider' section", 2);
    CorpusStats stats;
    const auto options = out.timed("config", [&] { return branch_options(cfg, Method::bertopic); });
    const Corpus corpus = out.timed("ingest", [&] { return load_corpus(cfg, options, &stats); });
    const EmbeddingMatrix e = out.timed("embeddings", [&] { return obtain_embeddings(corpus, *cfg.provider); });
    std::ostringstream ss;
    write_embeddings(ss, e);
    out.write("embeddings.tsv", ss.str());
    out.finish(cfg, stats, {{"embedding_model", e.model_name}, {"dim", e.dim()}});
}

void run_fit(const RunConfig& cfg) {
    RunOutput out(cfg.output, "fit");
    if (cfg.method == Method::bertopic && !cfg.provider)
        throw StageError("config", "method bertopic requires a 'provider' section", 2);
    CorpusStats stats;
    const auto options = out.timed("config", [&] { return branch_options(cfg, cfg.method); });
    const Corpus corpus = out.timed("ingest", [&] { return load_corpus(cfg, options, &stats); });
    const Vocabulary vocab = out.timed("vectorize", [&] {
        return build_vocabulary(corpus, cfg.preprocess.min_df, cfg.preprocess.max_df_ratio);
    });
    const DocTermMatrix counts = out.timed("vectorize", [&] { return count_matrix(corpus, vocab); });

    TopicModel model;
    Matrix weights;
    ojson extra = {{"vocab_size", vocab.size()}};
    switch (cfg.method) {
    case Method::lsa: {
        const auto factors = out.timed("lsa", [&] {
            return truncated_svd(tfidf(counts), cfg.lsa.num_topics, stage_seed(cfg.seed, SeedStage::lsa),
                                 cfg.lsa.svd);
        });
        model = out.timed("topics", [&] { return lsa_topics(factors, vocab, cfg.n_words); });
        weights = lsa_term_weights(factors);
        break;
    }
    case Method::lda: {
        const LdaModel lda = out.timed("lda", [&] { return fit_online(counts, cfg.lda); });
        model = out.timed("topics", [&] {
            return lda_topics(lda, counts, vocab, cfg.n_words, cfg.lda.doc_prior());
        });
        weights = lda.beta();
        std::ostringstream ss;
        write_checkpoint(ss, lda);
        out.write("lda_checkpoint.txt", ss.str());
        break;
    }
    case Method::bertopic: {
        const EmbeddingMatrix e =
            out.timed("embeddings", [&] { return obtain_embeddings(corpus, *cfg.provider); });
        const Matrix reduced = out.timed("reduce", [&] { return reduce(e.vectors, cfg.bertopic.reduce); });
        const ClusterResult clusters =
            out.timed("cluster", [&] { return hdbscan(reduced, cfg.bertopic.cluster); });
        const ClassWeights cw = out.timed("topics", [&] { return ctfidf(counts, clusters.labels); });
        model.topics = out.timed("topics", [&] { return top_words(cw.weights, vocab, cfg.n_words); });
        model.assignments = clusters.labels;
        weights = cw.weights;
        extra["clusters"] = clusters.cluster_count();
        extra["noise_documents"] = static_cast<std::size_t>(
            std::count(clusters.labels.begin(), clusters.labels.end(), -1));
        extra["embedding_model"] = e.model_name;
        break;
    }
    }
    model.method = cfg.method;
    model.config_fingerprint = cfg.fingerprint;

    ojson info = {{"method", to_string(cfg.method)},
                  {"config_fingerprint", cfg.fingerprint},
                  {"documents", corpus.size()},
                  {"topics", model.topics.size()},
                  {"vocab_size", vocab.size()}};
    out.write("topics.json", topics_to_json(model));
    out.write("assignments.json", assignments_json(corpus, model.assignments));
    out.write("vocabulary.txt", vocabulary_text(vocab));
    out.write("topic_weights.txt", weights_text(weights));
    out.write("model.json", info.dump(2) + "\n");
    out.finish(cfg, stats, extra);
}

namespace {

struct LoadedModel {
    Method method = Method::lsa;
    TopicTable table;
};

LoadedModel load_model(const fs::path& dir) {
    LoadedModel m;
    const json info = json::parse(read_file(dir / "model.json"), nullptr, false);
    if (info.is_discarded() || !info.is_object() || !info.contains("method") || !info["method"].is_string())
        throw InputError("malformed model file: " + (dir / "model.json").string());
    const auto method = parse_method(info["method"].get<std::string>());
    if (!method) throw InputError("unknown method in " + (dir / "model.json").string());
    m.method = *method;
    m.table = topics_from_json(read_file(dir / "topics.json"));
    return m;
}

/// Topic words of the embedding branch are raw; map them into the
/// normalized corpus, keeping the first occurrence of each form.
std::vector<Topic> normalized_topics(const std::vector<Topic>& topics, const NormalizeOptions& options) {
    std::vector<Topic> out;
    for (const auto& t : topics) {
        Topic n{t.id, {}};
        for (const auto& w : t.words) {
            std::string form = normalize_word(w.word, options);
            if (form.empty()) continue;
            const bool seen = std::any_of(n.words.begin(), n.words.end(),
                                          [&](const WeightedWord& x) { return x.word == form; });
            if (!seen) n.words.push_back({std::move(form), w.weight});
        }
        out.push_back(std::move(n));
    }
    return out;
}

} // namespace

void run_eval(const RunConfig& cfg) {
    RunOutput out(cfg.output, "eval");
    const std::vector<fs::path> dirs = cfg.eval_models.empty() ? std::vector<fs::path>{cfg.output}
                                                                : cfg.eval_models;
    std::vector<LoadedModel> models;
    for (const auto& d : dirs) models.push_back(out.timed("load", [&] { return load_model(d); }));

    CorpusStats stats;
    const auto options = out.timed("config", [&] { return branch_options(cfg, Method::lsa); });
    const Corpus corpus = out.timed("ingest", [&] { return load_corpus(cfg, options, &stats); });

    ojson comparison = ojson::array();
    std::map<std::string, int> used;
    for (std::size_t i = 0; i < models.size(); ++i) {
        const auto& m = models[i];
        const std::vector<Topic> topics =
            m.method == Method::bertopic ? normalized_topics(m.table.topics, options) : m.table.topics;
        const CoherenceReport report =
            out.timed("coherence", [&] { return evaluate(topics, corpus, cfg.eval); });
        const std::string text = report_to_json(report, to_string(m.method));
        if (models.size() == 1) {
            out.write("report.json", text);
        } else {
            std::string name = dirs[i].filename().string();
            if (name.empty()) name = dirs[i].parent_path().filename().string();
            if (used[name]++ > 0) name += "_" + std::to_string(i);
            out.write("report_" + name + ".json", text);
            comparison.push_back({{"model", name},
                                  {"method", to_string(m.method)},
                                  {"c_v", report.c_v},
                                  {"u_mass", report.u_mass}});
        }
    }
    if (models.size() > 1) out.write("comparison.json", comparison.dump(2) + "\n");
    out.finish(cfg, stats, {{"models", models.size()}});
}

void run_map(const RunConfig& cfg, const std::optional<fs::path>& model_dir) {
    RunOutput out(cfg.output, "map");
    const fs::path dir = model_dir ? *model_dir : cfg.output;
    const auto loaded = out.timed("load", [&] {
        LoadedModel m = load_model(dir);
        std::istringstream ss(read_file(dir / "topic_weights.txt"));
        Matrix w = read_triplets(ss, MatrixKind::tfidf).to_dense();
        if (w.rows() != m.table.topics.size())
            throw InputError("topic_weights.txt has " + std::to_string(w.rows()) + " rows for " +
                             std::to_string(m.table.topics.size()) + " topics");
        return std::make_pair(std::move(m), std::move(w));
    });
    const IntertopicMap map = out.timed("map", [&] {
        return intertopic_map(loaded.second, loaded.first.table.sizes, loaded.first.table.topics,
                              stage_seed(cfg.seed, SeedStage::map));
    });
    out.write("map.json", map_to_json(map));
    out.finish(cfg, CorpusStats{}, {{"records", map.records.size()}});
}

} // namespace topicbench

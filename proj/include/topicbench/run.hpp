#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "topicbench/cluster.hpp"
#include "topicbench/coherence.hpp"
#include "topicbench/corpus.hpp"
#include "topicbench/embeddings.hpp"
#include "topicbench/error.hpp"
#include "topicbench/lda.hpp"
#include "topicbench/lsa.hpp"
#include "topicbench/reduce.hpp"
#include "topicbench/topic_model.hpp"

namespace topicbench {

/// An error tagged with the pipeline stage that raised it.
class StageError : public Error {
public:
    StageError(std::string stage, std::string message, int exit_code)
        : Error(message), stage_(std::move(stage)), exit_code_(exit_code) {}
    const std::string& stage() const noexcept { return stage_; }
    int exit_code() const noexcept { return exit_code_; }

private:
    std::string stage_;
    int exit_code_;
};

struct PreprocessConfig {
    std::optional<std::filesystem::path> stopwords; ///< bundled list when unset
    bool stem = true;
    std::optional<std::filesystem::path> lemma_dict;
    std::size_t min_df = 5;
    double max_df_ratio = 0.5;
};

struct LsaSettings {
    std::size_t num_topics = 5;
    SvdOptions svd;
};

struct BertopicSettings {
    ReduceConfig reduce;
    ClusterConfig cluster;
};

struct RunConfig {
    std::filesystem::path input;
    ColumnMap columns;
    PreprocessConfig preprocess;
    Method method = Method::lsa;
    std::uint64_t seed = 0;
    std::size_t n_words = 10;
    LsaSettings lsa;
    LdaConfig lda;
    BertopicSettings bertopic;
    std::optional<ProviderSpec> provider;
    CoherenceParams eval;
    std::vector<std::filesystem::path> eval_models;
    std::filesystem::path output = "out";

    /// Effective configuration with every override applied.
    nlohmann::json effective;
    /// SHA-256 of the effective configuration serialized with sorted keys
    /// and no insignificant whitespace.
    std::string fingerprint;
};

/// Per-module seeds: seed + stage ordinal.
enum class SeedStage : std::uint64_t { lsa = 1, lda = 2, reduce = 3, map = 4 };
std::uint64_t stage_seed(std::uint64_t seed, SeedStage stage) noexcept;

/// Sets a dotted key ("lda.num_topics=12"). The value is parsed as JSON and
/// taken as a plain string when that fails. Throws ConfigError.
void apply_override(nlohmann::json& config, std::string_view assignment);

/// Validates a configuration object. Relative paths are resolved against
/// `base_dir`. Unknown keys, missing input/method/seed and out-of-range
/// values throw ConfigError.
RunConfig parse_run_config(const nlohmann::json& config, const std::filesystem::path& base_dir);

struct ConfigSources {
    std::filesystem::path config_path;
    std::vector<std::string> overrides;     ///< --set, in order
    std::optional<std::string> output;      ///< --out
    std::optional<std::string> method;      ///< --method
    std::optional<std::string> embed_url;   ///< environment, lowest precedence
};

/// Reads the config file and applies the environment, --set and flag
/// overrides in increasing precedence.
RunConfig resolve_config(const ConfigSources& sources);

/// The corpus branch for a method: the stem+stopword branch for lsa/lda,
/// unstemmed tokens with stopwords removed for bertopic.
NormalizeOptions branch_options(const RunConfig& cfg, Method method);

struct CorpusStats {
    std::size_t total_rows = 0;
    std::size_t kept_rows = 0;
    std::size_t dropped_rows = 0;
};

Corpus load_corpus(const RunConfig& cfg, const NormalizeOptions& options, CorpusStats* stats = nullptr);

/// Subcommands. Each writes its outputs into cfg.output and manifest.json
/// last. Module errors surface as StageError.
void run_ingest(const RunConfig& cfg);
void run_embed(const RunConfig& cfg);
void run_fit(const RunConfig& cfg);
void run_eval(const RunConfig& cfg);
void run_map(const RunConfig& cfg, const std::optional<std::filesystem::path>& model_dir = {});

/// One line of JSON: {"error": {"stage": ..., "message": ...}}.
std::string error_line(std::string_view stage, std::string_view message);

} // namespace topicbench

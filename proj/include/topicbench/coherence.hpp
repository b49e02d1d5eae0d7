#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "topicbench/corpus.hpp"
#include "topicbench/exec.hpp"
#include "topicbench/topic_model.hpp"

namespace topicbench {

enum class ContextMode { document, window };

/// Context counts for a fixed word set. A word occurs in a context if it
/// appears there at least once.
class CooccurrenceCounts {
public:
    CooccurrenceCounts(ContextMode mode, std::size_t window, std::vector<std::string> words);

    ContextMode mode() const noexcept { return mode_; }
    std::size_t window() const noexcept { return window_; }
    std::size_t n_contexts() const noexcept { return n_contexts_; }
    const std::vector<std::string>& words() const noexcept { return words_; }
    std::optional<std::size_t> find(std::string_view word) const;

    std::size_t single(std::size_t i) const noexcept { return pair_[i * words_.size() + i]; }
    std::size_t pair(std::size_t i, std::size_t j) const noexcept { return pair_[i * words_.size() + j]; }
    std::size_t single(std::string_view word) const;
    std::size_t pair(std::string_view a, std::string_view b) const;

    /// Adds one context containing the given distinct word indices.
    void add_context(std::span<const std::size_t> present);
    void merge(const CooccurrenceCounts& other);

private:
    ContextMode mode_;
    std::size_t window_;
    std::size_t n_contexts_ = 0;
    std::vector<std::string> words_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<std::size_t> pair_; ///< symmetric, diagonal = single
};

/// Document mode: one context per document. Window mode: every contiguous
/// span of `window` tokens, step 1; a document with at most `window` tokens
/// is one context. Duplicate words are counted once.
CooccurrenceCounts count_contexts(const Corpus& corpus, std::span<const std::string> words,
                                  ContextMode mode, std::size_t window = 110,
                                  Exec exec = Exec::parallel);

struct UMassScore {
    double value = 0.0;
    std::size_t pairs = 0;         ///< pairs that contributed
    std::size_t skipped_pairs = 0; ///< pairs whose conditioning word never occurs
};

/// Mean over i > j of ln((pair(w_i, w_j) + 1) / single(w_j)) for words
/// ranked by topic weight. No pairs gives 0.
UMassScore u_mass(std::span<const std::string> ranked_words, const CooccurrenceCounts& counts);

struct NpmiScore {
    double value = 0.0;
    bool undefined = false; ///< a marginal was zero; value is 0
};

/// ln((P12 + ε) / (P1 P2)) / −ln(P12 + ε), clamped to [−1, 1]; exactly 1
/// when the pair occurs in every context.
NpmiScore npmi(std::size_t i, std::size_t j, const CooccurrenceCounts& counts, double epsilon);

struct CvScore {
    double value = 0.0;
    std::size_t zero_vectors = 0; ///< segments scored 0 for lack of a direction
    std::size_t undefined_npmi = 0;
};

/// One-set segmentation over the distinct words: mean cosine between each
/// word's NPMI vector and the sum of all of them.
CvScore c_v(std::span<const std::string> words, const CooccurrenceCounts& counts, double epsilon);

struct CoherenceParams {
    std::size_t top_n = 10;
    std::size_t window = 110;
    double epsilon = 1e-12;

    void validate() const;
};

struct TopicCoherence {
    int topic = 0;
    double c_v = 0.0;
    double u_mass = 0.0;
    std::vector<std::string> skipped_words; ///< absent from the corpus
    bool degenerate = false;                ///< fewer than two scorable words
};

struct CoherenceReport {
    std::vector<TopicCoherence> per_topic;
    double c_v = 0.0;    ///< mean over topics
    double u_mass = 0.0; ///< mean over topics
    CoherenceParams params;
};

/// Scores the first top_n words of every topic. Words missing from the
/// corpus are skipped per topic. Throws InputError when no topic word occurs
/// anywhere in the corpus or there are no topics.
CoherenceReport evaluate(std::span<const Topic> topics, const Corpus& corpus,
                         const CoherenceParams& params, Exec exec = Exec::parallel);

/// `{"aggregate": {...}, "per_topic": [...], "params": {...}}`.
std::string report_to_json(const CoherenceReport& report, std::string_view method = {});

} // namespace topicbench

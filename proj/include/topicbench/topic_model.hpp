#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "topicbench/vectorize.hpp"

namespace topicbench {

enum class Method { lsa, lda, bertopic };

std::string_view to_string(Method m) noexcept;
std::optional<Method> parse_method(std::string_view name) noexcept;

struct WeightedWord {
    std::string word;
    double weight = 0.0;
    friend bool operator==(const WeightedWord&, const WeightedWord&) = default;
};

struct Topic {
    int id = 0;
    std::vector<WeightedWord> words; ///< descending weight, ties lexicographic
    friend bool operator==(const Topic&, const Topic&) = default;
};

/// Output shared by all three pipelines. Assignment -1 marks a document the
/// embedding pipeline left as noise.
struct TopicModel {
    Method method = Method::lsa;
    std::vector<Topic> topics;
    std::vector<int> assignments;
    std::string config_fingerprint;

    /// Number of documents assigned to `topic_id`.
    std::size_t topic_size(int topic_id) const;
    /// Number of documents with a non-noise assignment.
    std::size_t assigned_documents() const;
};

/// Indices of the `n` largest weights, descending; equal weights are
/// ordered by index (lexicographic term order for a sorted vocabulary).
std::vector<std::size_t> rank_terms(std::span<const double> weights, std::size_t n);

/// Builds a topic from one row of term weights.
Topic make_topic(int id, std::span<const double> weights, const Vocabulary& vocab,
                 std::size_t n_words);

} // namespace topicbench

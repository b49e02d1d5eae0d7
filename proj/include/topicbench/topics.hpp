#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "topicbench/linalg.hpp"
#include "topicbench/topic_model.hpp"
#include "topicbench/vectorize.hpp"

namespace topicbench {

struct ClassWeights {
    Matrix weights;                 ///< one row per class 0..C−1
    std::vector<std::size_t> sizes; ///< documents per class
};

/// W(t, c) = tf(t, c) · ln(1 + A / f(t)), where tf sums counts over the
/// documents labeled c, f(t) = Σ_c tf(t, c) and A is the mean token total
/// per class. Documents labeled −1 are ignored. Throws ConfigError for a
/// non-count matrix and InputError when labels are misaligned, no class
/// exists, or a class in 0..max label has no documents.
ClassWeights ctfidf(const DocTermMatrix& counts, std::span<const int> labels);

/// Topic c lists the n_words terms with the largest W(·, c).
/// Throws ConfigError when n_words == 0.
std::vector<Topic> top_words(const Matrix& weights, const Vocabulary& vocab, std::size_t n_words);

struct MapRecord {
    int topic = 0;
    double x = 0.0;
    double y = 0.0;
    std::size_t size = 0;
    std::vector<std::string> words;
};

struct IntertopicMap {
    std::vector<MapRecord> records;
};

/// Two-dimensional layout of the L2-normalized class weight rows: PCA for at
/// most 10 classes, UMAP with min(5, C − 1) neighbors otherwise. Coordinates
/// are centered at the size-weighted centroid.
IntertopicMap intertopic_map(const Matrix& weights, std::span<const std::size_t> sizes,
                             std::span<const Topic> topics, std::uint64_t seed);

/// Rounds to 9 significant digits.
double round_significant(double v) noexcept;

struct TopicTable {
    std::vector<Topic> topics;
    std::vector<std::size_t> sizes; ///< aligned with topics
};

/// `[{"topic", "size", "words": [{"w", "s"}...]}...]`, weights rounded to 9
/// significant digits.
std::string topics_to_json(const TopicModel& model);
std::string topics_to_json(const TopicTable& table);
/// Throws InputError for malformed JSON or missing fields.
TopicTable topics_from_json(std::string_view text);

/// `[{"topic", "x", "y", "size", "words": [...]}...]`.
std::string map_to_json(const IntertopicMap& map);

} // namespace topicbench

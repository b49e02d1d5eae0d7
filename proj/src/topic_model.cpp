#include "topicbench/topic_model.hpp"

#include <algorithm>
#include <numeric>

namespace topicbench {

std::string_view to_string(Method m) noexcept {
    switch (m) {
    case Method::lsa: return "lsa";
    case Method::lda: return "lda";
    case Method::bertopic: return "bertopic";
    }
    return "unknown";
}

std::optional<Method> parse_method(std::string_view name) noexcept {
    if (name == "lsa") return Method::lsa;
    if (name == "lda") return Method::lda;
    if (name == "bertopic") return Method::bertopic;
    return std::nullopt;
}

std::size_t TopicModel::topic_size(int topic_id) const {
    return static_cast<std::size_t>(std::count(assignments.begin(), assignments.end(), topic_id));
}

std::size_t TopicModel::assigned_documents() const {
    return static_cast<std::size_t>(
        std::count_if(assignments.begin(), assignments.end(), [](int a) { return a >= 0; }));
}

std::vector<std::size_t> rank_terms(std::span<const double> weights, std::size_t n) {
    std::vector<std::size_t> order(weights.size());
    std::iota(order.begin(), order.end(), 0);
    n = std::min(n, order.size());
    auto better = [&](std::size_t a, std::size_t b) {
        if (weights[a] != weights[b]) return weights[a] > weights[b];
        return a < b;
    };
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n), order.end(),
                      better);
    order.resize(n);
    return order;
}

Topic make_topic(int id, std::span<const double> weights, const Vocabulary& vocab,
                 std::size_t n_words) {
    Topic topic{id, {}};
    for (auto t : rank_terms(weights, n_words)) topic.words.push_back({vocab.term(t), weights[t]});
    return topic;
}

} // namespace topicbench

#include "topicbench/coherence.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include <json.hpp>

#include "topicbench/error.hpp"

namespace topicbench {

CooccurrenceCounts::CooccurrenceCounts(ContextMode mode, std::size_t window,
                                       std::vector<std::string> words)
    : mode_(mode), window_(window), words_(std::move(words)),
      pair_(words_.size() * words_.size(), 0) {
    for (std::size_t i = 0; i < words_.size(); ++i)
        if (!index_.emplace(words_[i], i).second)
            throw InputError("coherence: duplicate word '" + words_[i] + "' in the counted set");
}

std::optional<std::size_t> CooccurrenceCounts::find(std::string_view word) const {
    const auto it = index_.find(std::string(word));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::size_t CooccurrenceCounts::single(std::string_view word) const {
    const auto i = find(word);
    return i ? single(*i) : 0;
}

std::size_t CooccurrenceCounts::pair(std::string_view a, std::string_view b) const {
    const auto i = find(a);
    const auto j = find(b);
    return i && j ? pair(*i, *j) : 0;
}

void CooccurrenceCounts::add_context(std::span<const std::size_t> present) {
    const std::size_t w = words_.size();
    ++n_contexts_;
    for (std::size_t p = 0; p < present.size(); ++p) {
        const std::size_t a = present[p];
        ++pair_[a * w + a];
        for (std::size_t q = p + 1; q < present.size(); ++q) {
            const std::size_t b = present[q];
            ++pair_[a * w + b];
            ++pair_[b * w + a];
        }
    }
}

void CooccurrenceCounts::merge(const CooccurrenceCounts& other) {
    n_contexts_ += other.n_contexts_;
    for (std::size_t i = 0; i < pair_.size(); ++i) pair_[i] += other.pair_[i];
}

namespace {

constexpr std::size_t npos = static_cast<std::size_t>(-1);

void count_document(const Document& doc, const CooccurrenceCounts& proto, ContextMode mode,
                    std::size_t window, CooccurrenceCounts& out, std::vector<std::size_t>& in_window,
                    std::vector<std::size_t>& present, std::vector<std::size_t>& ids) {
    ids.clear();
    for (const auto& tok : doc.tokens) {
        const auto i = proto.find(tok);
        ids.push_back(i ? *i : npos);
    }
    present.clear();
    auto enter = [&](std::size_t id) {
        if (id != npos && in_window[id]++ == 0) present.push_back(id);
    };
    auto leave = [&](std::size_t id) {
        if (id != npos && --in_window[id] == 0)
            present.erase(std::find(present.begin(), present.end(), id));
    };

    if (mode == ContextMode::document || ids.size() <= window) {
        for (auto id : ids) enter(id);
        out.add_context(present);
        for (auto id : ids) leave(id);
        return;
    }
    for (std::size_t t = 0; t < window; ++t) enter(ids[t]);
    out.add_context(present);
    for (std::size_t start = 1; start + window <= ids.size(); ++start) {
        leave(ids[start - 1]);
        enter(ids[start + window - 1]);
        out.add_context(present);
    }
    for (std::size_t t = ids.size() - window; t < ids.size(); ++t) leave(ids[t]);
}

} // namespace

CooccurrenceCounts count_contexts(const Corpus& corpus, std::span<const std::string> words,
                                  ContextMode mode, std::size_t window, Exec exec) {
    if (mode == ContextMode::window && window < 1) throw ConfigError("coherence: window must be >= 1");
    std::vector<std::string> distinct;
    std::unordered_set<std::string> seen;
    for (const auto& w : words)
        if (seen.insert(w).second) distinct.push_back(w);
    CooccurrenceCounts total(mode, window, distinct);

    const auto n = static_cast<std::ptrdiff_t>(corpus.size());
    if (exec == Exec::serial) {
        std::vector<std::size_t> in_window(distinct.size(), 0), present, ids;
        for (std::ptrdiff_t d = 0; d < n; ++d)
            count_document(corpus.documents[static_cast<std::size_t>(d)], total, mode, window, total,
                           in_window, present, ids);
        return total;
    }
#pragma omp parallel
    {
        CooccurrenceCounts local(mode, window, distinct);
        std::vector<std::size_t> in_window(distinct.size(), 0), present, ids;
#pragma omp for schedule(dynamic, 16) nowait
        for (std::ptrdiff_t d = 0; d < n; ++d)
            count_document(corpus.documents[static_cast<std::size_t>(d)], total, mode, window, local,
                           in_window, present, ids);
        // Integer sums, so the merge order does not matter.
#pragma omp critical(topicbench_coherence_merge)
        total.merge(local);
    }
    return total;
}

UMassScore u_mass(std::span<const std::string> ranked_words, const CooccurrenceCounts& counts) {
    UMassScore score;
    double sum = 0.0;
    for (std::size_t i = 1; i < ranked_words.size(); ++i)
        for (std::size_t j = 0; j < i; ++j) {
            const std::size_t given = counts.single(ranked_words[j]);
            if (given == 0) {
                ++score.skipped_pairs;
                continue;
            }
            const auto joint = static_cast<double>(counts.pair(ranked_words[i], ranked_words[j]));
            sum += std::log((joint + 1.0) / static_cast<double>(given));
            ++score.pairs;
        }
    if (score.pairs > 0) score.value = sum / static_cast<double>(score.pairs);
    return score;
}

NpmiScore npmi(std::size_t i, std::size_t j, const CooccurrenceCounts& counts, double epsilon) {
    const auto n = static_cast<double>(counts.n_contexts());
    if (counts.single(i) == 0 || counts.single(j) == 0 || n == 0.0) return {0.0, true};
    const double p1 = static_cast<double>(counts.single(i)) / n;
    const double p2 = static_cast<double>(counts.single(j)) / n;
    const double p12 = static_cast<double>(counts.pair(i, j)) / n;
    if (p12 == 1.0) return {1.0, false};
    const double value = std::log((p12 + epsilon) / (p1 * p2)) / -std::log(p12 + epsilon);
    return {std::clamp(value, -1.0, 1.0), false};
}

CvScore c_v(std::span<const std::string> words, const CooccurrenceCounts& counts, double epsilon) {
    std::vector<std::size_t> idx;
    for (const auto& w : words) {
        const auto i = counts.find(w);
        if (!i) throw InputError("coherence: word '" + w + "' was not counted");
        if (std::find(idx.begin(), idx.end(), *i) == idx.end()) idx.push_back(*i);
    }
    // Canonical order makes the score bitwise independent of the ranking.
    std::sort(idx.begin(), idx.end());
    CvScore score;
    const std::size_t m = idx.size();
    if (m == 0) return score;
    std::vector<double> vectors(m * m);
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b) {
            const auto s = npmi(idx[a], idx[b], counts, epsilon);
            if (s.undefined) ++score.undefined_npmi;
            vectors[a * m + b] = s.value;
        }
    std::vector<double> total(m, 0.0);
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b) total[b] += vectors[a * m + b];
    double total_norm = 0.0;
    for (double v : total) total_norm += v * v;
    total_norm = std::sqrt(total_norm);

    double sum = 0.0;
    for (std::size_t a = 0; a < m; ++a) {
        double dotp = 0.0;
        double norm = 0.0;
        for (std::size_t b = 0; b < m; ++b) {
            dotp += vectors[a * m + b] * total[b];
            norm += vectors[a * m + b] * vectors[a * m + b];
        }
        norm = std::sqrt(norm);
        if (norm == 0.0 || total_norm == 0.0) {
            ++score.zero_vectors;
            continue;
        }
        sum += std::clamp(dotp / (norm * total_norm), -1.0, 1.0);
    }
    score.value = sum / static_cast<double>(m);
    return score;
}

void CoherenceParams::validate() const {
    if (top_n < 1) throw ConfigError("eval: top_n must be >= 1");
    if (window < 1) throw ConfigError("eval: window must be >= 1");
    if (!(epsilon > 0.0)) throw ConfigError("eval: epsilon must be > 0");
}

CoherenceReport evaluate(std::span<const Topic> topics, const Corpus& corpus,
                         const CoherenceParams& params, Exec exec) {
    params.validate();
    if (topics.empty()) throw InputError("eval: the model has no topics");
    std::vector<std::vector<std::string>> lists;
    std::vector<std::string> all;
    for (const auto& t : topics) {
        std::vector<std::string> list;
        for (std::size_t i = 0; i < t.words.size() && i < params.top_n; ++i) list.push_back(t.words[i].word);
        all.insert(all.end(), list.begin(), list.end());
        lists.push_back(std::move(list));
    }
    const auto docs = count_contexts(corpus, all, ContextMode::document, 0, exec);
    const auto windows = count_contexts(corpus, all, ContextMode::window, params.window, exec);

    bool any_present = false;
    CoherenceReport report;
    report.params = params;
    for (std::size_t k = 0; k < topics.size(); ++k) {
        TopicCoherence tc;
        tc.topic = topics[k].id;
        std::vector<std::string> kept;
        for (const auto& w : lists[k]) {
            if (docs.single(w) == 0)
                tc.skipped_words.push_back(w);
            else if (std::find(kept.begin(), kept.end(), w) == kept.end())
                kept.push_back(w);
        }
        any_present = any_present || !kept.empty();
        tc.degenerate = kept.size() < 2;
        tc.u_mass = u_mass(kept, docs).value;
        tc.c_v = c_v(kept, windows, params.epsilon).value;
        report.per_topic.push_back(std::move(tc));
    }
    if (!any_present) throw InputError("eval: no topic word occurs in the corpus");
    for (const auto& tc : report.per_topic) {
        report.c_v += tc.c_v;
        report.u_mass += tc.u_mass;
    }
    report.c_v /= static_cast<double>(report.per_topic.size());
    report.u_mass /= static_cast<double>(report.per_topic.size());
    return report;
}

std::string report_to_json(const CoherenceReport& report, std::string_view method) {
    using json = nlohmann::ordered_json;
    json per_topic = json::array();
    for (const auto& t : report.per_topic)
        per_topic.push_back({{"topic", t.topic},
                             {"c_v", t.c_v},
                             {"u_mass", t.u_mass},
                             {"skipped_words", t.skipped_words},
                             {"degenerate", t.degenerate}});
    json params = {{"top_n", report.params.top_n},
                   {"window", report.params.window},
                   {"epsilon", report.params.epsilon}};
    if (!method.empty()) params["method"] = method;
    json out = {{"aggregate", {{"c_v", report.c_v}, {"u_mass", report.u_mass}}},
                {"per_topic", std::move(per_topic)},
                {"params", std::move(params)}};
    return out.dump(2) + "\n";
}

} // namespace topicbench

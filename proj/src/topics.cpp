#include "topicbench/topics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include <json.hpp>

#include "topicbench/error.hpp"
#include "topicbench/reduce.hpp"

namespace topicbench {

using json = nlohmann::ordered_json;

ClassWeights ctfidf(const DocTermMatrix& counts, std::span<const int> labels) {
    if (counts.kind() != MatrixKind::counts) throw ConfigError("ctfidf: requires a counts matrix");
    if (labels.size() != counts.rows())
        throw InputError("ctfidf: " + std::to_string(labels.size()) + " labels for " +
                         std::to_string(counts.rows()) + " documents");
    int max_label = -1;
    for (int l : labels) {
        if (l < -1) throw InputError("ctfidf: label " + std::to_string(l) + " is invalid");
        max_label = std::max(max_label, l);
    }
    if (max_label < 0) throw InputError("ctfidf: every document is noise");
    const auto n_classes = static_cast<std::size_t>(max_label) + 1;
    const std::size_t v = counts.cols();

    ClassWeights out;
    out.weights = Matrix(n_classes, v);
    out.sizes.assign(n_classes, 0);
    Matrix& tf = out.weights;
    for (std::size_t d = 0; d < counts.rows(); ++d) {
        if (labels[d] < 0) continue;
        const auto c = static_cast<std::size_t>(labels[d]);
        ++out.sizes[c];
        const auto row = counts.row(d);
        for (std::size_t p = 0; p < row.size(); ++p) tf(c, row.cols[p]) += row.values[p];
    }
    for (std::size_t c = 0; c < n_classes; ++c)
        if (out.sizes[c] == 0) throw InputError("ctfidf: class " + std::to_string(c) + " has no documents");

    std::vector<double> f(v, 0.0);
    double total = 0.0;
    for (std::size_t c = 0; c < n_classes; ++c)
        for (std::size_t t = 0; t < v; ++t) {
            f[t] += tf(c, t);
            total += tf(c, t);
        }
    const double avg = total / static_cast<double>(n_classes);
    for (std::size_t c = 0; c < n_classes; ++c)
        for (std::size_t t = 0; t < v; ++t)
            if (tf(c, t) > 0.0) tf(c, t) *= std::log(1.0 + avg / f[t]);
    return out;
}

std::vector<Topic> top_words(const Matrix& weights, const Vocabulary& vocab, std::size_t n_words) {
    if (n_words == 0) throw ConfigError("n_words must be >= 1");
    std::vector<Topic> topics;
    for (std::size_t c = 0; c < weights.rows(); ++c)
        topics.push_back(make_topic(static_cast<int>(c), weights.row(c), vocab, n_words));
    return topics;
}

IntertopicMap intertopic_map(const Matrix& weights, std::span<const std::size_t> sizes,
                             std::span<const Topic> topics, std::uint64_t seed) {
    const std::size_t c = weights.rows();
    if (sizes.size() != c || topics.size() != c)
        throw InputError("intertopic_map: weights, sizes and topics are misaligned");
    IntertopicMap map;
    if (c == 0) return map;

    Matrix unit = weights;
    for (std::size_t r = 0; r < c; ++r) {
        const auto row = unit.row(r);
        const double norm = std::sqrt(dot(row, row));
        if (norm > 0.0)
            for (double& x : row) x /= norm;
    }

    Matrix xy(c, 2);
    if (c > 10 && unit.cols() > 2) {
        ReduceConfig cfg;
        cfg.method = ReduceMethod::umap;
        cfg.n_neighbors = std::min<std::size_t>(5, c - 1);
        cfg.n_components = 2;
        cfg.seed = seed;
        xy = reduce(unit, cfg);
    } else if (c > 1) {
        const std::size_t dims = std::min({std::size_t{2}, c - 1, unit.cols()});
        const Matrix p = pca(unit, dims).projected;
        for (std::size_t r = 0; r < c; ++r)
            for (std::size_t d = 0; d < dims; ++d) xy(r, d) = p(r, d);
    }

    double total = 0.0;
    double cx = 0.0;
    double cy = 0.0;
    for (std::size_t r = 0; r < c; ++r) {
        const auto w = static_cast<double>(sizes[r]);
        total += w;
        cx += w * xy(r, 0);
        cy += w * xy(r, 1);
    }
    if (total > 0.0) {
        cx /= total;
        cy /= total;
    } else {
        cx = cy = 0.0;
        for (std::size_t r = 0; r < c; ++r) {
            cx += xy(r, 0) / static_cast<double>(c);
            cy += xy(r, 1) / static_cast<double>(c);
        }
    }
    for (std::size_t r = 0; r < c; ++r) {
        MapRecord rec;
        rec.topic = topics[r].id;
        rec.x = xy(r, 0) - cx;
        rec.y = xy(r, 1) - cy;
        rec.size = sizes[r];
        for (const auto& w : topics[r].words) rec.words.push_back(w.word);
        map.records.push_back(std::move(rec));
    }
    return map;
}

double round_significant(double v) noexcept {
    if (!std::isfinite(v) || v == 0.0) return v;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return std::strtod(buf, nullptr);
}

std::string topics_to_json(const TopicTable& table) {
    json out = json::array();
    for (std::size_t i = 0; i < table.topics.size(); ++i) {
        const auto& t = table.topics[i];
        json words = json::array();
        for (const auto& w : t.words) words.push_back({{"w", w.word}, {"s", round_significant(w.weight)}});
        out.push_back({{"topic", t.id}, {"size", table.sizes.at(i)}, {"words", std::move(words)}});
    }
    return out.dump(2) + "\n";
}

std::string topics_to_json(const TopicModel& model) {
    TopicTable table;
    table.topics = model.topics;
    for (const auto& t : model.topics) table.sizes.push_back(model.topic_size(t.id));
    return topics_to_json(table);
}

TopicTable topics_from_json(std::string_view text) {
    TopicTable table;
    try {
        const json doc = json::parse(text);
        if (!doc.is_array()) throw InputError("topics file must hold a JSON array");
        for (const auto& rec : doc) {
            Topic t;
            t.id = rec.at("topic").get<int>();
            for (const auto& w : rec.at("words"))
                t.words.push_back({w.at("w").get<std::string>(), w.at("s").get<double>()});
            table.sizes.push_back(rec.at("size").get<std::size_t>());
            table.topics.push_back(std::move(t));
        }
    } catch (const json::exception& ex) {
        throw InputError(std::string("malformed topics JSON: ") + ex.what());
    }
    return table;
}

std::string map_to_json(const IntertopicMap& map) {
    json out = json::array();
    for (const auto& r : map.records)
        out.push_back({{"topic", r.topic},
                       {"x", round_significant(r.x)},
                       {"y", round_significant(r.y)},
                       {"size", r.size},
                       {"words", r.words}});
    return out.dump(2) + "\n";
}

} // namespace topicbench

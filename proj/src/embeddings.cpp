#include "topicbench/embeddings.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "topicbench/error.hpp"

namespace topicbench {

using json = nlohmann::json;

void ProviderSpec::validate() const {
    if (batch_size < 1) throw ConfigError("provider: batch_size must be >= 1");
    if (max_in_flight < 1) throw ConfigError("provider: max_in_flight must be >= 1");
    if (location.empty()) throw ConfigError("provider: location is empty");
}

EmbeddingMatrix parse_embeddings(std::istream& in) {
    EmbeddingMatrix e;
    std::vector<double> values;
    std::size_t dim = 0;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto t1 = line.find('\t');
        const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
        if (t2 == std::string::npos)
            throw InputError("embeddings line " + std::to_string(lineno) +
                             ": expected id<TAB>dim<TAB>values");
        std::string id = line.substr(0, t1);
        std::size_t declared = 0;
        const auto dim_text = std::string_view(line).substr(t1 + 1, t2 - t1 - 1);
        auto [p, ec] = std::from_chars(dim_text.data(), dim_text.data() + dim_text.size(), declared);
        if (ec != std::errc() || p != dim_text.data() + dim_text.size())
            throw InputError("embeddings record '" + id + "': bad dimension field");

        std::size_t count = 0;
        std::string_view rest = std::string_view(line).substr(t2 + 1);
        while (true) {
            const auto comma = rest.find(',');
            const std::string item(rest.substr(0, comma));
            char* end = nullptr;
            const double v = std::strtod(item.c_str(), &end);
            if (item.empty() || end != item.c_str() + item.size())
                throw InputError("embeddings record '" + id + "': bad value '" + item + "'");
            if (!std::isfinite(v)) throw InputError("embeddings record '" + id + "': non-finite value");
            values.push_back(v);
            ++count;
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        if (count != declared)
            throw InputError("embeddings record '" + id + "': declares dim " +
                             std::to_string(declared) + " but has " + std::to_string(count) +
                             " values");
        if (e.ids.empty()) {
            dim = declared;
        } else if (declared != dim) {
            throw InputError("embeddings record '" + id + "': dimension " +
                             std::to_string(declared) + " differs from " + std::to_string(dim));
        }
        e.ids.push_back(std::move(id));
    }
    if (e.ids.empty()) throw InputError("embeddings file has no records");
    e.vectors = Matrix(e.ids.size(), dim);
    e.vectors.data() = std::move(values);
    return e;
}

EmbeddingMatrix load_embeddings_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open embeddings file: " + path.string());
    return parse_embeddings(in);
}

void write_embeddings(std::ostream& out, const EmbeddingMatrix& e) {
    char buf[32];
    for (std::size_t i = 0; i < e.size(); ++i) {
        out << e.ids[i] << '\t' << e.dim() << '\t';
        for (std::size_t j = 0; j < e.dim(); ++j) {
            std::snprintf(buf, sizeof buf, "%.9g", e.vectors(i, j));
            if (j > 0) out << ',';
            out << buf;
        }
        out << '\n';
    }
}

void write_embeddings_file(const std::filesystem::path& path, const EmbeddingMatrix& e) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write embeddings file: " + path.string());
    write_embeddings(out, e);
}

std::string embed_request_body(std::string_view model, std::span<const std::string> texts) {
    json body = {{"model", model}, {"texts", texts}};
    return body.dump();
}

Matrix parse_embed_response(std::string_view body, std::size_t expected) {
    json doc;
    try {
        doc = json::parse(body);
    } catch (const json::exception& ex) {
        throw ServiceError(std::string("embedding service returned invalid JSON: ") + ex.what());
    }
    if (!doc.is_object() || !doc.contains("dim") || !doc.contains("vectors") ||
        !doc["vectors"].is_array() || !doc["dim"].is_number_integer())
        throw ServiceError("embedding service response lacks dim/vectors");
    const auto dim = doc["dim"].get<std::size_t>();
    const auto& vectors = doc["vectors"];
    if (vectors.size() != expected)
        throw ServiceError("embedding service returned " + std::to_string(vectors.size()) +
                           " vectors for " + std::to_string(expected) + " texts");
    Matrix m(expected, dim);
    for (std::size_t i = 0; i < expected; ++i) {
        const auto& v = vectors[i];
        if (!v.is_array() || v.size() != dim)
            throw ServiceError("embedding service vector " + std::to_string(i) +
                               " does not have dim " + std::to_string(dim));
        for (std::size_t j = 0; j < dim; ++j) {
            if (!v[j].is_number()) throw ServiceError("embedding service returned a non-number");
            m(i, j) = v[j].get<double>();
        }
    }
    return m;
}

namespace {

struct Endpoint {
    std::string origin; ///< scheme://host[:port]
    std::string base;   ///< path prefix without trailing slash
};

Endpoint split_url(const std::string& url) {
    const auto scheme = url.find("://");
    const auto path_start = url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
    Endpoint ep;
    ep.origin = path_start == std::string::npos ? url : url.substr(0, path_start);
    ep.base = path_start == std::string::npos ? "" : url.substr(path_start);
    while (!ep.base.empty() && ep.base.back() == '/') ep.base.pop_back();
    return ep;
}

Matrix post_batch(const Endpoint& ep, const ProviderSpec& spec, std::span<const std::string> texts) {
    httplib::Client client(ep.origin);
    client.set_connection_timeout(spec.timeout);
    client.set_read_timeout(spec.timeout);
    client.set_write_timeout(spec.timeout);
    const std::string body = embed_request_body(spec.model_name, texts);
    std::string last_error;
    const std::size_t attempts = spec.retries + 1;
    for (std::size_t attempt = 0; attempt < attempts; ++attempt) {
        if (attempt > 0) std::this_thread::sleep_for(spec.backoff * (1LL << (attempt - 1)));
        auto res = client.Post(ep.base + "/embed", body, "application/json");
        if (!res) {
            last_error = "connection failed (" + httplib::to_string(res.error()) + ")";
            continue;
        }
        if (res->status != 200) {
            last_error = "HTTP status " + std::to_string(res->status);
            continue;
        }
        return parse_embed_response(res->body, texts.size());
    }
    throw ServiceError("embedding service at " + spec.location + " failed after " +
                       std::to_string(attempts) + " attempts: " + last_error);
}

} // namespace

EmbeddingMatrix fetch_embeddings(const Corpus& corpus, const ProviderSpec& spec) {
    spec.validate();
    if (spec.kind != ProviderKind::service)
        throw ConfigError("fetch_embeddings requires a service provider");
    const Endpoint ep = split_url(spec.location);

    std::vector<std::string> texts;
    texts.reserve(corpus.size());
    for (const auto& d : corpus.documents) texts.push_back(d.raw_text);
    const std::size_t n_batches = (texts.size() + spec.batch_size - 1) / spec.batch_size;

    std::vector<Matrix> results(n_batches);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        while (true) {
            const std::size_t b = next.fetch_add(1);
            if (b >= n_batches) return;
            {
                std::lock_guard lock(failure_mutex);
                if (failure) return;
            }
            const std::size_t start = b * spec.batch_size;
            const std::size_t count = std::min(spec.batch_size, texts.size() - start);
            try {
                results[b] = post_batch(ep, spec, std::span(texts).subspan(start, count));
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                return;
            }
        }
    };
    const std::size_t n_workers = std::min(spec.max_in_flight, std::max<std::size_t>(n_batches, 1));
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < n_workers; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);

    EmbeddingMatrix e;
    e.model_name = spec.model_name;
    const std::size_t dim = n_batches ? results.front().cols() : 0;
    e.vectors = Matrix(texts.size(), dim);
    std::size_t row = 0;
    for (std::size_t b = 0; b < n_batches; ++b) {
        if (results[b].cols() != dim)
            throw ServiceError("embedding service changed dimension between batches (" +
                               std::to_string(dim) + " vs " + std::to_string(results[b].cols()) +
                               ")");
        for (std::size_t i = 0; i < results[b].rows(); ++i, ++row)
            for (std::size_t j = 0; j < dim; ++j) e.vectors(row, j) = results[b](i, j);
    }
    for (const auto& d : corpus.documents) e.ids.push_back(d.id);
    return e;
}

bool service_healthy(const std::string& base_url, std::chrono::seconds timeout) {
    const Endpoint ep = split_url(base_url);
    httplib::Client client(ep.origin);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    auto res = client.Get(ep.base + "/health");
    if (!res || res->status != 200) return false;
    const json doc = json::parse(res->body, nullptr, false);
    return doc.is_object() && doc.value("status", "") == "ok";
}

std::vector<std::string> list_models(const std::string& base_url, std::chrono::seconds timeout) {
    const Endpoint ep = split_url(base_url);
    httplib::Client client(ep.origin);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    auto res = client.Get(ep.base + "/models");
    if (!res) throw ServiceError("embedding service at " + base_url + " is unreachable");
    if (res->status != 200)
        throw ServiceError("embedding service /models returned HTTP " + std::to_string(res->status));
    const json doc = json::parse(res->body, nullptr, false);
    if (!doc.is_object() || !doc.contains("models") || !doc["models"].is_array())
        throw ServiceError("embedding service /models response lacks a models list");
    std::vector<std::string> names;
    for (const auto& m : doc["models"]) {
        if (!m.is_string()) throw ServiceError("embedding service /models lists a non-string name");
        names.push_back(m.get<std::string>());
    }
    return names;
}

const EmbeddingMatrix& validate(const EmbeddingMatrix& e, const Corpus& corpus) {
    if (e.size() != corpus.size() || e.ids.size() != e.size())
        throw InputError("embeddings have " + std::to_string(e.size()) + " rows but the corpus has " +
                         std::to_string(corpus.size()) + " documents");
    if (e.dim() < 2) throw InputError("embeddings must have dimension >= 2");
    for (std::size_t i = 0; i < e.size(); ++i) {
        const auto& doc_id = corpus.documents[i].id;
        if (e.ids[i] != doc_id)
            throw InputError("embeddings are not aligned with the corpus: row " + std::to_string(i) +
                             " has id '" + e.ids[i] + "', expected document '" + doc_id + "'");
        for (double v : e.vectors.row(i))
            if (!std::isfinite(v)) throw InputError("embedding for document '" + doc_id + "' is not finite");
    }
    return e;
}

EmbeddingMatrix obtain_embeddings(const Corpus& corpus, const ProviderSpec& spec) {
    spec.validate();
    EmbeddingMatrix e = spec.kind == ProviderKind::file ? load_embeddings_file(spec.location)
                                                        : fetch_embeddings(corpus, spec);
    if (e.model_name.empty()) e.model_name = spec.model_name;
    validate(e, corpus);
    return e;
}

} // namespace topicbench

#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "topicbench/corpus.hpp"
#include "topicbench/linalg.hpp"

namespace topicbench {

struct EmbeddingMatrix {
    std::vector<std::string> ids; ///< aligned with the rows of `vectors`
    Matrix vectors;
    std::string model_name;

    std::size_t size() const noexcept { return vectors.rows(); }
    std::size_t dim() const noexcept { return vectors.cols(); }
};

enum class ProviderKind { file, service };

struct ProviderSpec {
    ProviderKind kind = ProviderKind::file;
    std::string location;   ///< file path or base URL
    std::string model_name; ///< opaque encoder label forwarded to the service
    std::size_t batch_size = 64;
    std::size_t retries = 2;
    std::size_t max_in_flight = 1;
    std::chrono::milliseconds backoff{250}; ///< first retry delay, doubled per attempt
    std::chrono::seconds timeout{120};

    void validate() const;
};

/// Reads `id<TAB>dim<TAB>v1,...,vdim` records. Throws InputError for an
/// empty file, a malformed line, a dimension mismatch or a non-finite value,
/// naming the offending id.
EmbeddingMatrix load_embeddings_file(const std::filesystem::path& path);
EmbeddingMatrix parse_embeddings(std::istream& in);

/// Writes the same format with 9 significant digits per value.
void write_embeddings_file(const std::filesystem::path& path, const EmbeddingMatrix& e);
void write_embeddings(std::ostream& out, const EmbeddingMatrix& e);

/// Body of POST /embed.
std::string embed_request_body(std::string_view model, std::span<const std::string> texts);

/// Parses a /embed response and checks it carries `expected` vectors of the
/// advertised dimension. Throws ServiceError otherwise.
Matrix parse_embed_response(std::string_view body, std::size_t expected);

/// Sends raw document texts to the service in batches of `spec.batch_size`
/// (up to `spec.max_in_flight` concurrently), retrying each batch with
/// exponential backoff, and assembles vectors in request order.
EmbeddingMatrix fetch_embeddings(const Corpus& corpus, const ProviderSpec& spec);

/// GET /health; true iff the service answers {"status": "ok"}.
bool service_healthy(const std::string& base_url, std::chrono::seconds timeout = std::chrono::seconds{5});

/// GET /models. Throws ServiceError when unreachable or malformed.
std::vector<std::string> list_models(const std::string& base_url,
                                     std::chrono::seconds timeout = std::chrono::seconds{5});

/// Checks row count, id order, finiteness and dimension against the corpus.
/// Returns the matrix unchanged; throws InputError naming the first
/// offending document id.
const EmbeddingMatrix& validate(const EmbeddingMatrix& e, const Corpus& corpus);

/// Loads (file) or fetches (service) embeddings and validates them.
EmbeddingMatrix obtain_embeddings(const Corpus& corpus, const ProviderSpec& spec);

} // namespace topicbench

#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace topicbench {

/// Source column names. Defaults follow the CFPB complaint export.
struct ColumnMap {
    std::string id = "Complaint ID";
    std::string narrative = "Consumer complaint narrative";
    std::string date = "Date received";
    std::string product = "Product";
    std::string company = "Company";
};

struct IngestOptions {
    ColumnMap columns;
};

struct RawComplaint {
    std::int64_t complaint_id = 0;
    std::optional<std::chrono::year_month_day> date_received;
    std::string product;
    std::string company;
    std::string narrative; ///< verbatim
};

struct LoadResult {
    std::vector<RawComplaint> complaints;
    std::size_t total_rows = 0;   ///< data rows, header excluded
    std::size_t dropped_rows = 0; ///< rows without a narrative
};

/// Reads a complaint export. Rows whose narrative is empty or blank are
/// dropped and counted. Throws InputError for a missing file, a missing
/// id/narrative column, malformed quoting, bad ids or dates, or duplicate ids.
LoadResult load_csv(const std::filesystem::path& path, const IngestOptions& options = {});
LoadResult parse_complaints(std::string_view csv_text, const IngestOptions& options = {});

/// Lowercased maximal runs of Unicode letters. Runs made only of the letter
/// x (length >= 2, the CFPB redaction marker) are dropped.
std::vector<std::string> tokenize(std::string_view text);

using StopwordSet = std::unordered_set<std::string>;
using LemmaDictionary = std::unordered_map<std::string, std::string>;

/// The bundled English stopword list.
const StopwordSet& default_stopwords();
/// One lowercase word per line; blank lines and lines starting with '#' ignored.
StopwordSet load_stopwords(const std::filesystem::path& path);
/// Lines of "form lemma" separated by whitespace.
LemmaDictionary load_lemmas(const std::filesystem::path& path);

std::vector<std::string> normalize(std::vector<std::string> tokens, const StopwordSet& stopwords,
                                   bool stem);

struct NormalizeOptions {
    StopwordSet stopwords = default_stopwords();
    bool stem = true;
    LemmaDictionary lemmas;

    /// Stable digest of every option that affects token output.
    std::string fingerprint() const;
};

/// Lemma lookup, stopword removal, then optional Porter stemming.
std::vector<std::string> normalize(std::vector<std::string> tokens,
                                   const NormalizeOptions& options);

/// Applies the same normalization to a single word (e.g. a topic word that
/// must be looked up in a normalized corpus). Returns an empty string when
/// the word normalizes away.
std::string normalize_word(std::string_view word, const NormalizeOptions& options);

struct Document {
    std::string id;
    std::string raw_text;
    std::vector<std::string> tokens;
};

struct Corpus {
    std::vector<Document> documents;
    std::string source;
    std::string options_fingerprint;

    std::size_t size() const noexcept { return documents.size(); }
};

/// Tokenizes and normalizes every complaint, preserving row order.
Corpus build_corpus(std::span<const RawComplaint> complaints, const NormalizeOptions& options,
                    std::string source = {});

/// Convenience for tests and tools: a corpus from pre-tokenized documents.
Corpus corpus_from_tokens(const std::vector<std::vector<std::string>>& docs);

} // namespace topicbench

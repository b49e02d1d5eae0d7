#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "topicbench/corpus.hpp"
#include "topicbench/linalg.hpp"

namespace topicbench {

/// Lexicographically sorted term list with its inverse index and the
/// document frequency of every term.
class Vocabulary {
public:
    Vocabulary() = default;
    /// `terms` must be sorted and unique; `doc_freq` aligned with it.
    Vocabulary(std::vector<std::string> terms, std::vector<std::size_t> doc_freq);

    std::size_t size() const noexcept { return terms_.size(); }
    bool empty() const noexcept { return terms_.empty(); }
    const std::string& term(std::size_t i) const { return terms_[i]; }
    const std::vector<std::string>& terms() const noexcept { return terms_; }
    std::size_t doc_freq(std::size_t i) const { return doc_freq_[i]; }
    std::optional<std::size_t> find(std::string_view term) const;

private:
    std::vector<std::string> terms_;
    std::vector<std::size_t> doc_freq_;
    std::unordered_map<std::string, std::size_t> index_;
};

/// Keeps terms with min_df <= df and df / n_docs <= max_df_ratio.
/// Throws ConfigError for out-of-range thresholds and InputError when
/// nothing survives pruning.
Vocabulary build_vocabulary(const Corpus& corpus, std::size_t min_df = 5,
                            double max_df_ratio = 0.5);

enum class MatrixKind { counts, tfidf };

struct SparseRow {
    std::span<const std::size_t> cols;
    std::span<const double> values;
    std::size_t size() const noexcept { return cols.size(); }
};

/// Compressed sparse rows. Column indices are strictly increasing within a
/// row and no explicit zeros are stored.
class DocTermMatrix {
public:
    DocTermMatrix() = default;
    DocTermMatrix(std::size_t rows, std::size_t cols, MatrixKind kind,
                  std::vector<std::size_t> row_ptr, std::vector<std::size_t> col_idx,
                  std::vector<double> values);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t nnz() const noexcept { return values_.size(); }
    MatrixKind kind() const noexcept { return kind_; }

    SparseRow row(std::size_t r) const noexcept {
        const auto b = row_ptr_[r];
        const auto e = row_ptr_[r + 1];
        return {std::span(col_idx_).subspan(b, e - b), std::span(values_).subspan(b, e - b)};
    }

    double sum() const noexcept;
    double at(std::size_t r, std::size_t c) const noexcept;
    Matrix to_dense() const;
    DocTermMatrix transpose() const;

    /// Keeps only the listed rows, in the given order.
    DocTermMatrix select_rows(std::span<const std::size_t> rows) const;

    static DocTermMatrix from_dense(const Matrix& m, MatrixKind kind);

    friend bool operator==(const DocTermMatrix&, const DocTermMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    MatrixKind kind_ = MatrixKind::counts;
    std::vector<std::size_t> row_ptr_{0};
    std::vector<std::size_t> col_idx_;
    std::vector<double> values_;
};

/// Term occurrence counts; out-of-vocabulary tokens are ignored.
DocTermMatrix count_matrix(const Corpus& corpus, const Vocabulary& vocab);

/// Smoothed inverse document frequency ln((1 + N) / (1 + df)) + 1 computed
/// from a counts matrix.
std::vector<double> inverse_document_frequency(const DocTermMatrix& counts);

/// count x idf with every nonzero row scaled to unit Euclidean norm.
/// Throws ConfigError unless `counts.kind() == MatrixKind::counts`.
DocTermMatrix tfidf(const DocTermMatrix& counts);

/// Text dump: a "rows cols nnz" header, then one "row col value" triplet per
/// line in row-major order.
void write_triplets(std::ostream& out, const DocTermMatrix& m);
void write_triplets(std::ostream& out, const Matrix& m);
DocTermMatrix read_triplets(std::istream& in, MatrixKind kind);

} // namespace topicbench

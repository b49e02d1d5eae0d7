#include "topicbench/vectorize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <unordered_set>

#include "topicbench/error.hpp"

namespace topicbench {

Vocabulary::Vocabulary(std::vector<std::string> terms, std::vector<std::size_t> doc_freq)
    : terms_(std::move(terms)), doc_freq_(std::move(doc_freq)) {
    if (terms_.size() != doc_freq_.size())
        throw std::invalid_argument("Vocabulary: terms and doc_freq differ in length");
    index_.reserve(terms_.size());
    for (std::size_t i = 0; i < terms_.size(); ++i) {
        if (i > 0 && !(terms_[i - 1] < terms_[i]))
            throw std::invalid_argument("Vocabulary: terms must be sorted and unique");
        index_.emplace(terms_[i], i);
    }
}

std::optional<std::size_t> Vocabulary::find(std::string_view term) const {
    auto it = index_.find(std::string(term));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

Vocabulary build_vocabulary(const Corpus& corpus, std::size_t min_df, double max_df_ratio) {
    if (min_df < 1) throw ConfigError("min_df must be >= 1");
    if (!(max_df_ratio > 0.0 && max_df_ratio <= 1.0))
        throw ConfigError("max_df_ratio must lie in (0, 1]");

    std::map<std::string, std::size_t> df;
    std::unordered_set<std::string_view> seen;
    for (const auto& doc : corpus.documents) {
        seen.clear();
        for (const auto& t : doc.tokens)
            if (seen.insert(t).second) ++df[t];
    }
    const double n_docs = static_cast<double>(corpus.size());
    std::vector<std::string> terms;
    std::vector<std::size_t> freqs;
    for (const auto& [term, f] : df) {
        if (f < min_df) continue;
        if (static_cast<double>(f) / n_docs > max_df_ratio) continue;
        terms.push_back(term);
        freqs.push_back(f);
    }
    if (terms.empty())
        throw InputError("vocabulary is empty after pruning (min_df=" + std::to_string(min_df) +
                         ", max_df_ratio=" + std::to_string(max_df_ratio) + ")");
    return Vocabulary(std::move(terms), std::move(freqs));
}

DocTermMatrix::DocTermMatrix(std::size_t rows, std::size_t cols, MatrixKind kind,
                             std::vector<std::size_t> row_ptr, std::vector<std::size_t> col_idx,
                             std::vector<double> values)
    : rows_(rows), cols_(cols), kind_(kind), row_ptr_(std::move(row_ptr)),
      col_idx_(std::move(col_idx)), values_(std::move(values)) {
    if (row_ptr_.size() != rows_ + 1 || col_idx_.size() != values_.size() ||
        row_ptr_.back() != values_.size())
        throw std::invalid_argument("DocTermMatrix: inconsistent CSR arrays");
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) {
            if (col_idx_[p] >= cols_ || (p > row_ptr_[r] && col_idx_[p] <= col_idx_[p - 1]))
                throw std::invalid_argument("DocTermMatrix: bad column index");
            if (!(values_[p] > 0.0) || !std::isfinite(values_[p]))
                throw std::invalid_argument("DocTermMatrix: entries must be finite and positive");
        }
    }
}

double DocTermMatrix::sum() const noexcept {
    double s = 0.0;
    for (double v : values_) s += v;
    return s;
}

double DocTermMatrix::at(std::size_t r, std::size_t c) const noexcept {
    const auto row_cols = row(r);
    auto it = std::lower_bound(row_cols.cols.begin(), row_cols.cols.end(), c);
    if (it == row_cols.cols.end() || *it != c) return 0.0;
    return row_cols.values[static_cast<std::size_t>(it - row_cols.cols.begin())];
}

Matrix DocTermMatrix::to_dense() const {
    Matrix m(rows_, cols_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) m(r, col_idx_[p]) = values_[p];
    return m;
}

DocTermMatrix DocTermMatrix::transpose() const {
    std::vector<std::size_t> ptr(cols_ + 1, 0);
    for (auto c : col_idx_) ++ptr[c + 1];
    for (std::size_t c = 0; c < cols_; ++c) ptr[c + 1] += ptr[c];
    std::vector<std::size_t> idx(nnz());
    std::vector<double> val(nnz());
    auto next = ptr;
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) {
            const auto dst = next[col_idx_[p]]++;
            idx[dst] = r;
            val[dst] = values_[p];
        }
    }
    return DocTermMatrix(cols_, rows_, kind_, std::move(ptr), std::move(idx), std::move(val));
}

DocTermMatrix DocTermMatrix::select_rows(std::span<const std::size_t> rows) const {
    std::vector<std::size_t> ptr{0};
    std::vector<std::size_t> idx;
    std::vector<double> val;
    for (auto r : rows) {
        for (std::size_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) {
            idx.push_back(col_idx_[p]);
            val.push_back(values_[p]);
        }
        ptr.push_back(idx.size());
    }
    return DocTermMatrix(rows.size(), cols_, kind_, std::move(ptr), std::move(idx), std::move(val));
}

DocTermMatrix DocTermMatrix::from_dense(const Matrix& m, MatrixKind kind) {
    std::vector<std::size_t> ptr{0};
    std::vector<std::size_t> idx;
    std::vector<double> val;
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            if (m(r, c) != 0.0) {
                idx.push_back(c);
                val.push_back(m(r, c));
            }
        }
        ptr.push_back(idx.size());
    }
    return DocTermMatrix(m.rows(), m.cols(), kind, std::move(ptr), std::move(idx), std::move(val));
}

DocTermMatrix count_matrix(const Corpus& corpus, const Vocabulary& vocab) {
    if (vocab.empty()) throw ConfigError("count_matrix: vocabulary is empty");
    std::vector<std::size_t> ptr{0};
    std::vector<std::size_t> idx;
    std::vector<double> val;
    std::map<std::size_t, double> row;
    for (const auto& doc : corpus.documents) {
        row.clear();
        for (const auto& t : doc.tokens)
            if (auto col = vocab.find(t)) row[*col] += 1.0;
        for (const auto& [c, v] : row) {
            idx.push_back(c);
            val.push_back(v);
        }
        ptr.push_back(idx.size());
    }
    return DocTermMatrix(corpus.size(), vocab.size(), MatrixKind::counts, std::move(ptr),
                         std::move(idx), std::move(val));
}

std::vector<double> inverse_document_frequency(const DocTermMatrix& counts) {
    std::vector<std::size_t> df(counts.cols(), 0);
    for (std::size_t r = 0; r < counts.rows(); ++r)
        for (auto c : counts.row(r).cols) ++df[c];
    const double n = static_cast<double>(counts.rows());
    std::vector<double> idf(counts.cols());
    for (std::size_t t = 0; t < idf.size(); ++t)
        idf[t] = std::log((1.0 + n) / (1.0 + static_cast<double>(df[t]))) + 1.0;
    return idf;
}

DocTermMatrix tfidf(const DocTermMatrix& counts) {
    if (counts.kind() != MatrixKind::counts)
        throw ConfigError("tfidf expects a counts matrix; refusing to reweight a tfidf matrix");
    const auto idf = inverse_document_frequency(counts);
    std::vector<std::size_t> ptr{0};
    std::vector<std::size_t> idx;
    std::vector<double> val;
    for (std::size_t r = 0; r < counts.rows(); ++r) {
        const auto row = counts.row(r);
        const auto start = val.size();
        double norm = 0.0;
        for (std::size_t p = 0; p < row.size(); ++p) {
            const double w = row.values[p] * idf[row.cols[p]];
            idx.push_back(row.cols[p]);
            val.push_back(w);
            norm += w * w;
        }
        norm = std::sqrt(norm);
        for (auto p = start; p < val.size(); ++p) val[p] /= norm;
        ptr.push_back(idx.size());
    }
    return DocTermMatrix(counts.rows(), counts.cols(), MatrixKind::tfidf, std::move(ptr),
                         std::move(idx), std::move(val));
}

namespace {
std::string format_value(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}
} // namespace

void write_triplets(std::ostream& out, const DocTermMatrix& m) {
    out << m.rows() << ' ' << m.cols() << ' ' << m.nnz() << '\n';
    for (std::size_t r = 0; r < m.rows(); ++r) {
        const auto row = m.row(r);
        for (std::size_t p = 0; p < row.size(); ++p)
            out << r << ' ' << row.cols[p] << ' ' << format_value(row.values[p]) << '\n';
    }
}

void write_triplets(std::ostream& out, const Matrix& m) {
    std::size_t nnz = 0;
    for (double v : m.data()) nnz += v != 0.0;
    out << m.rows() << ' ' << m.cols() << ' ' << nnz << '\n';
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c)
            if (m(r, c) != 0.0) out << r << ' ' << c << ' ' << format_value(m(r, c)) << '\n';
}

DocTermMatrix read_triplets(std::istream& in, MatrixKind kind) {
    std::size_t rows = 0, cols = 0, nnz = 0;
    if (!(in >> rows >> cols >> nnz)) throw InputError("matrix dump: bad header");
    std::vector<std::size_t> ptr(rows + 1, 0);
    std::vector<std::size_t> idx;
    std::vector<double> val;
    idx.reserve(nnz);
    val.reserve(nnz);
    std::size_t prev_r = 0, prev_c = 0;
    for (std::size_t i = 0; i < nnz; ++i) {
        std::size_t r = 0, c = 0;
        double v = 0.0;
        if (!(in >> r >> c >> v)) throw InputError("matrix dump: truncated at entry " + std::to_string(i));
        if (r >= rows || c >= cols) throw InputError("matrix dump: entry out of range");
        if (i > 0 && (r < prev_r || (r == prev_r && c <= prev_c)))
            throw InputError("matrix dump: entries not in row-major order");
        prev_r = r;
        prev_c = c;
        ++ptr[r + 1];
        idx.push_back(c);
        val.push_back(v);
    }
    for (std::size_t r = 0; r < rows; ++r) ptr[r + 1] += ptr[r];
    return DocTermMatrix(rows, cols, kind, std::move(ptr), std::move(idx), std::move(val));
}

} // namespace topicbench

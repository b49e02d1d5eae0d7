#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace topicbench {

/// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const noexcept { return {data_.data() + r * cols_, cols_}; }

    std::vector<double>& data() noexcept { return data_; }
    const std::vector<double>& data() const noexcept { return data_; }

    Matrix transpose() const;

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix multiply(const Matrix& a, const Matrix& b);

double dot(std::span<const double> a, std::span<const double> b) noexcept;
double squared_distance(std::span<const double> a, std::span<const double> b) noexcept;
double euclidean_distance(std::span<const double> a, std::span<const double> b) noexcept;

/// Thin QR: replaces the columns of `a` (m x n, m >= n) with an orthonormal
/// basis of their span computed by Householder reflections.
void orthonormalize_columns(Matrix& a);

struct SymmetricEigen {
    std::vector<double> values; ///< descending
    Matrix vectors;             ///< column i pairs with values[i]
};

/// Cyclic Jacobi eigensolver for a symmetric matrix.
SymmetricEigen symmetric_eigen(const Matrix& a);

struct ThinSvd {
    Matrix u;                 ///< m x r
    std::vector<double> s;    ///< r values, descending
    Matrix vt;                ///< r x n
};

/// One-sided Jacobi SVD of a dense m x n matrix, r = min(m, n).
ThinSvd jacobi_svd(const Matrix& a);

/// Flips each right singular vector (row of `vt`) so that its entry of
/// largest magnitude is positive, flipping the paired column of `u` too.
void canonicalize_signs(Matrix& u, Matrix& vt);

} // namespace topicbench

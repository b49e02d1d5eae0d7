#include "topicbench/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace topicbench {

Matrix Matrix::transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c)
            t(c, r) = (*this)(r, c);
    return t;
}

Matrix multiply(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows())
        throw std::invalid_argument("multiply: inner dimensions differ");
    Matrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto orow = out.row(i);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            auto brow = b.row(k);
            for (std::size_t j = 0; j < b.cols(); ++j) orow[j] += aik * brow[j];
        }
    }
    return out;
}

double dot(std::span<const double> a, std::span<const double> b) noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

double euclidean_distance(std::span<const double> a, std::span<const double> b) noexcept {
    return std::sqrt(squared_distance(a, b));
}

void orthonormalize_columns(Matrix& a) {
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    if (n > m) throw std::invalid_argument("orthonormalize_columns: more columns than rows");

    // Householder vectors, stored column by column.
    std::vector<std::vector<double>> reflectors(n);
    for (std::size_t j = 0; j < n; ++j) {
        double norm = 0.0;
        for (std::size_t i = j; i < m; ++i) norm += a(i, j) * a(i, j);
        norm = std::sqrt(norm);
        auto& v = reflectors[j];
        v.assign(m - j, 0.0);
        if (norm == 0.0) continue;
        const double alpha = a(j, j) > 0 ? -norm : norm;
        for (std::size_t i = j; i < m; ++i) v[i - j] = a(i, j);
        v[0] -= alpha;
        double vnorm = 0.0;
        for (double x : v) vnorm += x * x;
        vnorm = std::sqrt(vnorm);
        if (vnorm == 0.0) {
            v.assign(m - j, 0.0);
            continue;
        }
        for (double& x : v) x /= vnorm;
        for (std::size_t c = j; c < n; ++c) {
            double proj = 0.0;
            for (std::size_t i = j; i < m; ++i) proj += v[i - j] * a(i, c);
            for (std::size_t i = j; i < m; ++i) a(i, c) -= 2.0 * proj * v[i - j];
        }
    }

    // Q = H_0 H_1 ... H_{n-1} applied to the first n columns of I.
    Matrix q(m, n);
    for (std::size_t j = 0; j < n; ++j) q(j, j) = 1.0;
    for (std::size_t jj = n; jj-- > 0;) {
        const auto& v = reflectors[jj];
        for (std::size_t c = 0; c < n; ++c) {
            double proj = 0.0;
            for (std::size_t i = jj; i < m; ++i) proj += v[i - jj] * q(i, c);
            if (proj == 0.0) continue;
            for (std::size_t i = jj; i < m; ++i) q(i, c) -= 2.0 * proj * v[i - jj];
        }
    }
    a = std::move(q);
}

SymmetricEigen symmetric_eigen(const Matrix& input) {
    const std::size_t n = input.rows();
    if (input.cols() != n) throw std::invalid_argument("symmetric_eigen: matrix not square");
    Matrix a = input;
    Matrix v(n, n);
    for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (off == 0.0) break;
        double diag = 0.0;
        for (std::size_t p = 0; p < n; ++p) diag += a(p, p) * a(p, p);
        if (off <= 1e-32 * diag) break;

        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });
    SymmetricEigen out{std::vector<double>(n), Matrix(n, n)};
    for (std::size_t j = 0; j < n; ++j) {
        out.values[j] = a(order[j], order[j]);
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = v(i, order[j]);
    }
    return out;
}

namespace {

// Replaces numerically-zero columns of `w` with unit vectors orthogonal to
// the remaining columns so the factor stays orthonormal.
void complete_orthonormal(Matrix& w, const std::vector<bool>& zero) {
    const std::size_t m = w.rows();
    const std::size_t r = w.cols();
    std::size_t candidate = 0;
    for (std::size_t j = 0; j < r; ++j) {
        if (!zero[j]) continue;
        while (candidate < m) {
            std::vector<double> e(m, 0.0);
            e[candidate++] = 1.0;
            for (int pass = 0; pass < 2; ++pass) {
                for (std::size_t c = 0; c < r; ++c) {
                    if (c == j || (zero[c] && c > j)) continue;
                    double proj = 0.0;
                    for (std::size_t i = 0; i < m; ++i) proj += w(i, c) * e[i];
                    for (std::size_t i = 0; i < m; ++i) e[i] -= proj * w(i, c);
                }
            }
            double norm = 0.0;
            for (double x : e) norm += x * x;
            norm = std::sqrt(norm);
            if (norm > 1e-6) {
                for (std::size_t i = 0; i < m; ++i) w(i, j) = e[i] / norm;
                break;
            }
        }
    }
}

// One-sided Jacobi on a tall matrix (m >= n). Returns W = A V with mutually
// orthogonal columns, plus V.
void hestenes(Matrix& w, Matrix& v) {
    const std::size_t m = w.rows();
    const std::size_t n = w.cols();
    v = Matrix(n, n);
    for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;
    constexpr double eps = 1e-15;
    for (int sweep = 0; sweep < 100; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                double alpha = 0.0, beta = 0.0, gamma = 0.0;
                for (std::size_t i = 0; i < m; ++i) {
                    const double wp = w(i, p);
                    const double wq = w(i, q);
                    alpha += wp * wp;
                    beta += wq * wq;
                    gamma += wp * wq;
                }
                if (gamma == 0.0 || std::abs(gamma) <= eps * std::sqrt(alpha * beta)) continue;
                rotated = true;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = (zeta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t i = 0; i < m; ++i) {
                    const double wp = w(i, p);
                    const double wq = w(i, q);
                    w(i, p) = c * wp - s * wq;
                    w(i, q) = s * wp + c * wq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double vp = v(i, p);
                    const double vq = v(i, q);
                    v(i, p) = c * vp - s * vq;
                    v(i, q) = s * vp + c * vq;
                }
            }
        }
        if (!rotated) break;
    }
}

} // namespace

ThinSvd jacobi_svd(const Matrix& a) {
    const bool wide = a.rows() < a.cols();
    Matrix w = wide ? a.transpose() : a;
    const std::size_t m = w.rows();
    const std::size_t n = w.cols();
    Matrix v;
    hestenes(w, v);

    std::vector<double> norms(n);
    double largest = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += w(i, j) * w(i, j);
        norms[j] = std::sqrt(s);
        largest = std::max(largest, norms[j]);
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return norms[x] > norms[y]; });

    // Left factor of the tall problem: normalized columns of W.
    Matrix left(m, n);
    Matrix right(n, n);
    std::vector<double> s(n);
    std::vector<bool> zero(n, false);
    const double cutoff = largest * 1e-14;
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t src = order[j];
        s[j] = norms[src];
        if (s[j] <= cutoff) {
            zero[j] = true;
        } else {
            for (std::size_t i = 0; i < m; ++i) left(i, j) = w(i, src) / s[j];
        }
        for (std::size_t i = 0; i < n; ++i) right(i, j) = v(i, src);
    }
    complete_orthonormal(left, zero);

    ThinSvd out;
    out.s = std::move(s);
    if (wide) {
        // a^T = left * S * right^T  =>  a = right * S * left^T
        out.u = std::move(right);
        out.vt = left.transpose();
    } else {
        out.u = std::move(left);
        out.vt = right.transpose();
    }
    return out;
}

void canonicalize_signs(Matrix& u, Matrix& vt) {
    for (std::size_t r = 0; r < vt.rows(); ++r) {
        auto row = vt.row(r);
        std::size_t best = 0;
        for (std::size_t c = 1; c < row.size(); ++c)
            if (std::abs(row[c]) > std::abs(row[best])) best = c;
        if (row.empty() || row[best] >= 0) continue;
        for (double& x : row) x = -x;
        for (std::size_t i = 0; i < u.rows(); ++i) u(i, r) = -u(i, r);
    }
}

} // namespace topicbench

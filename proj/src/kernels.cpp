#include "topicbench/kernels.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace topicbench::kernels {

namespace {

void product_row(const DocTermMatrix& a, const Matrix& x, Matrix& out, std::size_t r) {
    const auto row = a.row(r);
    auto dst = out.row(r);
    for (std::size_t p = 0; p < row.size(); ++p) {
        const double v = row.values[p];
        const auto src = x.row(row.cols[p]);
        for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += v * src[j];
    }
}

void knn_row(const Matrix& points, std::size_t k, std::size_t i, NeighborLists& out,
             std::vector<std::pair<double, std::size_t>>& scratch) {
    const std::size_t n = points.rows();
    scratch.clear();
    const auto pi = points.row(i);
    for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        scratch.emplace_back(euclidean_distance(pi, points.row(j)), j);
    }
    std::partial_sort(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(k),
                      scratch.end());
    for (std::size_t q = 0; q < k; ++q) {
        out.distances[i * k + q] = scratch[q].first;
        out.indices[i * k + q] = scratch[q].second;
    }
}

} // namespace

Matrix sparse_dense_product(const DocTermMatrix& a, const Matrix& x, Exec exec) {
    if (a.cols() != x.rows()) throw std::invalid_argument("sparse_dense_product: shape mismatch");
    Matrix out(a.rows(), x.cols());
    const auto n = static_cast<std::ptrdiff_t>(a.rows());
    if (exec == Exec::serial) {
        for (std::ptrdiff_t r = 0; r < n; ++r) product_row(a, x, out, static_cast<std::size_t>(r));
        return out;
    }
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t r = 0; r < n; ++r) product_row(a, x, out, static_cast<std::size_t>(r));
    return out;
}

NeighborLists brute_force_knn(const Matrix& points, std::size_t k, Exec exec) {
    const std::size_t n = points.rows();
    if (k >= n) throw std::invalid_argument("brute_force_knn: k must be smaller than the point count");
    NeighborLists out{k, std::vector<std::size_t>(n * k), std::vector<double>(n * k)};
    if (k == 0) return out;
    if (exec == Exec::serial) {
        std::vector<std::pair<double, std::size_t>> scratch;
        for (std::size_t i = 0; i < n; ++i) knn_row(points, k, i, out, scratch);
        return out;
    }
#pragma omp parallel
    {
        std::vector<std::pair<double, std::size_t>> scratch;
#pragma omp for schedule(dynamic, 16)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i)
            knn_row(points, k, static_cast<std::size_t>(i), out, scratch);
    }
    return out;
}

} // namespace topicbench::kernels

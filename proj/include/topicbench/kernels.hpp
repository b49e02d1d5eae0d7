#pragma once

// Data-parallel inner loops shared by several modules. Each kernel has an
// OpenMP path and a plain serial reference; both write every output element
// from exactly one iteration, so their results are bitwise identical.

#include <cstddef>
#include <vector>

#include "topicbench/exec.hpp"
#include "topicbench/linalg.hpp"
#include "topicbench/vectorize.hpp"

namespace topicbench::kernels {

/// Sparse (CSR) times dense.
Matrix sparse_dense_product(const DocTermMatrix& a, const Matrix& x, Exec exec = Exec::parallel);

struct NeighborLists {
    std::size_t k = 0;
    std::vector<std::size_t> indices; ///< n * k, row i = neighbors of point i
    std::vector<double> distances;    ///< n * k, ascending per row
};

/// Exact k nearest neighbors by Euclidean distance, excluding the point
/// itself; equal distances are ordered by smaller index.
NeighborLists brute_force_knn(const Matrix& points, std::size_t k, Exec exec = Exec::parallel);

} // namespace topicbench::kernels

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "topicbench/exec.hpp"
#include "topicbench/linalg.hpp"

namespace topicbench {

enum class ReduceMethod { umap, pca };

struct ReduceConfig {
    std::size_t n_neighbors = 15;
    std::size_t n_components = 5;
    double min_dist = 0.1;
    std::size_t n_epochs = 200;
    std::size_t negative_samples = 5;
    std::uint64_t seed = 0;
    ReduceMethod method = ReduceMethod::umap;

    /// Range checks that do not depend on the data. Throws ConfigError.
    void validate() const;
};

struct GraphEdge {
    std::size_t i = 0; ///< i < j
    std::size_t j = 0;
    double weight = 0.0; ///< in (0, 1]
};

struct NeighborGraph {
    std::size_t n = 0;
    std::size_t k = 0;
    std::vector<std::size_t> indices; ///< n * k
    std::vector<double> distances;    ///< n * k, ascending per row
    std::vector<double> rho;          ///< empty until calibrated
    std::vector<double> sigma;
    std::vector<double> weights;      ///< directed w_ij, n * k
    std::vector<GraphEdge> edges;     ///< symmetrized, sorted by (i, j)
};

/// Exact kNN graph, self excluded, ties by smaller index.
/// Throws ConfigError when k == 0 or k >= n.
NeighborGraph knn_graph(const Matrix& points, std::size_t k, Exec exec = Exec::parallel);

/// Σ_j exp(−max(0, d_j − rho) / sigma) over one point's neighbor distances.
double membership_sum(std::span<const double> distances, double rho, double sigma) noexcept;

/// Fills rho, sigma, directed weights and the symmetrized edge list
/// p = w_ij + w_ji − w_ij·w_ji. sigma_i solves membership_sum = log2(k).
NeighborGraph calibrate(NeighborGraph g, Exec exec = Exec::parallel);

struct CurveParams {
    double a = 0.0;
    double b = 0.0;
};

/// Least-squares fit of (1 + a·x^(2b))^−1 to the piecewise target that is 1
/// below min_dist and exp(−(x − min_dist) / spread) above it, on 300 grid
/// points over [0, 3·spread].
CurveParams fit_curve(double min_dist, double spread = 1.0);

/// Nontrivial top eigenvectors of the normalized graph adjacency, scaled
/// so the largest coordinate magnitude is 10.
Matrix spectral_layout(const NeighborGraph& g, std::size_t dim, std::uint64_t seed);

struct PcaResult {
    Matrix components;                  ///< n_components x d, unit rows
    std::vector<double> explained_variance;
    Matrix projected;                   ///< n x n_components
};

/// Exact principal components of the centered data. Each component's entry
/// of largest magnitude is positive.
PcaResult pca(const Matrix& points, std::size_t n_components);

/// Reduces points to n_components dimensions. Throws ConfigError for an
/// invalid config or too few points. Deterministic for a fixed seed.
Matrix reduce(const Matrix& points, const ReduceConfig& cfg, Exec exec = Exec::parallel);

} // namespace topicbench

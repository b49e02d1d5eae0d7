#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "topicbench/exec.hpp"
#include "topicbench/linalg.hpp"

namespace topicbench {

struct ClusterConfig {
    std::size_t min_cluster_size = 15;
    std::optional<std::size_t> min_samples; ///< defaults to min_cluster_size

    std::size_t effective_min_samples() const { return min_samples.value_or(min_cluster_size); }
    void validate() const;
};

struct MstEdge {
    std::size_t a = 0;
    std::size_t b = 0;
    double weight = 0.0;
    friend bool operator==(const MstEdge&, const MstEdge&) = default;
};

/// Total order on edges: weight, then smaller endpoint, then larger endpoint.
bool edge_less(const MstEdge& x, const MstEdge& y) noexcept;

/// Condensed-tree record. Points are numbered 0..n−1, clusters from n
/// (n is the root). lambda = 1 / distance, infinite for distance 0.
struct CondensedEdge {
    std::size_t parent = 0;
    std::size_t child = 0;
    double lambda = 0.0;
    std::size_t child_size = 0;
};

struct ClusterResult {
    std::vector<int> labels; ///< −1 noise, else 0..C−1 by decreasing cluster size
    std::vector<CondensedEdge> condensed_tree;
    std::vector<double> stabilities; ///< indexed by label

    std::size_t cluster_count() const noexcept { return stabilities.size(); }
};

/// Distance to the k-th nearest neighbor, self excluded.
/// Throws ConfigError when k == 0 or n <= k.
std::vector<double> core_distances(const Matrix& points, std::size_t k, Exec exec = Exec::parallel);

/// max(core[a], core[b], |a − b|).
double mutual_reachability(const Matrix& points, std::span<const double> core, std::size_t a,
                           std::size_t b) noexcept;

/// Prim's algorithm over the complete mutual-reachability graph. Edges are
/// returned in the order they join the tree, each with a < b.
std::vector<MstEdge> mst_mutual_reachability(const Matrix& points, std::span<const double> core,
                                             Exec exec = Exec::parallel);

/// Single linkage over the MST, condensation, excess-of-mass selection.
ClusterResult extract(std::size_t n_points, std::span<const MstEdge> mst, const ClusterConfig& cfg);

/// Full HDBSCAN on a point set. With fewer points than min_cluster_size
/// every point is noise; min_samples is capped at n_points − 1.
ClusterResult hdbscan(const Matrix& points, const ClusterConfig& cfg, Exec exec = Exec::parallel);

} // namespace topicbench

#include "topicbench/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <string>

#include "topicbench/error.hpp"
#include "topicbench/kernels.hpp"

namespace topicbench {

void ClusterConfig::validate() const {
    if (min_cluster_size < 2) throw ConfigError("cluster: min_cluster_size must be >= 2");
    if (min_samples && *min_samples < 1) throw ConfigError("cluster: min_samples must be >= 1");
}

bool edge_less(const MstEdge& x, const MstEdge& y) noexcept {
    if (x.weight != y.weight) return x.weight < y.weight;
    const auto xl = std::min(x.a, x.b), yl = std::min(y.a, y.b);
    if (xl != yl) return xl < yl;
    return std::max(x.a, x.b) < std::max(y.a, y.b);
}

std::vector<double> core_distances(const Matrix& points, std::size_t k, Exec exec) {
    const std::size_t n = points.rows();
    if (k == 0 || n <= k)
        throw ConfigError("cluster: min_samples (" + std::to_string(k) +
                          ") must be in [1, n_points) with n_points = " + std::to_string(n));
    const auto lists = kernels::brute_force_knn(points, k, exec);
    std::vector<double> core(n);
    for (std::size_t i = 0; i < n; ++i) core[i] = lists.distances[i * k + k - 1];
    return core;
}

double mutual_reachability(const Matrix& points, std::span<const double> core, std::size_t a,
                           std::size_t b) noexcept {
    return std::max({core[a], core[b], euclidean_distance(points.row(a), points.row(b))});
}

std::vector<MstEdge> mst_mutual_reachability(const Matrix& points, std::span<const double> core,
                                             Exec exec) {
    const std::size_t n = points.rows();
    std::vector<MstEdge> tree;
    if (n < 2) return tree;
    tree.reserve(n - 1);

    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<char> in_tree(n, 0);
    std::vector<MstEdge> best(n, MstEdge{0, 0, inf});
    std::size_t current = 0;
    in_tree[0] = 1;

    auto relax = [&](std::size_t j) {
        if (in_tree[j]) return;
        const MstEdge cand{std::min(current, j), std::max(current, j),
                           mutual_reachability(points, core, current, j)};
        if (edge_less(cand, best[j])) best[j] = cand;
    };
    const auto signed_n = static_cast<std::ptrdiff_t>(n);
    for (std::size_t step = 1; step < n; ++step) {
        if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
            for (std::ptrdiff_t j = 0; j < signed_n; ++j) relax(static_cast<std::size_t>(j));
        } else {
            for (std::size_t j = 0; j < n; ++j) relax(j);
        }
        std::size_t next = n;
        for (std::size_t j = 0; j < n; ++j)
            if (!in_tree[j] && (next == n || edge_less(best[j], best[next]))) next = j;
        tree.push_back(best[next]);
        in_tree[next] = 1;
        current = next;
    }
    return tree;
}

namespace {

struct LinkageNode {
    std::size_t left = 0;
    std::size_t right = 0;
    double distance = 0.0;
    std::size_t size = 1;
};

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }
    void attach(std::size_t child, std::size_t root) { parent_[child] = root; }

private:
    std::vector<std::size_t> parent_;
};

/// Nodes 0..n−1 are points; node n+i is the i-th merge.
std::vector<LinkageNode> single_linkage(std::size_t n, std::span<const MstEdge> mst) {
    std::vector<MstEdge> edges(mst.begin(), mst.end());
    std::sort(edges.begin(), edges.end(), edge_less);
    std::vector<LinkageNode> nodes(n);
    nodes.reserve(2 * n - 1);
    UnionFind uf(2 * n - 1);
    for (const auto& e : edges) {
        const std::size_t ra = uf.find(std::min(e.a, e.b));
        const std::size_t rb = uf.find(std::max(e.a, e.b));
        if (ra == rb) throw InputError("cluster: spanning tree contains a cycle");
        const std::size_t id = nodes.size();
        nodes.push_back({ra, rb, e.weight, nodes[ra].size + nodes[rb].size});
        uf.attach(ra, id);
        uf.attach(rb, id);
    }
    if (nodes.size() != 2 * n - 1) throw InputError("cluster: spanning tree is disconnected");
    return nodes;
}

template <typename F>
void for_each_point(const std::vector<LinkageNode>& nodes, std::size_t n, std::size_t root, F&& f) {
    std::vector<std::size_t> stack{root};
    while (!stack.empty()) {
        const std::size_t v = stack.back();
        stack.pop_back();
        if (v < n) {
            f(v);
        } else {
            stack.push_back(nodes[v].right);
            stack.push_back(nodes[v].left);
        }
    }
}

} // namespace

ClusterResult extract(std::size_t n, std::span<const MstEdge> mst, const ClusterConfig& cfg) {
    cfg.validate();
    ClusterResult result;
    result.labels.assign(n, -1);
    if (n < 2 || n < cfg.min_cluster_size) return result;
    if (mst.size() != n - 1) throw InputError("cluster: spanning tree must have n_points - 1 edges");

    const auto nodes = single_linkage(n, mst);
    const std::size_t mcs = cfg.min_cluster_size;
    constexpr double inf = std::numeric_limits<double>::infinity();

    // Condense. cluster_parent/birth are indexed by cluster id − n.
    std::vector<std::size_t> cluster_parent{n};
    std::vector<double> birth{0.0};
    std::size_t next_cluster = n + 1;
    std::deque<std::pair<std::size_t, std::size_t>> queue{{2 * n - 2, n}};
    auto fall_out = [&](std::size_t node, std::size_t cluster, double lambda) {
        for_each_point(nodes, n, node, [&](std::size_t p) {
            result.condensed_tree.push_back({cluster, p, lambda, 1});
        });
    };
    while (!queue.empty()) {
        const auto [node, cluster] = queue.front();
        queue.pop_front();
        const LinkageNode& v = nodes[node];
        // Coincident points never separate.
        if (v.distance == 0.0) {
            fall_out(node, cluster, inf);
            continue;
        }
        const double lambda = 1.0 / v.distance;
        const std::size_t sl = nodes[v.left].size;
        const std::size_t sr = nodes[v.right].size;
        if (sl >= mcs && sr >= mcs) {
            for (const std::size_t child : {v.left, v.right}) {
                const std::size_t id = next_cluster++;
                cluster_parent.push_back(cluster);
                birth.push_back(lambda);
                result.condensed_tree.push_back({cluster, id, lambda, nodes[child].size});
                queue.emplace_back(child, id);
            }
        } else if (sl < mcs && sr < mcs) {
            fall_out(v.left, cluster, lambda);
            fall_out(v.right, cluster, lambda);
        } else if (sl < mcs) {
            fall_out(v.left, cluster, lambda);
            queue.emplace_back(v.right, cluster);
        } else {
            fall_out(v.right, cluster, lambda);
            queue.emplace_back(v.left, cluster);
        }
    }

    const std::size_t n_clusters = next_cluster - n;
    std::vector<double> stability(n_clusters, 0.0);
    std::vector<std::vector<std::size_t>> children(n_clusters);
    std::vector<std::size_t> point_cluster(n, n);
    for (const auto& e : result.condensed_tree) {
        const std::size_t c = e.parent - n;
        stability[c] += (e.lambda - birth[c]) * static_cast<double>(e.child_size);
        if (e.child >= n)
            children[c].push_back(e.child - n);
        else
            point_cluster[e.child] = c;
    }

    // Excess of mass. Children have larger ids than their parents.
    std::vector<char> selected(n_clusters, 0);
    std::vector<double> best(n_clusters, 0.0);
    auto deselect_below = [&](std::size_t c) {
        std::vector<std::size_t> stack(children[c].begin(), children[c].end());
        while (!stack.empty()) {
            const std::size_t d = stack.back();
            stack.pop_back();
            selected[d] = 0;
            stack.insert(stack.end(), children[d].begin(), children[d].end());
        }
    };
    for (std::size_t c = n_clusters; c-- > 0;) {
        if (children[c].empty()) {
            selected[c] = 1;
            best[c] = stability[c];
            continue;
        }
        if (c == 0) break;
        double below = 0.0;
        for (std::size_t d : children[c]) below += best[d];
        if (stability[c] > below) {
            selected[c] = 1;
            best[c] = stability[c];
            deselect_below(c);
        } else {
            best[c] = below;
        }
    }

    std::vector<int> raw(n, -1);
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t c = point_cluster[p];; c = cluster_parent[c] - n) {
            if (selected[c]) {
                raw[p] = static_cast<int>(c);
                break;
            }
            if (c == 0) break;
        }
    }

    struct Group {
        std::size_t cluster, size, first;
    };
    std::vector<Group> groups;
    std::vector<std::size_t> slot(n_clusters, n_clusters);
    for (std::size_t p = 0; p < n; ++p) {
        if (raw[p] < 0) continue;
        const auto c = static_cast<std::size_t>(raw[p]);
        if (slot[c] == n_clusters) {
            slot[c] = groups.size();
            groups.push_back({c, 0, p});
        }
        ++groups[slot[c]].size;
    }
    std::sort(groups.begin(), groups.end(), [](const Group& x, const Group& y) {
        if (x.size != y.size) return x.size > y.size;
        return x.first < y.first;
    });
    std::vector<int> final_label(n_clusters, -1);
    for (std::size_t g = 0; g < groups.size(); ++g) {
        final_label[groups[g].cluster] = static_cast<int>(g);
        result.stabilities.push_back(stability[groups[g].cluster]);
    }
    for (std::size_t p = 0; p < n; ++p)
        if (raw[p] >= 0) result.labels[p] = final_label[static_cast<std::size_t>(raw[p])];
    return result;
}

ClusterResult hdbscan(const Matrix& points, const ClusterConfig& cfg, Exec exec) {
    cfg.validate();
    const std::size_t n = points.rows();
    if (n < 2 || n < cfg.min_cluster_size) return extract(n, {}, cfg);
    const std::size_t k = std::min(cfg.effective_min_samples(), n - 1);
    const auto core = core_distances(points, k, exec);
    const auto mst = mst_mutual_reachability(points, core, exec);
    return extract(n, mst, cfg);
}

} // namespace topicbench

#include "topicbench/reduce.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "topicbench/error.hpp"
#include "topicbench/kernels.hpp"

namespace topicbench {

void ReduceConfig::validate() const {
    if (n_neighbors < 2) throw ConfigError("reduce: n_neighbors must be >= 2");
    if (n_components < 1) throw ConfigError("reduce: n_components must be >= 1");
    if (!(min_dist >= 0.0) || !std::isfinite(min_dist))
        throw ConfigError("reduce: min_dist must be >= 0");
    if (method == ReduceMethod::umap && n_epochs < 1)
        throw ConfigError("reduce: n_epochs must be >= 1");
}

NeighborGraph knn_graph(const Matrix& points, std::size_t k, Exec exec) {
    const std::size_t n = points.rows();
    if (k == 0 || k >= n)
        throw ConfigError("reduce: n_neighbors (" + std::to_string(k) +
                          ") must be in [1, n_points) with n_points = " + std::to_string(n));
    auto lists = kernels::brute_force_knn(points, k, exec);
    NeighborGraph g;
    g.n = n;
    g.k = k;
    g.indices = std::move(lists.indices);
    g.distances = std::move(lists.distances);
    return g;
}

double membership_sum(std::span<const double> distances, double rho, double sigma) noexcept {
    double total = 0.0;
    for (double d : distances) total += std::exp(-std::max(0.0, d - rho) / sigma);
    return total;
}

namespace {

constexpr double kSigmaLow = 1e-12;
constexpr double kSigmaHigh = 1e12;
constexpr int kSearchIterations = 64;

double solve_sigma(std::span<const double> distances, double rho, double target) {
    double lo = kSigmaLow;
    double hi = kSigmaHigh;
    double mid = 1.0;
    for (int it = 0; it < kSearchIterations; ++it) {
        mid = std::sqrt(lo * hi);
        const double s = membership_sum(distances, rho, mid);
        if (s == target) break;
        if (s > target)
            hi = mid;
        else
            lo = mid;
    }
    return mid;
}

} // namespace

NeighborGraph calibrate(NeighborGraph g, Exec exec) {
    const std::size_t n = g.n;
    const std::size_t k = g.k;
    const double target = std::log2(static_cast<double>(k));
    g.rho.assign(n, 0.0);
    g.sigma.assign(n, 0.0);
    g.weights.assign(n * k, 0.0);

    auto point = [&](std::size_t i) {
        const std::span<const double> d(g.distances.data() + i * k, k);
        const double rho = d.front();
        const double sigma = solve_sigma(d, rho, target);
        g.rho[i] = rho;
        g.sigma[i] = sigma;
        for (std::size_t j = 0; j < k; ++j)
            g.weights[i * k + j] = std::exp(-std::max(0.0, d[j] - rho) / sigma);
    };
    const auto signed_n = static_cast<std::ptrdiff_t>(n);
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < signed_n; ++i) point(static_cast<std::size_t>(i));
    } else {
        for (std::size_t i = 0; i < n; ++i) point(i);
    }

    struct Directed {
        std::size_t lo, hi;
        bool forward; ///< lo -> hi
        double w;
    };
    std::vector<Directed> directed;
    directed.reserve(n * k);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            const std::size_t t = g.indices[i * k + j];
            directed.push_back({std::min(i, t), std::max(i, t), i < t, g.weights[i * k + j]});
        }
    std::sort(directed.begin(), directed.end(), [](const Directed& x, const Directed& y) {
        if (x.lo != y.lo) return x.lo < y.lo;
        if (x.hi != y.hi) return x.hi < y.hi;
        return x.forward > y.forward;
    });
    g.edges.clear();
    for (std::size_t p = 0; p < directed.size();) {
        double fw = 0.0;
        double bw = 0.0;
        std::size_t q = p;
        for (; q < directed.size() && directed[q].lo == directed[p].lo && directed[q].hi == directed[p].hi; ++q)
            (directed[q].forward ? fw : bw) = directed[q].w;
        const double w = fw + bw - fw * bw;
        if (w > 0.0) g.edges.push_back({directed[p].lo, directed[p].hi, w});
        p = q;
    }
    return g;
}

CurveParams fit_curve(double min_dist, double spread) {
    constexpr std::size_t kGrid = 300;
    constexpr int kSteps = 300;
    std::vector<double> xs(kGrid);
    std::vector<double> ys(kGrid);
    for (std::size_t i = 0; i < kGrid; ++i) {
        xs[i] = 3.0 * spread * static_cast<double>(i) / static_cast<double>(kGrid - 1);
        ys[i] = xs[i] < min_dist ? 1.0 : std::exp(-(xs[i] - min_dist) / spread);
    }
    auto sse = [&](double a, double b) {
        double s = 0.0;
        for (std::size_t i = 0; i < kGrid; ++i) {
            const double r = 1.0 / (1.0 + a * std::pow(xs[i], 2.0 * b)) - ys[i];
            s += r * r;
        }
        return s;
    };

    // Levenberg-Marquardt in (a, b).
    double a = 1.0;
    double b = 1.0;
    double damping = 1e-3;
    double current = sse(a, b);
    for (int step = 0; step < kSteps; ++step) {
        double jtj00 = 0, jtj01 = 0, jtj11 = 0, jtr0 = 0, jtr1 = 0;
        for (std::size_t i = 0; i < kGrid; ++i) {
            const double x = xs[i];
            const double p = x > 0.0 ? std::pow(x, 2.0 * b) : 0.0;
            const double f = 1.0 / (1.0 + a * p);
            const double r = f - ys[i];
            const double da = -f * f * p;
            const double db = x > 0.0 ? -f * f * a * p * 2.0 * std::log(x) : 0.0;
            jtj00 += da * da;
            jtj01 += da * db;
            jtj11 += db * db;
            jtr0 += da * r;
            jtr1 += db * r;
        }
        const double m00 = jtj00 * (1.0 + damping);
        const double m11 = jtj11 * (1.0 + damping);
        const double det = m00 * m11 - jtj01 * jtj01;
        if (!(std::abs(det) > 0.0)) break;
        const double step_a = -(m11 * jtr0 - jtj01 * jtr1) / det;
        const double step_b = -(m00 * jtr1 - jtj01 * jtr0) / det;
        const double na = a + step_a;
        const double nb = b + step_b;
        const double candidate = na > 0.0 && nb > 0.0 ? sse(na, nb) : current + 1.0;
        if (candidate < current) {
            const bool converged = current - candidate <= 1e-15 * current;
            a = na;
            b = nb;
            current = candidate;
            damping = std::max(damping / 10.0, 1e-12);
            if (converged) break;
        } else {
            damping *= 10.0;
            if (damping > 1e12) break;
        }
    }
    return {a, b};
}

namespace {

struct SparseSym {
    std::vector<std::size_t> row_ptr;
    std::vector<std::size_t> col;
    std::vector<double> val;
};

SparseSym adjacency(const NeighborGraph& g) {
    std::vector<std::size_t> degree(g.n, 0);
    for (const auto& e : g.edges) {
        ++degree[e.i];
        ++degree[e.j];
    }
    SparseSym s;
    s.row_ptr.assign(g.n + 1, 0);
    for (std::size_t i = 0; i < g.n; ++i) s.row_ptr[i + 1] = s.row_ptr[i] + degree[i];
    s.col.resize(s.row_ptr.back());
    s.val.resize(s.row_ptr.back());
    std::vector<std::size_t> fill(s.row_ptr.begin(), s.row_ptr.end() - 1);
    for (const auto& e : g.edges) {
        s.col[fill[e.i]] = e.j;
        s.val[fill[e.i]++] = e.weight;
        s.col[fill[e.j]] = e.i;
        s.val[fill[e.j]++] = e.weight;
    }
    return s;
}

void flip_to_positive_peak(Matrix& columns) {
    for (std::size_t c = 0; c < columns.cols(); ++c) {
        std::size_t best = 0;
        for (std::size_t r = 1; r < columns.rows(); ++r)
            if (std::abs(columns(r, c)) > std::abs(columns(best, c))) best = r;
        if (columns(best, c) < 0.0)
            for (std::size_t r = 0; r < columns.rows(); ++r) columns(r, c) = -columns(r, c);
    }
}

} // namespace

Matrix spectral_layout(const NeighborGraph& g, std::size_t dim, std::uint64_t seed) {
    const std::size_t n = g.n;
    if (n < dim + 2) throw ConfigError("reduce: too few points for a spectral layout");
    const SparseSym adj = adjacency(g);
    std::vector<double> inv_sqrt_deg(n);
    std::vector<double> trivial(n);
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double d = 0.0;
        for (std::size_t p = adj.row_ptr[i]; p < adj.row_ptr[i + 1]; ++p) d += adj.val[p];
        inv_sqrt_deg[i] = d > 0.0 ? 1.0 / std::sqrt(d) : 0.0;
        trivial[i] = std::sqrt(d);
        norm += d;
    }
    for (double& v : trivial) v /= std::sqrt(norm);

    // y = (I + D^-1/2 W D^-1/2) x / 2, spectrum in [0, 1].
    auto apply = [&](const Matrix& x) {
        Matrix y(n, x.cols());
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t c = 0; c < x.cols(); ++c) y(i, c) = x(i, c);
            for (std::size_t p = adj.row_ptr[i]; p < adj.row_ptr[i + 1]; ++p) {
                const std::size_t j = adj.col[p];
                const double w = adj.val[p] * inv_sqrt_deg[i] * inv_sqrt_deg[j];
                for (std::size_t c = 0; c < x.cols(); ++c) y(i, c) += w * x(j, c);
            }
            for (std::size_t c = 0; c < x.cols(); ++c) y(i, c) *= 0.5;
        }
        return y;
    };
    auto deflate = [&](Matrix& x) {
        for (std::size_t c = 0; c < x.cols(); ++c) {
            double proj = 0.0;
            for (std::size_t i = 0; i < n; ++i) proj += trivial[i] * x(i, c);
            for (std::size_t i = 0; i < n; ++i) x(i, c) -= proj * trivial[i];
        }
    };

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix q(n, dim);
    for (double& v : q.data()) v = normal(rng);
    deflate(q);
    orthonormalize_columns(q);

    constexpr int kMaxIterations = 2000;
    double previous_trace = -1.0;
    for (int it = 0; it < kMaxIterations; ++it) {
        Matrix y = apply(q);
        double trace = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t c = 0; c < dim; ++c) trace += q(i, c) * y(i, c);
        deflate(y);
        orthonormalize_columns(y);
        q = std::move(y);
        if (std::abs(trace - previous_trace) <= 1e-13 * std::max(1.0, trace)) break;
        previous_trace = trace;
    }

    // Rayleigh-Ritz to order the basis by eigenvalue.
    const Matrix mq = apply(q);
    Matrix t(dim, dim);
    for (std::size_t a = 0; a < dim; ++a)
        for (std::size_t b = 0; b < dim; ++b) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) s += q(i, a) * mq(i, b);
            t(a, b) = s;
        }
    for (std::size_t a = 0; a < dim; ++a)
        for (std::size_t b = a + 1; b < dim; ++b) t(a, b) = t(b, a) = 0.5 * (t(a, b) + t(b, a));
    Matrix layout = multiply(q, symmetric_eigen(t).vectors);
    flip_to_positive_peak(layout);

    double peak = 0.0;
    for (double v : layout.data()) peak = std::max(peak, std::abs(v));
    if (peak > 0.0)
        for (double& v : layout.data()) v *= 10.0 / peak;
    return layout;
}

PcaResult pca(const Matrix& points, std::size_t n_components) {
    const std::size_t n = points.rows();
    const std::size_t d = points.cols();
    if (n < 2) throw ConfigError("pca: need at least 2 points");
    if (n_components < 1 || n_components > std::min(d, n - 1))
        throw ConfigError("pca: n_components must be in [1, min(dim, n_points - 1)]");

    Matrix centered = points;
    for (std::size_t c = 0; c < d; ++c) {
        double mean = 0.0;
        for (std::size_t r = 0; r < n; ++r) mean += points(r, c);
        mean /= static_cast<double>(n);
        for (std::size_t r = 0; r < n; ++r) centered(r, c) -= mean;
    }
    const double denom = static_cast<double>(n - 1);

    PcaResult out;
    out.components = Matrix(n_components, d);
    out.explained_variance.resize(n_components);
    if (n >= d) {
        Matrix cov = multiply(centered.transpose(), centered);
        for (double& v : cov.data()) v /= denom;
        const auto eig = symmetric_eigen(cov);
        for (std::size_t c = 0; c < n_components; ++c) {
            out.explained_variance[c] = eig.values[c];
            for (std::size_t j = 0; j < d; ++j) out.components(c, j) = eig.vectors(j, c);
        }
    } else {
        // Gram form: X Xᵀ u = λ u gives the component Xᵀ u / |Xᵀ u|.
        const Matrix gram = multiply(centered, centered.transpose());
        const auto eig = symmetric_eigen(gram);
        for (std::size_t c = 0; c < n_components; ++c) {
            out.explained_variance[c] = eig.values[c] / denom;
            double norm = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                double s = 0.0;
                for (std::size_t r = 0; r < n; ++r) s += centered(r, j) * eig.vectors(r, c);
                out.components(c, j) = s;
                norm += s * s;
            }
            norm = std::sqrt(norm);
            if (norm > 0.0)
                for (std::size_t j = 0; j < d; ++j) out.components(c, j) /= norm;
        }
    }
    for (std::size_t c = 0; c < n_components; ++c) {
        const auto row = out.components.row(c);
        std::size_t best = 0;
        for (std::size_t j = 1; j < d; ++j)
            if (std::abs(row[j]) > std::abs(row[best])) best = j;
        if (row[best] < 0.0)
            for (double& v : row) v = -v;
    }
    out.projected = multiply(centered, out.components.transpose());
    return out;
}

namespace {

double clip(double v) { return std::clamp(v, -4.0, 4.0); }

void optimize_layout(Matrix& y, const NeighborGraph& g, const ReduceConfig& cfg,
                     const CurveParams& curve, std::mt19937_64& rng) {
    const std::size_t n = y.rows();
    const std::size_t dim = y.cols();
    const double a = curve.a;
    const double b = curve.b;
    const auto epochs = static_cast<double>(cfg.n_epochs);

    double w_max = 0.0;
    for (const auto& e : g.edges) w_max = std::max(w_max, e.weight);

    struct Sample {
        std::size_t head, tail;
        double per_sample, per_negative, next, next_negative;
    };
    std::vector<Sample> samples;
    for (const auto& e : g.edges) {
        if (e.weight < w_max / epochs) continue;
        const double per = w_max / e.weight;
        const double per_neg = per / static_cast<double>(std::max<std::size_t>(cfg.negative_samples, 1));
        samples.push_back({e.i, e.j, per, per_neg, per, per_neg});
        samples.push_back({e.j, e.i, per, per_neg, per, per_neg});
    }

    for (std::size_t epoch = 0; epoch < cfg.n_epochs; ++epoch) {
        const double t = static_cast<double>(epoch);
        const double alpha = 1.0 - t / epochs;
        for (auto& s : samples) {
            if (s.next > t) continue;
            auto cur = y.row(s.head);
            auto other = y.row(s.tail);
            const double d2 = squared_distance(cur, other);
            double coeff = 0.0;
            if (d2 > 0.0) {
                const double pw = std::pow(d2, b);
                coeff = -2.0 * a * b * pw / d2 / (a * pw + 1.0);
            }
            for (std::size_t c = 0; c < dim; ++c) {
                const double grad = clip(coeff * (cur[c] - other[c]));
                cur[c] += grad * alpha;
                other[c] -= grad * alpha;
            }
            s.next += s.per_sample;

            if (cfg.negative_samples == 0) continue;
            const auto n_neg = static_cast<std::size_t>((t - s.next_negative) / s.per_negative);
            for (std::size_t p = 0; p < n_neg; ++p) {
                const std::size_t k = static_cast<std::size_t>(rng() % n);
                if (k == s.head) continue;
                const auto neg = y.row(k);
                const double nd2 = squared_distance(cur, neg);
                if (nd2 > 0.0) {
                    const double rep = 2.0 * b / ((0.001 + nd2) * (a * std::pow(nd2, b) + 1.0));
                    for (std::size_t c = 0; c < dim; ++c) cur[c] += clip(rep * (cur[c] - neg[c])) * alpha;
                } else {
                    for (std::size_t c = 0; c < dim; ++c) cur[c] += 4.0 * alpha;
                }
            }
            s.next_negative += static_cast<double>(n_neg) * s.per_negative;
        }
    }
}

} // namespace

Matrix reduce(const Matrix& points, const ReduceConfig& cfg, Exec exec) {
    cfg.validate();
    const std::size_t n = points.rows();
    if (n < cfg.n_components + 1)
        throw ConfigError("reduce: " + std::to_string(n) + " points cannot be reduced to " +
                          std::to_string(cfg.n_components) + " components");
    if (cfg.n_components >= points.cols())
        throw ConfigError("reduce: n_components must be smaller than the input dimension");
    if (cfg.method == ReduceMethod::pca) return pca(points, cfg.n_components).projected;

    const NeighborGraph g = calibrate(knn_graph(points, cfg.n_neighbors, exec), exec);
    std::mt19937_64 rng(cfg.seed);
    Matrix y;
    if (n >= cfg.n_components + 2) {
        y = spectral_layout(g, cfg.n_components, rng());
        std::normal_distribution<double> noise(0.0, 1e-4);
        for (double& v : y.data()) v += noise(rng);
    } else {
        std::uniform_real_distribution<double> uniform(-10.0, 10.0);
        y = Matrix(n, cfg.n_components);
        for (double& v : y.data()) v = uniform(rng);
    }
    for (std::size_t c = 0; c < y.cols(); ++c) {
        double lo = y(0, c);
        double hi = y(0, c);
        for (std::size_t r = 1; r < n; ++r) {
            lo = std::min(lo, y(r, c));
            hi = std::max(hi, y(r, c));
        }
        if (hi > lo)
            for (std::size_t r = 0; r < n; ++r) y(r, c) = 10.0 * (y(r, c) - lo) / (hi - lo);
    }
    optimize_layout(y, g, cfg, fit_curve(cfg.min_dist), rng);
    return y;
}

} // namespace topicbench

#include "topicbench/lsa.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "topicbench/error.hpp"
#include "topicbench/kernels.hpp"

namespace topicbench {

namespace {

// `times(x)` computes A x and `times_transpose(x)` computes A^T x.
template <typename Times, typename TimesT>
SvdFactors randomized_svd(std::size_t n, std::size_t m, std::size_t k, std::uint64_t seed,
                          const SvdOptions& options, Times times, TimesT times_transpose) {
    if (n == 0 || m == 0) throw InputError("truncated_svd: matrix has no rows or no columns");
    const std::size_t rank_bound = std::min(n, m);
    if (k < 1 || k > rank_bound)
        throw ConfigError("truncated_svd: k=" + std::to_string(k) + " outside [1, " +
                          std::to_string(rank_bound) + "]");
    const std::size_t l = std::min(k + options.oversampling, rank_bound);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix omega(m, l);
    for (double& x : omega.data()) x = gauss(rng);

    Matrix q = times(omega);
    orthonormalize_columns(q);
    for (std::size_t it = 0; it < options.power_iterations; ++it) {
        Matrix z = times_transpose(q);
        orthonormalize_columns(z);
        q = times(z);
        orthonormalize_columns(q);
    }
    // B = Q^T A, formed as (A^T Q)^T.
    const Matrix b = times_transpose(q).transpose();
    ThinSvd small = jacobi_svd(b);

    SvdFactors f;
    f.s.assign(small.s.begin(), small.s.begin() + static_cast<std::ptrdiff_t>(k));
    Matrix u_small(small.u.rows(), k);
    for (std::size_t i = 0; i < small.u.rows(); ++i)
        for (std::size_t j = 0; j < k; ++j) u_small(i, j) = small.u(i, j);
    f.u = multiply(q, u_small);
    f.vt = Matrix(k, m);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < m; ++j) f.vt(i, j) = small.vt(i, j);
    canonicalize_signs(f.u, f.vt);
    return f;
}

} // namespace

SvdFactors truncated_svd(const DocTermMatrix& m, std::size_t k, std::uint64_t seed,
                         const SvdOptions& options, Exec exec) {
    const DocTermMatrix mt = m.transpose();
    return randomized_svd(
        m.rows(), m.cols(), k, seed, options,
        [&](const Matrix& x) { return kernels::sparse_dense_product(m, x, exec); },
        [&](const Matrix& x) { return kernels::sparse_dense_product(mt, x, exec); });
}

SvdFactors truncated_svd(const Matrix& m, std::size_t k, std::uint64_t seed,
                         const SvdOptions& options) {
    const Matrix mt = m.transpose();
    return randomized_svd(
        m.rows(), m.cols(), k, seed, options, [&](const Matrix& x) { return multiply(m, x); },
        [&](const Matrix& x) { return multiply(mt, x); });
}

Matrix lsa_term_weights(const SvdFactors& factors) {
    Matrix w = factors.vt;
    for (double& x : w.data()) x = std::abs(x);
    return w;
}

TopicModel lsa_topics(const SvdFactors& factors, const Vocabulary& vocab, std::size_t n_words) {
    if (n_words == 0) throw ConfigError("lsa_topics: n_words must be >= 1");
    if (factors.vt.cols() != vocab.size())
        throw ConfigError("lsa_topics: factor width does not match the vocabulary");
    TopicModel model;
    model.method = Method::lsa;
    const Matrix weights = lsa_term_weights(factors);
    for (std::size_t i = 0; i < weights.rows(); ++i)
        model.topics.push_back(make_topic(static_cast<int>(i), weights.row(i), vocab, n_words));

    model.assignments.resize(factors.u.rows());
    for (std::size_t d = 0; d < factors.u.rows(); ++d) {
        int best = 0;
        double best_score = -1.0;
        for (std::size_t i = 0; i < factors.s.size(); ++i) {
            const double score = std::abs(factors.u(d, i) * factors.s[i]);
            if (score > best_score) {
                best_score = score;
                best = static_cast<int>(i);
            }
        }
        model.assignments[d] = best;
    }
    return model;
}

} // namespace topicbench

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "topicbench/exec.hpp"
#include "topicbench/linalg.hpp"
#include "topicbench/topic_model.hpp"
#include "topicbench/vectorize.hpp"

namespace topicbench {

/// Rank-k factors: u is n x k, s holds k descending singular values and vt
/// is k x m. Each row of vt has its largest-magnitude entry positive.
struct SvdFactors {
    Matrix u;
    std::vector<double> s;
    Matrix vt;
};

struct SvdOptions {
    std::size_t oversampling = 10;
    std::size_t power_iterations = 4;
};

/// Randomized subspace iteration: a seeded Gaussian sketch of k + p columns,
/// q re-orthonormalized power iterations, then an exact SVD of the small
/// projected matrix. Throws ConfigError when k is not in [1, min(n, m)] and
/// InputError for an empty matrix.
SvdFactors truncated_svd(const DocTermMatrix& m, std::size_t k, std::uint64_t seed,
                         const SvdOptions& options = {}, Exec exec = Exec::parallel);
SvdFactors truncated_svd(const Matrix& m, std::size_t k, std::uint64_t seed,
                         const SvdOptions& options = {});

/// Topic i lists the terms with the largest |vt(i, t)|. Each document goes
/// to the component maximizing |u(d, i) * s(i)|.
TopicModel lsa_topics(const SvdFactors& factors, const Vocabulary& vocab, std::size_t n_words);

/// |vt| as a topic-by-term weight matrix.
Matrix lsa_term_weights(const SvdFactors& factors);

} // namespace topicbench

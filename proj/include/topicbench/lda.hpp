#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "topicbench/exec.hpp"
#include "topicbench/linalg.hpp"
#include "topicbench/topic_model.hpp"
#include "topicbench/vectorize.hpp"

namespace topicbench {

struct InferOptions {
    double tolerance = 1e-3; ///< mean absolute change in gamma
    std::size_t max_iterations = 100;
};

struct LdaConfig {
    std::size_t num_topics = 8;
    std::optional<double> alpha; ///< symmetric document-topic prior; 1/K when unset
    double eta = 0.01;           ///< symmetric topic-word prior
    double kappa = 0.7;          ///< learning-rate decay, in (0.5, 1]
    double tau0 = 10.0;          ///< learning-rate offset
    std::size_t batch_size = 256;
    std::size_t epochs = 5;
    std::uint64_t seed = 0;
    InferOptions inference; ///< per-document E-step used by fitting and elbo

    double doc_prior() const noexcept {
        return alpha ? *alpha : 1.0 / static_cast<double>(num_topics);
    }
    /// Throws ConfigError when any field is out of range.
    void validate() const;
};

/// rho_t = (tau0 + t)^-kappa
double learning_rate(double tau0, double kappa, std::size_t t) noexcept;

/// Variational topic-word parameters lambda (K x V, all entries > 0).
class LdaModel {
public:
    explicit LdaModel(Matrix lambda);

    std::size_t num_topics() const noexcept { return lambda_.rows(); }
    std::size_t vocab_size() const noexcept { return lambda_.cols(); }
    const Matrix& lambda() const noexcept { return lambda_; }

    /// Row-normalized lambda.
    Matrix beta() const;
    /// E_q[log beta] = psi(lambda) - psi(row sum).
    const Matrix& expected_log_beta() const noexcept { return elog_beta_; }
    const Matrix& exp_expected_log_beta() const noexcept { return exp_elog_beta_; }

private:
    Matrix lambda_;
    Matrix elog_beta_;
    Matrix exp_elog_beta_;
};

struct DocInference {
    std::vector<double> gamma; ///< K
    Matrix phi;                ///< one row per stored term of the document, each on the K-simplex
    std::size_t iterations = 0;
};

/// Per-document fixed point of the gamma/phi updates, starting from
/// `initial_gamma` when given and from alpha + N/K otherwise.
DocInference infer(const SparseRow& doc, const LdaModel& model, double alpha,
                   const InferOptions& options = {}, std::span<const double> initial_gamma = {});

/// Online (mini-batch) variational Bayes. lambda starts from a seeded
/// Gamma(100, 0.01) draw (floored at eta); documents are shuffled each
/// epoch with the same seed stream.
LdaModel fit_online(const DocTermMatrix& counts, const LdaConfig& config,
                    Exec exec = Exec::parallel);

/// `gamma` holds the document parameters (D x K) that produced `model`.
using LdaObserver =
    std::function<void(std::size_t iteration, const LdaModel& model, const Matrix& gamma)>;

/// Full-batch variational Bayes (every update sees the whole corpus with
/// rho = 1). Document parameters are carried across updates, so each pass
/// is coordinate ascent on one bound: with a converged E-step,
/// elbo(counts, model, config, gamma) is non-decreasing over iterations.
/// `observer` runs after each of the `iterations` updates.
LdaModel fit_batch(const DocTermMatrix& counts, const LdaConfig& config, std::size_t iterations,
                   const LdaObserver& observer = {}, Exec exec = Exec::parallel);

/// Evidence lower bound using freshly inferred gamma/phi for every document,
/// plus the Dirichlet terms of every topic.
double elbo(const DocTermMatrix& counts, const LdaModel& model, const LdaConfig& config,
            Exec exec = Exec::parallel);
/// Same, with each document's inference started from a row of `initial_gamma`.
double elbo(const DocTermMatrix& counts, const LdaModel& model, const LdaConfig& config,
            const Matrix& initial_gamma, Exec exec = Exec::parallel);

/// Topic k lists the highest-probability terms of beta row k; each document
/// is assigned the argmax of its inferred gamma.
TopicModel lda_topics(const LdaModel& model, const DocTermMatrix& counts, const Vocabulary& vocab,
                      std::size_t n_words, double alpha);

/// "K V" header followed by one row of lambda per line.
void write_checkpoint(std::ostream& out, const LdaModel& model);
LdaModel read_checkpoint(std::istream& in);

} // namespace topicbench

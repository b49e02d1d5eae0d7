#include "topicbench/lda.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <string>

#include "topicbench/error.hpp"
#include "topicbench/special.hpp"

namespace topicbench {

void LdaConfig::validate() const {
    if (num_topics < 1) throw ConfigError("lda: num_topics must be >= 1");
    if (alpha && !(*alpha > 0.0)) throw ConfigError("lda: alpha must be > 0");
    if (!(eta > 0.0)) throw ConfigError("lda: eta must be > 0");
    if (!(kappa > 0.5 && kappa <= 1.0)) throw ConfigError("lda: kappa must lie in (0.5, 1]");
    if (!(tau0 >= 0.0)) throw ConfigError("lda: tau0 must be >= 0");
    if (batch_size < 1) throw ConfigError("lda: batch_size must be >= 1");
    if (epochs < 1) throw ConfigError("lda: epochs must be >= 1");
    if (!(inference.tolerance > 0.0)) throw ConfigError("lda: inference tolerance must be > 0");
    if (inference.max_iterations < 1)
        throw ConfigError("lda: inference max_iterations must be >= 1");
}

double learning_rate(double tau0, double kappa, std::size_t t) noexcept {
    return std::pow(tau0 + static_cast<double>(t), -kappa);
}

LdaModel::LdaModel(Matrix lambda) : lambda_(std::move(lambda)) {
    const std::size_t k = lambda_.rows();
    const std::size_t v = lambda_.cols();
    elog_beta_ = Matrix(k, v);
    exp_elog_beta_ = Matrix(k, v);
    for (std::size_t t = 0; t < k; ++t) {
        double total = 0.0;
        for (double x : lambda_.row(t)) {
            if (!(x > 0.0) || !std::isfinite(x))
                throw InputError("lda: lambda entries must be finite and positive");
            total += x;
        }
        const double psi_total = digamma(total);
        for (std::size_t w = 0; w < v; ++w) {
            elog_beta_(t, w) = digamma(lambda_(t, w)) - psi_total;
            exp_elog_beta_(t, w) = std::exp(elog_beta_(t, w));
        }
    }
}

Matrix LdaModel::beta() const {
    Matrix b = lambda_;
    for (std::size_t t = 0; t < b.rows(); ++t) {
        auto row = b.row(t);
        const double total = std::accumulate(row.begin(), row.end(), 0.0);
        for (double& x : row) x /= total;
    }
    return b;
}

namespace {

void exp_elog_theta(const std::vector<double>& gamma, std::vector<double>& out) {
    const double psi_total = digamma(std::accumulate(gamma.begin(), gamma.end(), 0.0));
    for (std::size_t k = 0; k < gamma.size(); ++k) out[k] = std::exp(digamma(gamma[k]) - psi_total);
}

Matrix initial_lambda(std::size_t k, std::size_t v, double eta, std::mt19937_64& rng) {
    std::gamma_distribution<double> draw(100.0, 0.01);
    Matrix lambda(k, v);
    for (double& x : lambda.data()) x = std::max(draw(rng), eta);
    return lambda;
}

bool has_tokens(const DocTermMatrix& counts) {
    return counts.nnz() > 0;
}

// Runs the E-step on `docs` and accumulates sufficient statistics
// sum_d n_dw phi_dwk into `sstats` in document order. When `gamma` is given
// (one row per document of `docs`), inference starts from its rows and the
// converged values are written back.
void e_step(const DocTermMatrix& counts, std::span<const std::size_t> docs, const LdaModel& model,
            double alpha, const InferOptions& options, Matrix& sstats, Exec exec,
            Matrix* gamma = nullptr) {
    std::vector<DocInference> results(docs.size());
    const auto n = static_cast<std::ptrdiff_t>(docs.size());
    auto run = [&](std::ptrdiff_t i) {
        const auto u = static_cast<std::size_t>(i);
        const std::span<const double> init =
            gamma ? std::span<const double>(gamma->row(u)) : std::span<const double>();
        results[u] = infer(counts.row(docs[u]), model, alpha, options, init);
    };
    if (exec == Exec::serial) {
        for (std::ptrdiff_t i = 0; i < n; ++i) run(i);
    } else {
#pragma omp parallel for schedule(dynamic, 8)
        for (std::ptrdiff_t i = 0; i < n; ++i) run(i);
    }
    for (std::size_t i = 0; i < docs.size(); ++i) {
        const auto row = counts.row(docs[i]);
        const auto& phi = results[i].phi;
        for (std::size_t p = 0; p < row.size(); ++p)
            for (std::size_t k = 0; k < sstats.rows(); ++k)
                sstats(k, row.cols[p]) += row.values[p] * phi(p, k);
        if (gamma) std::copy(results[i].gamma.begin(), results[i].gamma.end(), gamma->row(i).begin());
    }
}

} // namespace

DocInference infer(const SparseRow& doc, const LdaModel& model, double alpha,
                   const InferOptions& options, std::span<const double> initial_gamma) {
    const std::size_t k_count = model.num_topics();
    const std::size_t n_terms = doc.size();
    const auto& eb = model.exp_expected_log_beta();

    double total = 0.0;
    for (double c : doc.values) total += c;

    DocInference out;
    if (initial_gamma.empty())
        out.gamma.assign(k_count, alpha + total / static_cast<double>(k_count));
    else if (initial_gamma.size() == k_count)
        out.gamma.assign(initial_gamma.begin(), initial_gamma.end());
    else
        throw ConfigError("lda: initial gamma has the wrong length");
    std::vector<double> theta(k_count);
    std::vector<double> next(k_count);
    std::vector<double> phinorm(n_terms);

    for (std::size_t it = 0; it < options.max_iterations; ++it) {
        ++out.iterations;
        exp_elog_theta(out.gamma, theta);
        for (std::size_t p = 0; p < n_terms; ++p) {
            double s = 0.0;
            for (std::size_t k = 0; k < k_count; ++k) s += theta[k] * eb(k, doc.cols[p]);
            phinorm[p] = s;
        }
        for (std::size_t k = 0; k < k_count; ++k) {
            double s = 0.0;
            for (std::size_t p = 0; p < n_terms; ++p)
                s += doc.values[p] * eb(k, doc.cols[p]) / phinorm[p];
            next[k] = alpha + theta[k] * s;
        }
        double change = 0.0;
        for (std::size_t k = 0; k < k_count; ++k) change += std::abs(next[k] - out.gamma[k]);
        out.gamma.swap(next);
        if (change / static_cast<double>(k_count) < options.tolerance) break;
    }

    exp_elog_theta(out.gamma, theta);
    out.phi = Matrix(n_terms, k_count);
    for (std::size_t p = 0; p < n_terms; ++p) {
        double s = 0.0;
        for (std::size_t k = 0; k < k_count; ++k) {
            out.phi(p, k) = theta[k] * eb(k, doc.cols[p]);
            s += out.phi(p, k);
        }
        for (std::size_t k = 0; k < k_count; ++k) out.phi(p, k) /= s;
    }
    return out;
}

LdaModel fit_online(const DocTermMatrix& counts, const LdaConfig& config, Exec exec) {
    config.validate();
    if (counts.kind() != MatrixKind::counts) throw ConfigError("lda: expected a counts matrix");
    if (counts.rows() == 0 || !has_tokens(counts))
        throw InputError("lda: corpus has no nonempty documents");

    const std::size_t k = config.num_topics;
    const std::size_t v = counts.cols();
    const double alpha = config.doc_prior();
    const double n_docs = static_cast<double>(counts.rows());

    std::mt19937_64 rng(config.seed);
    LdaModel model(initial_lambda(k, v, config.eta, rng));

    std::vector<std::size_t> order(counts.rows());
    std::iota(order.begin(), order.end(), 0);
    std::size_t t = 0;
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            const std::size_t end = std::min(order.size(), start + config.batch_size);
            const std::span<const std::size_t> batch(order.data() + start, end - start);
            Matrix sstats(k, v);
            e_step(counts, batch, model, alpha, config.inference, sstats, exec);

            const double rho = learning_rate(config.tau0, config.kappa, t++);
            const double scale = n_docs / static_cast<double>(batch.size());
            Matrix lambda = model.lambda();
            for (std::size_t i = 0; i < lambda.data().size(); ++i)
                lambda.data()[i] = (1.0 - rho) * lambda.data()[i] +
                                   rho * (config.eta + scale * sstats.data()[i]);
            model = LdaModel(std::move(lambda));
        }
    }
    return model;
}

LdaModel fit_batch(const DocTermMatrix& counts, const LdaConfig& config, std::size_t iterations,
                   const LdaObserver& observer, Exec exec) {
    config.validate();
    if (counts.kind() != MatrixKind::counts) throw ConfigError("lda: expected a counts matrix");
    if (counts.rows() == 0 || !has_tokens(counts))
        throw InputError("lda: corpus has no nonempty documents");

    std::mt19937_64 rng(config.seed);
    LdaModel model(initial_lambda(config.num_topics, counts.cols(), config.eta, rng));
    std::vector<std::size_t> all(counts.rows());
    std::iota(all.begin(), all.end(), 0);
    const double alpha = config.doc_prior();
    Matrix gamma(counts.rows(), config.num_topics);
    for (std::size_t d = 0; d < counts.rows(); ++d) {
        double total = 0.0;
        for (double c : counts.row(d).values) total += c;
        for (double& g : gamma.row(d)) g = alpha + total / static_cast<double>(config.num_topics);
    }
    for (std::size_t it = 0; it < iterations; ++it) {
        Matrix sstats(config.num_topics, counts.cols());
        e_step(counts, all, model, alpha, config.inference, sstats, exec, &gamma);
        for (double& x : sstats.data()) x += config.eta;
        model = LdaModel(std::move(sstats));
        if (observer) observer(it, model, gamma);
    }
    return model;
}

double elbo(const DocTermMatrix& counts, const LdaModel& model, const LdaConfig& config,
            Exec exec) {
    return elbo(counts, model, config, Matrix(), exec);
}

double elbo(const DocTermMatrix& counts, const LdaModel& model, const LdaConfig& config,
            const Matrix& initial_gamma, Exec exec) {
    if (!initial_gamma.empty() &&
        (initial_gamma.rows() != counts.rows() || initial_gamma.cols() != model.num_topics()))
        throw ConfigError("lda: initial gamma shape does not match the corpus and model");
    const std::size_t k_count = model.num_topics();
    const std::size_t v = model.vocab_size();
    const double alpha = config.doc_prior();
    const double eta = config.eta;
    const auto& elog_beta = model.expected_log_beta();
    const double kd = static_cast<double>(k_count);

    auto doc_term = [&](std::size_t d) {
        const auto row = counts.row(d);
        const auto inf =
            infer(row, model, alpha, config.inference,
                  initial_gamma.empty() ? std::span<const double>() : initial_gamma.row(d));
        const double gamma_sum = std::accumulate(inf.gamma.begin(), inf.gamma.end(), 0.0);
        const double psi_sum = digamma(gamma_sum);
        std::vector<double> elog_theta(k_count);
        for (std::size_t k = 0; k < k_count; ++k) elog_theta[k] = digamma(inf.gamma[k]) - psi_sum;

        double s = 0.0;
        for (std::size_t p = 0; p < row.size(); ++p) {
            for (std::size_t k = 0; k < k_count; ++k) {
                const double phi = inf.phi(p, k);
                if (phi <= 0.0) continue;
                s += row.values[p] * phi * (elog_theta[k] + elog_beta(k, row.cols[p]) - std::log(phi));
            }
        }
        s += std::lgamma(kd * alpha) - kd * std::lgamma(alpha);
        for (std::size_t k = 0; k < k_count; ++k)
            s += (alpha - inf.gamma[k]) * elog_theta[k] + std::lgamma(inf.gamma[k]);
        s -= std::lgamma(gamma_sum);
        return s;
    };

    std::vector<double> per_doc(counts.rows());
    const auto n = static_cast<std::ptrdiff_t>(counts.rows());
    if (exec == Exec::serial) {
        for (std::ptrdiff_t d = 0; d < n; ++d)
            per_doc[static_cast<std::size_t>(d)] = doc_term(static_cast<std::size_t>(d));
    } else {
#pragma omp parallel for schedule(dynamic, 8)
        for (std::ptrdiff_t d = 0; d < n; ++d)
            per_doc[static_cast<std::size_t>(d)] = doc_term(static_cast<std::size_t>(d));
    }
    double bound = 0.0;
    for (double x : per_doc) bound += x;

    const double vd = static_cast<double>(v);
    for (std::size_t k = 0; k < k_count; ++k) {
        double row_sum = 0.0;
        double s = std::lgamma(vd * eta) - vd * std::lgamma(eta);
        for (std::size_t w = 0; w < v; ++w) {
            const double lam = model.lambda()(k, w);
            row_sum += lam;
            s += (eta - lam) * elog_beta(k, w) + std::lgamma(lam);
        }
        s -= std::lgamma(row_sum);
        bound += s;
    }
    return bound;
}

TopicModel lda_topics(const LdaModel& model, const DocTermMatrix& counts, const Vocabulary& vocab,
                      std::size_t n_words, double alpha) {
    if (n_words == 0) throw ConfigError("lda_topics: n_words must be >= 1");
    if (model.vocab_size() != vocab.size() || counts.cols() != vocab.size())
        throw ConfigError("lda_topics: model, counts and vocabulary widths differ");
    TopicModel out;
    out.method = Method::lda;
    const Matrix beta = model.beta();
    for (std::size_t k = 0; k < beta.rows(); ++k)
        out.topics.push_back(make_topic(static_cast<int>(k), beta.row(k), vocab, n_words));

    out.assignments.resize(counts.rows());
    const auto n = static_cast<std::ptrdiff_t>(counts.rows());
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t d = 0; d < n; ++d) {
        const auto inf = infer(counts.row(static_cast<std::size_t>(d)), model, alpha);
        const auto best = std::max_element(inf.gamma.begin(), inf.gamma.end());
        out.assignments[static_cast<std::size_t>(d)] = static_cast<int>(best - inf.gamma.begin());
    }
    return out;
}

void write_checkpoint(std::ostream& out, const LdaModel& model) {
    out << model.num_topics() << ' ' << model.vocab_size() << '\n';
    char buf[32];
    for (std::size_t k = 0; k < model.num_topics(); ++k) {
        for (std::size_t w = 0; w < model.vocab_size(); ++w) {
            std::snprintf(buf, sizeof buf, "%.17g", model.lambda()(k, w));
            if (w > 0) out << ' ';
            out << buf;
        }
        out << '\n';
    }
}

LdaModel read_checkpoint(std::istream& in) {
    std::size_t k = 0, v = 0;
    if (!(in >> k >> v) || k == 0 || v == 0) throw InputError("lda checkpoint: bad header");
    Matrix lambda(k, v);
    for (double& x : lambda.data())
        if (!(in >> x)) throw InputError("lda checkpoint: truncated lambda");
    return LdaModel(std::move(lambda));
}

} // namespace topicbench

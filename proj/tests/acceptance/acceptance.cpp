// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include <json.hpp>

#include "oracles.hpp"
#include "topicbench/cluster.hpp"
#include "topicbench/coherence.hpp"
#include "topicbench/hash.hpp"
#include "topicbench/lda.hpp"
#include "topicbench/lsa.hpp"
#include "topicbench/reduce.hpp"

using namespace topicbench;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok && pass) {
            pass = false;
            detail = what;
        }
    }
};

struct Criterion {
    std::string name;
    double budget_s;
    std::function<Outcome()> run;
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(TOPICBENCH_CLI_PATH) + " " + args + " 2>&1 >/dev/null";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const fs::path kData = TOPICBENCH_TEST_DATA;
const std::string kConfig = (kData / "fixture_config.json").string();

// ---------------------------------------------------------------------------

Outcome coherence_oracle() {
    Outcome o;
    std::mt19937_64 rng(2024);
    double worst = 0;
    for (int trial = 0; trial < 20; ++trial) {
        std::uniform_int_distribution<std::size_t> nd(3, 20), nt(4, 12), len(1, 30);
        const std::size_t n_docs = nd(rng), n_terms = nt(rng);
        std::uniform_int_distribution<std::size_t> term(0, n_terms - 1);
        oracle::Docs docs(n_docs);
        std::set<std::string> seen;
        for (auto& d : docs) {
            const auto l = len(rng);
            for (std::size_t i = 0; i < l; ++i) {
                d.push_back("w" + std::to_string(term(rng)));
                seen.insert(d.back());
            }
        }
        std::vector<std::string> present(seen.begin(), seen.end());
        std::shuffle(present.begin(), present.end(), rng);
        if (present.size() < 3) continue;
        std::vector<std::string> topic(present.begin(), present.begin() + 3);
        const auto corpus = corpus_from_tokens(docs);
        std::uniform_int_distribution<std::size_t> win(2, 8);
        const std::size_t window = trial % 4 == 0 ? 110 : win(rng);

        auto doc_counts = count_contexts(corpus, topic, ContextMode::document);
        auto win_counts = count_contexts(corpus, topic, ContextMode::window, window);
        const double um = u_mass(topic, doc_counts).value;
        const double cv = c_v(topic, win_counts, 1e-12).value;
        const double um_ref = oracle::brute_u_mass(docs, topic);
        const double cv_ref = oracle::brute_c_v(docs, topic, window, 1e-12);
        worst = std::max({worst, std::abs(um - um_ref), std::abs(cv - cv_ref)});
        o.require(std::abs(um - um_ref) <= 1e-9,
                  "u_mass trial " + std::to_string(trial) + ": " + fmt(um) + " vs " + fmt(um_ref));
        o.require(std::abs(cv - cv_ref) <= 1e-9,
                  "c_v trial " + std::to_string(trial) + ": " + fmt(cv) + " vs " + fmt(cv_ref));
    }
    if (o.pass) o.detail = "20 corpora, max |diff| " + fmt(worst);
    return o;
}

Outcome metric_separation() {
    Outcome o;
    double min_gap = 1e9;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        std::mt19937_64 rng(seed);
        std::vector<std::vector<std::string>> groups(3);
        std::vector<std::string> all;
        for (std::size_t g = 0; g < 3; ++g)
            for (std::size_t w = 0; w < 8; ++w) {
                groups[g].push_back("g" + std::to_string(g) + "w" + std::to_string(w));
                all.push_back(groups[g].back());
            }
        // 200 documents per vocabulary; 10% of tokens come from the other groups.
        oracle::Docs docs;
        std::uniform_int_distribution<std::size_t> len(15, 40), word(0, 7), any(0, 23);
        std::bernoulli_distribution stray(0.1);
        for (std::size_t g = 0; g < 3; ++g)
            for (int d = 0; d < 200; ++d) {
                std::vector<std::string> doc;
                const auto l = len(rng);
                for (std::size_t i = 0; i < l; ++i)
                    doc.push_back(stray(rng) ? all[any(rng)] : groups[g][word(rng)]);
                docs.push_back(std::move(doc));
            }
        std::shuffle(docs.begin(), docs.end(), rng);
        const auto corpus = corpus_from_tokens(docs);

        std::vector<Topic> planted, random;
        for (int t = 0; t < 3; ++t) {
            Topic p{t, {}}, r{t, {}};
            auto pool = all;
            std::shuffle(pool.begin(), pool.end(), rng);
            for (std::size_t w = 0; w < 8; ++w) {
                p.words.push_back({groups[t][w], 8.0 - w});
                r.words.push_back({pool[w], 8.0 - w});
            }
            planted.push_back(p);
            random.push_back(r);
        }
        CoherenceParams params;
        params.top_n = 8;
        const auto rp = evaluate(planted, corpus, params);
        const auto rr = evaluate(random, corpus, params);
        const double gap = rp.c_v - rr.c_v;
        min_gap = std::min(min_gap, gap);
        o.require(gap >= 0.2, "seed " + std::to_string(seed) + ": C_V gap " + fmt(gap));
        o.require(rp.u_mass > rr.u_mass, "seed " + std::to_string(seed) + ": U_Mass planted " +
                                             fmt(rp.u_mass) + " <= random " + fmt(rr.u_mass));
    }
    if (o.pass) o.detail = "5/5 seeds, min C_V gap " + fmt(min_gap);
    return o;
}

Outcome svd_optimality() {
    Outcome o;
    std::mt19937_64 rng(77);
    double worst_s = 0, worst_err = 0;
    for (int trial = 0; trial < 50; ++trial) {
        std::uniform_int_distribution<std::size_t> dim(1, 10);
        const std::size_t r = dim(rng), c = dim(rng);
        std::uniform_int_distribution<std::size_t> kk(1, std::min(r, c));
        const std::size_t k = kk(rng);
        std::normal_distribution<double> n(0, 1);
        Matrix m(r, c);
        for (auto& x : m.data()) x = n(rng);
        auto f = truncated_svd(m, k, static_cast<std::uint64_t>(trial));
        const auto ref = oracle::gram_singular_values(m);
        for (std::size_t i = 0; i < k; ++i) {
            worst_s = std::max(worst_s, std::abs(f.s[i] - ref[i]));
            o.require(std::abs(f.s[i] - ref[i]) <= 1e-8,
                      "trial " + std::to_string(trial) + " s[" + std::to_string(i) + "] off by " +
                          fmt(std::abs(f.s[i] - ref[i])));
        }
        double err = 0;
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < c; ++j) {
                double v = 0;
                for (std::size_t t = 0; t < k; ++t) v += f.u(i, t) * f.s[t] * f.vt(t, j);
                err += (m(i, j) - v) * (m(i, j) - v);
            }
        const double gap = std::abs(std::sqrt(err) - oracle::best_rank_k_error(m, k));
        worst_err = std::max(worst_err, gap);
        o.require(gap <= 1e-6, "trial " + std::to_string(trial) + " reconstruction gap " + fmt(gap));
    }
    if (o.pass)
        o.detail = "50 matrices, max |ds| " + fmt(worst_s) + ", max error gap " + fmt(worst_err);
    return o;
}

DocTermMatrix planted_two_groups(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> word(0, 4);
    Matrix d(200, 10);
    for (std::size_t r = 0; r < 200; ++r)
        for (int i = 0; i < 20; ++i) d(r, (r < 100 ? 0 : 5) + word(rng)) += 1;
    return DocTermMatrix::from_dense(d, MatrixKind::counts);
}

Outcome lda_soundness() {
    Outcome o;
    {
        std::mt19937_64 rng(5);
        std::uniform_int_distribution<int> c(0, 5);
        Matrix d(100, 40);
        for (auto& x : d.data()) x = c(rng) >= 4 ? c(rng) : 0;
        auto counts = DocTermMatrix::from_dense(d, MatrixKind::counts);
        LdaConfig cfg;
        cfg.num_topics = 5;
        cfg.seed = 1;
        cfg.inference = {1e-10, 1000};
        std::vector<double> bounds;
        fit_batch(counts, cfg, 50, [&](std::size_t, const LdaModel& m, const Matrix& gamma) {
            bounds.push_back(elbo(counts, m, cfg, gamma));
        });
        for (std::size_t i = 1; i < bounds.size(); ++i)
            o.require(bounds[i] >= bounds[i - 1] - 1e-6 * std::abs(bounds[i - 1]),
                      "ELBO decreased at iteration " + std::to_string(i) + ": " +
                          fmt(bounds[i - 1]) + " -> " + fmt(bounds[i]));
    }
    std::vector<std::string> terms;
    for (int i = 0; i < 10; ++i) terms.push_back("w" + std::to_string(i));
    Vocabulary vocab(terms, std::vector<std::size_t>(10, 1));
    for (std::uint64_t seed : {1, 2, 3}) {
        auto counts = planted_two_groups(seed);
        LdaConfig cfg;
        cfg.num_topics = 2;
        cfg.seed = seed;
        cfg.batch_size = 50;
        cfg.epochs = 10;
        auto model = fit_online(counts, cfg);
        auto tm = lda_topics(model, counts, vocab, 5, cfg.doc_prior());
        std::size_t agree = 0;
        std::map<int, std::map<int, std::size_t>> table;
        for (std::size_t d = 0; d < 200; ++d) ++table[tm.assignments[d]][d < 100 ? 0 : 1];
        for (const auto& [topic, groups] : table) {
            std::size_t best = 0;
            for (const auto& [g, n] : groups) best = std::max(best, n);
            agree += best;
        }
        const double purity = static_cast<double>(agree) / 200.0;
        o.require(purity == 1.0 && table.size() == 2,
                  "seed " + std::to_string(seed) + ": purity " + fmt(purity));
        auto beta = model.beta();
        for (std::size_t k = 0; k < beta.rows(); ++k) {
            const double s = std::accumulate(beta.row(k).begin(), beta.row(k).end(), 0.0);
            o.require(std::abs(s - 1.0) <= 1e-9, "beta row sum " + fmt(s));
        }
    }
    if (o.pass) o.detail = "ELBO monotone over 50 iterations; purity 1.0 for 3/3 seeds";
    return o;
}

Outcome clustering() {
    Outcome o;
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        std::uniform_int_distribution<std::size_t> np(8, 64), dim(1, 5);
        const auto n = np(rng);
        auto pts = oracle::uniform_points(n, dim(rng), -5, 5, 1000 + trial);
        auto core = core_distances(pts, std::min<std::size_t>(5, n - 1));
        auto mst = mst_mutual_reachability(pts, core);
        auto ref = oracle::kruskal_mutual_reachability(pts, core);
        std::sort(mst.begin(), mst.end(), edge_less);
        double total = 0, ref_total = 0;
        for (const auto& e : mst) total += e.weight;
        for (const auto& e : ref) ref_total += e.w;
        o.require(mst.size() == ref.size() && total == ref_total,
                  "MST trial " + std::to_string(trial) + ": " + fmt(total) + " vs " + fmt(ref_total));
    }
    double worst_ari = 1;
    for (std::uint64_t seed : {1, 2, 3}) {
        std::vector<int> truth;
        auto blobs = oracle::gaussian_blobs({{0, 0}, {10, 0}}, 50, 1.0, seed, &truth);
        auto noise = oracle::uniform_points(10, 2, -15, 25, seed + 50);
        Matrix pts(110, 2);
        for (std::size_t i = 0; i < 100; ++i) pts(i, 0) = blobs(i, 0), pts(i, 1) = blobs(i, 1);
        for (std::size_t i = 0; i < 10; ++i) {
            pts(100 + i, 0) = noise(i, 0);
            pts(100 + i, 1) = noise(i, 1) + 25;
            truth.push_back(-1);
        }
        ClusterConfig cfg;
        cfg.min_cluster_size = 15;
        auto r = hdbscan(pts, cfg);
        const double ari = oracle::adjusted_rand_index(r.labels, truth);
        worst_ari = std::min(worst_ari, ari);
        o.require(r.cluster_count() == 2 && ari >= 0.9,
                  "seed " + std::to_string(seed) + ": " + std::to_string(r.cluster_count()) +
                      " clusters, ARI " + fmt(ari));
    }
    auto pts = oracle::uniform_points(30, 2, 0, 1, 3);
    ClusterConfig big;
    big.min_cluster_size = 31;
    auto r = hdbscan(pts, big);
    o.require(std::all_of(r.labels.begin(), r.labels.end(), [](int l) { return l == -1; }),
              "min_cluster_size > n produced a cluster");
    if (o.pass) o.detail = "20/20 MST totals exact; min ARI " + fmt(worst_ari);
    return o;
}

Outcome reduction() {
    Outcome o;
    double worst_sil = 1, worst_residual = 0;
    for (std::uint64_t seed : {1, 2, 3}) {
        std::vector<int> labels;
        std::vector<double> a(10, 0.0), b(10, 0.0);
        b[3] = 10.0;
        auto pts = oracle::gaussian_blobs({a, b}, 50, 1.0, seed, &labels);
        ReduceConfig cfg;
        cfg.n_components = 2;
        cfg.seed = seed;
        auto out = reduce(pts, cfg);
        const double sil = oracle::silhouette(out, labels);
        worst_sil = std::min(worst_sil, sil);
        o.require(sil >= 0.5, "seed " + std::to_string(seed) + ": silhouette " + fmt(sil));

        const std::size_t k = cfg.n_neighbors;
        auto g = calibrate(knn_graph(pts, k));
        for (std::size_t i = 0; i < g.n; ++i) {
            std::span<const double> d(g.distances.data() + i * k, k);
            const double res = std::abs(membership_sum(d, g.rho[i], g.sigma[i]) - std::log2(double(k)));
            worst_residual = std::max(worst_residual, res);
        }
    }
    o.require(worst_residual < 1e-5, "calibration residual " + fmt(worst_residual));

    std::mt19937_64 rng(8);
    std::normal_distribution<double> n(0, 1);
    Matrix pts(500, 4);
    const double scale[4] = {0.5, 4.0, 1.0, 2.0};
    for (std::size_t i = 0; i < 500; ++i)
        for (std::size_t j = 0; j < 4; ++j) pts(i, j) = scale[j] * n(rng);
    auto p = pca(pts, 2);
    auto ref = oracle::covariance_eigenvectors(pts);
    for (std::size_t c = 0; c < 2; ++c) {
        double cosv = 0;
        for (std::size_t j = 0; j < 4; ++j) cosv += p.components(c, j) * ref(j, c);
        o.require(std::abs(cosv) >= 0.99, "PCA component " + std::to_string(c) + " |cos| " +
                                              fmt(std::abs(cosv)));
    }
    if (o.pass)
        o.detail = "min silhouette " + fmt(worst_sil) + ", max residual " + fmt(worst_residual);
    return o;
}

Outcome end_to_end() {
    Outcome o;
    const fs::path root = fs::temp_directory_path() / "topicbench_acceptance_e2e";
    fs::remove_all(root);
    const std::map<int, std::set<std::string>> markers_by_group = {
        {0, {"mortgage", "escrow", "foreclosure"}},
        {1, {"collector", "debt", "harassment"}},
        {2, {"equifax", "transunion", "inaccurate"}},
        {3, {"overdraft", "checking", "deposit"}}};

    for (const std::string method : {"lsa", "lda", "bertopic"}) {
        for (const char* rep : {"a", "b"}) {
            const auto out = (root / (method + "_" + rep)).string();
            const int fit = run_cli("fit --config " + kConfig + " --method " + method + " --out " + out);
            o.require(fit == 0, method + " fit exited " + std::to_string(fit));
            const int ev = run_cli("eval --config " + kConfig + " --method " + method + " --out " + out);
            o.require(ev == 0, method + " eval exited " + std::to_string(ev));
        }
        if (!o.pass) return o;
        const auto a = root / (method + "_a"), b = root / (method + "_b");
        for (const char* f : {"topics.json", "assignments.json", "report.json"})
            o.require(slurp(a / f) == slurp(b / f), method + " " + f + " differs between runs");

        auto report = json::parse(slurp(a / "report.json"));
        const double cv = report["aggregate"]["c_v"], um = report["aggregate"]["u_mass"];
        o.require(cv >= -1.0 && cv <= 1.0, method + " C_V out of range: " + fmt(cv));
        o.require(std::isfinite(um), method + " U_Mass not finite");
        for (const auto& t : report["per_topic"]) {
            const double tcv = t["c_v"];
            o.require(tcv >= -1.0 && tcv <= 1.0, method + " topic C_V out of range");
        }
        o.detail += method + " (C_V " + fmt(cv) + ", U_Mass " + fmt(um) + ") ";

        if (method == "bertopic") {
            auto topics = json::parse(slurp(a / "topics.json"));
            o.require(topics.size() == 4, "bertopic produced " + std::to_string(topics.size()) + " topics");
            std::set<int> matched;
            for (const auto& t : topics) {
                std::set<std::string> top3;
                for (std::size_t i = 0; i < 3 && i < t["words"].size(); ++i)
                    top3.insert(t["words"][i]["w"].get<std::string>());
                int hit = -1;
                for (const auto& [g, m] : markers_by_group)
                    if (m == top3) hit = g;
                o.require(hit >= 0, "bertopic topic " + t["topic"].dump() + " top-3 are not a marker set");
                matched.insert(hit);
            }
            o.require(matched.size() == 4, "marker sets not recovered one-to-one");
        }
    }
    const int cmp = run_cli("eval --config " + kConfig + " --model " + (root / "lsa_a").string() +
                            " --model " + (root / "lda_a").string() + " --model " +
                            (root / "bertopic_a").string() + " --out " + (root / "compare").string());
    o.require(cmp == 0, "comparison eval exited " + std::to_string(cmp));
    if (cmp == 0) {
        auto table = json::parse(slurp(root / "compare" / "comparison.json"));
        o.require(table.size() == 3, "comparison table has " + std::to_string(table.size()) + " rows");
    }
    fs::remove_all(root);
    return o;
}

// Hash of every output file; manifest.json is hashed with its wall-clock
// timings removed.
std::map<std::string, std::string> hash_outputs(const fs::path& dir) {
    std::map<std::string, std::string> h;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const auto name = entry.path().filename().string();
        auto bytes = slurp(entry.path());
        if (name == "manifest.json") {
            auto m = json::parse(bytes);
            m.erase("timings_ms");
            bytes = m.dump();
        }
        h[name] = sha256_hex(bytes);
    }
    return h;
}

Outcome determinism() {
    Outcome o;
    const fs::path root = fs::temp_directory_path() / "topicbench_acceptance_det";
    std::size_t files = 0;
    for (const std::string method : {"lsa", "lda", "bertopic"}) {
        std::map<std::string, std::string> first;
        for (int rep = 0; rep < 3; ++rep) {
            fs::remove_all(root);
            const auto out = root.string();
            const std::string common = " --config " + kConfig + " --method " + method + " --out " + out;
            std::map<std::string, std::string> hashes;
            for (const char* cmd : {"fit", "eval", "map"}) {
                const int code = run_cli(std::string(cmd) + common);
                o.require(code == 0, method + " " + cmd + " exited " + std::to_string(code));
                if (code != 0) return o;
                for (auto& [k, v] : hash_outputs(root)) hashes[std::string(cmd) + "/" + k] = v;
            }
            if (rep == 0) {
                first = hashes;
                files += hashes.size();
            } else {
                for (const auto& [name, h] : first) {
                    auto it = hashes.find(name);
                    o.require(it != hashes.end() && it->second == h,
                              method + " " + name + " differs on repetition " + std::to_string(rep + 1));
                }
                o.require(hashes.size() == first.size(), method + " produced a different file set");
            }
        }
    }
    fs::remove_all(root);
    if (o.pass) o.detail = std::to_string(files) + " output snapshots identical across 3 repetitions";
    return o;
}

} // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {"coherence-oracle-equivalence", 5, coherence_oracle},
        {"metric-separation", 30, metric_separation},
        {"svd-optimality", 5, svd_optimality},
        {"lda-soundness", 60, lda_soundness},
        {"clustering-correctness", 30, clustering},
        {"reduction-sanity", 60, reduction},
        {"end-to-end-pipeline", 120, end_to_end},
        {"determinism", 0, determinism},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (o.pass && c.budget_s > 0 && secs > c.budget_s) {
            o.pass = false;
            o.detail = "runtime " + fmt(secs) + " s exceeds " + fmt(c.budget_s) + " s";
        }
        if (!o.pass) ++failed;
        std::printf("%s %s (%.2f s) %s\n", o.pass ? "PASS" : "FAIL", c.name.c_str(), secs,
                    o.detail.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}

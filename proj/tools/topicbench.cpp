#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "topicbench/run.hpp"

namespace {

struct Options {
    std::string config;
    std::vector<std::string> sets;
    std::string out;
    std::string method;
    std::vector<std::string> models;
    std::string model_dir;
};

void add_common(CLI::App* sub, Options& o) {
    sub->add_option("--config", o.config, "Run configuration (JSON)")->required();
    sub->add_option("--set", o.sets, "Override a config key: key=value (repeatable)");
    sub->add_option("--out", o.out, "Output directory");
    sub->add_option("--method", o.method, "lsa | lda | bertopic");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Topic modeling benchmark: LSA, LDA and embedding-cluster topics with coherence scoring"};
    app.set_version_flag("--version", std::string(TOPICBENCH_VERSION));
    app.require_subcommand(1);

    Options o;
    auto* ingest = app.add_subcommand("ingest", "Parse and normalize the complaint file");
    auto* embed = app.add_subcommand("embed", "Fetch document embeddings and write them to a file");
    auto* fit = app.add_subcommand("fit", "Fit a topic model");
    auto* eval = app.add_subcommand("eval", "Score fitted models with C_V and U_Mass");
    auto* map = app.add_subcommand("map", "Export an intertopic distance map");
    for (auto* sub : {ingest, embed, fit, eval, map}) add_common(sub, o);
    eval->add_option("--model", o.models, "Fitted model directory (repeatable)");
    map->add_option("--model", o.model_dir, "Fitted model directory (default: the output directory)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    std::string stage = "config";
    try {
        topicbench::ConfigSources sources;
        sources.config_path = o.config;
        sources.overrides = o.sets;
        if (!o.out.empty()) sources.output = o.out;
        if (!o.method.empty()) sources.method = o.method;
        if (const char* url = std::getenv("TOPICBENCH_EMBED_URL")) sources.embed_url = url;
        if (!o.models.empty()) {
            std::string list = "[";
            for (std::size_t i = 0; i < o.models.size(); ++i) {
                if (i > 0) list += ",";
                list += nlohmann::json(std::filesystem::absolute(o.models[i]).string()).dump();
            }
            sources.overrides.push_back("eval.models=" + list + "]");
        }
        const topicbench::RunConfig cfg = topicbench::resolve_config(sources);

        stage = "run";
        if (ingest->parsed()) topicbench::run_ingest(cfg);
        if (embed->parsed()) topicbench::run_embed(cfg);
        if (fit->parsed()) topicbench::run_fit(cfg);
        if (eval->parsed()) topicbench::run_eval(cfg);
        if (map->parsed()) {
            std::optional<std::filesystem::path> dir;
            if (!o.model_dir.empty()) dir = std::filesystem::absolute(o.model_dir);
            topicbench::run_map(cfg, dir);
        }
        return 0;
    } catch (const topicbench::StageError& e) {
        std::cerr << topicbench::error_line(e.stage(), e.what()) << '\n';
        return e.exit_code();
    } catch (const topicbench::ConfigError& e) {
        std::cerr << topicbench::error_line(stage, e.what()) << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << topicbench::error_line(stage, e.what()) << '\n';
        return 1;
    }
}

// Command-line entry point: one subcommand per pipeline stage.

#include <iostream>
#include <map>
#include <memory>
#include <string>

#include "CLI11.hpp"

#include "dsrim/config.hpp"
#include "dsrim/error.hpp"
#include "dsrim/pipeline.hpp"

namespace {

struct Overrides {
    std::string config_file;
    std::map<std::string, std::string> values;
};

std::string flag_names(const std::string& key)
{
    std::string dashed = key;
    for (auto& c : dashed) {
        if (c == '_') {
            c = '-';
        }
    }
    return dashed == key ? "--" + key : "--" + dashed + ",--" + key;
}

void add_config_options(CLI::App* sub, Overrides& overrides)
{
    sub->add_option("-c,--config", overrides.config_file, "experiment config file (key = value lines)");
    for (const auto& key : dsrim::config_keys()) {
        sub->add_option(flag_names(key), overrides.values[key], "override config key '" + key + "'");
    }
}

dsrim::ExperimentConfig resolve_config(const Overrides& overrides, CLI::App* sub)
{
    dsrim::ExperimentConfig config =
        overrides.config_file.empty() ? dsrim::ExperimentConfig{} : dsrim::load_config_file(overrides.config_file);
    for (const auto& key : dsrim::config_keys()) {
        if (sub->count("--" + key) > 0) {
            dsrim::set_config_value(config, key, overrides.values.at(key));
        }
    }
    config.validate();
    return config;
}

void report(const dsrim::CommandOutcome& outcome)
{
    for (const auto& w : outcome.warnings) {
        std::cerr << "warning: " << w << '\n';
    }
    for (const auto& s : outcome.summary) {
        std::cout << s << '\n';
    }
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Knowledge-resource-driven text representations for document re-ranking"};
    app.require_subcommand(1);

    std::vector<std::pair<CLI::App*, dsrim::Command>> stages;
    std::vector<std::unique_ptr<Overrides>> overrides;
    auto add_stage = [&](const std::string& name, const std::string& description, dsrim::Command command) {
        CLI::App* sub = app.add_subcommand(name, description);
        overrides.push_back(std::make_unique<Overrides>());
        add_config_options(sub, *overrides.back());
        stages.emplace_back(sub, command);
        return sub;
    };
    const std::map<std::string, std::string> descriptions = {
        {"build-graph", "load the knowledge resource and cache it with document frequencies"},
        {"train-embeddings", "train paragraph vectors for documents, queries and object labels"},
        {"build-referential", "cluster objects into the k topical clusters of the referential"},
        {"vectorize", "build input vectors (x^t, x^KR) for every document and query"},
        {"train", "retrieve BM25 candidates and train one ranker per cross-validation fold"},
        {"evaluate", "re-rank held-out queries and report MAP against BM25 and random baselines"},
        {"analyze-repr", "pivot-document separation of x^KR for clustering and frequency referentials"},
        {"difficulty", "per-difficulty-class query statistics and input/output similarity"},
    };
    for (const auto& [name, command] : dsrim::pipeline_commands()) {
        add_stage(name, descriptions.at(name), command);
    }
    add_stage("run-all", "run every stage in order", &dsrim::run_pipeline);

    CLI::App* show = app.add_subcommand("show-config", "print the effective config");
    Overrides show_overrides;
    add_config_options(show, show_overrides);

    CLI::App* fixture = app.add_subcommand("generate-fixture", "write a synthetic collection and experiment.conf");
    std::string fixture_dir;
    dsrim::SyntheticConfig synthetic;
    fixture->add_option("-o,--out", fixture_dir, "output directory")->required();
    fixture->add_option("--seed", synthetic.seed, "generator seed");
    fixture->add_option("--documents", synthetic.documents, "number of documents");
    fixture->add_option("--queries", synthetic.queries, "number of queries");

    CLI11_PARSE(app, argc, argv);

    try {
        if (fixture->parsed()) {
            dsrim::write_synthetic_experiment(synthetic, fixture_dir);
            std::cout << "wrote " << fixture_dir << "/experiment.conf\n";
            return 0;
        }
        if (show->parsed()) {
            dsrim::write_config(std::cout, resolve_config(show_overrides, show));
            return 0;
        }
        for (std::size_t i = 0; i < stages.size(); ++i) {
            if (stages[i].first->parsed()) {
                report(stages[i].second(resolve_config(*overrides[i], stages[i].first)));
                return 0;
            }
        }
    } catch (const dsrim::MissingArtifactError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const dsrim::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

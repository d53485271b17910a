#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "dsrim/config.hpp"
#include "dsrim/synthetic.hpp"

namespace dsrim {

/// What a command reports back: warnings collected along the way and a few
/// human-readable summary lines.
struct CommandOutcome {
    std::vector<std::string> warnings;
    std::vector<std::string> summary;
};

using Command = CommandOutcome (*)(const ExperimentConfig&);

// Every command validates the config first, reads its prerequisites from
// output_dir (raising MissingArtifactError naming the producing command), and
// writes its artifacts plus `<command>.manifest` there.
CommandOutcome cmd_build_graph(const ExperimentConfig& config);
CommandOutcome cmd_train_embeddings(const ExperimentConfig& config);
CommandOutcome cmd_build_referential(const ExperimentConfig& config);
CommandOutcome cmd_vectorize(const ExperimentConfig& config);
CommandOutcome cmd_train(const ExperimentConfig& config);
CommandOutcome cmd_evaluate(const ExperimentConfig& config);
CommandOutcome cmd_analyze_repr(const ExperimentConfig& config);
CommandOutcome cmd_difficulty(const ExperimentConfig& config);

/// Command names in pipeline order.
const std::vector<std::pair<std::string, Command>>& pipeline_commands();

/// Runs build-graph through difficulty in order.
CommandOutcome run_pipeline(const ExperimentConfig& config);

/// Settings sized for a generated collection, with input paths relative to the fixture directory.
ExperimentConfig synthetic_experiment_config(std::uint64_t seed);

/// Writes a generated collection and `experiment.conf` into `directory`.
void write_synthetic_experiment(const SyntheticConfig& synthetic, const std::filesystem::path& directory);

}  // namespace dsrim

#pragma once

#include "heatmem/config.hpp"
#include "heatmem/output.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace heatmem {

enum class Experiment { decay, cde, weak_lipschitz, split, dirac_limit, oracle };

inline constexpr Experiment all_experiments[] = {Experiment::decay,       Experiment::cde,
                                                 Experiment::weak_lipschitz, Experiment::split,
                                                 Experiment::dirac_limit, Experiment::oracle};

std::string to_string(Experiment e);
std::optional<Experiment> parse_experiment(std::string_view name);

// Configuration used by the acceptance suite for each experiment; the files
// under configs/ are renderings of these.
RunConfig default_config(Experiment e);

enum class Verdict { pass, fail, out_of_hypothesis };

std::string to_string(Verdict v);

using Metrics = std::vector<std::pair<std::string, double>>;

struct CriterionResult {
    int id = 0;  // acceptance criterion number
    std::string name;
    Verdict verdict = Verdict::fail;
    std::string detail;
    Metrics values;
};

struct ExperimentResult {
    Experiment experiment = Experiment::decay;
    std::vector<CriterionResult> criteria;
    std::vector<std::string> warnings;
    Metrics metrics;
    Table series;

    bool passed() const;
};

ExperimentResult run_experiment(Experiment e, const RunConfig& config);

// series.csv, summary.json, config.ini and manifest.txt in dir; returns the file names.
std::vector<std::string> write_artifacts(const ExperimentResult& result, const RunConfig& config,
                                         const std::filesystem::path& dir);

// summary.json contents.
std::string summary_json(const ExperimentResult& result, const RunConfig& config);

enum ExitCode : int { exit_pass = 0, exit_criterion_failure = 1, exit_config_error = 2, exit_runtime_error = 3 };

}  // namespace heatmem

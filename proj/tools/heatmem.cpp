#include "heatmem/config.hpp"
#include "heatmem/dynamics.hpp"
#include "heatmem/experiments.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

using namespace heatmem;

namespace {

void print_result(const ExperimentResult& result)
{
    for (const auto& w : result.warnings)
        std::cerr << "warning: " << w << '\n';
    for (const auto& c : result.criteria) {
        std::cout << "criterion " << c.id << " [" << c.name << "]: " << to_string(c.verdict) << " - " << c.detail
                  << '\n';
    }
    for (const auto& [name, value] : result.metrics)
        std::cout << "  " << name << " = " << format_double(value) << '\n';
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Heat conduction with memory and dynamic boundary conditions"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
    bool defaults = false;

    for (Experiment e : all_experiments) {
        CLI::App* sub = app.add_subcommand(to_string(e), "run the " + to_string(e) + " experiment");
        sub->add_option("-c,--config", config_path, "INI configuration file");
        sub->add_flag("--defaults", defaults, "start from the built-in configuration for this experiment");
        sub->add_option("-o,--out", out_dir, "directory for series.csv, summary.json and manifest.txt");
        sub->add_option("--seed", seed, "initial data seed");
        sub->add_option("--override", overrides, "override as section.key=value")->take_all();
    }
    CLI::App* show = app.add_subcommand("show-config", "print the built-in configuration of an experiment");
    std::string show_name;
    show->add_option("experiment", show_name)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_pass : exit_config_error;
    }

    if (show->parsed()) {
        const auto e = parse_experiment(show_name);
        if (!e) {
            std::cerr << "unknown experiment '" << show_name << "'\n";
            return exit_config_error;
        }
        std::cout << render_config(default_config(*e));
        return exit_pass;
    }

    const CLI::App* sub = app.get_subcommands().front();
    const Experiment experiment = *parse_experiment(sub->get_name());

    RunConfig config;
    try {
        if (seed)
            overrides.push_back("initial.seed=" + std::to_string(*seed));
        if (!config_path.empty())
            config = load_config(config_path, overrides);
        else if (defaults)
            config = parse_config(render_config(default_config(experiment)), overrides);
        else
            config = parse_config("", overrides);
        if (!out_dir.empty())
            config.output.directory = out_dir;
    } catch (const ConfigError& e) {
        for (const auto& issue : e.issues()) {
            std::cerr << "config error";
            if (!issue.key.empty())
                std::cerr << " [" << issue.key << "]";
            if (issue.line > 0)
                std::cerr << " line " << issue.line;
            std::cerr << ": " << issue.message << '\n';
        }
        return exit_config_error;
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config_error;
    }

    try {
        const ExperimentResult result = run_experiment(experiment, config);
        print_result(result);
        const auto files = write_artifacts(result, config, config.output.directory);
        std::cout << "wrote " << files.size() << " files to " << config.output.directory << '\n';
        return result.passed() ? exit_pass : exit_criterion_failure;
    } catch (const SimulationError& e) {
        std::cerr << "runtime error: " << e.what() << " (last good time " << e.last_good_time() << ")\n";
        return exit_runtime_error;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config_error;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << '\n';
        return exit_runtime_error;
    }
}

#pragma once

#include "heatmem/kernels.hpp"

#include <cstdint>
#include <filesystem>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace heatmem {

struct GridConfig {
    int nx = 64;
    int ny = 33;
    double lx = 2.0 * std::numbers::pi;
    double ly = 1.0;
};

struct KernelConfig {
    std::vector<double> weights{1.0};
    std::vector<double> rates{1.0};
};

struct PhysicsConfig {
    double alpha = 1.0;
    double beta = 1.0;
    double nu = 0.5;
    double omega = 0.5;
    double r = 4.0;
};

// Ascending coefficients; an empty list is the zero function.
struct NonlinearityConfig {
    std::vector<double> f{0.0, -1.0, 0.0, 1.0};
    std::vector<double> g{0.0, -1.0, 0.0, 1.0};
};

enum class HistoryMode { modes, direct };

struct IntegrationConfig {
    double dt = 1e-3;
    double t_final = 10.0;
    int report_stride = 10;    // steps between EnergyReport rows
    int snapshot_stride = 0;   // steps between stored fields; 0 keeps none
    HistoryMode history = HistoryMode::modes;
    double window_tol = 1e-14;
};

enum class InitialKind { bandlimited, mode, constant, zero };
enum class ProfileKind { zero, ramp, saturating };

struct InitialConfig {
    InitialKind kind = InitialKind::bandlimited;
    std::uint64_t seed = 1;
    double amplitude = 1.0;
    int x_modes = 4;
    int y_degree = 3;
    int kx = 1;  // mode generator
    int py = 0;
    ProfileKind history = ProfileKind::zero;
    double history_level = 1.0;  // saturation level
    double history_scale = 1.0;  // history field = scale * initial field
};

struct OutputConfig {
    std::string directory = "out";
    bool csv = true;
    bool json = true;
};

enum class DiracReduction { weak_limit, literal };

struct ExperimentConfig {
    std::vector<double> perturbations{1e-2, 1e-3, 1e-4};
    int pairs = 5;
    std::vector<double> lambdas{4.0, 16.0, 64.0};
    double dirac_horizon = 1.0;
    DiracReduction dirac_reduction = DiracReduction::weak_limit;
    double pilot_time = 4.0;  // linear-part run used to fit m0
    int oracle_steps = 1000;
    double decay_margin = 1.05;
};

struct RunConfig {
    GridConfig grid;
    KernelConfig bulk_kernel;
    KernelConfig boundary_kernel{{1.0}, {3.5}};
    PhysicsConfig physics;
    NonlinearityConfig nonlinearity;
    IntegrationConfig integration;
    InitialConfig initial;
    OutputConfig output;
    ExperimentConfig experiment;

    MemoryKernel make_kernel(Region r) const;
    SmallnessFlags smallness() const;
};

struct ConfigIssue {
    std::string key;  // section.key, or empty for syntax errors
    int line = 0;     // 0 for command-line overrides
    std::string message;
};

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<ConfigIssue> issues);
    const std::vector<ConfigIssue>& issues() const noexcept { return issues_; }

private:
    std::vector<ConfigIssue> issues_;
};

// Flat INI: [section] headers, key = value lines, '#' or ';' comments.
// Lists are whitespace or comma separated. Overrides take the form
// section.key=value and replace file entries. Every problem is collected
// before a ConfigError is thrown.
RunConfig parse_config(std::string_view text, const std::vector<std::string>& overrides = {});
RunConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});

// Canonical INI rendering; parse_config(render_config(c)) reproduces c.
std::string render_config(const RunConfig& config);

// Warnings that do not stop a run, such as violated smallness conditions.
std::vector<std::string> config_warnings(const RunConfig& config);

}  // namespace heatmem

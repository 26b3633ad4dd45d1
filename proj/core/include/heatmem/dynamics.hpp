#pragma once

#include "heatmem/analysis.hpp"
#include "heatmem/config.hpp"
#include "heatmem/history.hpp"
#include "heatmem/initial_data.hpp"
#include "heatmem/nonlinearity.hpp"
#include "heatmem/wentzell.hpp"

#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

namespace heatmem {

class SimulationError : public std::runtime_error {
public:
    SimulationError(const std::string& what, double last_good_time)
        : std::runtime_error(what), last_good_time_(last_good_time) {}
    double last_good_time() const noexcept { return last_good_time_; }

private:
    double last_good_time_;
};

// Everything assembled once per run.
struct Problem {
    Grid grid;
    WentzellOperator op;
    MemoryModel memory;
    Nonlinearity nonlinearity;
    DualNorm dual;
    SmallnessFlags smallness;
    std::optional<C0Result> c0;     // empty when the boundary term fails
    double inequality_c = not_available;
};

Problem build_problem(const RunConfig& config);

Field initial_field(const Grid& grid, const InitialConfig& init);
InitialHistory initial_history(const Grid& grid, const InitialConfig& init, const Field& u0);

// Factorizes M + dt K once; every solve is checked to relative residual
// 1e-12 with one step of iterative refinement before giving up.
class ImexStepper {
public:
    ImexStepper(const Grid& grid, const SparseMatrix& implicit_form, double dt);

    double dt() const noexcept { return dt_; }
    const Grid& grid() const noexcept { return grid_; }
    Field solve(const Field& rhs) const;

private:
    Grid grid_;
    double dt_;
    SparseMatrix system_;
    std::shared_ptr<Eigen::SimplicialLDLT<SparseMatrix>> solver_;
};

inline constexpr double solve_tolerance = 1e-12;

// (M + dt K) U+ = M U - dt explicit_form.
Field imex_solve(const ImexStepper& stepper, const Field& u, const Field& explicit_form);

struct StepResult {
    Field u;
    ModeHistory modes;
};

// One step of the full problem: memory load and nonlinearity explicit,
// principal part implicit, modes advanced afterwards with U+.
StepResult imex_step(const ImexStepper& stepper, const MemoryModel& memory, const Nonlinearity& nonlinearity,
                     const Field& u, const ModeHistory& modes);

struct Trajectory {
    std::vector<EnergyReport> reports;
    std::vector<double> snapshot_times;
    std::vector<Field> snapshots;
    Field final_u;
    ModeHistory final_modes;
    std::optional<DirectHistory> final_direct;
    double max_quad_error = 0;  // |direct - mode| over all report nodes, relative to |Phi|^2_{M^1}
    double max_solve_residual = 0;
};

struct SimulationOptions {
    bool direct = false;            // carry a direct history for diagnostics
    std::vector<double> tail_taus;  // tail samples when direct
};

Trajectory simulate(const RunConfig& config);
Trajectory simulate(const Problem& problem, const RunConfig& config, const Field& u0, const InitialHistory& phi0,
                    const SimulationOptions& options = {});

// Dirac-limit systems without memory: the literal one with unit diffusion
// and (f, g), or the limit of the implemented weak form with (f, g~).
SparseMatrix memoryless_form(const WentzellOperator& op, DiracReduction reduction);
Trajectory simulate_memoryless(const RunConfig& config, DiracReduction reduction);
Trajectory simulate_memoryless(const Problem& problem, const RunConfig& config, const Field& u0,
                               DiracReduction reduction);

// Initial datum (U0, Phi0) of a paired or split run.
struct Datum {
    Field u;
    InitialHistory history;
};

struct PairSeries {
    std::vector<double> t;
    std::vector<double> strong;  // sqrt(|dU|^2_{X^2} + |dPhi|^2_{M^1})
    std::vector<double> dual;    // sqrt(|dU|^2_{V^-1} + |dPhi|^2_{M^0})
    std::vector<double> energy_first;  // E of the first run
};

// Two full runs advanced in lockstep; the difference of histories is carried
// as its own mode history fed with U1 - U2.
PairSeries simulate_pair(const Problem& problem, const RunConfig& config, const Datum& first, const Datum& second,
                         double t_end);

struct SplitSeries {
    std::vector<double> t;
    std::vector<double> linear_dual, linear_strong;        // Lambda
    std::vector<double> smoothing_dual, smoothing_strong;  // Xi
    std::vector<double> difference_dual, difference_strong;  // D
    double reconstruction_error = 0;  // max |Lambda + Xi - D|_{X^2} / max |D|_{X^2}
    double difference_error = 0;      // max |D - (U1 - U2)|_{X^2} / max |D|_{X^2}
};

// Linear part Lambda from the full initial difference with no forcing,
// smoothing part Xi from zero data forced by F(U1) - F(U2), and the full
// difference D with both. Both data must share the history profile.
SplitSeries simulate_split(const Problem& problem, const RunConfig& config, const Datum& first,
                           const Datum& second, double t_end);

}  // namespace heatmem

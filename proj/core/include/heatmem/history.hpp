#pragma once

#include "heatmem/exp_quadrature.hpp"
#include "heatmem/initial_data.hpp"
#include "heatmem/kernels.hpp"
#include "heatmem/wentzell.hpp"

#include <deque>
#include <memory>
#include <vector>

namespace heatmem {

class HistoryError : public std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Kernels plus the quadratic forms that define M^1 and M^0 on each region.
// Boundary quantities live on the trace (2 nx values).
class MemoryModel {
public:
    MemoryModel(const WentzellOperator& op, MemoryKernel bulk, MemoryKernel boundary,
                double window_tolerance = 1e-14);

    const Grid& grid() const noexcept { return grid_; }
    const MemoryKernel& kernel(Region r) const noexcept { return r == Region::bulk ? bulk_ : boundary_; }
    const WentzellParams& params() const noexcept { return params_; }

    // M^1 densities: omega(grad,grad) + alpha omega(.,.) on the bulk,
    // nu[(grad_G,grad_G) + beta(.,.)_G] on the trace.
    const SparseMatrix& energy_form(Region r) const noexcept { return r == Region::bulk ? bulk_energy_ : trace_energy_; }
    // M^0 densities: L^2(Omega) and L^2(Gamma) quadrature.
    const SparseMatrix& l2_form(Region r) const noexcept { return r == Region::bulk ? bulk_l2_ : trace_l2_; }

    Eigen::VectorXd restrict(Region r, const Field& u) const { return r == Region::bulk ? u : grid_.trace(u); }

    // mu as a weight function: amp_i = mode_mass_i * rate_i.
    ExpSum mu_weight(Region r) const;
    double window() const noexcept { return window_; }

private:
    Grid grid_;
    WentzellParams params_;
    MemoryKernel bulk_;
    MemoryKernel boundary_;
    SparseMatrix bulk_energy_;
    SparseMatrix trace_energy_;
    SparseMatrix bulk_l2_;
    SparseMatrix trace_l2_;
    double window_;
};

// w = \int rate e^{-rate s} eta(s) ds per kernel mode. Alongside each w the
// history also carries the exact weighted quadratic moments
//   energy = \int rate e^{-rate s} |eta(s)|^2_{M^1 density} ds,
//   l2     = same with the M^0 density,
//   slope  = same for d_s eta,
// which evolve in closed form for piecewise-constant input.
struct ModeHistory {
    struct Mode {
        Region region = Region::bulk;
        std::size_t index = 0;
        double rate = 1.0;
        double mass = 0.0;  // share of mu carried by this mode
        Eigen::VectorXd w;
        double energy = 0.0;
        double l2 = 0.0;
        double slope = 0.0;
    };
    std::vector<Mode> modes;
};

// Cumulative integral I(t_n) = sum_m U_m dt_m on a sliding window, with
// I(tau) = -phi g(-tau) for tau < 0 so that eta^t(s) = I(t) - I(t - s).
class DirectHistory {
public:
    DirectHistory(const Grid& grid, InitialHistory initial, double window);

    double time() const noexcept { return times_.back(); }
    std::size_t record_count() const noexcept { return times_.size(); }
    bool truncated() const noexcept { return times_.front() > 0.0; }
    double window() const noexcept { return window_; }
    const InitialHistory& initial() const noexcept { return initial_; }

    void append(const Field& u, double dt);

    Field eta(double s) const;

    // \int rate e^{-rate s} eta(s) ds, exact for the piecewise-linear eta.
    Field moment(double rate) const;

    // Nodes in s (increasing from 0) and eta at each; the final interval is
    // unbounded with slope tail_slope (initial history) or constant.
    struct Pieces {
        std::vector<double> s;
        std::vector<Field> eta;
        Field tail_slope;
    };
    Pieces pieces() const;

private:
    Field integral_at(double tau) const;

    Grid grid_;
    InitialHistory initial_;
    double window_;
    std::deque<double> times_;
    std::deque<Field> integrals_;
    Field compensation_;
    double time_compensation_ = 0.0;
};

struct InitializedHistory {
    ModeHistory modes;
    DirectHistory direct;
};

InitializedHistory init_history(const MemoryModel& model, const InitialHistory& initial);
ModeHistory init_modes(const MemoryModel& model, const InitialHistory& initial);
DirectHistory init_direct(const MemoryModel& model, const InitialHistory& initial);

// Exponential integrator, exact for u constant over the step.
ModeHistory step_modes(const MemoryModel& model, ModeHistory h, const Field& u, double dt);
DirectHistory step_direct(DirectHistory h, const Field& u, double dt);

// Memory load as a quadrature form (M times the X^2 field):
//   sum_k m_k A^{alpha,0,0,omega} w_k + nu sum_j m_j (0; B w_j).
Field load_form(const MemoryModel& model, const ModeHistory& h);
Field load_form(const MemoryModel& model, const DirectHistory& h);

// The X^2 field L with <L, V>_{X^2} = <Phi, V>_{M^1}.
Field convolution_load(const MemoryModel& model, const ModeHistory& h);
Field convolution_load(const MemoryModel& model, const DirectHistory& h);

// eta^t(s) straight from the representation formula for a series held
// constant on each step: u_steps[m] on (m dt, (m+1) dt].
Field exact_history_oracle(std::span<const Field> u_steps, double dt, const InitialHistory& initial, double t,
                           double s);

// \int rate e^{-rate s} eta(s) ds from the direct record.
Field direct_moment(const DirectHistory& h, double rate);

struct MemoryEnergies {
    double m1sq = 0;        // |Phi|^2_{M^1}
    double m0sq = 0;        // |Phi|^2_{M^0}
    double slope_m1sq = 0;  // |d_s Phi|^2_{M^1}
    double pairing = 0;     // <-d_s Phi, Phi>_{M^1}
};

MemoryEnergies memory_energies(const MemoryModel& model, const ModeHistory& h);
MemoryEnergies memory_energies(const MemoryModel& model, const DirectHistory& h);

double tr_pairing(const MemoryModel& model, const DirectHistory& h);

struct TailReport {
    std::vector<double> taus;
    std::vector<double> scaled_tail;  // tau * T(tau; Phi)
    double sup = 0;
    double tau_star = 1;
    double m0sq = 0;
    double m1sq = 0;
    double slope_m1sq = 0;
    double k1sq = 0;  // |Phi|^2_{M^1} + |d_s Phi|^2_{M^1} + sup tau T
};

// tau T(tau; Phi) at the given samples (all >= 1).
TailReport tail_and_norms(const MemoryModel& model, const DirectHistory& h, std::span<const double> taus);

// Log-spaced samples on [1, tau_max].
std::vector<double> tail_samples(double tau_max, int count);

// T(tau) from explicit quadratic pieces of |eta(s)|^2 and a weight.
double tail_function(const ExpSum& mu, std::span<const QuadraticPiece> l2_pieces, double tau);

}  // namespace heatmem

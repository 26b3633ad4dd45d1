#pragma once

#include "heatmem/kernels.hpp"
#include "heatmem/nonlinearity.hpp"

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace heatmem {

class AnalysisError : public std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

inline constexpr double not_available = std::numeric_limits<double>::quiet_NaN();

// One diagnostic row of a trajectory. Squared norms unless noted.
struct EnergyReport {
    double t = 0;
    double x2sq = 0;       // |U|^2_{X^2}
    double v1sq = 0;       // |U|^2_{V^1}
    double m1sq = 0;       // |Phi|^2_{M^1}
    double m0sq = 0;       // |Phi|^2_{M^0}
    double energy = 0;     // x2sq + m1sq
    double dual = 0;       // sqrt(|U|^2_{V^-1} + |Phi|^2_{M^0})
    double pairing = 0;    // <T_r Phi, Phi>_{M^1}
    double tail_sup = not_available;
    double slope_m1sq = not_available;  // |d_s Phi|^2_{M^1}
    double identity_residual = not_available;
    double inequality_residual = not_available;
    double l4_bulk = 0;    // |u|^4_{L^4(Omega)}
    double lr_boundary = 0;  // |u|^r_{L^r(Gamma)}
};

enum class C0Term { bulk_diffusion, boundary, memory };

struct C0Result {
    double value = 0;
    C0Term active = C0Term::bulk_diffusion;
};

std::string to_string(C0Term t);

// min{2 omega, beta nu (2 - m_G / 2), delta}; throws when the result is not
// positive, which happens exactly when the boundary term fails.
C0Result c0_constant(double omega, double beta, double nu, double delta, double m_gamma);

// delta = min over both kernels, m_G from the boundary kernel.
C0Result c0_constant(const MemoryKernel& bulk, const MemoryKernel& boundary, double beta, double nu);

enum class PlateauMode { none, tail_mean };

struct DecayFit {
    double rate = 0;      // rho
    double plateau = 0;   // P0
    double residual = 0;  // RMS of the log-linear fit
    double c0 = not_available;
    double margin = not_available;  // rate / c0
    bool decaying = false;
};

// Least squares on log(E - P0) against t. With tail_mean, P0 is the mean of
// the final 10% of rows and is then refined to minimize the fit residual.
DecayFit fit_decay_rate(std::span<const double> t, std::span<const double> e, PlateauMode mode,
                        double c0 = not_available);

enum class Metric { strong, dual };

// max over t > 0 of log(|D(t)| / |D(0)|) / t; negative when every
// sampled difference has contracted, NaN without a usable sample.
double lipschitz_estimate(std::span<const double> t, std::span<const double> diff);

struct ContractionResult {
    double kappa = 0;
    double lambda_const = 0;
    bool pass = false;
};

// kappa = |Lambda(t*)|_dual / |D0|_dual, lambda_const = |Xi(t*)|_strong / |D0|_dual.
ContractionResult contraction_check(double linear_dual_at_tstar, double smoothing_strong_at_tstar,
                                    double initial_dual);

struct TransitivityResult {
    double c_prime = 0;
    double alpha_prime = 0;
};

// C' = C C1 + C2 and alpha' = alpha1 alpha2 / (K + alpha1 + alpha2).
TransitivityResult transitivity_rate(double c, double k, double c1, double alpha1, double c2, double alpha2);

struct AbsorbingEntry {
    std::optional<double> t_entry;
    std::size_t reentry_violations = 0;
};

AbsorbingEntry absorbing_entry(std::span<const double> t, std::span<const double> e, double radius,
                               double tolerance = 1e-6);

// The constant C in the differential inequality with certified kappas:
// |Omega| sup_s [c0 alpha s^2 + 2 kappa1 s^4 - 2 f(s) s]
//   + |Gamma| sup_s [2 kappa3 |s|^r - 2 g~(s) s].
// NaN when the inequality is not available (c0 above 2 nu or unbounded sup).
double inequality_constant(const Nonlinearity& n, double c0, double alpha, double nu, double bulk_measure,
                           double boundary_measure);

// Ordinary least squares slope and intercept.
struct LineFit {
    double slope = 0;
    double intercept = 0;
    double rms = 0;
};

LineFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace heatmem

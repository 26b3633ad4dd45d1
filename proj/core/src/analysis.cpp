#include "heatmem/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace heatmem {

std::string to_string(C0Term t)
{
    switch (t) {
    case C0Term::bulk_diffusion:
        return "bulk_diffusion";
    case C0Term::boundary:
        return "boundary";
    case C0Term::memory:
        return "memory";
    }
    return "unknown";
}

C0Result c0_constant(double omega, double beta, double nu, double delta, double m_gamma)
{
    const double terms[] = {2.0 * omega, beta * nu * (2.0 - 0.5 * m_gamma), delta};
    const auto it = std::min_element(std::begin(terms), std::end(terms));
    C0Result out{*it, static_cast<C0Term>(it - std::begin(terms))};
    if (!(out.value > 0.0))
        throw AnalysisError("c0 is not positive: the boundary kernel mass violates k_G(0) <= 4/(1-omega)");
    return out;
}

C0Result c0_constant(const MemoryKernel& bulk, const MemoryKernel& boundary, double beta, double nu)
{
    if (bulk.region() != Region::bulk || boundary.region() != Region::boundary)
        throw KernelError(KernelError::Kind::region_mismatch, "c0 needs a bulk and a boundary kernel");
    return c0_constant(bulk.omega(), beta, nu, std::min(bulk.delta(), boundary.delta()), boundary.mass());
}

LineFit fit_line(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size() || x.size() < 2)
        throw AnalysisError("line fit needs at least two points of matching length");
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0.0))
        throw AnalysisError("line fit needs distinct abscissae");
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (fit.intercept + fit.slope * x[i]);
        ss += r * r;
    }
    fit.rms = std::sqrt(ss / n);
    return fit;
}

namespace {

constexpr std::size_t min_rows = 20;

// Log-linear fit over the rows where e - plateau stays positive.
std::optional<LineFit> log_fit(std::span<const double> t, std::span<const double> e, double plateau,
                               std::size_t rows)
{
    std::vector<double> x, y;
    for (std::size_t i = 0; i < rows; ++i) {
        const double excess = e[i] - plateau;
        if (!(excess > 0.0))
            break;
        x.push_back(t[i]);
        y.push_back(std::log(excess));
    }
    if (x.size() < 3)
        return std::nullopt;
    return fit_line(x, y);
}

}  // namespace

DecayFit fit_decay_rate(std::span<const double> t, std::span<const double> e, PlateauMode mode, double c0)
{
    if (t.size() != e.size())
        throw AnalysisError("decay fit needs matching series");
    if (t.size() < min_rows)
        throw AnalysisError("decay fit needs at least 20 rows");

    DecayFit out;
    out.c0 = c0;
    std::size_t rows = t.size();
    double plateau = 0.0;
    if (mode == PlateauMode::tail_mean) {
        const std::size_t tail = std::max<std::size_t>(1, t.size() / 10);
        rows = t.size() - tail;
        plateau = std::accumulate(e.end() - static_cast<std::ptrdiff_t>(tail), e.end(), 0.0) /
                  static_cast<double>(tail);
        // Refine P0 below the smallest fitted value. The residual is sharply
        // peaked at the true plateau, so scan the gap top - P0 on a log scale
        // and then refine the best bracket by golden-section search.
        const double top = *std::min_element(e.begin(), e.begin() + static_cast<std::ptrdiff_t>(rows));
        auto score = [&](double log_gap) {
            const auto fit = log_fit(t, e, top - std::exp(log_gap), rows);
            return fit ? fit->rms : std::numeric_limits<double>::infinity();
        };
        if (top > 0.0) {
            const double lo = std::log(top * 1e-13), hi = std::log(top);
            constexpr int scan = 400;
            int best = 0;
            double best_score = std::numeric_limits<double>::infinity();
            for (int k = 0; k <= scan; ++k) {
                const double v = score(lo + (hi - lo) * k / scan);
                if (v < best_score)
                    best_score = v, best = k;
            }
            double a = lo + (hi - lo) * std::max(0, best - 1) / scan;
            double b = lo + (hi - lo) * std::min(scan, best + 1) / scan;
            const double g = 0.5 * (std::sqrt(5.0) - 1.0);
            double x1 = b - g * (b - a), x2 = a + g * (b - a);
            double f1 = score(x1), f2 = score(x2);
            for (int it = 0; it < 200 && b - a > 1e-14; ++it) {
                if (f1 < f2) {
                    b = x2, x2 = x1, f2 = f1, x1 = b - g * (b - a), f1 = score(x1);
                } else {
                    a = x1, x1 = x2, f1 = f2, x2 = a + g * (b - a), f2 = score(x2);
                }
            }
            const double refined = top - std::exp(f1 < f2 ? x1 : x2);
            const auto current = log_fit(t, e, plateau, rows);
            if (!current || std::min(f1, f2) <= current->rms)
                plateau = refined;
        }
    }

    const auto fit = log_fit(t, e, plateau, rows);
    out.plateau = plateau;
    if (!fit) {
        out.rate = 0.0;
        out.residual = not_available;
        return out;
    }
    out.rate = -fit->slope;
    out.residual = fit->rms;
    out.decaying = out.rate > 0.0;
    if (std::isfinite(c0) && c0 > 0.0)
        out.margin = out.rate / c0;
    return out;
}

double lipschitz_estimate(std::span<const double> t, std::span<const double> diff)
{
    if (t.size() != diff.size() || t.empty())
        throw AnalysisError("Lipschitz estimate needs matching nonempty series");
    if (!(diff.front() > 0.0))
        throw AnalysisError("initial difference must be positive");
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < t.size(); ++i) {
        const double dt = t[i] - t.front();
        if (!(dt > 0.0) || !(diff[i] > 0.0))
            continue;
        best = std::max(best, std::log(diff[i] / diff.front()) / dt);
    }
    return std::isfinite(best) ? best : not_available;
}

ContractionResult contraction_check(double linear_dual_at_tstar, double smoothing_strong_at_tstar,
                                    double initial_dual)
{
    if (!(initial_dual > 0.0))
        throw AnalysisError("contraction check needs a nonzero initial difference");
    ContractionResult out;
    out.kappa = linear_dual_at_tstar / initial_dual;
    out.lambda_const = smoothing_strong_at_tstar / initial_dual;
    out.pass = out.kappa < 0.5 && std::isfinite(out.lambda_const);
    return out;
}

TransitivityResult transitivity_rate(double c, double k, double c1, double alpha1, double c2, double alpha2)
{
    if (!(c > 0.0 && k > 0.0 && c2 > 0.0 && alpha1 > 0.0 && alpha2 > 0.0) || !(c1 >= 0.0))
        throw AnalysisError("transitivity constants must be positive (C1 may be zero)");
    return {c * c1 + c2, alpha1 * alpha2 / (k + alpha1 + alpha2)};
}

AbsorbingEntry absorbing_entry(std::span<const double> t, std::span<const double> e, double radius,
                               double tolerance)
{
    if (!(radius > 0.0))
        throw AnalysisError("absorbing radius must be positive");
    if (t.size() != e.size())
        throw AnalysisError("absorbing entry needs matching series");
    const double level = radius * radius;
    AbsorbingEntry out;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!out.t_entry) {
            if (e[i] <= level) {
                if (i == 0) {
                    out.t_entry = t[0];
                } else {
                    const double theta = (e[i - 1] - level) / (e[i - 1] - e[i]);
                    out.t_entry = t[i - 1] + theta * (t[i] - t[i - 1]);
                }
            }
        } else if (e[i] > level * (1.0 + tolerance)) {
            ++out.reentry_violations;
        }
    }
    return out;
}

double inequality_constant(const Nonlinearity& n, double c0, double alpha, double nu, double bulk_measure,
                           double boundary_measure)
{
    if (!(c0 <= 2.0 * nu))
        return not_available;
    const auto& k = n.constants();
    // Bulk: sup of c0 alpha s^2 + 2 kappa1 s^4 - 2 f(s) s, as minus the
    // infimum of the negated polynomial.
    const Polynomial bulk = 2.0 * n.f().times_s() + Polynomial({0.0, 0.0, -c0 * alpha, 0.0, -2.0 * k.kappa1});
    const double bulk_inf = polynomial_lower_bound(bulk);
    double surface_inf = 0.0;
    const Polynomial gs = 2.0 * n.g_tilde().times_s();
    const double r = k.r;
    if (r == std::floor(r) && static_cast<long>(r) % 2 == 0) {
        std::vector<double> coeffs(static_cast<std::size_t>(r) + 1, 0.0);
        coeffs.back() = -2.0 * k.kappa3;
        surface_inf = polynomial_lower_bound(gs + Polynomial(coeffs));
    } else {
        if (gs.degree() < r)
            return not_available;
        surface_inf = global_minimum(
            [&](double s) { return gs(s) - 2.0 * k.kappa3 * std::pow(std::abs(s), r); }, 100.0);
    }
    if (!std::isfinite(bulk_inf) || !std::isfinite(surface_inf))
        return not_available;
    return bulk_measure * std::max(0.0, -bulk_inf) + boundary_measure * std::max(0.0, -surface_inf);
}

}  // namespace heatmem

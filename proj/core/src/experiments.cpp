#include "heatmem/experiments.hpp"

#include "heatmem/dynamics.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace heatmem {

namespace {

using json = nlohmann::json;

constexpr double reconstruction_tolerance = 1e-9;
constexpr double oracle_load_tolerance = 1e-10;
constexpr double oracle_eta_tolerance = 1e-14;
constexpr double quadrature_tolerance = 1e-8;
constexpr double halving_ratio = 2.0;
constexpr double halving_slack = 0.3;
constexpr double stability_band = 0.2;

CriterionResult criterion(int id, std::string name)
{
    CriterionResult c;
    c.id = id;
    c.name = std::move(name);
    return c;
}

void settle(CriterionResult& c, bool ok, std::string detail)
{
    c.verdict = ok ? Verdict::pass : Verdict::fail;
    c.detail = std::move(detail);
}

std::string fmt(double v)
{
    std::ostringstream s;
    s.precision(6);
    s << v;
    return s.str();
}

std::vector<double> column(const std::vector<EnergyReport>& reports, double EnergyReport::*field)
{
    std::vector<double> out;
    out.reserve(reports.size());
    for (const auto& r : reports)
        out.push_back(r.*field);
    return out;
}

double max_abs_finite(const std::vector<double>& v)
{
    double m = 0.0;
    for (double x : v)
        if (std::isfinite(x))
            m = std::max(m, std::abs(x));
    return m;
}

Datum make_datum(const Grid& grid, const InitialConfig& init)
{
    Field u = initial_field(grid, init);
    InitialHistory h = initial_history(grid, init, u);
    return {std::move(u), std::move(h)};
}

RunConfig linearized(RunConfig c)
{
    c.nonlinearity.f.clear();
    c.nonlinearity.g.clear();
    return c;
}

// Residual of the energy identity on linear runs for a sequence of halved
// steps over the first unit of time; reports are taken on a common grid.
CriterionResult identity_halving(const RunConfig& config, Metrics& metrics)
{
    CriterionResult c = criterion(4, "energy identity residual halves with the step");
    const double base = config.integration.dt;
    const std::vector<double> steps{4.0 * base, 2.0 * base, base, 0.5 * base};
    // Whole number of coarse steps so every run ends at the same time.
    const double coarse_steps = std::max(1.0, std::floor(std::min(1.0, config.integration.t_final) / steps.front() + 1e-9));
    const double horizon = coarse_steps * steps.front();
    const double report_interval = 10.0 * steps.front();

    std::vector<double> residuals;
    for (double dt : steps) {
        RunConfig run = linearized(config);
        run.integration.dt = dt;
        run.integration.t_final = horizon;
        run.integration.report_stride = static_cast<int>(std::llround(report_interval / dt));
        run.integration.history = HistoryMode::modes;
        const Trajectory tr = simulate(run);
        residuals.push_back(max_abs_finite(column(tr.reports, &EnergyReport::identity_residual)));
        metrics.emplace_back("identity_residual_dt_" + fmt(dt), residuals.back());
    }
    bool ok = true;
    std::string detail = "ratios";
    for (std::size_t i = 1; i < residuals.size(); ++i) {
        const double ratio = residuals[i - 1] / residuals[i];
        c.values.emplace_back("ratio_" + std::to_string(i), ratio);
        detail += " " + fmt(ratio);
        ok = ok && std::abs(ratio - halving_ratio) <= halving_slack;
    }
    settle(c, ok, detail + " (target 2 +- 0.3)");
    return c;
}

ExperimentResult run_decay(const RunConfig& config)
{
    ExperimentResult out;
    out.experiment = Experiment::decay;
    const Problem p = build_problem(config);
    const Datum d = make_datum(p.grid, config.initial);
    const Trajectory tr = simulate(p, config, d.u, d.history);
    out.series = reports_table(tr.reports);

    const auto t = column(tr.reports, &EnergyReport::t);
    const auto e = column(tr.reports, &EnergyReport::energy);
    const double c0 = p.c0 ? p.c0->value : not_available;
    out.metrics.emplace_back("max_identity_residual", max_abs_finite(column(tr.reports, &EnergyReport::identity_residual)));
    out.metrics.emplace_back("max_inequality_residual",
                             [&] {
                                 double m = -std::numeric_limits<double>::infinity();
                                 for (const auto& r : tr.reports)
                                     if (std::isfinite(r.inequality_residual))
                                         m = std::max(m, r.inequality_residual);
                                 return std::isfinite(m) ? m : not_available;
                             }());

    const bool in_hypothesis = p.smallness.absorbing && p.c0.has_value();
    if (p.nonlinearity.is_linear()) {
        CriterionResult c = criterion(2, "linear energy decay bound");
        const DecayFit fit = fit_decay_rate(t, e, PlateauMode::none, c0);
        out.metrics.emplace_back("fitted_rate", fit.rate);
        out.metrics.emplace_back("fit_residual", fit.residual);
        double worst = 0.0;
        for (std::size_t i = 0; i < t.size(); ++i)
            worst = std::max(worst, e[i] / (e.front() * std::exp(-c0 * t[i])));
        c.values = {{"c0", c0}, {"fitted_rate", fit.rate}, {"worst_bound_ratio", worst}};
        if (!in_hypothesis) {
            c.verdict = Verdict::out_of_hypothesis;
            c.detail = "smallness condition or c0 unavailable; not asserted";
        } else {
            const bool ok = worst <= config.experiment.decay_margin && fit.rate >= c0;
            settle(c, ok,
                   "max E(t)/(E(0)e^{-c0 t}) = " + fmt(worst) + ", fitted rate " + fmt(fit.rate) + " vs c0 " +
                       fmt(c0));
        }
        out.criteria.push_back(std::move(c));
        out.criteria.push_back(identity_halving(config, out.metrics));
    } else {
        CriterionResult c = criterion(2, "absorbing ball entry");
        const DecayFit fit = fit_decay_rate(t, e, PlateauMode::tail_mean, c0);
        const double radius_sq = 2.0 * fit.plateau;
        const AbsorbingEntry entry = absorbing_entry(t, e, std::sqrt(radius_sq));
        out.metrics.emplace_back("fitted_rate", fit.rate);
        out.metrics.emplace_back("plateau", fit.plateau);
        c.values = {{"plateau", fit.plateau},
                    {"radius_sq", radius_sq},
                    {"entry_time", entry.t_entry.value_or(not_available)},
                    {"reentry_violations", static_cast<double>(entry.reentry_violations)}};
        if (!in_hypothesis) {
            c.verdict = Verdict::out_of_hypothesis;
            c.detail = "smallness condition or c0 unavailable; not asserted";
        } else {
            const bool ok = entry.t_entry.has_value() && entry.reentry_violations == 0;
            settle(c, ok,
                   entry.t_entry ? "entered E <= " + fmt(radius_sq) + " at t = " + fmt(*entry.t_entry) + " with " +
                                       std::to_string(entry.reentry_violations) + " exits"
                                 : "never entered E <= " + fmt(radius_sq));
        }
        out.criteria.push_back(std::move(c));
    }
    return out;
}

// Mode and direct loads side by side, and the direct history against the
// representation formula.
CriterionResult oracle_equivalence(const RunConfig& config, Metrics& metrics)
{
    CriterionResult c = criterion(3, "mode and direct history agree");
    const Problem p = build_problem(config);
    const Datum d = make_datum(p.grid, config.initial);
    const double dt = config.integration.dt;
    const int steps = config.experiment.oracle_steps;
    const ImexStepper stepper(p.grid, p.op.principal_form(), dt);

    Field u = d.u;
    ModeHistory modes = init_modes(p.memory, d.history);
    DirectHistory direct = init_direct(p.memory, d.history);
    std::vector<Field> u_steps;
    u_steps.reserve(static_cast<std::size_t>(steps));

    double worst_load = 0.0;
    auto compare_loads = [&] {
        const Field a = load_form(p.memory, modes);
        const Field b = load_form(p.memory, direct);
        const double scale = a.norm();
        if (scale > 0.0)
            worst_load = std::max(worst_load, (a - b).norm() / scale);
    };
    compare_loads();
    for (int n = 0; n < steps; ++n) {
        const Field explicit_form = load_form(p.memory, modes) + p.nonlinearity.load_form(p.grid, u);
        Field next = imex_solve(stepper, u, explicit_form);
        modes = step_modes(p.memory, std::move(modes), next, dt);
        direct.append(next, dt);
        u_steps.push_back(next);
        u = std::move(next);
        compare_loads();
    }

    double worst_eta = 0.0;
    const double t_end = steps * dt;
    for (double frac : {0.0, 0.137, 0.5, 0.9, 1.0, 1.31, 2.7}) {
        const double s = frac * t_end;
        const Field diff = direct.eta(s) - exact_history_oracle(u_steps, dt, d.history, t_end, s);
        worst_eta = std::max(worst_eta, diff.lpNorm<Eigen::Infinity>());
    }
    metrics.emplace_back("oracle_load_relative_error", worst_load);
    metrics.emplace_back("oracle_eta_abs_error", worst_eta);
    c.values = {{"load_relative_error", worst_load}, {"eta_abs_error", worst_eta}};
    settle(c, worst_load <= oracle_load_tolerance && worst_eta <= oracle_eta_tolerance,
           "load " + fmt(worst_load) + " (<= 1e-10), eta " + fmt(worst_eta) + " (<= 1e-14) over " +
               std::to_string(steps) + " steps");
    return c;
}

RunConfig diagnostic_config(RunConfig c)
{
    c.grid.nx = 32;
    c.grid.ny = 17;
    c.integration.dt = 1e-2;
    c.integration.t_final = 10.0;
    c.integration.report_stride = 1;
    c.integration.history = HistoryMode::direct;
    return c;
}

ExperimentResult run_oracle(const RunConfig& config)
{
    ExperimentResult out;
    out.experiment = Experiment::oracle;
    out.criteria.push_back(oracle_equivalence(config, out.metrics));

    const RunConfig diag = diagnostic_config(config);
    const Problem p = build_problem(diag);
    const Datum d = make_datum(p.grid, diag.initial);
    SimulationOptions opts;
    opts.direct = true;
    opts.tail_taus = tail_samples(100.0, 25);
    const Trajectory tr = simulate(p, diag, d.u, d.history, opts);
    out.series = reports_table(tr.reports);

    const MemoryKernel& kb = p.memory.kernel(Region::bulk);
    const MemoryKernel& kg = p.memory.kernel(Region::boundary);
    const double delta = std::min(kb.delta(), kg.delta());

    // Dissipativity of the transport generator.
    {
        CriterionResult c = criterion(5, "transport generator dissipativity");
        double worst = -std::numeric_limits<double>::infinity();
        bool ok = tr.max_quad_error <= quadrature_tolerance;
        for (const auto& r : tr.reports) {
            const double excess = r.pairing + 0.5 * delta * r.m1sq;
            worst = std::max(worst, r.m1sq > 0.0 ? excess / r.m1sq : excess);
            ok = ok && excess <= quadrature_tolerance * r.m1sq;
        }
        c.values = {{"delta", delta}, {"max_excess_relative", worst}, {"quadrature_error", tr.max_quad_error}};
        settle(c, ok,
               "max (pairing + delta/2 |Phi|^2)/|Phi|^2 = " + fmt(worst) + ", quadrature error " +
                   fmt(tr.max_quad_error));
        out.criteria.push_back(std::move(c));
    }

    // Tail and slope bounds along the run.
    {
        CriterionResult c = criterion(8, "tail and slope bounds");
        double k_sq = 0.0;
        for (const auto& r : tr.reports)
            k_sq = std::max(k_sq, r.v1sq);
        const double tail0 = tr.reports.front().tail_sup;
        const double slope0 = tr.reports.front().slope_m1sq;
        const double mass = kb.mass() + kg.mass();
        const double t_end = tr.reports.back().t;

        double c_half = 0.0, c_full = 0.0, slope_excess = -std::numeric_limits<double>::infinity();
        bool slope_ok = true;
        for (const auto& r : tr.reports) {
            const double envelope = 2.0 * (r.t + 2.0) * std::exp(-delta * r.t) * tail0;
            const double fitted = (r.tail_sup - envelope) / k_sq;
            c_full = std::max(c_full, fitted);
            if (r.t <= 0.5 * t_end)
                c_half = std::max(c_half, fitted);
            const double bound = std::exp(-delta * r.t) * slope0 + k_sq * mass;
            const double eps = quadrature_tolerance * std::max(1.0, r.slope_m1sq);
            slope_excess = std::max(slope_excess, r.slope_m1sq - bound);
            slope_ok = slope_ok && r.slope_m1sq <= bound + eps;
        }
        c.values = {{"K_sq", k_sq},
                    {"C_first_half", c_half},
                    {"C_full", c_full},
                    {"slope_excess", slope_excess}};
        const bool quasi = p.nonlinearity.constants().quasi_strong_class;
        if (!quasi) {
            c.verdict = Verdict::out_of_hypothesis;
            c.detail = "nonlinearity outside the quasi-strong class; not asserted";
        } else {
            const bool stable = std::isfinite(c_full) && c_full <= (1.0 + stability_band) * c_half;
            settle(c, stable && slope_ok,
                   "fitted C " + fmt(c_half) + " on the first half, " + fmt(c_full) + " overall; slope excess " +
                       fmt(slope_excess));
        }
        out.criteria.push_back(std::move(c));
    }
    return out;
}

// Lipschitz exponents from paired runs, for every perturbation size and the
// configured step plus its half.
ExperimentResult run_dependence(Experiment which, const RunConfig& config)
{
    ExperimentResult out;
    out.experiment = which;
    const Metric gate = which == Experiment::cde ? Metric::strong : Metric::dual;
    out.series.columns = {"dt", "epsilon", "t", "strong", "dual"};

    std::vector<double> strong_rates, dual_rates;
    for (double dt : {config.integration.dt, 0.5 * config.integration.dt}) {
        RunConfig run = config;
        run.integration.dt = dt;
        run.integration.report_stride = std::max(1, static_cast<int>(std::llround(config.integration.report_stride *
                                                                                   config.integration.dt / dt)));
        const Problem p = build_problem(run);
        const Datum base = make_datum(p.grid, run.initial);
        Field direction = mode_field(p.grid, run.initial.kx, run.initial.py);
        direction /= std::sqrt(inner_x2(p.grid, direction, direction));
        for (double eps : config.experiment.perturbations) {
            Datum other = base;
            other.u += eps * direction;
            other.history.field = run.initial.history_scale * other.u;
            if (run.initial.history == ProfileKind::zero)
                other.history.field.setZero();
            const PairSeries s = simulate_pair(p, run, base, other, run.integration.t_final);
            for (std::size_t i = 0; i < s.t.size(); ++i)
                out.series.rows.push_back({dt, eps, s.t[i], s.strong[i], s.dual[i]});
            strong_rates.push_back(lipschitz_estimate(s.t, s.strong));
            dual_rates.push_back(lipschitz_estimate(s.t, s.dual));
            out.metrics.emplace_back("C_strong_dt_" + fmt(dt) + "_eps_" + fmt(eps), strong_rates.back());
            out.metrics.emplace_back("C_dual_dt_" + fmt(dt) + "_eps_" + fmt(eps), dual_rates.back());
        }
    }

    const auto& rates = gate == Metric::strong ? strong_rates : dual_rates;
    const double mean = std::accumulate(rates.begin(), rates.end(), 0.0) / static_cast<double>(rates.size());
    double spread = 0.0;
    bool ok = mean > 0.0 && std::isfinite(mean);
    for (double r : rates) {
        ok = ok && std::isfinite(r) && r > 0.0;
        if (mean > 0.0)
            spread = std::max(spread, std::abs(r / mean - 1.0));
    }
    ok = ok && spread <= stability_band;

    CriterionResult c = criterion(6, gate == Metric::strong ? "continuous dependence exponent (strong metric)"
                                                            : "Lipschitz exponent (dual metric)");
    const auto [lo, hi] = std::minmax_element(rates.begin(), rates.end());
    c.values = {{"mean", mean}, {"min", *lo}, {"max", *hi}, {"spread", spread}};
    settle(c, ok, "exponents in [" + fmt(*lo) + ", " + fmt(*hi) + "], spread " + fmt(spread) + " of mean " + fmt(mean));
    out.criteria.push_back(std::move(c));
    return out;
}

ExperimentResult run_split(const RunConfig& config)
{
    ExperimentResult out;
    out.experiment = Experiment::split;
    const Problem p = build_problem(config);
    const double dt = config.integration.dt;

    auto datum = [&](std::uint64_t seed) {
        InitialConfig init = config.initial;
        init.seed = seed;
        return make_datum(p.grid, init);
    };
    const std::uint64_t seed0 = config.initial.seed;

    // Pilot run of the linear part to fit its decay rate.
    double m0 = not_available;
    {
        RunConfig pilot = linearized(config);
        pilot.integration.t_final = config.experiment.pilot_time;
        pilot.integration.history = HistoryMode::modes;
        const Problem lp = build_problem(pilot);
        const Datum a = datum(seed0), b = datum(seed0 + 1);
        const InitialHistory diff{a.history.field - b.history.field, a.history.profile};
        const Trajectory tr = simulate(lp, pilot, a.u - b.u, diff);
        std::vector<double> t, dual_sq;
        for (const auto& r : tr.reports) {
            t.push_back(r.t);
            dual_sq.push_back(r.dual * r.dual);
        }
        m0 = fit_decay_rate(t, dual_sq, PlateauMode::none).rate;
    }
    out.metrics.emplace_back("m0_fitted", m0);

    CriterionResult c = criterion(7, "contraction split");
    if (!(m0 > 0.0) || !std::isfinite(m0)) {
        settle(c, false, "linear part does not decay (fitted rate " + fmt(m0) + ")");
        out.criteria.push_back(std::move(c));
        return out;
    }
    const double t_star_raw = 2.0 * std::log(4.0) / m0;
    const double t_star = std::ceil(t_star_raw / dt - 1e-9) * dt;
    out.metrics.emplace_back("t_star", t_star);

    out.series.columns = {"pair",          "t",          "linear_dual", "linear_strong", "smoothing_dual",
                          "smoothing_strong", "difference_dual", "difference_strong"};
    bool ok = config.experiment.pairs >= 5;
    double worst_kappa = 0.0, worst_lambda = 0.0, worst_recon = 0.0;
    for (int k = 0; k < config.experiment.pairs; ++k) {
        const Datum a = datum(seed0 + 2 * static_cast<std::uint64_t>(k));
        const Datum b = datum(seed0 + 2 * static_cast<std::uint64_t>(k) + 1);
        const SplitSeries s = simulate_split(p, config, a, b, t_star);
        for (std::size_t i = 0; i < s.t.size(); ++i)
            out.series.rows.push_back({static_cast<double>(k), s.t[i], s.linear_dual[i], s.linear_strong[i],
                                       s.smoothing_dual[i], s.smoothing_strong[i], s.difference_dual[i],
                                       s.difference_strong[i]});
        const ContractionResult cr =
            contraction_check(s.linear_dual.back(), s.smoothing_strong.back(), s.difference_dual.front());
        const double recon = std::max(s.reconstruction_error, s.difference_error);
        worst_kappa = std::max(worst_kappa, cr.kappa);
        worst_lambda = std::max(worst_lambda, cr.lambda_const);
        worst_recon = std::max(worst_recon, recon);
        out.metrics.emplace_back("kappa_pair_" + std::to_string(k), cr.kappa);
        out.metrics.emplace_back("lambda_const_pair_" + std::to_string(k), cr.lambda_const);
        ok = ok && cr.pass && recon <= reconstruction_tolerance;
    }
    c.values = {{"m0", m0},
                {"t_star", t_star},
                {"max_kappa", worst_kappa},
                {"max_lambda_const", worst_lambda},
                {"max_reconstruction_error", worst_recon}};
    settle(c, ok,
           std::to_string(config.experiment.pairs) + " pairs at t* = " + fmt(t_star) + ": max kappa " +
               fmt(worst_kappa) + ", max smoothing constant " + fmt(worst_lambda) + ", reconstruction " +
               fmt(worst_recon));
    out.criteria.push_back(std::move(c));
    return out;
}

double sup_distance(const Grid& grid, const Trajectory& a, const Trajectory& b)
{
    if (a.snapshots.size() != b.snapshots.size())
        throw SimulationError("snapshot series differ in length", 0.0);
    double worst = 0.0;
    for (std::size_t i = 0; i < a.snapshots.size(); ++i) {
        const Field d = a.snapshots[i] - b.snapshots[i];
        worst = std::max(worst, std::sqrt(inner_x2(grid, d, d)));
    }
    return worst;
}

ExperimentResult run_dirac(const RunConfig& config)
{
    ExperimentResult out;
    out.experiment = Experiment::dirac_limit;
    RunConfig base = config;
    base.integration.t_final = config.experiment.dirac_horizon;
    base.integration.history = HistoryMode::modes;
    base.initial.history = ProfileKind::zero;
    if (base.integration.snapshot_stride <= 0)
        base.integration.snapshot_stride = base.integration.report_stride;

    const Problem p0 = build_problem(base);
    const Field u0 = initial_field(p0.grid, base.initial);
    const Trajectory weak = simulate_memoryless(p0, base, u0, DiracReduction::weak_limit);
    const Trajectory literal = simulate_memoryless(p0, base, u0, DiracReduction::literal);

    out.series.columns = {"lambda", "sup_distance_weak_limit", "sup_distance_literal"};
    std::vector<double> gated;
    for (double lambda : config.experiment.lambdas) {
        RunConfig run = base;
        run.bulk_kernel = {{1.0}, {lambda}};
        run.boundary_kernel = {{1.0}, {lambda}};
        const Problem p = build_problem(run);
        if (!p.smallness.absorbing)
            out.warnings.push_back("lambda = " + fmt(lambda) + " violates the absorbing smallness condition");
        const Trajectory tr = simulate(p, run, u0, initial_history(p.grid, run.initial, u0));
        const double dw = sup_distance(p.grid, tr, weak);
        const double dl = sup_distance(p.grid, tr, literal);
        out.series.rows.push_back({lambda, dw, dl});
        out.metrics.emplace_back("distance_weak_limit_lambda_" + fmt(lambda), dw);
        out.metrics.emplace_back("distance_literal_lambda_" + fmt(lambda), dl);
        gated.push_back(config.experiment.dirac_reduction == DiracReduction::weak_limit ? dw : dl);
    }

    CriterionResult c = criterion(9, "Dirac limit");
    bool ok = gated.size() >= 2;
    std::string detail = "sup distances";
    for (std::size_t i = 0; i < gated.size(); ++i) {
        detail += " " + fmt(gated[i]);
        c.values.emplace_back("distance_" + std::to_string(i), gated[i]);
        if (i > 0)
            ok = ok && gated[i] < gated[i - 1];
    }
    settle(c, ok,
           detail + " against the " +
               (config.experiment.dirac_reduction == DiracReduction::weak_limit ? "weak-limit" : "literal") +
               " system");
    out.criteria.push_back(std::move(c));
    return out;
}

json number(double v)
{
    return std::isfinite(v) ? json(v) : json(nullptr);
}

json metrics_json(const Metrics& m)
{
    json o = json::object();
    for (const auto& [k, v] : m)
        o[k] = number(v);
    return o;
}

}  // namespace

std::string to_string(Experiment e)
{
    switch (e) {
    case Experiment::decay:
        return "decay";
    case Experiment::cde:
        return "cde";
    case Experiment::weak_lipschitz:
        return "weak-lipschitz";
    case Experiment::split:
        return "split";
    case Experiment::dirac_limit:
        return "dirac-limit";
    case Experiment::oracle:
        return "oracle";
    }
    return "unknown";
}

std::optional<Experiment> parse_experiment(std::string_view name)
{
    for (Experiment e : all_experiments)
        if (to_string(e) == name)
            return e;
    return std::nullopt;
}

std::string to_string(Verdict v)
{
    switch (v) {
    case Verdict::pass:
        return "pass";
    case Verdict::fail:
        return "fail";
    case Verdict::out_of_hypothesis:
        return "out_of_hypothesis";
    }
    return "unknown";
}

RunConfig default_config(Experiment e)
{
    RunConfig c;
    switch (e) {
    case Experiment::decay:
        c.nonlinearity.f.clear();
        c.nonlinearity.g.clear();
        c.integration.t_final = 10.0;
        c.initial.history = ProfileKind::saturating;
        break;
    case Experiment::oracle:
        c.bulk_kernel = {{0.6, 0.4}, {1.0, 5.0}};
        c.boundary_kernel = {{0.5, 0.5}, {1.5, 4.0}};
        c.integration.t_final = 10.0;
        c.initial.history = ProfileKind::saturating;
        break;
    case Experiment::cde:
    case Experiment::weak_lipschitz:
        c.integration.t_final = 1.0;
        c.initial.amplitude = 0.01;
        c.initial.kx = 0;
        c.initial.py = 0;
        break;
    case Experiment::split:
        c.initial.amplitude = 0.5;
        c.initial.history = ProfileKind::saturating;
        break;
    case Experiment::dirac_limit:
        c.integration.t_final = 1.0;
        c.integration.snapshot_stride = 10;
        break;
    }
    return c;
}

bool ExperimentResult::passed() const
{
    return std::none_of(criteria.begin(), criteria.end(),
                        [](const CriterionResult& c) { return c.verdict == Verdict::fail; });
}

ExperimentResult run_experiment(Experiment e, const RunConfig& config)
{
    ExperimentResult out;
    switch (e) {
    case Experiment::decay:
        out = run_decay(config);
        break;
    case Experiment::oracle:
        out = run_oracle(config);
        break;
    case Experiment::cde:
    case Experiment::weak_lipschitz:
        out = run_dependence(e, config);
        break;
    case Experiment::split:
        out = run_split(config);
        break;
    case Experiment::dirac_limit:
        out = run_dirac(config);
        break;
    }
    auto warnings = config_warnings(config);
    warnings.insert(warnings.end(), out.warnings.begin(), out.warnings.end());
    out.warnings = std::move(warnings);
    return out;
}

std::string summary_json(const ExperimentResult& result, const RunConfig& config)
{
    const Problem p = build_problem(config);
    const auto& kc = p.nonlinearity.constants();
    json j;
    j["experiment"] = to_string(result.experiment);
    j["status"] = result.passed() ? "pass" : "fail";
    j["config"] = render_config(config);
    j["flags"] = {{"absorbing_smallness", p.smallness.absorbing},
                  {"contraction_smallness", p.smallness.contraction},
                  {"linear", p.nonlinearity.is_linear()},
                  {"weak_class", kc.weak_class},
                  {"quasi_strong_class", kc.quasi_strong_class}};
    const MemoryKernel& kb = p.memory.kernel(Region::bulk);
    const MemoryKernel& kg = p.memory.kernel(Region::boundary);
    j["constants"] = {{"m_bulk", number(kb.mass())},
                      {"m_boundary", number(kg.mass())},
                      {"delta_bulk", number(kb.delta())},
                      {"delta_boundary", number(kg.delta())},
                      {"c0", p.c0 ? number(p.c0->value) : json(nullptr)},
                      {"c0_active_term", p.c0 ? json(to_string(p.c0->active)) : json(nullptr)},
                      {"inequality_c", number(p.inequality_c)},
                      {"kappa1", number(kc.kappa1)},
                      {"kappa2", number(kc.kappa2)},
                      {"kappa3", number(kc.kappa3)},
                      {"kappa4", number(kc.kappa4)}};
    j["metrics"] = metrics_json(result.metrics);
    json criteria = json::array();
    for (const auto& c : result.criteria)
        criteria.push_back({{"id", c.id},
                            {"name", c.name},
                            {"verdict", to_string(c.verdict)},
                            {"detail", c.detail},
                            {"values", metrics_json(c.values)}});
    j["criteria"] = std::move(criteria);
    j["warnings"] = result.warnings;
    return j.dump(2) + "\n";
}

std::vector<std::string> write_artifacts(const ExperimentResult& result, const RunConfig& config,
                                         const std::filesystem::path& dir)
{
    std::vector<std::string> files;
    if (config.output.csv) {
        write_file(dir / "series.csv", result.series.to_csv());
        files.push_back("series.csv");
    }
    if (config.output.json) {
        write_file(dir / "summary.json", summary_json(result, config));
        files.push_back("summary.json");
    }
    write_file(dir / "config.ini", render_config(config));
    files.push_back("config.ini");
    write_file(dir / "manifest.txt", manifest(dir, files));
    files.push_back("manifest.txt");
    return files;
}

}  // namespace heatmem

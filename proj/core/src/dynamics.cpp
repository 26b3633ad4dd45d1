#include "heatmem/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace heatmem {

namespace {

Nonlinearity make_run_nonlinearity(const RunConfig& c)
{
    return make_nonlinearity(Polynomial(c.nonlinearity.f), Polynomial(c.nonlinearity.g), c.physics.omega,
                             c.physics.beta, c.physics.r);
}

int step_count(const RunConfig& c, double t_end)
{
    const double exact = t_end / c.integration.dt;
    const auto steps = static_cast<int>(std::llround(exact));
    if (steps < 1 || std::abs(exact - steps) > 1e-9 * std::max(1.0, exact))
        throw SimulationError("final time must be a positive multiple of the time step", 0.0);
    return steps;
}

bool same_profile(const HistoryProfile& a, const HistoryProfile& b)
{
    return a.knots() == b.knots() && a.values() == b.values() && a.tail_slope() == b.tail_slope();
}

InitialHistory history_difference(const Datum& first, const Datum& second)
{
    if (!same_profile(first.history.profile, second.history.profile))
        throw SimulationError("paired data must share the history profile", 0.0);
    return {first.history.field - second.history.field, first.history.profile};
}

EnergyReport make_report(const Problem& p, double t, const Field& u, const ModeHistory& h)
{
    EnergyReport r;
    r.t = t;
    r.x2sq = inner_x2(p.grid, u, u);
    const auto& w = p.op.params();
    const double v1 = norm(p.grid, u, NormKind::v1, w.alpha, w.beta);
    r.v1sq = v1 * v1;
    const MemoryEnergies e = memory_energies(p.memory, h);
    r.m1sq = e.m1sq;
    r.m0sq = e.m0sq;
    r.slope_m1sq = e.slope_m1sq;
    r.pairing = e.pairing;
    r.energy = r.x2sq + r.m1sq;
    r.dual = std::sqrt(p.dual.squared(u) + r.m0sq);
    r.l4_bulk = bulk_power_sum(p.grid, u, 4.0);
    r.lr_boundary = surface_power_sum(p.grid, u, p.nonlinearity.constants().r);
    return r;
}

double strong_norm(const Problem& p, const Field& u, const ModeHistory& h)
{
    return std::sqrt(inner_x2(p.grid, u, u) + memory_energies(p.memory, h).m1sq);
}

double dual_norm(const Problem& p, const Field& u, const ModeHistory& h)
{
    return std::sqrt(p.dual.squared(u) + memory_energies(p.memory, h).m0sq);
}

void check_finite(const Field& u, double t)
{
    if (!u.allFinite())
        throw SimulationError("non-finite state encountered after t = " + std::to_string(t), t);
}

}  // namespace

Problem build_problem(const RunConfig& c)
{
    Grid grid = build_grid(c.grid.nx, c.grid.ny, c.grid.lx, c.grid.ly);
    const auto& ph = c.physics;
    WentzellOperator op(grid, {ph.alpha, ph.beta, ph.nu, ph.omega});
    const MemoryKernel bulk = c.make_kernel(Region::bulk);
    const MemoryKernel boundary = c.make_kernel(Region::boundary);
    MemoryModel memory(op, bulk, boundary, c.integration.window_tol);
    Nonlinearity nonlinearity = make_run_nonlinearity(c);
    DualNorm dual(grid, ph.alpha, ph.beta);

    std::optional<C0Result> c0;
    try {
        c0 = c0_constant(bulk, boundary, ph.beta, ph.nu);
    } catch (const AnalysisError&) {
    }
    double ineq = not_available;
    if (c0 && !nonlinearity.is_linear() && nonlinearity.constants().weak_class)
        ineq = inequality_constant(nonlinearity, c0->value, ph.alpha, ph.nu, grid.bulk_measure(),
                                   grid.boundary_measure());
    const SmallnessFlags flags = check_smallness(boundary, ph.omega, ph.nu);
    return Problem{std::move(grid), std::move(op), std::move(memory), std::move(nonlinearity),
                   std::move(dual), flags, c0, ineq};
}

Field initial_field(const Grid& grid, const InitialConfig& init)
{
    switch (init.kind) {
    case InitialKind::bandlimited:
        return bandlimited_field(grid, {init.seed, init.amplitude, init.x_modes, init.y_degree});
    case InitialKind::mode:
        return init.amplitude * mode_field(grid, init.kx, init.py);
    case InitialKind::constant:
        return Field::Constant(grid.size(), init.amplitude);
    case InitialKind::zero:
        break;
    }
    return Field::Zero(grid.size());
}

InitialHistory initial_history(const Grid& grid, const InitialConfig& init, const Field& u0)
{
    switch (init.history) {
    case ProfileKind::ramp:
        return {init.history_scale * u0, HistoryProfile::ramp()};
    case ProfileKind::saturating:
        return {init.history_scale * u0, HistoryProfile::saturating(init.history_level)};
    case ProfileKind::zero:
        break;
    }
    return {Field::Zero(grid.size()), HistoryProfile::zero()};
}

ImexStepper::ImexStepper(const Grid& grid, const SparseMatrix& implicit_form, double dt)
    : grid_(grid), dt_(dt), solver_(std::make_shared<Eigen::SimplicialLDLT<SparseMatrix>>())
{
    if (!(dt > 0.0))
        throw SimulationError("time step must be positive", 0.0);
    system_ = dt * implicit_form + diagonal_matrix(grid_.mass());
    solver_->compute(system_);
    if (solver_->info() != Eigen::Success)
        throw SimulationError("factorization of the implicit system failed", 0.0);
}

Field ImexStepper::solve(const Field& rhs) const
{
    const double scale = rhs.norm();
    Field x = solver_->solve(rhs);
    if (scale == 0.0)
        return x;
    Field r = rhs - system_ * x;
    if (r.norm() > solve_tolerance * scale) {
        x += solver_->solve(r);
        r = rhs - system_ * x;
        if (r.norm() > solve_tolerance * scale)
            throw SimulationError("linear solve stalled at relative residual " + std::to_string(r.norm() / scale),
                                  0.0);
    }
    return x;
}

Field imex_solve(const ImexStepper& stepper, const Field& u, const Field& explicit_form)
{
    const Field rhs = u.cwiseProduct(stepper.grid().mass()) - stepper.dt() * explicit_form;
    return stepper.solve(rhs);
}

StepResult imex_step(const ImexStepper& stepper, const MemoryModel& memory, const Nonlinearity& nonlinearity,
                     const Field& u, const ModeHistory& modes)
{
    const Field explicit_form = load_form(memory, modes) + nonlinearity.load_form(memory.grid(), u);
    Field next = imex_solve(stepper, u, explicit_form);
    return {next, step_modes(memory, modes, next, stepper.dt())};
}

Trajectory simulate(const RunConfig& config)
{
    const Problem p = build_problem(config);
    const Field u0 = initial_field(p.grid, config.initial);
    SimulationOptions options;
    options.direct = config.integration.history == HistoryMode::direct;
    if (options.direct)
        options.tail_taus = tail_samples(100.0, 25);
    return simulate(p, config, u0, initial_history(p.grid, config.initial, u0), options);
}

Trajectory simulate(const Problem& p, const RunConfig& config, const Field& u0, const InitialHistory& phi0,
                    const SimulationOptions& options)
{
    const auto& in = config.integration;
    const int steps = step_count(config, in.t_final);
    const double dt = in.dt;
    const ImexStepper stepper(p.grid, p.op.principal_form(), dt);
    const auto& kc = p.nonlinearity.constants();

    Trajectory out;
    Field u = u0;
    ModeHistory h = init_modes(p.memory, phi0);
    std::optional<DirectHistory> direct;
    if (options.direct)
        direct = init_direct(p.memory, phi0);

    auto diagnose = [&](EnergyReport& r) {
        if (!direct)
            return;
        const MemoryEnergies d = memory_energies(p.memory, *direct);
        const double scale = std::max(r.m1sq, std::numeric_limits<double>::min());
        const double err = std::max({std::abs(d.pairing - r.pairing), std::abs(d.m1sq - r.m1sq)});
        if (r.m1sq > 0.0)
            out.max_quad_error = std::max(out.max_quad_error, err / scale);
        r.pairing = d.pairing;
        r.slope_m1sq = d.slope_m1sq;
        if (!options.tail_taus.empty())
            r.tail_sup = tail_and_norms(p.memory, *direct, options.tail_taus).sup;
    };

    EnergyReport first = make_report(p, 0.0, u, h);
    diagnose(first);
    out.reports.push_back(first);
    if (in.snapshot_stride > 0) {
        out.snapshot_times.push_back(0.0);
        out.snapshots.push_back(u);
    }

    double energy = first.energy;
    for (int n = 0; n < steps; ++n) {
        const double t_next = (n + 1) * dt;
        const Field load = load_form(p.memory, h);
        const Field forcing = p.nonlinearity.load_form(p.grid, u);
        Field next = imex_solve(stepper, u, load + forcing);
        check_finite(next, n * dt);
        ModeHistory h_next = step_modes(p.memory, h, next, dt);
        if (direct)
            direct->append(next, dt);

        const bool report = (n + 1) % in.report_stride == 0 || n + 1 == steps;
        double energy_next = 0.0;
        if (report) {
            EnergyReport r = make_report(p, t_next, next, h_next);
            const Field load_next = load_form(p.memory, h_next);
            const double de = (r.energy - energy) / dt;
            r.identity_residual = 0.5 * de + next.dot(p.op.principal_form() * next) + next.dot(forcing) +
                                  next.dot(load) - next.dot(load_next) - r.pairing;
            if (p.c0 && std::isfinite(p.inequality_c))
                r.inequality_residual = de + p.c0->value * (r.v1sq + r.m1sq) + 2.0 * kc.kappa1 * r.l4_bulk +
                                        2.0 * kc.kappa3 * r.lr_boundary - p.inequality_c;
            diagnose(r);
            energy_next = r.energy;
            out.reports.push_back(r);
        } else {
            energy_next = inner_x2(p.grid, next, next) + memory_energies(p.memory, h_next).m1sq;
        }
        if (in.snapshot_stride > 0 && (n + 1) % in.snapshot_stride == 0) {
            out.snapshot_times.push_back(t_next);
            out.snapshots.push_back(next);
        }
        u = std::move(next);
        h = std::move(h_next);
        energy = energy_next;
    }
    out.final_u = std::move(u);
    out.final_modes = std::move(h);
    out.final_direct = std::move(direct);
    return out;
}

SparseMatrix memoryless_form(const WentzellOperator& op, DiracReduction reduction)
{
    const auto& w = op.params();
    const Grid& g = op.grid();
    const SparseMatrix mb = diagonal_matrix(g.bulk_mass());
    const SparseMatrix ms = diagonal_matrix(g.surface_mass());
    if (reduction == DiracReduction::literal) {
        return op.bulk_gradient_form() + (w.alpha * (1.0 - w.omega)) * mb + op.surface_gradient_form() +
               (w.beta * (1.0 - w.omega)) * ms;
    }
    return (w.omega * (2.0 - w.omega)) * op.bulk_gradient_form() + (w.alpha * w.omega * (1.0 - w.omega)) * mb +
           (w.nu * (2.0 - w.omega)) * op.surface_form();
}

Trajectory simulate_memoryless(const RunConfig& config, DiracReduction reduction)
{
    const Problem p = build_problem(config);
    return simulate_memoryless(p, config, initial_field(p.grid, config.initial), reduction);
}

Trajectory simulate_memoryless(const Problem& p, const RunConfig& config, const Field& u0,
                               DiracReduction reduction)
{
    const auto& in = config.integration;
    const int steps = step_count(config, in.t_final);
    const ImexStepper stepper(p.grid, memoryless_form(p.op, reduction), in.dt);
    // The literal system carries g itself on the boundary.
    const Nonlinearity nonlinearity =
        reduction == DiracReduction::literal
            ? Nonlinearity(p.nonlinearity.f(), p.nonlinearity.g(), 0.0, config.physics.beta, config.physics.r)
            : p.nonlinearity;

    auto report = [&](double t, const Field& u) {
        EnergyReport r;
        r.t = t;
        r.x2sq = inner_x2(p.grid, u, u);
        const double v1 = norm(p.grid, u, NormKind::v1, config.physics.alpha, config.physics.beta);
        r.v1sq = v1 * v1;
        r.energy = r.x2sq;
        r.dual = p.dual(u);
        r.l4_bulk = bulk_power_sum(p.grid, u, 4.0);
        r.lr_boundary = surface_power_sum(p.grid, u, config.physics.r);
        return r;
    };

    Trajectory out;
    Field u = u0;
    out.reports.push_back(report(0.0, u));
    if (in.snapshot_stride > 0) {
        out.snapshot_times.push_back(0.0);
        out.snapshots.push_back(u);
    }
    for (int n = 0; n < steps; ++n) {
        Field next = imex_solve(stepper, u, nonlinearity.load_form(p.grid, u));
        check_finite(next, n * in.dt);
        const double t_next = (n + 1) * in.dt;
        if ((n + 1) % in.report_stride == 0 || n + 1 == steps)
            out.reports.push_back(report(t_next, next));
        if (in.snapshot_stride > 0 && (n + 1) % in.snapshot_stride == 0) {
            out.snapshot_times.push_back(t_next);
            out.snapshots.push_back(next);
        }
        u = std::move(next);
    }
    out.final_u = std::move(u);
    return out;
}

PairSeries simulate_pair(const Problem& p, const RunConfig& config, const Datum& first, const Datum& second,
                         double t_end)
{
    const auto& in = config.integration;
    const int steps = step_count(config, t_end);
    const ImexStepper stepper(p.grid, p.op.principal_form(), in.dt);

    Field u1 = first.u, u2 = second.u;
    ModeHistory h1 = init_modes(p.memory, first.history);
    ModeHistory h2 = init_modes(p.memory, second.history);
    ModeHistory hd = init_modes(p.memory, history_difference(first, second));

    PairSeries out;
    auto record = [&](double t) {
        const Field d = u1 - u2;
        out.t.push_back(t);
        out.strong.push_back(strong_norm(p, d, hd));
        out.dual.push_back(dual_norm(p, d, hd));
        out.energy_first.push_back(inner_x2(p.grid, u1, u1) + memory_energies(p.memory, h1).m1sq);
    };
    record(0.0);
    for (int n = 0; n < steps; ++n) {
        StepResult s1 = imex_step(stepper, p.memory, p.nonlinearity, u1, h1);
        StepResult s2 = imex_step(stepper, p.memory, p.nonlinearity, u2, h2);
        check_finite(s1.u, n * in.dt);
        check_finite(s2.u, n * in.dt);
        hd = step_modes(p.memory, std::move(hd), s1.u - s2.u, in.dt);
        u1 = std::move(s1.u);
        u2 = std::move(s2.u);
        h1 = std::move(s1.modes);
        h2 = std::move(s2.modes);
        if ((n + 1) % in.report_stride == 0 || n + 1 == steps)
            record((n + 1) * in.dt);
    }
    return out;
}

SplitSeries simulate_split(const Problem& p, const RunConfig& config, const Datum& first, const Datum& second,
                           double t_end)
{
    const auto& in = config.integration;
    const int steps = step_count(config, t_end);
    const double dt = in.dt;
    const ImexStepper stepper(p.grid, p.op.principal_form(), dt);
    const Field zero = Field::Zero(p.grid.size());

    Field u1 = first.u, u2 = second.u;
    ModeHistory h1 = init_modes(p.memory, first.history);
    ModeHistory h2 = init_modes(p.memory, second.history);

    const InitialHistory diff0 = history_difference(first, second);
    Field ul = first.u - second.u;  // Lambda
    ModeHistory hl = init_modes(p.memory, diff0);
    Field ux = zero;                // Xi
    ModeHistory hx = init_modes(p.memory, {zero, HistoryProfile::zero()});
    Field ud = ul;                  // D
    ModeHistory hd = hl;

    SplitSeries out;
    double max_d = 0.0, max_recon = 0.0, max_true = 0.0;
    auto record = [&](double t) {
        out.t.push_back(t);
        out.linear_dual.push_back(dual_norm(p, ul, hl));
        out.linear_strong.push_back(strong_norm(p, ul, hl));
        out.smoothing_dual.push_back(dual_norm(p, ux, hx));
        out.smoothing_strong.push_back(strong_norm(p, ux, hx));
        out.difference_dual.push_back(dual_norm(p, ud, hd));
        out.difference_strong.push_back(strong_norm(p, ud, hd));
    };
    auto track = [&]() {
        const Field recon = ul + ux - ud;
        const Field truth = (u1 - u2) - ud;
        max_d = std::max(max_d, std::sqrt(inner_x2(p.grid, ud, ud)));
        max_recon = std::max(max_recon, std::sqrt(inner_x2(p.grid, recon, recon)));
        max_true = std::max(max_true, std::sqrt(inner_x2(p.grid, truth, truth)));
    };
    record(0.0);
    track();
    for (int n = 0; n < steps; ++n) {
        const Field forcing = p.nonlinearity.load_form(p.grid, u1) - p.nonlinearity.load_form(p.grid, u2);
        StepResult s1 = imex_step(stepper, p.memory, p.nonlinearity, u1, h1);
        StepResult s2 = imex_step(stepper, p.memory, p.nonlinearity, u2, h2);
        Field ul_next = imex_solve(stepper, ul, load_form(p.memory, hl));
        Field ux_next = imex_solve(stepper, ux, load_form(p.memory, hx) + forcing);
        Field ud_next = imex_solve(stepper, ud, load_form(p.memory, hd) + forcing);
        check_finite(ud_next, n * dt);
        hl = step_modes(p.memory, std::move(hl), ul_next, dt);
        hx = step_modes(p.memory, std::move(hx), ux_next, dt);
        hd = step_modes(p.memory, std::move(hd), ud_next, dt);
        u1 = std::move(s1.u);
        u2 = std::move(s2.u);
        h1 = std::move(s1.modes);
        h2 = std::move(s2.modes);
        ul = std::move(ul_next);
        ux = std::move(ux_next);
        ud = std::move(ud_next);
        track();
        if ((n + 1) % in.report_stride == 0 || n + 1 == steps)
            record((n + 1) * dt);
    }
    if (max_d > 0.0) {
        out.reconstruction_error = max_recon / max_d;
        out.difference_error = max_true / max_d;
    }
    return out;
}

}  // namespace heatmem

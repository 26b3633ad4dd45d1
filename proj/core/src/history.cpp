#include "heatmem/history.hpp"

#include <algorithm>
#include <cmath>

namespace heatmem {

namespace {

SparseMatrix trace_selection(const Grid& g)
{
    SparseMatrix p(g.trace_size(), g.size());
    p.reserve(Eigen::VectorXi::Constant(g.size(), 1));
    for (int b = 0; b < g.trace_size(); ++b)
        p.insert(b, g.trace_node(b)) = 1.0;
    p.makeCompressed();
    return p;
}

constexpr Region regions[] = {Region::bulk, Region::boundary};

}  // namespace

MemoryModel::MemoryModel(const WentzellOperator& op, MemoryKernel bulk, MemoryKernel boundary,
                         double window_tolerance)
    : grid_(op.grid()), params_(op.params()), bulk_(std::move(bulk)), boundary_(std::move(boundary))
{
    if (bulk_.region() != Region::bulk || boundary_.region() != Region::boundary)
        throw KernelError(KernelError::Kind::region_mismatch, "memory model needs a bulk and a boundary kernel");
    const SparseMatrix p = trace_selection(grid_);
    const SparseMatrix pt = p.transpose();
    bulk_energy_ = op.bulk_form();
    trace_energy_ = params_.nu * (p * op.surface_form() * pt);
    bulk_l2_ = diagonal_matrix(grid_.bulk_mass());
    trace_l2_ = diagonal_matrix(Eigen::VectorXd::Constant(grid_.trace_size(), grid_.hx()));
    window_ = std::max(bulk_.window_cutoff(window_tolerance), boundary_.window_cutoff(window_tolerance));
}

ExpSum MemoryModel::mu_weight(Region r) const
{
    const MemoryKernel& k = kernel(r);
    ExpSum w;
    for (std::size_t i = 0; i < k.mode_count(); ++i) {
        w.amp.push_back(k.mode_mass(i) * k.rates()[i]);
        w.rate.push_back(k.rates()[i]);
    }
    return w;
}

// ---------------------------------------------------------------------------
// Mode representation

ModeHistory init_modes(const MemoryModel& model, const InitialHistory& initial)
{
    const Grid& g = model.grid();
    if (initial.field.size() != g.size())
        throw HistoryError("initial history field does not match the grid");
    const bool nonzero_field = initial.field.cwiseAbs().maxCoeff() > 0.0;
    if (nonzero_field && !initial.profile.vanishes_at_origin())
        throw HistoryError("initial history must vanish at s = 0");

    ModeHistory h;
    for (Region r : regions) {
        const MemoryKernel& k = model.kernel(r);
        const Eigen::VectorXd phi = model.restrict(r, initial.field);
        const double e1 = phi.dot(model.energy_form(r) * phi);
        const double e0 = phi.dot(model.l2_form(r) * phi);
        for (std::size_t i = 0; i < k.mode_count(); ++i) {
            ModeHistory::Mode m;
            m.region = r;
            m.index = i;
            m.rate = k.rates()[i];
            m.mass = k.mode_mass(i);
            m.w = phi * initial.profile.density_moment(m.rate);
            const double sq = initial.profile.density_square_moment(m.rate);
            m.energy = e1 * sq;
            m.l2 = e0 * sq;
            m.slope = e1 * initial.profile.density_slope_square_moment(m.rate);
            h.modes.push_back(std::move(m));
        }
    }
    return h;
}

ModeHistory step_modes(const MemoryModel& model, ModeHistory h, const Field& u, double dt)
{
    if (!(dt > 0.0))
        throw HistoryError("time step must be positive");
    for (Region r : regions) {
        const Eigen::VectorXd ur = model.restrict(r, u);
        const Eigen::VectorXd s1u = model.energy_form(r) * ur;
        const Eigen::VectorXd s0u = model.l2_form(r) * ur;
        const double uu1 = ur.dot(s1u);
        const double uu0 = ur.dot(s0u);
        for (auto& m : h.modes) {
            if (m.region != r)
                continue;
            const double x = m.rate * dt;
            const double decay = std::exp(-x);
            const double gain = -std::expm1(-x);
            const double quad = 2.0 * dt * dt * exp_moment(1, x);
            m.energy = decay * m.energy + 2.0 * dt * decay * s1u.dot(m.w) + quad * uu1;
            m.l2 = decay * m.l2 + 2.0 * dt * decay * s0u.dot(m.w) + quad * uu0;
            m.slope = decay * m.slope + gain * uu1;
            m.w = decay * m.w + (gain / m.rate) * ur;
        }
    }
    return h;
}

Field load_form(const MemoryModel& model, const ModeHistory& h)
{
    const Grid& g = model.grid();
    Eigen::VectorXd bulk = Eigen::VectorXd::Zero(g.size());
    Eigen::VectorXd trace = Eigen::VectorXd::Zero(g.trace_size());
    for (const auto& m : h.modes)
        (m.region == Region::bulk ? bulk : trace) += m.mass * m.w;
    Field out = model.energy_form(Region::bulk) * bulk;
    out += g.embed_trace(model.energy_form(Region::boundary) * trace);
    return out;
}

Field convolution_load(const MemoryModel& model, const ModeHistory& h)
{
    return load_form(model, h).cwiseQuotient(model.grid().mass());
}

MemoryEnergies memory_energies(const MemoryModel&, const ModeHistory& h)
{
    MemoryEnergies e;
    for (const auto& m : h.modes) {
        e.m1sq += m.mass * m.energy;
        e.m0sq += m.mass * m.l2;
        e.slope_m1sq += m.mass * m.slope;
        e.pairing -= 0.5 * m.mass * m.rate * m.energy;
    }
    return e;
}

// ---------------------------------------------------------------------------
// Direct representation

DirectHistory::DirectHistory(const Grid& grid, InitialHistory initial, double window)
    : grid_(grid), initial_(std::move(initial)), window_(window)
{
    if (initial_.field.size() != grid_.size())
        throw HistoryError("initial history field does not match the grid");
    times_.push_back(0.0);
    integrals_.push_back(Field::Zero(grid_.size()));
    compensation_ = Field::Zero(grid_.size());
}

void DirectHistory::append(const Field& u, double dt)
{
    if (!(dt > 0.0))
        throw HistoryError("time step must be positive");
    if (u.size() != grid_.size())
        throw HistoryError("state does not match the history grid");
    const Field& last = integrals_.back();
    const Field y = dt * u - compensation_;
    Field next = last + y;
    compensation_ = (next - last) - y;
    // Compensated clock: plain accumulation of dt drifts by many ulps over long runs.
    const double step = dt - time_compensation_;
    const double now = times_.back() + step;
    time_compensation_ = (now - times_.back()) - step;
    times_.push_back(now);
    integrals_.push_back(std::move(next));

    const double t = times_.back();
    while (times_.size() > 2 && times_[1] <= t - window_) {
        times_.pop_front();
        integrals_.pop_front();
    }
}

Field DirectHistory::integral_at(double tau) const
{
    if (tau >= times_.back())
        return integrals_.back();
    if (tau < times_.front()) {
        if (truncated())
            return integrals_.front();
        return -initial_.field * initial_.profile(-tau);
    }
    const auto it = std::upper_bound(times_.begin(), times_.end(), tau);
    const std::size_t k = static_cast<std::size_t>(it - times_.begin()) - 1;
    const double theta = (tau - times_[k]) / (times_[k + 1] - times_[k]);
    return integrals_[k] + theta * (integrals_[k + 1] - integrals_[k]);
}

Field DirectHistory::eta(double s) const
{
    if (s <= 0.0)
        return Field::Zero(grid_.size());
    return integrals_.back() - integral_at(time() - s);
}

DirectHistory::Pieces DirectHistory::pieces() const
{
    Pieces p;
    const double t = time();
    const Field& now = integrals_.back();
    for (std::size_t k = times_.size(); k-- > 0;) {
        p.s.push_back(t - times_[k]);
        p.eta.push_back(now - integrals_[k]);
    }
    if (truncated()) {
        p.tail_slope = Field::Zero(grid_.size());
        return p;
    }
    const auto& knots = initial_.profile.knots();
    const auto& values = initial_.profile.values();
    for (std::size_t k = 1; k < knots.size(); ++k) {
        p.s.push_back(t + knots[k]);
        p.eta.push_back(now + initial_.field * values[k]);
    }
    p.tail_slope = initial_.field * initial_.profile.tail_slope();
    return p;
}

Field exact_history_oracle(std::span<const Field> u_steps, double dt, const InitialHistory& initial, double t,
                           double s)
{
    if (!(dt > 0.0) || !(s >= 0.0) || !(t >= 0.0))
        throw HistoryError("oracle needs dt > 0, t >= 0 and s >= 0");
    if (static_cast<double>(u_steps.size()) * dt < t * (1.0 - 1e-12))
        throw HistoryError("oracle series does not cover [0, t]");
    Field eta = Field::Zero(initial.field.size());
    const double lo = std::max(0.0, t - s);
    for (std::size_t m = 0; m < u_steps.size(); ++m) {
        const double a = std::max(lo, static_cast<double>(m) * dt);
        const double b = std::min(t, static_cast<double>(m + 1) * dt);
        if (b > a)
            eta += (b - a) * u_steps[m];
    }
    if (s > t)
        eta += initial.profile(s - t) * initial.field;
    return eta;
}

DirectHistory init_direct(const MemoryModel& model, const InitialHistory& initial)
{
    const bool nonzero_field = initial.field.size() > 0 && initial.field.cwiseAbs().maxCoeff() > 0.0;
    if (nonzero_field && !initial.profile.vanishes_at_origin())
        throw HistoryError("initial history must vanish at s = 0");
    return DirectHistory(model.grid(), initial, model.window());
}

InitializedHistory init_history(const MemoryModel& model, const InitialHistory& initial)
{
    return {init_modes(model, initial), init_direct(model, initial)};
}

DirectHistory step_direct(DirectHistory h, const Field& u, double dt)
{
    h.append(u, dt);
    return h;
}

Field DirectHistory::moment(double rate) const
{
    // eta is linear in s between records, so each interval integrates
    // exactly against the density; the record is walked from the newest end.
    const double t = time();
    const Field& now = integrals_.back();
    Field acc = Field::Zero(grid_.size());
    const std::size_t n = times_.size();
    double carry = 0.0;  // coefficient owed to the record at index k
    for (std::size_t k = n - 1; k > 0; --k) {
        const double sa = t - times_[k];
        const double len = times_[k] - times_[k - 1];
        const double x = rate * len;
        const double scale = rate * std::exp(-rate * sa) * len;
        const double e1 = exp_moment(1, x);
        const double ca = carry + scale * (exp_moment(0, x) - e1);
        if (k != n - 1)
            acc.noalias() += ca * (now - integrals_[k]);
        carry = scale * e1;
    }
    const double tail = std::exp(-rate * (t - times_.front()));
    acc.noalias() += (carry + tail) * (now - integrals_.front());
    if (!truncated())
        acc.noalias() += (tail * initial_.profile.density_moment(rate)) * initial_.field;
    return acc;
}

Field direct_moment(const DirectHistory& h, double rate)
{
    return h.moment(rate);
}

Field load_form(const MemoryModel& model, const DirectHistory& h)
{
    const Grid& g = model.grid();
    Eigen::VectorXd bulk = Eigen::VectorXd::Zero(g.size());
    Eigen::VectorXd trace = Eigen::VectorXd::Zero(g.trace_size());
    for (Region r : regions) {
        const MemoryKernel& k = model.kernel(r);
        for (std::size_t i = 0; i < k.mode_count(); ++i) {
            const Field m = direct_moment(h, k.rates()[i]);
            if (r == Region::bulk)
                bulk += k.mode_mass(i) * m;
            else
                trace += k.mode_mass(i) * g.trace(m);
        }
    }
    Field out = model.energy_form(Region::bulk) * bulk;
    out += g.embed_trace(model.energy_form(Region::boundary) * trace);
    return out;
}

Field convolution_load(const MemoryModel& model, const DirectHistory& h)
{
    return load_form(model, h).cwiseQuotient(model.grid().mass());
}

namespace {

struct RegionPieces {
    std::vector<QuadraticPiece> value;    // |eta|^2_S
    std::vector<QuadraticPiece> pairing;  // -(d_s eta, eta)_S
    std::vector<QuadraticPiece> slope;    // |d_s eta|^2_S
};

RegionPieces region_pieces(const MemoryModel& model, const DirectHistory::Pieces& p, Region r,
                           const SparseMatrix& form)
{
    RegionPieces out;
    const std::size_t n = p.s.size();
    for (std::size_t k = 0; k < n; ++k) {
        const bool last = k + 1 == n;
        const Eigen::VectorXd ea = model.restrict(r, p.eta[k]);
        const Eigen::VectorXd d = last ? model.restrict(r, p.tail_slope)
                                       : Eigen::VectorXd(model.restrict(r, p.eta[k + 1]) - ea);
        const Eigen::VectorXd sea = form * ea;
        const Eigen::VectorXd sd = form * d;
        const double q = ea.dot(sea);
        const double c = d.dot(sea);
        const double e = d.dot(sd);
        if (last) {
            out.value.push_back({p.s[k], unbounded, q, 2.0 * c, e});
            out.pairing.push_back({p.s[k], unbounded, -c, -e, 0.0});
            out.slope.push_back({p.s[k], unbounded, e, 0.0, 0.0});
        } else {
            const double h = p.s[k + 1] - p.s[k];
            out.value.push_back({p.s[k], h, q, 2.0 * c / h, e / (h * h)});
            out.pairing.push_back({p.s[k], h, -c / h, -e / (h * h), 0.0});
            out.slope.push_back({p.s[k], h, e / (h * h), 0.0, 0.0});
        }
    }
    return out;
}

}  // namespace

MemoryEnergies memory_energies(const MemoryModel& model, const DirectHistory& h)
{
    const DirectHistory::Pieces p = h.pieces();
    MemoryEnergies e;
    for (Region r : regions) {
        const ExpSum mu = model.mu_weight(r);
        const RegionPieces energy = region_pieces(model, p, r, model.energy_form(r));
        const RegionPieces l2 = region_pieces(model, p, r, model.l2_form(r));
        e.m1sq += integrate_pieces(mu, energy.value);
        e.pairing += integrate_pieces(mu, energy.pairing);
        e.slope_m1sq += integrate_pieces(mu, energy.slope);
        e.m0sq += integrate_pieces(mu, l2.value);
    }
    return e;
}

double tr_pairing(const MemoryModel& model, const DirectHistory& h)
{
    return memory_energies(model, h).pairing;
}

double tail_function(const ExpSum& mu, std::span<const QuadraticPiece> l2_pieces, double tau)
{
    if (!(tau >= 1.0))
        throw HistoryError("tail function is sampled for tau >= 1");
    return integrate_pieces(mu, l2_pieces, 0.0, 1.0 / tau) + integrate_pieces(mu, l2_pieces, tau, unbounded);
}

std::vector<double> tail_samples(double tau_max, int count)
{
    std::vector<double> taus;
    if (count < 2 || !(tau_max > 1.0))
        return {1.0};
    const double step = std::log(tau_max) / (count - 1);
    for (int i = 0; i < count; ++i)
        taus.push_back(std::exp(step * i));
    return taus;
}

TailReport tail_and_norms(const MemoryModel& model, const DirectHistory& h, std::span<const double> taus)
{
    const DirectHistory::Pieces p = h.pieces();
    TailReport rep;
    std::vector<std::pair<ExpSum, std::vector<QuadraticPiece>>> l2;
    for (Region r : regions) {
        const ExpSum mu = model.mu_weight(r);
        const RegionPieces energy = region_pieces(model, p, r, model.energy_form(r));
        RegionPieces zero = region_pieces(model, p, r, model.l2_form(r));
        rep.m1sq += integrate_pieces(mu, energy.value);
        rep.slope_m1sq += integrate_pieces(mu, energy.slope);
        rep.m0sq += integrate_pieces(mu, zero.value);
        l2.emplace_back(mu, std::move(zero.value));
    }
    for (double tau : taus) {
        double t = 0.0;
        for (const auto& [mu, pieces] : l2)
            t += tail_function(mu, pieces, tau);
        rep.taus.push_back(tau);
        rep.scaled_tail.push_back(tau * t);
        if (tau * t > rep.sup || rep.taus.size() == 1) {
            rep.sup = tau * t;
            rep.tau_star = tau;
        }
    }
    rep.k1sq = rep.m1sq + rep.slope_m1sq + rep.sup;
    return rep;
}

}  // namespace heatmem

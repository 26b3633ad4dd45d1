#include <catch2/catch_amalgamated.hpp>

#include "heatmem/exp_quadrature.hpp"
#include "heatmem/history.hpp"
#include "heatmem/initial_data.hpp"

#include <cmath>
#include <random>
#include <vector>

using namespace heatmem;
using Catch::Approx;

namespace {

struct Setup {
    Grid grid;
    WentzellOperator op;
    MemoryModel model;
};

Setup make_setup(std::vector<double> wb, std::vector<double> lb, std::vector<double> wg, std::vector<double> lg,
                 double alpha = 1.0, double beta = 1.0, int nx = 12, int ny = 7)
{
    const double omega = 0.5, nu = 0.5;
    Grid grid = build_grid(nx, ny);
    WentzellOperator op(grid, {alpha, beta, nu, omega});
    MemoryModel model(op, make_exponential_kernel(Region::bulk, wb, lb, omega),
                      make_exponential_kernel(Region::boundary, wg, lg, omega));
    return {grid, op, model};
}

Field random_field(const Grid& g, std::mt19937_64& rng, double scale = 1.0)
{
    std::uniform_real_distribution<double> d(-scale, scale);
    Field u(g.size());
    for (int k = 0; k < g.size(); ++k)
        u[k] = d(rng);
    return u;
}

double relative(const Field& a, const Field& b)
{
    return (a - b).norm() / std::max(a.norm(), 1e-300);
}

}  // namespace

TEST_CASE("zero initial history", "[memory]") {
    const Setup s = make_setup({1.0}, {1.0}, {1.0}, {2.0});
    const InitializedHistory h = init_history(s.model, {Field::Zero(s.grid.size()), HistoryProfile::zero()});
    for (const auto& m : h.modes.modes) {
        CHECK(m.w.isZero(0.0));
        CHECK(m.energy == 0.0);
    }
    CHECK(h.direct.eta(0.7).isZero(0.0));
    CHECK(load_form(s.model, h.modes).isZero(0.0));
    CHECK(load_form(s.model, h.direct).isZero(0.0));
}

TEST_CASE("saturating initial history projects onto modes", "[memory]") {
    const Setup s = make_setup({1.0}, {1.0}, {1.0}, {1.0});
    const double c = 0.75;
    const ModeHistory h =
        init_modes(s.model, {Field::Constant(s.grid.size(), c), HistoryProfile::saturating(1.0)});
    REQUIRE(h.modes.size() == 2);
    const double expected = c * (1.0 - std::exp(-1.0));
    for (const auto& m : h.modes)
        for (Eigen::Index k = 0; k < m.w.size(); ++k)
            CHECK(m.w[k] == Approx(expected).epsilon(1e-14));
    CHECK(h.modes[0].w.size() == s.grid.size());
    CHECK(h.modes[1].w.size() == s.grid.trace_size());
}

TEST_CASE("initial history must vanish at the origin", "[memory][errors]") {
    const Setup s = make_setup({1.0}, {1.0}, {1.0}, {1.0});
    const HistoryProfile shifted({0.0, 1.0}, {0.1, 1.1}, 0.0);
    const InitialHistory bad{Field::Ones(s.grid.size()), shifted};
    CHECK_THROWS_AS(init_modes(s.model, bad), HistoryError);
    CHECK_THROWS_AS(init_direct(s.model, bad), HistoryError);
}

TEST_CASE("mode step is the exact integrating factor", "[memory]") {
    const Setup s = make_setup({1.0}, {1.0}, {1.0}, {2.0});
    const Field zero = Field::Zero(s.grid.size());
    const Field one = Field::Ones(s.grid.size());
    ModeHistory h = init_modes(s.model, {zero, HistoryProfile::zero()});

    const ModeHistory once = step_modes(s.model, h, one, 1.0);
    CHECK(once.modes[0].w[0] == Approx(1.0 - std::exp(-1.0)).epsilon(1e-15));
    CHECK(once.modes[0].w[0] == Approx(0.63212055882855767).epsilon(1e-15));
    CHECK(once.modes[1].w[0] == Approx((1.0 - std::exp(-2.0)) / 2.0).epsilon(1e-15));

    const ModeHistory settled = step_modes(s.model, h, one, 200.0);
    CHECK(settled.modes[0].w[0] == Approx(1.0).epsilon(1e-15));
    CHECK(settled.modes[1].w[0] == Approx(0.5).epsilon(1e-15));

    const ModeHistory decayed = step_modes(s.model, once, zero, 0.3);
    CHECK(decayed.modes[0].w[0] == Approx(std::exp(-0.3) * once.modes[0].w[0]).epsilon(1e-15));
    CHECK(decayed.modes[1].w[0] == Approx(std::exp(-0.6) * once.modes[1].w[0]).epsilon(1e-15));

    CHECK_THROWS_AS(step_modes(s.model, h, one, 0.0), HistoryError);
}

TEST_CASE("direct history of a constant input", "[memory]") {
    const Setup s = make_setup({1.0}, {1.0}, {1.0}, {1.0});
    DirectHistory h = init_direct(s.model, {Field::Zero(s.grid.size()), HistoryProfile::zero()});
    const Field one = Field::Ones(s.grid.size());
    for (int n = 0; n < 20; ++n)
        h.append(one, 0.1);
    CHECK(h.time() == Approx(2.0).epsilon(1e-15));
    CHECK(h.eta(1.0)[0] == Approx(1.0).epsilon(1e-14));
    CHECK(h.eta(3.0)[0] == Approx(2.0).epsilon(1e-14));
    CHECK(h.eta(2.0)[5] == Approx(2.0).epsilon(1e-14));
    CHECK(h.eta(0.0)[5] == 0.0);
}

TEST_CASE("representation formula oracle", "[memory]") {
    const Grid g = build_grid(4, 4);
    const Field one = Field::Ones(g.size());
    const double dt = 0.1;

    SECTION("constant input") {
        const std::vector<Field> steps(20, one);
        const InitialHistory none{Field::Zero(g.size()), HistoryProfile::zero()};
        for (double s : {0.3, 1.0, 2.0, 4.5})
            CHECK(exact_history_oracle(steps, dt, none, 2.0, s)[0] == Approx(std::min(s, 2.0)).epsilon(1e-14));
    }
    SECTION("pure transport of the initial history") {
        const std::vector<Field> steps(20, Field::Zero(g.size()));
        const InitialHistory ramp{one, HistoryProfile::ramp()};
        CHECK(exact_history_oracle(steps, dt, ramp, 2.0, 1.5)[0] == 0.0);
        CHECK(exact_history_oracle(steps, dt, ramp, 2.0, 3.5)[0] == Approx(1.5).epsilon(1e-14));
    }
    SECTION("linear input") {
        // Midpoint values integrate u(tau) = tau exactly on every step.
        std::vector<Field> steps;
        for (int m = 0; m < 20; ++m)
            steps.push_back(Field::Constant(g.size(), (m + 0.5) * dt));
        const InitialHistory none{Field::Zero(g.size()), HistoryProfile::zero()};
        CHECK(exact_history_oracle(steps, dt, none, 2.0, 1.0)[0] == Approx(1.5).epsilon(1e-14));
    }
    SECTION("coverage") {
        const std::vector<Field> steps(5, one);
        const InitialHistory none{Field::Zero(g.size()), HistoryProfile::zero()};
        CHECK_THROWS_AS(exact_history_oracle(steps, dt, none, 2.0, 1.0), HistoryError);
    }
}

TEST_CASE("direct history matches the representation formula", "[memory][property]") {
    const Setup s = make_setup({0.5, 0.5}, {1.0, 3.0}, {1.0}, {2.0});
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 10; ++trial) {
        const Field phi = random_field(s.grid, rng);
        const InitialHistory initial{phi, trial % 2 ? HistoryProfile::saturating(0.8) : HistoryProfile::ramp()};
        DirectHistory h = init_direct(s.model, initial);
        std::vector<Field> steps;
        const double dt = 0.01;
        for (int n = 0; n < 300; ++n) {
            steps.push_back(random_field(s.grid, rng));
            h.append(steps.back(), dt);
        }
        const double t = 300 * dt;
        for (double sv : {0.0, 0.005, 0.37, 1.0, 2.999, 3.0, 3.4, 7.0}) {
            const Field diff = h.eta(sv) - exact_history_oracle(steps, dt, initial, t, sv);
            CHECK(diff.lpNorm<Eigen::Infinity>() <= 1e-14);
        }
    }
}

TEST_CASE("constant history produces no load without zeroth-order terms", "[memory]") {
    const Setup s = make_setup({1.0}, {1.0}, {1.0}, {1.0}, 0.0, 0.0);
    const InitialHistory ramp{Field::Constant(s.grid.size(), 2.0), HistoryProfile::ramp()};
    const InitializedHistory h = init_history(s.model, ramp);
    CHECK(convolution_load(s.model, h.modes).lpNorm<Eigen::Infinity>() <= 1e-12);
    CHECK(convolution_load(s.model, h.direct).lpNorm<Eigen::Infinity>() <= 1e-12);
}

TEST_CASE("mode and direct representations agree", "[memory][property]") {
    std::mt19937_64 rng(43);
    const Setup single = make_setup({1.0}, {1.0}, {1.0}, {2.0});
    const Setup multi = make_setup({0.6, 0.4}, {1.0, 5.0}, {0.5, 0.5}, {1.5, 4.0});
    for (const Setup* s : {&single, &multi}) {
        const InitialHistory initial{random_field(s->grid, rng), HistoryProfile::saturating(0.5)};
        ModeHistory modes = init_modes(s->model, initial);
        DirectHistory direct = init_direct(s->model, initial);
        double worst_load = relative(load_form(s->model, modes), load_form(s->model, direct));
        double worst_energy = 0.0;
        for (int n = 0; n < 200; ++n) {
            const Field u = random_field(s->grid, rng);
            const double dt = 0.005 + 0.01 * (n % 3);
            modes = step_modes(s->model, std::move(modes), u, dt);
            direct.append(u, dt);
            worst_load = std::max(worst_load, relative(load_form(s->model, modes), load_form(s->model, direct)));
            if (n % 20 == 0) {
                const MemoryEnergies a = memory_energies(s->model, modes);
                const MemoryEnergies b = memory_energies(s->model, direct);
                worst_energy = std::max({worst_energy, std::abs(a.m1sq - b.m1sq) / a.m1sq,
                                         std::abs(a.m0sq - b.m0sq) / a.m0sq,
                                         std::abs(a.slope_m1sq - b.slope_m1sq) / a.slope_m1sq,
                                         std::abs(a.pairing - b.pairing) / std::abs(a.pairing)});
            }
        }
        CHECK(worst_load <= 1e-10);
        CHECK(worst_energy <= 1e-10);
    }
}

TEST_CASE("direct history window eviction", "[memory]") {
    const Setup s = make_setup({1.0}, {20.0}, {1.0}, {20.0});
    const InitialHistory initial{Field::Ones(s.grid.size()), HistoryProfile::ramp()};
    DirectHistory h = init_direct(s.model, initial);
    ModeHistory modes = init_modes(s.model, initial);
    REQUIRE(h.window() < 2.0);
    std::mt19937_64 rng(47);
    std::vector<Field> steps;
    const double dt = 0.01;
    for (int n = 0; n < 400; ++n) {
        steps.push_back(random_field(s.grid, rng));
        h.append(steps.back(), dt);
        modes = step_modes(s.model, std::move(modes), steps.back(), dt);
    }
    CHECK(h.truncated());
    CHECK(h.record_count() < 400);
    const double t = 400 * dt;
    for (double sv : {0.0, 0.1, 0.5 * h.window(), h.window()}) {
        const Field diff = h.eta(sv) - exact_history_oracle(steps, dt, initial, t, sv);
        CHECK(diff.lpNorm<Eigen::Infinity>() <= 1e-13);
    }
    // The truncated tail weighs below the window tolerance.
    CHECK(relative(load_form(s.model, modes), load_form(s.model, h)) <= 1e-10);
}

TEST_CASE("tail function closed form", "[memory]") {
    // eta(s) = min(s, 1) on a unit-measure region with mu = e^{-s}.
    const ExpSum mu{{1.0}, {1.0}};
    const std::vector<QuadraticPiece> pieces{{0.0, 1.0, 0.0, 0.0, 1.0}, {1.0, unbounded, 1.0, 0.0, 0.0}};
    const double expected = 2.0 - 4.0 * std::exp(-1.0);
    CHECK(tail_function(mu, pieces, 1.0) == Approx(expected).epsilon(1e-14));
    CHECK(expected == Approx(0.52848).margin(5e-6));
    CHECK_THROWS_AS(tail_function(mu, pieces, 0.5), HistoryError);
}

TEST_CASE("scaled tail stays bounded for compactly supported histories", "[memory]") {
    // |eta|^2 for the hat eta = s on [0, 0.5], 1 - s on [0.5, 1].
    const ExpSum mu{{1.0}, {1.0}};
    const std::vector<QuadraticPiece> pieces{
        {0.0, 0.5, 0.0, 0.0, 1.0}, {0.5, 0.5, 0.25, -1.0, 1.0}, {1.0, unbounded, 0.0, 0.0, 0.0}};
    double sup = 0.0;
    for (double tau : tail_samples(1e6, 40)) {
        const double scaled = tau * tail_function(mu, pieces, tau);
        sup = std::max(sup, scaled);
        // Near s = 0 the integrand is s^2, so tau T(tau) ~ 1/(3 tau^2).
        if (tau > 10.0)
            CHECK(scaled <= 1.0 / (3.0 * tau * tau) * (1.0 + 1e-6));
    }
    CHECK(std::isfinite(sup));
}

TEST_CASE("tail report of a zero history", "[memory]") {
    const Setup s = make_setup({1.0}, {1.0}, {1.0}, {1.0});
    const DirectHistory h = init_direct(s.model, {Field::Zero(s.grid.size()), HistoryProfile::zero()});
    const TailReport rep = tail_and_norms(s.model, h, tail_samples(100.0, 10));
    CHECK(rep.sup == 0.0);
    CHECK(rep.m0sq == 0.0);
    CHECK(rep.m1sq == 0.0);
    CHECK(rep.k1sq == 0.0);
    CHECK(rep.taus.size() == 10);
}

TEST_CASE("transport generator is dissipative", "[memory]") {
    const Setup s = make_setup({1.0}, {1.0}, {1.0}, {1.0});
    DirectHistory h = init_direct(s.model, {Field::Zero(s.grid.size()), HistoryProfile::zero()});
    DirectHistory twice = h;
    const Field one = Field::Ones(s.grid.size());
    for (int n = 0; n < 500; ++n) {
        h.append(one, 0.01);
        twice.append(2.0 * one, 0.01);
    }
    const MemoryEnergies e = memory_energies(s.model, h);
    const double delta = 1.0;
    CHECK(e.m1sq > 0.0);
    CHECK(tr_pairing(s.model, h) <= -0.5 * delta * e.m1sq + 1e-8 * e.m1sq);
    CHECK(tr_pairing(s.model, twice) == Approx(4.0 * tr_pairing(s.model, h)).epsilon(1e-13));
    const DirectHistory empty = init_direct(s.model, {Field::Zero(s.grid.size()), HistoryProfile::zero()});
    CHECK(tr_pairing(s.model, empty) == 0.0);
}

TEST_CASE("dissipativity holds for random multi-mode histories", "[memory][property]") {
    std::mt19937_64 rng(53);
    const Setup s = make_setup({0.3, 0.7}, {0.5, 6.0}, {0.2, 0.8}, {1.5, 2.5});
    const double delta = 0.5;
    for (int trial = 0; trial < 10; ++trial) {
        ModeHistory modes = init_modes(s.model, {random_field(s.grid, rng), HistoryProfile::saturating(2.0)});
        for (int n = 0; n < 50; ++n)
            modes = step_modes(s.model, std::move(modes), random_field(s.grid, rng), 0.02);
        const MemoryEnergies e = memory_energies(s.model, modes);
        CHECK(e.pairing <= -0.5 * delta * e.m1sq);
    }
}

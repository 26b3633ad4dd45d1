#include <catch2/catch_amalgamated.hpp>

#include "heatmem/grid.hpp"
#include "heatmem/wentzell.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace heatmem;
using Catch::Approx;

namespace {

constexpr double pi = std::numbers::pi;

Field random_field(const Grid& g, std::mt19937_64& rng)
{
    std::normal_distribution<double> n(0.0, 1.0);
    Field u(g.size());
    for (int k = 0; k < g.size(); ++k)
        u[k] = n(rng);
    return u;
}

template <class Fn>
Field sample(const Grid& g, Fn&& fn)
{
    Field u(g.size());
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i)
            u[g.index(i, j)] = fn(g.x(i), g.y(j));
    return u;
}

}  // namespace

TEST_CASE("grid spacings and measures", "[grid]") {
    const Grid g = build_grid(64, 33, 2 * pi, 1.0);
    CHECK(g.hx() == Approx(2 * pi / 64).epsilon(1e-15));
    CHECK(g.hy() == Approx(1.0 / 32).epsilon(1e-15));
    CHECK(g.bulk_measure() == Approx(2 * pi).epsilon(1e-15));
    CHECK(g.boundary_measure() == Approx(4 * pi).epsilon(1e-15));
    CHECK(g.trace_size() == 128);

    const Grid small = build_grid(4, 4, 1.0, 1.0);
    CHECK(small.size() == 16);

    CHECK_THROWS_AS(build_grid(2, 33), GridError);
    CHECK_THROWS_AS(build_grid(64, 3), GridError);
    CHECK_THROWS_AS(build_grid(64, 33, -1.0, 1.0), GridError);
}

TEST_CASE("trace ordering and embedding", "[grid]") {
    const Grid g = build_grid(8, 5);
    Field u = Field::LinSpaced(g.size(), 0.0, g.size() - 1.0);
    const Eigen::VectorXd v = g.trace(u);
    REQUIRE(v.size() == 16);
    CHECK(v[0] == u[g.index(0, 0)]);
    CHECK(v[7] == u[g.index(7, 0)]);
    CHECK(v[8] == u[g.index(0, 4)]);
    const Field e = g.embed_trace(v);
    CHECK(e[g.index(3, 2)] == 0.0);
    CHECK(e[g.index(3, 4)] == u[g.index(3, 4)]);
}

TEST_CASE("X2 inner product", "[grid]") {
    const Grid g = build_grid(64, 33);
    const Field one = Field::Ones(g.size());
    // Rounding bound for summing g.size() equal terms: size * eps = 2.3e-13.
    CHECK(inner_x2(g, one, one) == Approx(6 * pi).epsilon(g.size() * 1.1e-16));

    const Field c = sample(g, [](double x, double) { return std::cos(x); });
    const Field s = sample(g, [](double x, double) { return std::sin(x); });
    CHECK(std::abs(inner_x2(g, c, s)) <= 1e-12);

    CHECK_THROWS_AS(inner_x2(g, one, Field::Ones(10)), GridError);
}

TEST_CASE("quadrature converges quadratically in y", "[grid][convergence]") {
    // u = sin(x) y^2: bulk integral pi/5, boundary pi (top circle only).
    const double exact = pi / 5 + pi;
    double previous = 0.0;
    for (int ny : {9, 17, 33, 65}) {
        const Grid g = build_grid(32, ny);
        const Field u = sample(g, [](double x, double y) { return std::sin(x) * y * y; });
        const double err = std::abs(inner_x2(g, u, u) - exact);
        if (previous > 0.0)
            CHECK(previous / err == Approx(4.0).epsilon(0.05));
        previous = err;
    }
}

TEST_CASE("V1 norm of cos(x)", "[grid]") {
    const int nx = 64;
    const Grid g = build_grid(nx, 33);
    const Field c = sample(g, [](double x, double) { return std::cos(x); });
    // Forward differences of cos carry the factor (2 sin(h/2) / h)^2.
    const double h = g.hx();
    const double sinc = std::pow(2.0 * std::sin(h / 2) / h, 2);
    const double discrete = pi * sinc + pi + 2 * pi * sinc + 2 * pi;
    const double v1 = norm(g, c, NormKind::v1, 1.0, 1.0);
    CHECK(v1 * v1 == Approx(discrete).epsilon(1e-12));
    CHECK(std::abs(v1 * v1 - 6 * pi) <= 3 * pi * h * h / 12 * 1.01);

    const Field one = Field::Ones(g.size());
    const double n1 = norm(g, one, NormKind::v1, 1.0, 1.0);
    CHECK(n1 * n1 == Approx(6 * pi).epsilon(1e-14));
}

TEST_CASE("dual norm pairs with V1", "[grid][property]") {
    const Grid g = build_grid(24, 11);
    std::mt19937_64 rng(3);
    const DualNorm dual(g, 1.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        const Field u = random_field(g, rng);
        const double lhs = dual(u) * norm(g, u, NormKind::v1, 1.0, 1.0);
        CHECK(lhs >= inner_x2(g, u, u) * (1.0 - 1e-12));
        CHECK(norm(g, u, NormKind::v_minus1, 1.0, 1.0) == Approx(dual(u)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(DualNorm(g, 0.0, 0.0), OperatorError);
}

TEST_CASE("Wentzell operator on constants", "[wentzell]") {
    const Grid g = build_grid(32, 17);
    const Field one = Field::Ones(g.size());

    const WentzellOperator zero = assemble_wentzell(g, 0.0, 0.0, 0.5, 0.5);
    CHECK(zero.apply(one).lpNorm<Eigen::Infinity>() <= 1e-12);

    const double omega = 0.3, nu = 0.7;
    const WentzellOperator op = assemble_wentzell(g, 1.0, 1.0, nu, omega);
    const auto parts = op.components(one);
    for (int k = 0; k < g.size(); ++k)
        CHECK(parts.bulk[k] == Approx(omega).epsilon(1e-12));
    for (int b = 0; b < g.trace_size(); ++b)
        CHECK(parts.trace[b] == Approx(nu).epsilon(1e-12));
}

TEST_CASE("one-sided normal derivative is exact on quadratics", "[wentzell]") {
    const Grid g = build_grid(16, 9);
    const double omega = 0.5, nu = 0.5, alpha = 1.0, beta = 2.0;
    const WentzellOperator op = assemble_wentzell(g, alpha, beta, nu, omega);
    const Field u = sample(g, [](double, double y) { return y * y; });
    const auto parts = op.components(u);
    for (int j = 1; j + 1 < g.ny(); ++j)
        CHECK(parts.bulk[g.index(3, j)] == Approx(-2 * omega + alpha * omega * g.y(j) * g.y(j)).epsilon(1e-10));
    // Outward normal: -d/dy at y = 0, +d/dy at y = 1.
    for (int i = 0; i < g.nx(); ++i) {
        CHECK(std::abs(parts.trace[i]) <= 1e-10);
        CHECK(parts.trace[g.nx() + i] == Approx(omega * 2.0 + nu * beta).epsilon(1e-10));
    }
}

TEST_CASE("Wentzell operator is symmetric in X2", "[wentzell][property]") {
    const Grid g = build_grid(20, 9);
    std::mt19937_64 rng(17);
    const WentzellOperator op = assemble_wentzell(g, 0.7, 1.3, 0.4, 0.6);
    for (int trial = 0; trial < 100; ++trial) {
        const Field u = random_field(g, rng);
        const Field v = random_field(g, rng);
        const double a = inner_x2(g, op.apply(u), v);
        const double b = inner_x2(g, u, op.apply(v));
        CHECK(std::abs(a - b) <= 1e-12 * std::max(std::abs(a), 1.0));
    }
}

TEST_CASE("Wentzell operator is nonnegative and definite", "[wentzell][property]") {
    const Grid g = build_grid(20, 9);
    std::mt19937_64 rng(19);
    const WentzellOperator semi = assemble_wentzell(g, 0.0, 0.0, 0.5, 0.5);
    const WentzellOperator def = assemble_wentzell(g, 0.0, 1.0, 0.5, 0.5);
    for (int trial = 0; trial < 100; ++trial) {
        const Field u = random_field(g, rng);
        CHECK(inner_x2(g, semi.apply(u), u) >= -1e-12);
        CHECK(inner_x2(g, def.apply(u), u) > 0.0);
    }
}

TEST_CASE("discrete Green identity", "[wentzell][property]") {
    const Grid g = build_grid(24, 13);
    std::mt19937_64 rng(23);
    const double omega = 0.4, nu = 0.6, beta = 1.5;
    const WentzellOperator op = assemble_wentzell(g, 0.0, beta, nu, omega);
    for (int trial = 0; trial < 100; ++trial) {
        const Field u = random_field(g, rng);
        const double lhs = inner_x2(g, op.apply(u), u);
        const double rhs = omega * bulk_gradient_sq(g, u) + nu * surface_gradient_sq(g, u) +
                           beta * nu * surface_inner(g, u, u);
        CHECK(lhs == Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("Wentzell blocks", "[wentzell]") {
    const Grid g = build_grid(16, 9);
    std::mt19937_64 rng(29);
    const double alpha = 0.8, beta = 1.2, nu = 0.3, omega = 0.6;
    const WentzellOperator op = assemble_wentzell(g, alpha, beta, nu, omega);
    const Field u = random_field(g, rng);

    const double bulk = u.dot(op.bulk_form() * u);
    CHECK(bulk == Approx(omega * bulk_gradient_sq(g, u) + alpha * omega * bulk_inner(g, u, u)).epsilon(1e-12));
    const double surf = u.dot(op.surface_form() * u);
    CHECK(surf == Approx(surface_gradient_sq(g, u) + beta * surface_inner(g, u, u)).epsilon(1e-12));
    const double full = u.dot(op.full_form() * u);
    CHECK(full == Approx(bulk + nu * surf).epsilon(1e-12));
    const double v1 = norm(g, u, NormKind::v1, alpha, beta);
    CHECK(u.dot(op.gram_form() * u) == Approx(v1 * v1).epsilon(1e-12));

    // B acts on the trace alone: (-Delta_G + beta) v.
    const Eigen::VectorXd v = g.trace(u);
    const Eigen::VectorXd bv = op.apply_boundary_block(v);
    const int nx = g.nx();
    for (int i = 0; i < nx; ++i) {
        const double lap = (v[(i + 1) % nx] - 2 * v[i] + v[(i + nx - 1) % nx]) / (g.hx() * g.hx());
        CHECK(bv[i] == Approx(-lap + beta * v[i]).epsilon(1e-10));
    }

    CHECK_THROWS_AS(assemble_wentzell(g, -1.0, 1.0, 0.5, 0.5), OperatorError);
    CHECK_THROWS_AS(assemble_wentzell(g, 1.0, 1.0, 1.0, 0.5), OperatorError);
    CHECK_THROWS_AS(assemble_wentzell(g, 1.0, 1.0, 0.5, 0.0), OperatorError);
}

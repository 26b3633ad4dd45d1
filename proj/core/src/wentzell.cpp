#include "heatmem/wentzell.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace heatmem {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

void add_edge(Triplets& t, int a, int b, double w)
{
    t.emplace_back(a, a, w);
    t.emplace_back(b, b, w);
    t.emplace_back(a, b, -w);
    t.emplace_back(b, a, -w);
}

SparseMatrix assemble_bulk_gradient(const Grid& g)
{
    Triplets t;
    t.reserve(static_cast<std::size_t>(8 * g.size()));
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i)
            add_edge(t, g.index(i, j), g.index(i + 1, j), g.bulk_weight(j) / (g.hx() * g.hx()));
    for (int j = 0; j + 1 < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i)
            add_edge(t, g.index(i, j), g.index(i, j + 1), g.hx() / g.hy());
    SparseMatrix m(g.size(), g.size());
    m.setFromTriplets(t.begin(), t.end());
    return m;
}

SparseMatrix assemble_surface_gradient(const Grid& g)
{
    Triplets t;
    t.reserve(static_cast<std::size_t>(8 * g.nx()));
    for (int j : {0, g.ny() - 1})
        for (int i = 0; i < g.nx(); ++i)
            add_edge(t, g.index(i, j), g.index(i + 1, j), 1.0 / g.hx());
    SparseMatrix m(g.size(), g.size());
    m.setFromTriplets(t.begin(), t.end());
    return m;
}

SparseMatrix gram(const Grid& g, double alpha, double beta)
{
    SparseMatrix m = assemble_bulk_gradient(g) + assemble_surface_gradient(g);
    m += alpha * diagonal_matrix(g.bulk_mass()) + beta * diagonal_matrix(g.surface_mass());
    return m;
}

}  // namespace

SparseMatrix diagonal_matrix(const Field& d)
{
    SparseMatrix m(d.size(), d.size());
    m.reserve(Eigen::VectorXi::Constant(d.size(), 1));
    for (Eigen::Index n = 0; n < d.size(); ++n)
        m.insert(n, n) = d[n];
    m.makeCompressed();
    return m;
}

WentzellOperator::WentzellOperator(Grid grid, WentzellParams params)
    : grid_(std::move(grid)), params_(params)
{
    const auto& p = params_;
    if (!(p.alpha >= 0.0) || !(p.beta >= 0.0))
        throw OperatorError("alpha and beta must be nonnegative");
    if (!(p.nu > 0.0 && p.nu < 1.0))
        throw OperatorError("nu must lie in (0,1)");
    if (!(p.omega > 0.0 && p.omega < 1.0))
        throw OperatorError("omega must lie in (0,1)");

    bulk_grad_ = assemble_bulk_gradient(grid_);
    surface_grad_ = assemble_surface_gradient(grid_);
    const SparseMatrix mb = diagonal_matrix(grid_.bulk_mass());
    const SparseMatrix ms = diagonal_matrix(grid_.surface_mass());

    bulk_ = p.omega * bulk_grad_ + (p.alpha * p.omega) * mb;
    surface_ = surface_grad_ + p.beta * ms;
    principal_ = p.omega * bulk_grad_ + p.nu * surface_;
    full_ = bulk_ + p.nu * surface_;
    gram_ = bulk_grad_ + p.alpha * mb + surface_;
}

WentzellOperator assemble_wentzell(const Grid& grid, double alpha, double beta, double nu, double omega)
{
    return WentzellOperator(grid, {alpha, beta, nu, omega});
}

Field WentzellOperator::apply(const Field& u) const
{
    return (full_ * u).cwiseQuotient(grid_.mass());
}

Field WentzellOperator::apply_bulk_block(const Field& u) const
{
    return (bulk_ * u).cwiseQuotient(grid_.mass());
}

Eigen::VectorXd WentzellOperator::apply_boundary_block(const Eigen::VectorXd& v) const
{
    const Field full = surface_ * grid_.embed_trace(v);
    Eigen::VectorXd out = grid_.trace(full);
    return out / grid_.hx();
}

WentzellOperator::Components WentzellOperator::components(const Field& u) const
{
    const Grid& g = grid_;
    const auto& p = params_;
    const double hx2 = g.hx() * g.hx();
    const double hy2 = g.hy() * g.hy();
    const int top = g.ny() - 1;

    Components c{Field(g.size()), Eigen::VectorXd(g.trace_size())};
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) {
            auto at = [&](int di, int dj) { return u[g.index(i + di, j + dj)]; };
            const double uxx = (at(1, 0) - 2.0 * at(0, 0) + at(-1, 0)) / hx2;
            double uyy;
            if (j == 0)
                uyy = (at(0, 0) - 2.0 * at(0, 1) + at(0, 2)) / hy2;
            else if (j == top)
                uyy = (at(0, 0) - 2.0 * at(0, -1) + at(0, -2)) / hy2;
            else
                uyy = (at(0, 1) - 2.0 * at(0, 0) + at(0, -1)) / hy2;
            c.bulk[g.index(i, j)] = -p.omega * (uxx + uyy) + p.alpha * p.omega * at(0, 0);
        }
    for (int b = 0; b < g.trace_size(); ++b) {
        const int i = b % g.nx();
        const int j = b < g.nx() ? 0 : top;
        const int in = j == 0 ? 1 : -1;
        auto at = [&](int di, int dj) { return u[g.index(i + di, j + dj)]; };
        const double dn = (3.0 * at(0, 0) - 4.0 * at(0, in) + at(0, 2 * in)) / (2.0 * g.hy());
        const double vxx = (at(1, 0) - 2.0 * at(0, 0) + at(-1, 0)) / hx2;
        c.trace[b] = p.omega * dn + p.nu * (-vxx + p.beta * at(0, 0));
    }
    return c;
}

double norm(const Grid& grid, const Field& u, NormKind which, double alpha, double beta)
{
    switch (which) {
    case NormKind::x2:
        return std::sqrt(inner_x2(grid, u, u));
    case NormKind::v1: {
        const double sq = bulk_gradient_sq(grid, u) + alpha * bulk_inner(grid, u, u) +
                          surface_gradient_sq(grid, u) + beta * surface_inner(grid, u, u);
        return std::sqrt(sq);
    }
    case NormKind::v_minus1:
        return DualNorm(grid, alpha, beta)(u);
    }
    return 0.0;
}

DualNorm::DualNorm(const Grid& grid, double alpha, double beta)
    : grid_(grid), solver_(std::make_shared<Eigen::SimplicialLDLT<SparseMatrix>>())
{
    if (!(alpha > 0.0 || beta > 0.0))
        throw OperatorError("V^-1 norm needs alpha > 0 or beta > 0 (Gram form is singular)");
    if (alpha < 0.0 || beta < 0.0)
        throw OperatorError("alpha and beta must be nonnegative");
    solver_->compute(gram(grid_, alpha, beta));
    if (solver_->info() != Eigen::Success)
        throw OperatorError("V^1 Gram factorization failed");
}

double DualNorm::squared(const Field& u) const
{
    if (u.size() != grid_.size())
        throw GridError("field size does not match grid");
    const Field mu = u.cwiseProduct(grid_.mass());
    const Field z = solver_->solve(mu);
    return std::max(0.0, mu.dot(z));
}

double DualNorm::operator()(const Field& u) const
{
    return std::sqrt(squared(u));
}

}  // namespace heatmem

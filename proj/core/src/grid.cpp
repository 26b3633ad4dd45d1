#include "heatmem/grid.hpp"

#include <cmath>
#include <string>

namespace heatmem {

Grid::Grid(int nx, int ny, double lx, double ly) : nx_(nx), ny_(ny), lx_(lx), ly_(ly)
{
    if (nx < 4 || ny < 4)
        throw GridError("grid needs nx >= 4 and ny >= 4 (got " + std::to_string(nx) + "x" +
                        std::to_string(ny) + ")");
    if (!(lx > 0.0) || !(ly > 0.0) || !std::isfinite(lx) || !std::isfinite(ly))
        throw GridError("grid lengths must be positive and finite");

    bulk_mass_.resize(size());
    surface_mass_.resize(size());
    for (int j = 0; j < ny_; ++j)
        for (int i = 0; i < nx_; ++i) {
            bulk_mass_[index(i, j)] = bulk_weight(j);
            surface_mass_[index(i, j)] = surface_weight(j);
        }
    mass_ = bulk_mass_ + surface_mass_;
}

Grid build_grid(int nx, int ny, double lx, double ly)
{
    return Grid(nx, ny, lx, ly);
}

Eigen::VectorXd Grid::trace(const Field& u) const
{
    Eigen::VectorXd v(trace_size());
    for (int b = 0; b < trace_size(); ++b)
        v[b] = u[trace_node(b)];
    return v;
}

Field Grid::embed_trace(const Eigen::VectorXd& v) const
{
    Field u = Field::Zero(size());
    for (int b = 0; b < trace_size(); ++b)
        u[trace_node(b)] = v[b];
    return u;
}

namespace {

void require_shape(const Grid& grid, const Field& u)
{
    if (u.size() != grid.size())
        throw GridError("field size " + std::to_string(u.size()) + " does not match grid size " +
                        std::to_string(grid.size()));
}

}  // namespace

double inner_x2(const Grid& grid, const Field& u, const Field& v)
{
    require_shape(grid, u);
    require_shape(grid, v);
    const Field& m = grid.mass();
    double sum = 0.0;
    for (int n = 0; n < grid.size(); ++n)
        sum += m[n] * u[n] * v[n];
    return sum;
}

double bulk_inner(const Grid& grid, const Field& u, const Field& v)
{
    require_shape(grid, u);
    require_shape(grid, v);
    const Field& m = grid.bulk_mass();
    double sum = 0.0;
    for (int n = 0; n < grid.size(); ++n)
        sum += m[n] * u[n] * v[n];
    return sum;
}

double surface_inner(const Grid& grid, const Field& u, const Field& v)
{
    require_shape(grid, u);
    require_shape(grid, v);
    double sum = 0.0;
    for (int b = 0; b < grid.trace_size(); ++b) {
        const int n = grid.trace_node(b);
        sum += grid.hx() * u[n] * v[n];
    }
    return sum;
}

double bulk_gradient_sq(const Grid& grid, const Field& u)
{
    require_shape(grid, u);
    const double hx = grid.hx();
    const double hy = grid.hy();
    double sum = 0.0;
    for (int j = 0; j < grid.ny(); ++j) {
        const double w = grid.bulk_weight(j);
        for (int i = 0; i < grid.nx(); ++i) {
            const double d = (u[grid.index(i + 1, j)] - u[grid.index(i, j)]) / hx;
            sum += w * d * d;
        }
    }
    for (int j = 0; j + 1 < grid.ny(); ++j)
        for (int i = 0; i < grid.nx(); ++i) {
            const double d = (u[grid.index(i, j + 1)] - u[grid.index(i, j)]) / hy;
            sum += hx * hy * d * d;
        }
    return sum;
}

double surface_gradient_sq(const Grid& grid, const Field& u)
{
    require_shape(grid, u);
    const double hx = grid.hx();
    double sum = 0.0;
    for (int j : {0, grid.ny() - 1})
        for (int i = 0; i < grid.nx(); ++i) {
            const double d = (u[grid.index(i + 1, j)] - u[grid.index(i, j)]) / hx;
            sum += hx * d * d;
        }
    return sum;
}

double bulk_power_sum(const Grid& grid, const Field& u, double p)
{
    require_shape(grid, u);
    const Field& m = grid.bulk_mass();
    double sum = 0.0;
    for (int n = 0; n < grid.size(); ++n)
        sum += m[n] * std::pow(std::abs(u[n]), p);
    return sum;
}

double surface_power_sum(const Grid& grid, const Field& u, double p)
{
    require_shape(grid, u);
    double sum = 0.0;
    for (int b = 0; b < grid.trace_size(); ++b)
        sum += grid.hx() * std::pow(std::abs(u[grid.trace_node(b)]), p);
    return sum;
}

}  // namespace heatmem

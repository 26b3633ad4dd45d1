#pragma once

#include <Eigen/Core>

#include <numbers>
#include <stdexcept>

namespace heatmem {

// Nodal values on the closed strip; rows 0 and ny-1 are the boundary trace.
using Field = Eigen::VectorXd;

class GridError : public std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Periodic in x, two boundary circles at y = 0 and y = ly.
class Grid {
public:
    Grid(int nx, int ny, double lx, double ly);

    int nx() const noexcept { return nx_; }
    int ny() const noexcept { return ny_; }
    double lx() const noexcept { return lx_; }
    double ly() const noexcept { return ly_; }
    double hx() const noexcept { return lx_ / nx_; }
    double hy() const noexcept { return ly_ / (ny_ - 1); }

    int size() const noexcept { return nx_ * ny_; }
    int trace_size() const noexcept { return 2 * nx_; }
    int index(int i, int j) const noexcept { return j * nx_ + ((i % nx_) + nx_) % nx_; }
    bool boundary_row(int j) const noexcept { return j == 0 || j == ny_ - 1; }

    double x(int i) const noexcept { return i * hx(); }
    double y(int j) const noexcept { return j * hy(); }

    double bulk_measure() const noexcept { return lx_ * ly_; }
    double boundary_measure() const noexcept { return 2.0 * lx_; }

    // Trapezoid in y, rectangle in x for the bulk; rectangle on each circle.
    double bulk_weight(int j) const noexcept { return hx() * hy() * (boundary_row(j) ? 0.5 : 1.0); }
    double surface_weight(int j) const noexcept { return boundary_row(j) ? hx() : 0.0; }

    // Diagonal X^2 mass: bulk plus surface weight at each node.
    const Field& mass() const noexcept { return mass_; }
    const Field& bulk_mass() const noexcept { return bulk_mass_; }
    const Field& surface_mass() const noexcept { return surface_mass_; }

    // Boundary trace ordering: bottom circle i = 0..nx-1, then top circle.
    int trace_node(int b) const noexcept { return b < nx_ ? b : (ny_ - 1) * nx_ + (b - nx_); }
    Eigen::VectorXd trace(const Field& u) const;
    Field embed_trace(const Eigen::VectorXd& v) const;

    bool operator==(const Grid& other) const noexcept
    {
        return nx_ == other.nx_ && ny_ == other.ny_ && lx_ == other.lx_ && ly_ == other.ly_;
    }

private:
    int nx_;
    int ny_;
    double lx_;
    double ly_;
    Field mass_;
    Field bulk_mass_;
    Field surface_mass_;
};

Grid build_grid(int nx, int ny, double lx = 2.0 * std::numbers::pi, double ly = 1.0);

// Quadrature forms evaluated directly from difference quotients.
double inner_x2(const Grid& grid, const Field& u, const Field& v);
double bulk_inner(const Grid& grid, const Field& u, const Field& v);
double surface_inner(const Grid& grid, const Field& u, const Field& v);
double bulk_gradient_sq(const Grid& grid, const Field& u);
double surface_gradient_sq(const Grid& grid, const Field& u);
double bulk_power_sum(const Grid& grid, const Field& u, double p);     // int_Omega |u|^p
double surface_power_sum(const Grid& grid, const Field& u, double p);  // int_Gamma |u|^p

}  // namespace heatmem

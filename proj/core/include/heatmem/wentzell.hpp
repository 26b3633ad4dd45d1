#pragma once

#include "heatmem/grid.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <memory>

namespace heatmem {

using SparseMatrix = Eigen::SparseMatrix<double>;

struct WentzellParams {
    double alpha = 1.0;
    double beta = 1.0;
    double nu = 0.5;
    double omega = 0.5;
};

class OperatorError : public std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Discrete Wentzell Laplacian. Every block is stored as a symmetric
// stiffness matrix K (a quadrature form); the X^2 operator is M^{-1} K with
// the diagonal mass M from the grid, so self-adjointness in X^2 and the
// discrete Green identity hold exactly.
class WentzellOperator {
public:
    WentzellOperator(Grid grid, WentzellParams params);

    const Grid& grid() const noexcept { return grid_; }
    const WentzellParams& params() const noexcept { return params_; }

    // omega (grad, grad) + alpha omega (., .) + nu [(grad_G, grad_G) + beta (., .)_G]
    const SparseMatrix& full_form() const noexcept { return full_; }
    // Same with alpha = 0: the implicit part of the evolution.
    const SparseMatrix& principal_form() const noexcept { return principal_; }
    // omega (grad, grad) + alpha omega (., .): the alpha,0,0,omega block.
    const SparseMatrix& bulk_form() const noexcept { return bulk_; }
    // (grad_G, grad_G) + beta (., .)_G embedded on the full grid: B.
    const SparseMatrix& surface_form() const noexcept { return surface_; }
    // V^1 Gram form (grad, grad) + alpha (., .) + (grad_G, grad_G) + beta (., .)_G.
    const SparseMatrix& gram_form() const noexcept { return gram_; }
    // Unweighted pieces.
    const SparseMatrix& bulk_gradient_form() const noexcept { return bulk_grad_; }
    const SparseMatrix& surface_gradient_form() const noexcept { return surface_grad_; }

    Field apply(const Field& u) const;             // A_W^{alpha,beta,nu,omega} u
    Field apply_bulk_block(const Field& u) const;  // A_W^{alpha,0,0,omega} u
    Eigen::VectorXd apply_boundary_block(const Eigen::VectorXd& v) const;  // B v on the trace

    // Separate bulk and boundary rows of the operator, in the strong sense:
    // bulk = -omega Lap u + alpha omega u at every node (one-sided closure at
    // the boundary rows), trace = omega d_n u + nu B v on the boundary.
    struct Components {
        Field bulk;
        Eigen::VectorXd trace;
    };
    Components components(const Field& u) const;

private:
    Grid grid_;
    WentzellParams params_;
    SparseMatrix bulk_grad_;
    SparseMatrix surface_grad_;
    SparseMatrix full_;
    SparseMatrix principal_;
    SparseMatrix bulk_;
    SparseMatrix surface_;
    SparseMatrix gram_;
};

WentzellOperator assemble_wentzell(const Grid& grid, double alpha, double beta, double nu, double omega);

SparseMatrix diagonal_matrix(const Field& d);

enum class NormKind { x2, v1, v_minus1 };

double norm(const Grid& grid, const Field& u, NormKind which, double alpha, double beta);

// V^{-1} norm with a cached factorization of the V^1 Gram form; the dual of
// V^1 is realized as sqrt(<G^{-1} U, U>_{X^2}) with G = M^{-1} gram_form.
class DualNorm {
public:
    DualNorm(const Grid& grid, double alpha, double beta);

    double operator()(const Field& u) const;
    double squared(const Field& u) const;

private:
    Grid grid_;
    std::shared_ptr<Eigen::SimplicialLDLT<SparseMatrix>> solver_;
};

}  // namespace heatmem

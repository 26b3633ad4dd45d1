#pragma once

#include "heatmem/grid.hpp"

#include <functional>
#include <stdexcept>
#include <vector>

namespace heatmem {

class NonlinearityError : public std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Real polynomial with coefficients in ascending order; trailing zeros are
// trimmed so that degree() and leading() refer to the true top term.
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(std::vector<double> ascending);

    double operator()(double s) const;
    Polynomial derivative() const;
    Polynomial antiderivative() const;  // vanishes at 0
    Polynomial times_s() const;         // p(s) s

    bool is_zero() const noexcept { return coeffs_.empty(); }
    int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
    double leading() const noexcept { return coeffs_.empty() ? 0.0 : coeffs_.back(); }
    double coefficient(int k) const noexcept;
    const std::vector<double>& coefficients() const noexcept { return coeffs_; }

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator*(double c, const Polynomial& p);

private:
    std::vector<double> coeffs_;
};

// Global minimum of a continuous function that tends to +infinity in both
// directions: dense sampling on [-radius, radius] followed by golden-section
// refinement of every sampled local minimum.
double global_minimum(const std::function<double(double)>& fn, double radius);

// inf over the real line; -infinity when unbounded below.
double polynomial_lower_bound(const Polynomial& p);

// Constants of the growth and dissipativity assumptions, as certified by
// coefficient analysis plus dense sampling.
struct NonlinearityConstants {
    double ell1 = 0;  // |f'(s)| <= ell1 (1 + s^2)
    double ell2 = 0;  // |g'(s)| <= ell2 (1 + |s|^d)
    double d = 2;
    double r = 4;     // boundary dissipation exponent
    double kappa1 = 0, kappa2 = 0;  // f(s)s >= kappa1 s^4 - kappa2
    double kappa3 = 0, kappa4 = 0;  // g~(s)s >= kappa3 |s|^r - kappa4
    double m_f = 0, m_g = 0;        // f' >= -M_f, g' >= -M_g
    double c[8] = {};               // C1..C8 of the quasi-strong lower bounds

    bool weak_class = false;         // growth plus dissipativity for f and g~
    bool quasi_strong_class = false;  // derivative bounds plus lower bounds
};

// f in the bulk and g~(s) = g(s) - omega beta s on the boundary.
class Nonlinearity {
public:
    Nonlinearity(Polynomial f, Polynomial g, double omega, double beta, double r = 4.0);

    static Nonlinearity none(double omega, double beta);

    const Polynomial& f() const noexcept { return f_; }
    const Polynomial& g() const noexcept { return g_; }
    const Polynomial& g_tilde() const noexcept { return g_tilde_; }
    double h_f(double s) const { return h_f_(s); }
    double h_g(double s) const { return h_g_(s); }
    bool is_linear() const noexcept { return f_.is_zero() && g_.is_zero(); }

    const NonlinearityConstants& constants() const noexcept { return constants_; }

    // Quadrature form of F(U) = (f(u), g~(u)): bulk weight times f plus
    // surface weight times g~, node by node.
    Field load_form(const Grid& grid, const Field& u) const;
    // <F(U), U>_{X^2}.
    double pairing(const Grid& grid, const Field& u) const;

private:
    Polynomial f_, g_, g_tilde_;
    Polynomial h_f_, h_g_;
    double omega_, beta_;
    NonlinearityConstants constants_;
};

// Throws when a nonzero polynomial has even degree or a nonpositive leading
// coefficient. Zero polynomials are accepted and give a linear problem.
Nonlinearity make_nonlinearity(const Polynomial& f, const Polynomial& g, double omega, double beta,
                               double r = 4.0);

}  // namespace heatmem

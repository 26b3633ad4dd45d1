#pragma once

#include <limits>
#include <span>
#include <vector>

namespace heatmem {

// E_n(x) = \int_0^1 e^{-x t} t^n dt for n = 0, 1, 2, accurate for all x >= 0.
double exp_moment(int n, double x);

// \int_0^h e^{-rate t} (c0 + c1 t + c2 t^2) dt; h may be +infinity.
double integrate_exp_quadratic(double rate, double h, double c0, double c1, double c2);

// Weight function sum_i amp_i e^{-rate_i s}.
struct ExpSum {
    std::vector<double> amp;
    std::vector<double> rate;

    double operator()(double s) const;
};

// q(s) = a + b (s - start) + c (s - start)^2 on [start, start + length].
struct QuadraticPiece {
    double start = 0;
    double length = 0;  // +infinity allowed
    double a = 0;
    double b = 0;
    double c = 0;
};

inline constexpr double unbounded = std::numeric_limits<double>::infinity();

// \int_lo^hi w(s) q(s) ds over the union of pieces, clipped to [lo, hi].
double integrate_pieces(const ExpSum& weight, std::span<const QuadraticPiece> pieces,
                        double lo = 0.0, double hi = unbounded);

}  // namespace heatmem

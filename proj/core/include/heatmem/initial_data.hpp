#pragma once

#include "heatmem/exp_quadrature.hpp"
#include "heatmem/grid.hpp"

#include <cstdint>
#include <vector>

namespace heatmem {

// Scalar profile g(s) of a separable initial history phi(x) g(s).
// Piecewise linear through the knots, then linear with tail_slope.
class HistoryProfile {
public:
    HistoryProfile() = default;
    HistoryProfile(std::vector<double> knots, std::vector<double> values, double tail_slope);

    static HistoryProfile zero();
    static HistoryProfile ramp();                   // g(s) = s: constant past value
    static HistoryProfile saturating(double level);  // g(s) = min(s, level)

    double operator()(double s) const;
    double slope(double s) const;  // right derivative
    bool vanishes_at_origin() const { return values_.front() == 0.0; }
    bool is_zero() const;

    const std::vector<double>& knots() const { return knots_; }
    const std::vector<double>& values() const { return values_; }
    double tail_slope() const { return tail_slope_; }

    // \int_0^inf rate e^{-rate s} g(s) ds, and the same for g^2 and g'^2.
    double density_moment(double rate) const;
    double density_square_moment(double rate) const;
    double density_slope_square_moment(double rate) const;

    // g^2 as quadratic pieces starting at offset, for weighted integrals.
    std::vector<QuadraticPiece> square_pieces(double offset) const;

private:
    std::vector<double> knots_{0.0};
    std::vector<double> values_{0.0};
    double tail_slope_ = 0.0;
};

struct InitialHistory {
    Field field;
    HistoryProfile profile;
};

struct BandLimitedSpec {
    std::uint64_t seed = 1;
    double amplitude = 1.0;  // root-mean-square value in X^2
    int x_modes = 4;
    int y_degree = 3;
};

Field bandlimited_field(const Grid& grid, const BandLimitedSpec& spec);

// Smooth deterministic field cos(kx) P_p(y) used as a low-mode probe.
Field mode_field(const Grid& grid, int kx, int py);

}  // namespace heatmem

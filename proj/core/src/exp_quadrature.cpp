#include "heatmem/exp_quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace heatmem {

double exp_moment(int n, double x)
{
    if (n < 0 || n > 2)
        throw std::invalid_argument("exp_moment: order must be 0, 1 or 2");
    if (x < 0.5) {
        // sum_k (-x)^k / (k! (n + k + 1))
        double term = 1.0;
        double sum = 0.0;
        for (int k = 0; k < 40; ++k) {
            const double add = term / (n + k + 1);
            sum += add;
            if (std::abs(add) < 1e-18 * std::abs(sum))
                break;
            term *= -x / (k + 1);
        }
        return sum;
    }
    const double e = std::exp(-x);
    switch (n) {
    case 0:
        return -std::expm1(-x) / x;
    case 1:
        return (1.0 - e * (1.0 + x)) / (x * x);
    default:
        return (2.0 - e * (2.0 + 2.0 * x + x * x)) / (x * x * x);
    }
}

double integrate_exp_quadratic(double rate, double h, double c0, double c1, double c2)
{
    if (h <= 0.0)
        return 0.0;
    if (std::isinf(h))
        return c0 / rate + c1 / (rate * rate) + 2.0 * c2 / (rate * rate * rate);
    const double x = rate * h;
    return h * (c0 * exp_moment(0, x) + c1 * h * exp_moment(1, x) + c2 * h * h * exp_moment(2, x));
}

double ExpSum::operator()(double s) const
{
    double sum = 0.0;
    for (std::size_t i = 0; i < amp.size(); ++i)
        sum += amp[i] * std::exp(-rate[i] * s);
    return sum;
}

double integrate_pieces(const ExpSum& weight, std::span<const QuadraticPiece> pieces, double lo,
                        double hi)
{
    double total = 0.0;
    for (const auto& p : pieces) {
        const double end = p.start + p.length;
        const double a = std::max(lo, p.start);
        const double b = std::min(hi, end);
        if (!(b > a))
            continue;
        // Re-expand q about the clipped start.
        const double d = a - p.start;
        const double c0 = p.a + p.b * d + p.c * d * d;
        const double c1 = p.b + 2.0 * p.c * d;
        const double c2 = p.c;
        const double len = std::isinf(b) ? unbounded : b - a;
        for (std::size_t i = 0; i < weight.amp.size(); ++i) {
            const double scale = weight.amp[i] * std::exp(-weight.rate[i] * a);
            if (scale == 0.0)
                continue;
            total += scale * integrate_exp_quadratic(weight.rate[i], len, c0, c1, c2);
        }
    }
    return total;
}

}  // namespace heatmem

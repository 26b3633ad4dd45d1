#include "heatmem/initial_data.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace heatmem {

HistoryProfile::HistoryProfile(std::vector<double> knots, std::vector<double> values, double tail_slope)
    : knots_(std::move(knots)), values_(std::move(values)), tail_slope_(tail_slope)
{
    if (knots_.empty() || knots_.size() != values_.size())
        throw std::invalid_argument("history profile needs matching nonempty knots and values");
    if (knots_.front() != 0.0)
        throw std::invalid_argument("history profile must start at s = 0");
    for (std::size_t k = 1; k < knots_.size(); ++k)
        if (!(knots_[k] > knots_[k - 1]))
            throw std::invalid_argument("history profile knots must increase");
}

HistoryProfile HistoryProfile::zero()
{
    return {};
}

HistoryProfile HistoryProfile::ramp()
{
    return HistoryProfile({0.0}, {0.0}, 1.0);
}

HistoryProfile HistoryProfile::saturating(double level)
{
    if (!(level > 0.0))
        throw std::invalid_argument("saturation level must be positive");
    return HistoryProfile({0.0, level}, {0.0, level}, 0.0);
}

bool HistoryProfile::is_zero() const
{
    return tail_slope_ == 0.0 && std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
}

double HistoryProfile::operator()(double s) const
{
    if (s >= knots_.back())
        return values_.back() + tail_slope_ * (s - knots_.back());
    const auto it = std::upper_bound(knots_.begin(), knots_.end(), s);
    const std::size_t k = static_cast<std::size_t>(it - knots_.begin()) - 1;
    const double t = (s - knots_[k]) / (knots_[k + 1] - knots_[k]);
    return values_[k] + t * (values_[k + 1] - values_[k]);
}

double HistoryProfile::slope(double s) const
{
    if (s >= knots_.back())
        return tail_slope_;
    const auto it = std::upper_bound(knots_.begin(), knots_.end(), s);
    const std::size_t k = static_cast<std::size_t>(it - knots_.begin()) - 1;
    return (values_[k + 1] - values_[k]) / (knots_[k + 1] - knots_[k]);
}

namespace {

// Linear pieces of g: (start, length, value at start, slope).
struct LinearPiece {
    double start, length, value, slope;
};

std::vector<LinearPiece> linear_pieces(const HistoryProfile& g)
{
    const auto& s = g.knots();
    const auto& v = g.values();
    std::vector<LinearPiece> out;
    for (std::size_t k = 0; k + 1 < s.size(); ++k) {
        const double h = s[k + 1] - s[k];
        out.push_back({s[k], h, v[k], (v[k + 1] - v[k]) / h});
    }
    out.push_back({s.back(), unbounded, v.back(), g.tail_slope()});
    return out;
}

}  // namespace

std::vector<QuadraticPiece> HistoryProfile::square_pieces(double offset) const
{
    std::vector<QuadraticPiece> out;
    for (const auto& p : linear_pieces(*this))
        out.push_back({offset + p.start, p.length, p.value * p.value, 2.0 * p.value * p.slope,
                       p.slope * p.slope});
    return out;
}

double HistoryProfile::density_moment(double rate) const
{
    std::vector<QuadraticPiece> pieces;
    for (const auto& p : linear_pieces(*this))
        pieces.push_back({p.start, p.length, p.value, p.slope, 0.0});
    return integrate_pieces(ExpSum{{rate}, {rate}}, pieces);
}

double HistoryProfile::density_square_moment(double rate) const
{
    const auto pieces = square_pieces(0.0);
    return integrate_pieces(ExpSum{{rate}, {rate}}, pieces);
}

double HistoryProfile::density_slope_square_moment(double rate) const
{
    std::vector<QuadraticPiece> pieces;
    for (const auto& p : linear_pieces(*this))
        pieces.push_back({p.start, p.length, p.slope * p.slope, 0.0, 0.0});
    return integrate_pieces(ExpSum{{rate}, {rate}}, pieces);
}

namespace {

double legendre(int p, double z)
{
    double prev = 1.0;
    if (p == 0)
        return prev;
    double cur = z;
    for (int n = 1; n < p; ++n) {
        const double next = ((2.0 * n + 1.0) * z * cur - n * prev) / (n + 1.0);
        prev = cur;
        cur = next;
    }
    return cur;
}

}  // namespace

Field mode_field(const Grid& grid, int kx, int py)
{
    Field u(grid.size());
    for (int j = 0; j < grid.ny(); ++j) {
        const double z = 2.0 * grid.y(j) / grid.ly() - 1.0;
        for (int i = 0; i < grid.nx(); ++i) {
            const double x = 2.0 * std::numbers::pi * grid.x(i) / grid.lx();
            u[grid.index(i, j)] = std::cos(kx * x) * legendre(py, z);
        }
    }
    return u;
}

Field bandlimited_field(const Grid& grid, const BandLimitedSpec& spec)
{
    if (spec.x_modes < 0 || spec.y_degree < 0)
        throw std::invalid_argument("band limits must be nonnegative");
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);

    Field u = Field::Zero(grid.size());
    for (int k = 0; k <= spec.x_modes; ++k)
        for (int p = 0; p <= spec.y_degree; ++p) {
            const double damp = 1.0 / ((1.0 + k) * (1.0 + p));
            const double a = coef(rng) * damp;
            const double b = k == 0 ? 0.0 : coef(rng) * damp;
            for (int j = 0; j < grid.ny(); ++j) {
                const double lp = legendre(p, 2.0 * grid.y(j) / grid.ly() - 1.0);
                for (int i = 0; i < grid.nx(); ++i) {
                    const double x = 2.0 * std::numbers::pi * grid.x(i) / grid.lx();
                    u[grid.index(i, j)] += (a * std::cos(k * x) + b * std::sin(k * x)) * lp;
                }
            }
        }
    const double total = grid.bulk_measure() + grid.boundary_measure();
    const double rms = std::sqrt(inner_x2(grid, u, u) / total);
    if (rms > 0.0)
        u *= spec.amplitude / rms;
    return u;
}

}  // namespace heatmem

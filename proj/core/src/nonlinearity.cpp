#include "heatmem/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace heatmem {

Polynomial::Polynomial(std::vector<double> ascending) : coeffs_(std::move(ascending))
{
    for (double c : coeffs_)
        if (!std::isfinite(c))
            throw NonlinearityError("polynomial coefficients must be finite");
    while (!coeffs_.empty() && coeffs_.back() == 0.0)
        coeffs_.pop_back();
}

double Polynomial::operator()(double s) const
{
    double acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it)
        acc = acc * s + *it;
    return acc;
}

double Polynomial::coefficient(int k) const noexcept
{
    return k >= 0 && k < static_cast<int>(coeffs_.size()) ? coeffs_[static_cast<std::size_t>(k)] : 0.0;
}

Polynomial Polynomial::derivative() const
{
    std::vector<double> out;
    for (std::size_t k = 1; k < coeffs_.size(); ++k)
        out.push_back(static_cast<double>(k) * coeffs_[k]);
    return Polynomial(std::move(out));
}

Polynomial Polynomial::antiderivative() const
{
    std::vector<double> out{0.0};
    for (std::size_t k = 0; k < coeffs_.size(); ++k)
        out.push_back(coeffs_[k] / static_cast<double>(k + 1));
    return Polynomial(std::move(out));
}

Polynomial Polynomial::times_s() const
{
    if (coeffs_.empty())
        return {};
    std::vector<double> out{0.0};
    out.insert(out.end(), coeffs_.begin(), coeffs_.end());
    return Polynomial(std::move(out));
}

Polynomial operator+(const Polynomial& a, const Polynomial& b)
{
    std::vector<double> out(std::max(a.coeffs_.size(), b.coeffs_.size()), 0.0);
    for (std::size_t k = 0; k < out.size(); ++k)
        out[k] = a.coefficient(static_cast<int>(k)) + b.coefficient(static_cast<int>(k));
    return Polynomial(std::move(out));
}

Polynomial operator*(double c, const Polynomial& p)
{
    std::vector<double> out = p.coeffs_;
    for (double& x : out)
        x *= c;
    return Polynomial(std::move(out));
}

double global_minimum(const std::function<double(double)>& fn, double radius)
{
    constexpr int samples = 200'000;
    const double step = 2.0 * radius / samples;
    std::vector<double> values(samples + 1);
    for (int i = 0; i <= samples; ++i)
        values[static_cast<std::size_t>(i)] = fn(-radius + step * i);

    double best = *std::min_element(values.begin(), values.end());
    const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int i = 1; i < samples; ++i) {
        const auto k = static_cast<std::size_t>(i);
        if (!(values[k] <= values[k - 1] && values[k] <= values[k + 1]))
            continue;
        double a = -radius + step * (i - 1);
        double b = -radius + step * (i + 1);
        double x1 = b - golden * (b - a);
        double x2 = a + golden * (b - a);
        double f1 = fn(x1), f2 = fn(x2);
        for (int it = 0; it < 80 && b - a > 1e-15 * (1.0 + std::abs(a)); ++it) {
            if (f1 < f2) {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - golden * (b - a);
                f1 = fn(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + golden * (b - a);
                f2 = fn(x2);
            }
        }
        best = std::min({best, f1, f2});
    }
    return best;
}

namespace {

// Radius beyond which the leading term dominates all others.
double cauchy_radius(const Polynomial& p)
{
    if (p.degree() < 1)
        return 50.0;
    double bound = 0.0;
    for (int k = 0; k < p.degree(); ++k)
        bound = std::max(bound, std::abs(p.coefficient(k) / p.leading()));
    return std::max(50.0, 2.0 * (1.0 + bound));
}

}  // namespace

double polynomial_lower_bound(const Polynomial& p)
{
    if (p.is_zero())
        return 0.0;
    if (p.degree() == 0)
        return p.leading();
    if (p.degree() % 2 != 0 || p.leading() < 0.0)
        return -std::numeric_limits<double>::infinity();
    return global_minimum([&](double s) { return p(s); }, cauchy_radius(p));
}

namespace {

double abs_sum_weighted(const Polynomial& p)
{
    double sum = 0.0;
    for (int k = 1; k <= p.degree(); ++k)
        sum += k * std::abs(p.coefficient(k));
    return sum;
}

// Dissipativity constants for p(s) = q(s) s >= kappa |s|^r - kappa_tail.
// The candidate kappa is the leading coefficient when that leaves a
// remainder bounded below, half of it otherwise.
std::pair<double, double> dissipativity(const Polynomial& q, double r, bool& ok)
{
    const Polynomial p = q.times_s();
    if (p.is_zero() || p.degree() < r) {
        ok = false;
        return {0.0, 0.0};
    }
    const double lead = p.leading();
    const double radius = cauchy_radius(p);
    auto remainder = [&](double kappa) {
        return [&, kappa](double s) { return p(s) - kappa * std::pow(std::abs(s), r); };
    };
    double kappa = lead;
    if (p.degree() == r) {
        // The remainder is a polynomial of lower degree when r is the degree.
        std::vector<double> rest = p.coefficients();
        rest.back() = 0.0;
        if (!std::isfinite(polynomial_lower_bound(Polynomial(rest))))
            kappa = 0.5 * lead;
    }
    double floor = 0.0;
    if (r == std::floor(r) && static_cast<int>(r) % 2 == 0) {
        // |s|^r = s^r: the remainder is a polynomial and cancels exactly.
        std::vector<double> rest = p.coefficients();
        rest[static_cast<std::size_t>(r)] -= kappa;
        floor = polynomial_lower_bound(Polynomial(rest));
    } else {
        floor = global_minimum(remainder(kappa), radius);
    }
    return {kappa, std::max(0.0, -floor)};
}

}  // namespace

Nonlinearity::Nonlinearity(Polynomial f, Polynomial g, double omega, double beta, double r)
    : f_(std::move(f)), g_(std::move(g)), omega_(omega), beta_(beta)
{
    if (!(r >= 2.0))
        throw NonlinearityError("boundary exponent r must be at least 2");
    g_tilde_ = g_ + Polynomial({0.0, -omega_ * beta_});
    h_f_ = f_.derivative().times_s().antiderivative();
    h_g_ = g_tilde_.derivative().times_s().antiderivative();

    auto& c = constants_;
    c.r = r;
    c.ell1 = abs_sum_weighted(f_);
    c.ell2 = abs_sum_weighted(g_);
    c.d = std::max(2, g_.degree() - 1);

    bool f_ok = true, g_ok = true;
    std::tie(c.kappa1, c.kappa2) = dissipativity(f_, 4.0, f_ok);
    std::tie(c.kappa3, c.kappa4) = dissipativity(g_tilde_, r, g_ok);

    const double min_df = polynomial_lower_bound(f_.derivative());
    const double min_dg = polynomial_lower_bound(g_.derivative());
    c.m_f = std::max(0.0, -min_df);
    c.m_g = std::max(0.0, -min_dg);
    c.c[1] = std::max(0.0, -polynomial_lower_bound(f_.times_s()));
    c.c[3] = std::max(0.0, -polynomial_lower_bound(g_.times_s()));
    c.c[5] = std::max(0.0, -polynomial_lower_bound(h_f_));
    c.c[7] = std::max(0.0, -polynomial_lower_bound(h_g_));

    const bool growth = f_.degree() <= 3 && g_.degree() <= static_cast<int>(c.d) + 1;
    c.weak_class = growth && f_ok && g_ok;
    c.quasi_strong_class = growth && std::isfinite(min_df) && std::isfinite(min_dg) &&
                           std::isfinite(c.c[1]) && std::isfinite(c.c[3]) && std::isfinite(c.c[5]) &&
                           std::isfinite(c.c[7]);
}

Nonlinearity Nonlinearity::none(double omega, double beta)
{
    return Nonlinearity({}, {}, omega, beta);
}

Field Nonlinearity::load_form(const Grid& grid, const Field& u) const
{
    if (u.size() != grid.size())
        throw GridError("field size does not match grid");
    const Field& wb = grid.bulk_mass();
    const Field& ws = grid.surface_mass();
    Field out(grid.size());
    for (int n = 0; n < grid.size(); ++n) {
        out[n] = wb[n] * f_(u[n]);
        if (ws[n] != 0.0)
            out[n] += ws[n] * g_tilde_(u[n]);
    }
    return out;
}

double Nonlinearity::pairing(const Grid& grid, const Field& u) const
{
    return load_form(grid, u).dot(u);
}

Nonlinearity make_nonlinearity(const Polynomial& f, const Polynomial& g, double omega, double beta, double r)
{
    for (const auto* p : {&f, &g}) {
        if (p->is_zero())
            continue;
        if (p->leading() <= 0.0)
            throw NonlinearityError("nonlinearity must have a positive leading coefficient");
        if (p->degree() % 2 == 0)
            throw NonlinearityError("nonlinearity must have odd degree");
    }
    return Nonlinearity(f, g, omega, beta, r);
}

}  // namespace heatmem

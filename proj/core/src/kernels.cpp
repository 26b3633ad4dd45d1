#include "heatmem/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace heatmem {

std::string to_string(Region r)
{
    return r == Region::bulk ? "bulk" : "boundary";
}

MemoryKernel build_kernel(Region region, std::vector<double> weights, std::vector<double> rates,
                          double omega, bool allow_zero_omega)
{
    using K = KernelError::Kind;
    if (weights.empty() || weights.size() != rates.size())
        throw KernelError(K::size_mismatch, "kernel weights and rates must be nonempty and of equal length");
    for (double a : weights)
        if (!(a >= 0.0))
            throw KernelError(K::negative_weight, "kernel weights must be nonnegative");
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (!(std::abs(total - 1.0) <= 1e-12))
        throw KernelError(K::weights_not_normalized,
                          "kernel weights must sum to 1 (got " + std::to_string(total) + ")");
    for (double l : rates)
        if (!(l > 0.0) || !std::isfinite(l))
            throw KernelError(K::nonpositive_rate, "kernel rates must be positive and finite");
    const bool omega_ok = allow_zero_omega ? (omega >= 0.0 && omega < 1.0) : (omega > 0.0 && omega < 1.0);
    if (!omega_ok)
        throw KernelError(K::omega_out_of_range, "omega must lie in (0,1)");

    MemoryKernel kernel;
    kernel.region_ = region;
    kernel.weights_ = std::move(weights);
    kernel.rates_ = std::move(rates);
    kernel.omega_ = omega;
    return kernel;
}

MemoryKernel make_exponential_kernel(Region region, std::vector<double> weights,
                                     std::vector<double> rates, double omega)
{
    return build_kernel(region, std::move(weights), std::move(rates), omega, false);
}

MemoryKernel make_reference_kernel(Region region, std::vector<double> weights,
                                   std::vector<double> rates, double omega)
{
    return build_kernel(region, std::move(weights), std::move(rates), omega, true);
}

double MemoryKernel::k(double s) const
{
    double sum = 0.0;
    for (std::size_t i = 0; i < rates_.size(); ++i)
        sum += weights_[i] * rates_[i] * std::exp(-rates_[i] * s);
    return sum;
}

double MemoryKernel::mu(double s) const
{
    double sum = 0.0;
    for (std::size_t i = 0; i < rates_.size(); ++i)
        sum += weights_[i] * rates_[i] * rates_[i] * std::exp(-rates_[i] * s);
    return (1.0 - omega_) * sum;
}

double MemoryKernel::mu_prime(double s) const
{
    double sum = 0.0;
    for (std::size_t i = 0; i < rates_.size(); ++i)
        sum += weights_[i] * rates_[i] * rates_[i] * rates_[i] * std::exp(-rates_[i] * s);
    return -(1.0 - omega_) * sum;
}

double MemoryKernel::k0() const
{
    double sum = 0.0;
    for (std::size_t i = 0; i < rates_.size(); ++i)
        sum += weights_[i] * rates_[i];
    return sum;
}

double MemoryKernel::delta() const
{
    return *std::min_element(rates_.begin(), rates_.end());
}

double MemoryKernel::mass() const
{
    return (1.0 - omega_) * k0();
}

double MemoryKernel::mode_mass(std::size_t i) const
{
    return (1.0 - omega_) * weights_.at(i) * rates_.at(i);
}

double MemoryKernel::window_cutoff(double rel_tol) const
{
    const double target = rel_tol * mu(0.0);
    if (target <= 0.0)
        return 0.0;
    // mu is strictly decreasing; bracket then bisect.
    double hi = 1.0 / delta();
    while (mu(hi) > target)
        hi *= 2.0;
    double lo = 0.0;
    for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (mu(mid) > target ? lo : hi) = mid;
    }
    return hi;
}

ValidationReport validate_kernel(const MemoryKernel& kernel)
{
    ValidationReport rep;
    rep.delta = kernel.delta();
    rep.k0 = kernel.k0();
    rep.mass = kernel.mass();

    const double one_minus_omega = 1.0 - kernel.omega();
    const auto a = kernel.weights();
    const auto l = kernel.rates();

    // Each term c_i e^{-l_i s} has c_i = (1-omega) a_i l_i^2 for mu and
    // -(1-omega) a_i l_i^3 for mu'. Sign conditions per term imply the
    // conditions for the sum.
    rep.mu1 = std::all_of(l.begin(), l.end(), [](double r) { return r > 0.0 && std::isfinite(r); });
    rep.mu2 = one_minus_omega >= 0.0 && std::all_of(a.begin(), a.end(), [](double w) { return w >= 0.0; });
    rep.mu3 = rep.mu2;
    bool decay = true;
    for (std::size_t i = 0; i < l.size(); ++i)
        decay = decay && (a[i] == 0.0 || l[i] >= rep.delta);
    rep.mu4 = rep.mu2 && decay && rep.delta > 0.0;
    return rep;
}

SmallnessFlags check_smallness(const MemoryKernel& kernel_gamma, double omega, double nu)
{
    if (kernel_gamma.region() != Region::boundary)
        throw KernelError(KernelError::Kind::region_mismatch,
                          "smallness conditions apply to the boundary kernel");
    const double k0 = kernel_gamma.k0();
    SmallnessFlags flags;
    flags.absorbing = k0 <= 4.0 / (1.0 - omega);
    flags.contraction = k0 < 2.0 / (1.0 - nu);
    return flags;
}

KernelValues eval_kernel(const MemoryKernel& kernel, double s)
{
    if (!(s >= 0.0))
        throw KernelError(KernelError::Kind::negative_time, "kernel evaluated at negative time");
    return {kernel.k(s), kernel.mu(s), kernel.mu_prime(s)};
}

}  // namespace heatmem

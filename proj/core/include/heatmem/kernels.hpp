#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace heatmem {

enum class Region { bulk, boundary };

std::string to_string(Region r);

class KernelError : public std::invalid_argument {
public:
    enum class Kind {
        weights_not_normalized,
        negative_weight,
        nonpositive_rate,
        omega_out_of_range,
        size_mismatch,
        region_mismatch,
        negative_time,
    };

    KernelError(Kind kind, const std::string& what)
        : std::invalid_argument(what), kind_(kind) {}

    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

// k(s) = sum_k a_k lambda_k exp(-lambda_k s), normalized so that its
// integral is one. mu(s) = -(1 - omega) k'(s).
class MemoryKernel {
public:
    Region region() const noexcept { return region_; }
    double omega() const noexcept { return omega_; }
    std::span<const double> weights() const noexcept { return weights_; }
    std::span<const double> rates() const noexcept { return rates_; }
    std::size_t mode_count() const noexcept { return rates_.size(); }

    double k(double s) const;
    double mu(double s) const;
    double mu_prime(double s) const;

    double k0() const;
    double delta() const;
    double mass() const;

    // Integral of mu against the normalized density lambda e^{-lambda s} of
    // mode i: mu(s) = sum_i mode_mass(i) * lambda_i e^{-lambda_i s}.
    double mode_mass(std::size_t i) const;

    // Smallest s with mu(s) <= rel_tol * mu(0).
    double window_cutoff(double rel_tol) const;

private:
    friend MemoryKernel build_kernel(Region, std::vector<double>, std::vector<double>,
                                     double, bool);
    MemoryKernel() = default;

    Region region_ = Region::bulk;
    std::vector<double> weights_;
    std::vector<double> rates_;
    double omega_ = 0.5;
};

MemoryKernel make_exponential_kernel(Region region, std::vector<double> weights,
                                     std::vector<double> rates, double omega);

// Same family with omega allowed in [0, 1).
MemoryKernel make_reference_kernel(Region region, std::vector<double> weights,
                                   std::vector<double> rates, double omega);

struct ValidationReport {
    double delta = 0;
    double mass = 0;
    double k0 = 0;
    bool mu1 = false;  // C^1 and integrable
    bool mu2 = false;  // mu >= 0
    bool mu3 = false;  // mu' <= 0
    bool mu4 = false;  // mu' + delta mu <= 0

    bool all() const noexcept { return mu1 && mu2 && mu3 && mu4; }
};

ValidationReport validate_kernel(const MemoryKernel& kernel);

struct SmallnessFlags {
    bool absorbing = false;    // k_G(0) <= 4 / (1 - omega)
    bool contraction = false;  // k_G(0) < 2 / (1 - nu)

    bool both() const noexcept { return absorbing && contraction; }
};

SmallnessFlags check_smallness(const MemoryKernel& kernel_gamma, double omega, double nu);

struct KernelValues {
    double k = 0;
    double mu = 0;
    double mu_prime = 0;
};

KernelValues eval_kernel(const MemoryKernel& kernel, double s);

}  // namespace heatmem

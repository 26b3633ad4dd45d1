#include <catch2/catch_amalgamated.hpp>

#include "heatmem/kernels.hpp"

#include <cmath>
#include <random>
#include <vector>

using namespace heatmem;
using Catch::Approx;

namespace {

// Random valid kernel with up to four modes.
MemoryKernel random_kernel(std::mt19937_64& rng, Region region)
{
    std::uniform_int_distribution<int> count(1, 4);
    std::uniform_real_distribution<double> unit(0.05, 1.0);
    std::uniform_real_distribution<double> rate(0.1, 20.0);
    std::uniform_real_distribution<double> om(0.01, 0.99);
    const int n = count(rng);
    std::vector<double> a(n), l(n);
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        a[i] = unit(rng);
        total += a[i];
        l[i] = rate(rng);
    }
    for (auto& x : a)
        x /= total;
    // Renormalize once more so the sum is 1 to rounding.
    double again = 0.0;
    for (double x : a)
        again += x;
    a.back() += 1.0 - again;
    return make_exponential_kernel(region, a, l, om(rng));
}

}  // namespace

TEST_CASE("single exponential kernel constants", "[kernels]") {
    const MemoryKernel k = make_exponential_kernel(Region::bulk, {1.0}, {1.0}, 0.5);
    CHECK(k.k0() == 1.0);
    CHECK(k.delta() == 1.0);
    CHECK(k.mass() == 0.5);
    CHECK(k.region() == Region::bulk);
}

TEST_CASE("two mode boundary kernel constants", "[kernels]") {
    const MemoryKernel k = make_exponential_kernel(Region::boundary, {0.5, 0.5}, {1.0, 4.0}, 0.5);
    const ValidationReport rep = validate_kernel(k);
    CHECK(rep.k0 == Approx(2.5).epsilon(1e-15));
    CHECK(rep.delta == 1.0);
    CHECK(rep.mass == Approx(1.25).epsilon(1e-15));
    CHECK(rep.all());
}

TEST_CASE("reference kernel allows omega zero", "[kernels]") {
    const MemoryKernel k = make_reference_kernel(Region::bulk, {1.0}, {2.0}, 0.0);
    const ValidationReport rep = validate_kernel(k);
    CHECK(rep.delta == 2.0);
    CHECK(rep.k0 == 2.0);
    CHECK(rep.mass == 2.0);
    CHECK_THROWS_AS(make_exponential_kernel(Region::bulk, {1.0}, {2.0}, 0.0), KernelError);
}

TEST_CASE("kernel construction errors are distinct", "[kernels][errors]") {
    auto kind_of = [](auto&& make) {
        try {
            make();
        } catch (const KernelError& e) {
            return e.kind();
        }
        FAIL("expected a KernelError");
        return KernelError::Kind::size_mismatch;
    };
    using K = KernelError::Kind;
    CHECK(kind_of([] { make_exponential_kernel(Region::bulk, {0.7, 0.4}, {1, 1}, 0.5); }) ==
          K::weights_not_normalized);
    CHECK(kind_of([] { make_exponential_kernel(Region::bulk, {1.0}, {0.0}, 0.5); }) == K::nonpositive_rate);
    CHECK(kind_of([] { make_exponential_kernel(Region::bulk, {1.0}, {-2.0}, 0.5); }) == K::nonpositive_rate);
    CHECK(kind_of([] { make_exponential_kernel(Region::bulk, {1.0}, {1.0}, 1.0); }) == K::omega_out_of_range);
    CHECK(kind_of([] { make_exponential_kernel(Region::bulk, {1.0}, {1.0}, -0.1); }) == K::omega_out_of_range);
    CHECK(kind_of([] { make_exponential_kernel(Region::bulk, {1.5, -0.5}, {1, 2}, 0.5); }) == K::negative_weight);
    CHECK(kind_of([] { make_exponential_kernel(Region::bulk, {1.0}, {1.0, 2.0}, 0.5); }) == K::size_mismatch);
}

TEST_CASE("kernel evaluation", "[kernels]") {
    const MemoryKernel k0 = make_reference_kernel(Region::bulk, {1.0}, {1.0}, 0.0);
    const KernelValues at0 = eval_kernel(k0, 0.0);
    CHECK(at0.k == 1.0);
    CHECK(at0.mu == 1.0);
    CHECK(at0.mu_prime == -1.0);

    const MemoryKernel k = make_exponential_kernel(Region::bulk, {1.0}, {1.0}, 0.5);
    CHECK(eval_kernel(k, std::log(2.0)).mu == Approx(0.25).epsilon(1e-15));

    const KernelValues far = eval_kernel(k, 800.0);
    CHECK(far.k == 0.0);
    CHECK(far.mu == 0.0);
    CHECK(far.mu_prime == 0.0);

    CHECK_THROWS_AS(eval_kernel(k, -1e-3), KernelError);
}

TEST_CASE("mu is minus (1 - omega) times k'", "[kernels][property]") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const MemoryKernel k = random_kernel(rng, Region::bulk);
        for (double s : {0.0, 0.01, 0.3, 1.0, 2.5}) {
            const double h = 1e-5;
            const double dk = s > 0.0 ? (k.k(s + h) - k.k(s - h)) / (2 * h)
                                      : (-3 * k.k(0) + 4 * k.k(h) - k.k(2 * h)) / (2 * h);
            CHECK(k.mu(s) == Approx(-(1.0 - k.omega()) * dk).epsilon(1e-5));
        }
    }
}

TEST_CASE("kernel hypotheses hold on a log-spaced sample", "[kernels][property]") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        const MemoryKernel k = random_kernel(rng, trial % 2 ? Region::bulk : Region::boundary);
        const ValidationReport rep = validate_kernel(k);
        REQUIRE(rep.all());
        for (int i = 0; i <= 60; ++i) {
            const double s = i == 0 ? 0.0 : std::pow(10.0, -4.0 + 7.0 * i / 60.0);
            const KernelValues v = eval_kernel(k, s);
            CHECK(v.mu >= 0.0);
            CHECK(v.mu_prime <= 0.0);
            // Absolute floor for values deep in the subnormal range.
            CHECK(v.mu_prime + rep.delta * v.mu <= 1e-12 * std::abs(v.mu_prime) + 1e-300);
        }
    }
}

TEST_CASE("mass is the integral of mu", "[kernels][property]") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 50; ++trial) {
        const MemoryKernel k = random_kernel(rng, Region::bulk);
        const double S = 0.7;
        // Composite Simpson on [0, S] with enough panels for 1e-10.
        const int n = 20000;
        const double h = S / n;
        double sum = k.mu(0.0) + k.mu(S);
        for (int i = 1; i < n; ++i)
            sum += (i % 2 ? 4.0 : 2.0) * k.mu(i * h);
        const double quad = sum * h / 3.0;

        double closed = 0.0;
        const auto a = k.weights();
        const auto l = k.rates();
        for (std::size_t i = 0; i < a.size(); ++i)
            closed += (1.0 - k.omega()) * a[i] * l[i] * (1.0 - std::exp(-l[i] * S));
        CHECK(quad == Approx(closed).epsilon(1e-10));

        // The total is (1 - omega) k(0).
        CHECK(k.mass() == Approx((1.0 - k.omega()) * k.k0()).epsilon(1e-15));
    }
}

TEST_CASE("smallness conditions", "[kernels]") {
    const MemoryKernel two = make_exponential_kernel(Region::boundary, {1.0}, {2.0}, 0.5);
    const SmallnessFlags f = check_smallness(two, 0.5, 0.5);
    CHECK(f.absorbing);
    CHECK(f.contraction);

    const MemoryKernel ten = make_exponential_kernel(Region::boundary, {1.0}, {10.0}, 0.5);
    CHECK_FALSE(check_smallness(ten, 0.5, 0.5).absorbing);

    // Boundary of each condition: <= is inclusive, < is strict.
    const MemoryKernel eight = make_exponential_kernel(Region::boundary, {1.0}, {8.0}, 0.5);
    CHECK(check_smallness(eight, 0.5, 0.5).absorbing);
    const MemoryKernel four = make_exponential_kernel(Region::boundary, {1.0}, {4.0}, 0.5);
    CHECK_FALSE(check_smallness(four, 0.5, 0.5).contraction);

    const MemoryKernel bulk = make_exponential_kernel(Region::bulk, {1.0}, {2.0}, 0.5);
    CHECK_THROWS_AS(check_smallness(bulk, 0.5, 0.5), KernelError);
}

TEST_CASE("smallness flags are monotone in k(0)", "[kernels][property]") {
    for (double omega : {0.1, 0.5, 0.9})
        for (double nu : {0.1, 0.5, 0.9}) {
            bool was_absorbing = true, was_contraction = true;
            for (double k0 = 0.25; k0 < 60.0; k0 *= 1.1) {
                const MemoryKernel k = make_exponential_kernel(Region::boundary, {1.0}, {k0}, omega);
                const SmallnessFlags f = check_smallness(k, omega, nu);
                CHECK((was_absorbing || !f.absorbing));
                CHECK((was_contraction || !f.contraction));
                was_absorbing = f.absorbing;
                was_contraction = f.contraction;
            }
        }
}

TEST_CASE("window cutoff reaches the relative tolerance", "[kernels]") {
    const MemoryKernel k = make_exponential_kernel(Region::bulk, {0.5, 0.5}, {1.0, 4.0}, 0.5);
    const double s = k.window_cutoff(1e-14);
    CHECK(k.mu(s) <= 1e-14 * k.mu(0.0) * (1.0 + 1e-9));
    CHECK(k.mu(0.99 * s) > 1e-14 * k.mu(0.0));
}

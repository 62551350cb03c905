#include <cmath>

#include "detmac/rng.hpp"
#include "doctest.h"

using namespace detmac;

TEST_CASE("same (seed, stream) regenerates bit-identical matrices") {
    const ComplexGaussianMatrix a = sample_complex_gaussian(20, 30, 0.25, 123, 7);
    const ComplexGaussianMatrix b = sample_complex_gaussian(20, 30, 0.25, 123, 7);
    CHECK(a.entries == b.entries);
}

TEST_CASE("different streams and seeds decorrelate") {
    const ComplexGaussianMatrix a = sample_complex_gaussian(4, 4, 1.0, 123, 7);
    const ComplexGaussianMatrix b = sample_complex_gaussian(4, 4, 1.0, 123, 8);
    const ComplexGaussianMatrix c = sample_complex_gaussian(4, 4, 1.0, 124, 7);
    CHECK_FALSE(a.entries == b.entries);
    CHECK_FALSE(a.entries == c.entries);
}

TEST_CASE("sampling moments over 1e6 draws") {
    const double variance = 0.37;
    const int n = 1000;
    const ComplexGaussianMatrix g = sample_complex_gaussian(n, n, variance, 2024, 0);
    double mean_re = 0.0, mean_im = 0.0, power = 0.0;
    for (const cplx& v : g.entries.data()) {
        mean_re += v.real();
        mean_im += v.imag();
        power += std::norm(v);
    }
    const double count = static_cast<double>(n) * n;
    mean_re /= count;
    mean_im /= count;
    power /= count;
    // component std is sqrt(v/2); mean of 1e6 components has std sqrt(v/2)/1e3
    const double mean_bound = 4.0 * std::sqrt(variance / count);
    CHECK(std::abs(mean_re) <= mean_bound);
    CHECK(std::abs(mean_im) <= mean_bound);
    CHECK(std::abs(power - variance) <= 4.0 * std::sqrt(2.0) * variance / 1e3);
}

TEST_CASE("entry power matches the requested variance at 1/1000") {
    const int n = 1000;
    const double variance = 1.0 / n;
    const ComplexGaussianMatrix g = sample_complex_gaussian(n, n, variance, 5, 5);
    double power = 0.0;
    for (const cplx& v : g.entries.data()) power += std::norm(v);
    power /= static_cast<double>(n) * n;
    // |X|^2 is exponential with mean v and std v, so the mean of 1e6 draws
    // has standard error v/1000.
    CHECK(std::abs(power - variance) <= 3.0 * variance / 1e3);
}

TEST_CASE("counter access is order-independent") {
    const CounterRng rng(9, 4);
    const std::uint64_t later = rng.bits(1000);
    const std::uint64_t early = rng.bits(3);
    CHECK(rng.bits(1000) == later);
    CHECK(rng.bits(3) == early);
}

TEST_CASE("variance must be positive") {
    CHECK_THROWS_AS((void)sample_complex_gaussian(2, 2, 0.0, 1, 1), std::invalid_argument);
}

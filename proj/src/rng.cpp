#include "detmac/rng.hpp"

#include <cmath>

namespace detmac {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// splitmix64 finalizer
std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_(mix(mix(seed + kGolden) ^ (stream + 0xD1B54A32D192ED03ULL))) {}

std::uint64_t CounterRng::bits(std::uint64_t counter) const {
    return mix(key_ + (counter + 1) * kGolden);
}

double CounterRng::uniform_open(std::uint64_t counter) const {
    // 53 mantissa bits, shifted into (0, 1]
    return static_cast<double>((bits(counter) >> 11) + 1) * 0x1.0p-53;
}

void CounterRng::normal_pair(std::uint64_t index, double& z0, double& z1) const {
    const double u1 = uniform_open(2 * index);
    const double u2 = uniform_open(2 * index + 1);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * M_PI * u2;
    z0 = r * std::cos(phi);
    z1 = r * std::sin(phi);
}

ComplexGaussianMatrix sample_complex_gaussian(int rows, int cols, double variance,
                                              std::uint64_t seed, std::uint64_t stream) {
    if (variance <= 0.0) throw std::invalid_argument("sample_complex_gaussian: variance must be > 0");
    ComplexGaussianMatrix g{CMatrix(rows, cols), variance, seed, stream};
    const CounterRng rng(seed, stream);
    const double component_sigma = std::sqrt(variance / 2.0);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) {
            double re, im;
            rng.normal_pair(static_cast<std::uint64_t>(i) * cols + j, re, im);
            g.entries(i, j) = cplx(component_sigma * re, component_sigma * im);
        }
    }
    return g;
}

}  // namespace detmac

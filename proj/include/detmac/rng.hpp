#ifndef DETMAC_RNG_HPP
#define DETMAC_RNG_HPP

#include <cstdint>

#include "detmac/hermitian.hpp"

namespace detmac {

/// Counter-based generator keyed by (seed, stream). Every draw is a pure
/// function of (key, counter), so streams can be evaluated in any order and
/// from any thread with bit-identical results.
class CounterRng {
  public:
    CounterRng(std::uint64_t seed, std::uint64_t stream);

    /// 64 uniform bits at the given counter.
    std::uint64_t bits(std::uint64_t counter) const;
    /// Uniform double in (0, 1].
    double uniform_open(std::uint64_t counter) const;
    /// Standard normal pair (Box-Muller) consuming counters 2i and 2i+1.
    void normal_pair(std::uint64_t index, double& z0, double& z1) const;

  private:
    std::uint64_t key_;
};

/// Matrix of i.i.d. complex Gaussians; real and imaginary parts are
/// independent N(0, variance/2) so that E|X|^2 = variance. Entries are a pure
/// function of (seed, stream) and bit-identical on regeneration.
struct ComplexGaussianMatrix {
    CMatrix entries;
    double variance = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
};

ComplexGaussianMatrix sample_complex_gaussian(int rows, int cols, double variance,
                                              std::uint64_t seed, std::uint64_t stream);

}  // namespace detmac

#endif

#ifndef DETMAC_TEST_SUPPORT_HPP
#define DETMAC_TEST_SUPPORT_HPP

#include <cmath>
#include <cstdint>
#include <vector>

#include "detmac/det_equiv.hpp"
#include "detmac/hermitian.hpp"
#include "detmac/rng.hpp"
#include "detmac/system.hpp"

namespace detmac::testing {

/// Random Hermitian nonnegative matrix with trace normalized to its
/// dimension (the convention correlation matrices follow). ridge > 0 keeps
/// the spectrum away from zero (invertible case).
inline HermitianMatrix random_normalized_psd(int dim, std::uint64_t seed, std::uint64_t stream,
                                             double ridge = 0.0) {
    const ComplexGaussianMatrix g = sample_complex_gaussian(dim, dim, 1.0, seed, stream);
    HermitianMatrix m = HermitianMatrix::gram(g.entries);
    m = m.scaled(1.0 / dim);
    if (ridge > 0.0) m.add_scaled(HermitianMatrix::identity(dim), ridge);
    return m.scaled(dim / m.trace());
}

/// Marchenko-Pastur reference configuration: one user, identity correlation
/// on both sides, square dimensions.
inline SystemConfig mp_config(int n, double sigma2 = 1.0) {
    SystemConfig cfg;
    cfg.num_users = 1;
    cfg.num_rx = n;
    cfg.num_tx = {n};
    cfg.rx_corr = {HermitianMatrix::identity(n)};
    cfg.tx_corr = {HermitianMatrix::identity(n)};
    cfg.sigma2 = sigma2;
    cfg.power_budget = {1.0};
    return cfg;
}

struct RandomConfigSpec {
    int max_users = 3;
    int max_rx = 16;
    int max_tx = 16;
    double ridge = 0.0;  // > 0 makes every correlation matrix invertible
    bool with_offset = false;
};

/// Deterministic pseudo-random system configuration for property tests.
inline SystemConfig random_config(std::uint64_t seed, const RandomConfigSpec& spec = {}) {
    const CounterRng rng(seed, 0x7357);
    SystemConfig cfg;
    cfg.num_users = 1 + static_cast<int>(rng.bits(0) % spec.max_users);
    cfg.num_rx = 2 + static_cast<int>(rng.bits(1) % (spec.max_rx - 1));
    for (int k = 0; k < cfg.num_users; ++k) {
        const int n = 2 + static_cast<int>(rng.bits(10 + k) % (spec.max_tx - 1));
        cfg.num_tx.push_back(n);
        cfg.rx_corr.push_back(random_normalized_psd(cfg.num_rx, seed, 100 + k, spec.ridge));
        cfg.tx_corr.push_back(random_normalized_psd(n, seed, 200 + k, spec.ridge));
        cfg.power_budget.push_back(0.5 + rng.uniform_open(20 + k));
    }
    if (spec.with_offset) {
        HermitianMatrix s = random_normalized_psd(cfg.num_rx, seed, 300);
        cfg.offset = s.scaled(0.5);
    }
    cfg.sigma2 = 0.2 + rng.uniform_open(2);
    cfg.validate();
    return cfg;
}

/// Random Hermitian PSD precoders meeting their budgets with equality.
inline PrecoderSet random_precoders(const SystemConfig& cfg, std::uint64_t seed) {
    PrecoderSet set;
    for (int k = 0; k < cfg.num_users; ++k) {
        HermitianMatrix p = random_normalized_psd(cfg.num_tx[k], seed, 400 + k);
        set.precoders.push_back(p.scaled(cfg.power_budget[k]));
        set.budgets.push_back(cfg.power_budget[k]);
    }
    return set;
}

// Closed-form Marchenko-Pastur references at z = -1, c = 1:
// e solves e^2 + e - 1 = 0, and the Shannon value is 2 log(1+e) - e^2.
inline double mp_e_reference() { return (std::sqrt(5.0) - 1.0) / 2.0; }
inline double mp_shannon_reference() {
    const double e = mp_e_reference();
    return 2.0 * std::log(1.0 + e) - e * e;
}

}  // namespace detmac::testing

#endif

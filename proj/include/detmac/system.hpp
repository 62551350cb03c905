#ifndef DETMAC_SYSTEM_HPP
#define DETMAC_SYSTEM_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "detmac/hermitian.hpp"

namespace detmac {

/// Nonempty set of users encoded as a bitmask (bit k = user k active).
using UserSubset = std::uint32_t;

std::vector<int> subset_users(UserSubset subset, int num_users);
UserSubset full_subset(int num_users);

/// Multi-user channel statistics: receive/transmit correlation per user, an
/// optional deterministic Hermitian offset, noise power and per-user average
/// power budgets. Immutable after construction and safe to share across
/// threads.
struct SystemConfig {
    int num_users = 0;                   // K
    int num_rx = 0;                      // N
    std::vector<int> num_tx;             // n_k
    std::vector<HermitianMatrix> rx_corr;  // R_k, dim N
    std::vector<HermitianMatrix> tx_corr;  // T_k, dim n_k
    std::optional<HermitianMatrix> offset;  // S, dim N, nonnegative definite
    double sigma2 = 1.0;                 // noise power, linear
    std::vector<double> power_budget;    // P_k

    double dim_ratio(int k) const { return static_cast<double>(num_rx) / num_tx[k]; }  // c_k

    /// Throws std::invalid_argument on inconsistent dimensions or parameters.
    void validate() const;

    /// Config restricted to the users of `subset` (order preserved).
    SystemConfig restricted(UserSubset subset) const;
};

/// Per-user transmit covariances with their average-power budgets.
struct PrecoderSet {
    std::vector<HermitianMatrix> precoders;  // P_k, dim n_k
    std::vector<double> budgets;             // P_k constraint values

    static PrecoderSet uniform(const SystemConfig& cfg);

    PrecoderSet restricted(UserSubset subset) const;

    /// (1/n_k) tr P_k
    double average_power(int k) const {
        return precoders[k].trace() / precoders[k].dim();
    }
};

/// lambda * a + (1 - lambda) * b, entrywise on each user's precoder.
PrecoderSet mix_precoders(const PrecoderSet& a, const PrecoderSet& b, double lambda);

}  // namespace detmac

#endif

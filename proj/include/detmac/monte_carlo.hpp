#ifndef DETMAC_MONTE_CARLO_HPP
#define DETMAC_MONTE_CARLO_HPP

#include <complex>
#include <cstdint>
#include <vector>

#include "detmac/det_equiv.hpp"
#include "detmac/rng.hpp"
#include "detmac/system.hpp"

namespace detmac {

/// One draw of the per-user channels H_k = R_k^{1/2} X_k T_k^{1/2}.
struct ChannelRealization {
    std::vector<CMatrix> channels;
    int trial_index = 0;
    std::uint64_t seed = 0;
};

/// Caches the correlation square roots of a config so repeated trials only
/// cost the Gaussian draw and two products. Immutable after construction;
/// sampling is safe from any thread.
class ChannelSampler {
  public:
    ChannelSampler(const SystemConfig& cfg, std::uint64_t seed);
    ChannelRealization sample(int trial) const;

    int num_users() const { return static_cast<int>(tx_root_.size()); }

  private:
    std::vector<HermitianMatrix> rx_root_;
    std::vector<HermitianMatrix> tx_root_;
    std::vector<int> num_tx_;
    int num_rx_ = 0;
    std::uint64_t seed_ = 0;
};

ChannelRealization sample_channel(const SystemConfig& cfg, int trial, std::uint64_t seed);

/// (1/N) log det(I + (1/sigma2) sum_{i in subset} H_i P_i H_i^H), nats per
/// receive antenna. P_i = I when precoders is null.
double empirical_mutual_info(const ChannelRealization& realization, const PrecoderSet* precoders,
                             double sigma2, UserSubset subset);

struct MonteCarloReport {
    int trials = 0;
    double mean = 0.0;       // nats per receive antenna
    double std_error = 0.0;  // sample std / sqrt(trials)
    double det_equiv = 0.0;
    double rel_gap = 0.0;    // |mean - det_equiv| / det_equiv
};

/// Empirical mean mutual information over independent trials, paired with the
/// matching deterministic equivalent. Trials run in parallel when OpenMP is
/// enabled; per-trial randomness is index-keyed and the reduction is a fixed
/// pairwise tree, so results are bit-identical for any thread count.
/// ergodic_estimate_serial is the single-threaded reference.
MonteCarloReport ergodic_estimate(const SystemConfig& cfg, const PrecoderSet* precoders,
                                  UserSubset subset, int trials, std::uint64_t seed);
MonteCarloReport ergodic_estimate_serial(const SystemConfig& cfg, const PrecoderSet* precoders,
                                         UserSubset subset, int trials, std::uint64_t seed);

/// Empirical Stieltjes transform (1/N) tr(B - z I)^-1 averaged over trials,
/// with B the precoder-free Gram sum of the sampled channels.
cplx empirical_stieltjes(const SystemConfig& cfg, int trials, cplx z, std::uint64_t seed);
cplx empirical_stieltjes_serial(const SystemConfig& cfg, int trials, cplx z, std::uint64_t seed);

/// Fixed-order pairwise tree sum (numerically stable, scheduling-independent).
double pairwise_sum(const std::vector<double>& values);

}  // namespace detmac

#endif

#ifndef DETMAC_PRECODER_HPP
#define DETMAC_PRECODER_HPP

#include <utility>
#include <vector>

#include "detmac/det_equiv.hpp"
#include "detmac/system.hpp"

namespace detmac {

/// One exact water-filling step over eigenmode gains.
struct WaterfillStep {
    std::vector<double> powers;  // same order as the input gains
    double water_level = 0.0;    // mu
};

/// powers_i = (mu - 1/(c * e * t_i))^+ with mu solving mean(powers) = budget.
/// The water level comes from the exact piecewise-linear budget equation over
/// sorted floors, so ties get equal power and there is no bisection error.
/// All gains must be strictly positive (rank-reduce beforehand).
WaterfillStep waterfill_step(const std::vector<double>& tx_eigs, double c, double e,
                             double budget);

struct WaterfillOptions {
    double eta = 1e-8;               // outer tolerance on max power change
    int max_outer_iterations = 1000;
    double inner_epsilon = 1e-12;    // fixed-point tolerance during optimization
};

/// Output of the alternating optimization. Precoders are indexed by the
/// subset users in ascending order and live in the eigenbasis of the matching
/// transmit correlation.
struct WaterfillResult {
    PrecoderSet precoders;
    std::vector<double> e_final;
    double objective = 0.0;  // Shannon value at the result, nats per rx antenna
    int outer_iterations = 0;
    double kkt_residual = 0.0;
    double last_power_change = 0.0;
    bool converged = false;
    std::vector<double> water_levels;
    /// Shannon value of each outer iterate (monotone-ascent diagnostic).
    std::vector<double> objective_trace;
};

/// Alternating fixed-point / per-user water-filling optimization of the
/// subset sum rate. On an exhausted outer budget the best iterate by
/// objective is returned with converged = false.
WaterfillResult iterative_waterfill(const SystemConfig& cfg, UserSubset subset,
                                    const WaterfillOptions& opts = {});

/// Concavity probe along precoder segments: evaluates the Shannon value on a
/// lambda grid over [0, 1] for each precoder pair and records the second
/// differences. Report only; assertions are left to callers.
struct ConcavityReport {
    double max_second_difference = 0.0;
    bool all_interior_negative = true;
    std::vector<double> per_pair_max;
};

ConcavityReport concavity_probe(const SystemConfig& cfg,
                                const std::vector<std::pair<PrecoderSet, PrecoderSet>>& pairs,
                                int grid);

}  // namespace detmac

#endif

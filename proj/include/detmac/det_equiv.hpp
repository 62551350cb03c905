#ifndef DETMAC_DET_EQUIV_HPP
#define DETMAC_DET_EQUIV_HPP

#include <complex>
#include <map>
#include <vector>

#include "detmac/hermitian.hpp"
#include "detmac/system.hpp"

namespace detmac {

/// Solution of the coupled scalar equations behind the deterministic
/// equivalents, evaluated at a point z off the closed positive real axis.
/// For z real negative all entries are real and positive; for Im z > 0 the
/// imaginary parts of the e_k share the sign of Im z.
struct FixedPointSolution {
    cplx z;
    std::vector<cplx> e;
    std::vector<cplx> delta;
    int iterations = 0;
    double residual = 0.0;

    double e_real(int k) const { return e[k].real(); }
    double delta_real(int k) const { return delta[k].real(); }
};

struct SolverOptions {
    double epsilon_fp = 1e-10;  // absolute tolerance on max_k |e_k change|
    int max_iterations = 10000;
    /// Optional initial e (defaults to -1/z per the plain Picard scheme).
    std::vector<cplx> initial_e;
};

/// Plain Picard iteration on the e_k system. With precoders supplied, each
/// user's transmit correlation is replaced by T_k^{1/2} P_k T_k^{1/2}.
/// Throws ConvergenceError when the iteration budget is exhausted.
FixedPointSolution solve_fixed_point(const SystemConfig& cfg, cplx z,
                                     const PrecoderSet* precoders = nullptr,
                                     const SolverOptions& opts = {});

/// Same solver with the effective transmit covariances supplied directly
/// (precoders already absorbed); avoids recomputing matrix square roots in
/// hot loops.
FixedPointSolution solve_fixed_point_effective(const SystemConfig& cfg, cplx z,
                                               const std::vector<HermitianMatrix>& tx_eff,
                                               const SolverOptions& opts = {});

/// Deterministic equivalent of the Stieltjes transform at z, evaluated from a
/// converged solution.
cplx stieltjes_de(const SystemConfig& cfg, cplx z, const FixedPointSolution& sol);

/// Deterministic equivalent of the Shannon transform at noise power x, in
/// nats per receive antenna, with its three-term breakdown.
struct ShannonValue {
    double x = 0.0;
    double value = 0.0;
    double logdet_tx_sum = 0.0;
    double logdet_rx = 0.0;
    double coupling = 0.0;
    FixedPointSolution solution;
};

ShannonValue shannon_de(const SystemConfig& cfg, double x, const PrecoderSet* precoders = nullptr,
                        const SolverOptions& opts = {});
ShannonValue shannon_de_effective(const SystemConfig& cfg, double x,
                                  const std::vector<HermitianMatrix>& tx_eff,
                                  const SolverOptions& opts = {});

/// Shannon-transform terms evaluated at an already-converged real-path
/// solution (no solve performed).
ShannonValue shannon_value_at(const SystemConfig& cfg, double x,
                              const std::vector<HermitianMatrix>& tx_eff,
                              const FixedPointSolution& sol);

/// Cross-checks the Shannon value against the integral of
/// (1/w - stieltjes(-w)) over [x, W] plus an analytic 1/w^2 tail fitted at
/// the truncation point. Quadrature runs per geometric segment.
double shannon_integral_check(const SystemConfig& cfg, double x, double truncation,
                              double abs_tol = 1e-6);

/// Deterministic-equivalent bound on the sum rate of every nonempty user
/// subset (bit k of the key = user k). Requires at most 16 users.
std::map<UserSubset, double> rate_region_constraints(const SystemConfig& cfg,
                                                     const PrecoderSet& precoders);

/// The effective transmit covariances T_k^{1/2} P_k T_k^{1/2} (or T_k itself
/// when precoders is null).
std::vector<HermitianMatrix> effective_tx_covariances(const SystemConfig& cfg,
                                                      const PrecoderSet* precoders);

}  // namespace detmac

#endif

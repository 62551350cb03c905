#include "detmac/det_equiv.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "detmac/quadrature.hpp"

namespace detmac {

namespace {

void check_evaluation_point(cplx z) {
    if (z.imag() == 0.0 && z.real() >= 0.0)
        throw std::invalid_argument("solve_fixed_point: z must lie off the closed positive real axis");
}

// Integral term f_k(e) = (1/n_k) tr Ttil (I + c e Ttil)^-1, evaluated through
// the identity tr Ttil (I + c e Ttil)^-1 = (n - tr (I + c e Ttil)^-1) / (c e).
double tx_load_real(const HermitianMatrix& tx_eff, double c, double e) {
    const int n = tx_eff.dim();
    HermitianMatrix m = HermitianMatrix::identity(n);
    m.add_scaled(tx_eff, c * e);
    const double trace_inv = CholeskyFactor(m).trace_inverse();
    return (n - trace_inv) / (n * c * e);
}

cplx tx_load_complex(const std::vector<double>& tx_eigs, double c, cplx e) {
    cplx sum = 0.0;
    for (double tau : tx_eigs) sum += tau / (1.0 + c * e * tau);
    return sum / static_cast<double>(tx_eigs.size());
}

HermitianMatrix resolvent_base(const SystemConfig& cfg, const std::vector<double>& loads,
                               double x) {
    HermitianMatrix d =
        cfg.offset ? *cfg.offset : HermitianMatrix::zero(cfg.num_rx);
    for (int k = 0; k < cfg.num_users; ++k) d.add_scaled(cfg.rx_corr[k], loads[k]);
    d.add_scaled(HermitianMatrix::identity(cfg.num_rx), x);
    return d;
}

// Inverse of A - iC with A Hermitian and C Hermitian positive definite,
// returned as the Hermitian pair (P, Q) with (A - iC)^-1 = P + iQ. Only
// Hermitian factorizations are involved: Q = (A C^-1 A + C)^-1, P = C^-1 A Q.
struct SplitInverse {
    HermitianMatrix p;
    HermitianMatrix q;
};

SplitInverse split_inverse(const HermitianMatrix& a, const HermitianMatrix& c) {
    const HermitianMatrix c_inv = CholeskyFactor(c).inverse();
    const CMatrix ca = c_inv.full() * a.full();                    // C^-1 A
    HermitianMatrix g = HermitianMatrix::from_upper(a.full() * ca);  // A C^-1 A
    g.add_scaled(c, 1.0);
    const HermitianMatrix q = CholeskyFactor(g).inverse();
    const HermitianMatrix p = HermitianMatrix::from_upper(ca * q.full());
    return {p, q};
}

std::vector<double> clamped_psd_eigenvalues(const HermitianMatrix& h) {
    EigenDecomposition d = hermitian_eig(h);
    const double scale = d.eigenvalues.empty()
                             ? 0.0
                             : std::max(std::abs(d.eigenvalues.front()),
                                        std::abs(d.eigenvalues.back()));
    for (double& lambda : d.eigenvalues) {
        if (lambda < -1e-10 * scale)
            throw std::invalid_argument(
                "transmit covariance is not nonnegative definite (eigenvalue " +
                std::to_string(lambda) + ")");
        if (lambda < 0.0) lambda = 0.0;
    }
    return d.eigenvalues;
}

FixedPointSolution solve_real(const SystemConfig& cfg, double x,
                              const std::vector<HermitianMatrix>& tx_eff,
                              const SolverOptions& opts) {
    const int num_users = cfg.num_users;
    std::vector<double> e(num_users, 1.0 / x);
    if (!opts.initial_e.empty()) {
        if (static_cast<int>(opts.initial_e.size()) != num_users)
            throw std::invalid_argument("SolverOptions: initial_e must have K entries");
        bool admissible = true;
        for (const cplx& v : opts.initial_e) admissible &= (v.real() > 0.0 && v.imag() == 0.0);
        if (admissible)
            for (int k = 0; k < num_users; ++k) e[k] = opts.initial_e[k].real();
    }

    std::vector<double> loads(num_users), e_next(num_users);
    double residual = 0.0;
    for (int iter = 1; iter <= opts.max_iterations; ++iter) {
        for (int k = 0; k < num_users; ++k)
            loads[k] = tx_load_real(tx_eff[k], cfg.dim_ratio(k), e[k]);
        const HermitianMatrix d_inv = CholeskyFactor(resolvent_base(cfg, loads, x)).inverse();
        residual = 0.0;
        for (int k = 0; k < num_users; ++k) {
            e_next[k] = cfg.rx_corr[k].trace_product(d_inv) / cfg.num_rx;
            residual = std::max(residual, std::abs(e_next[k] - e[k]));
        }
        e.swap(e_next);
        if (residual <= opts.epsilon_fp) {
            FixedPointSolution sol;
            sol.z = cplx(-x, 0.0);
            sol.iterations = iter;
            sol.residual = residual;
            for (int k = 0; k < num_users; ++k) {
                sol.e.emplace_back(e[k], 0.0);
                sol.delta.emplace_back(tx_load_real(tx_eff[k], cfg.dim_ratio(k), e[k]) / x, 0.0);
            }
            return sol;
        }
    }
    throw ConvergenceError("solve_fixed_point: iteration budget exhausted (residual " +
                               std::to_string(residual) + ")",
                           residual);
}

FixedPointSolution solve_complex(const SystemConfig& cfg, cplx z,
                                 const std::vector<HermitianMatrix>& tx_eff,
                                 const SolverOptions& opts) {
    // Im z < 0 is handled through the conjugate symmetry e(conj z) = conj(e(z)).
    if (z.imag() < 0.0) {
        SolverOptions conj_opts = opts;
        for (cplx& v : conj_opts.initial_e) v = std::conj(v);
        FixedPointSolution sol = solve_complex(cfg, std::conj(z), tx_eff, conj_opts);
        sol.z = z;
        for (cplx& v : sol.e) v = std::conj(v);
        for (cplx& v : sol.delta) v = std::conj(v);
        return sol;
    }

    const int num_users = cfg.num_users;
    std::vector<std::vector<double>> tx_eigs(num_users);
    for (int k = 0; k < num_users; ++k) tx_eigs[k] = clamped_psd_eigenvalues(tx_eff[k]);

    std::vector<cplx> e(num_users, -1.0 / z);
    if (!opts.initial_e.empty()) {
        if (static_cast<int>(opts.initial_e.size()) != num_users)
            throw std::invalid_argument("SolverOptions: initial_e must have K entries");
        bool admissible = true;
        for (const cplx& v : opts.initial_e) admissible &= (v.imag() > 0.0);
        if (admissible) e = opts.initial_e;
    }

    const HermitianMatrix identity = HermitianMatrix::identity(cfg.num_rx);
    std::vector<cplx> loads(num_users), e_next(num_users);
    double residual = 0.0;
    for (int iter = 1; iter <= opts.max_iterations; ++iter) {
        for (int k = 0; k < num_users; ++k)
            loads[k] = tx_load_complex(tx_eigs[k], cfg.dim_ratio(k), e[k]);

        HermitianMatrix a = cfg.offset ? *cfg.offset : HermitianMatrix::zero(cfg.num_rx);
        HermitianMatrix c = HermitianMatrix::zero(cfg.num_rx);
        for (int k = 0; k < num_users; ++k) {
            a.add_scaled(cfg.rx_corr[k], loads[k].real());
            c.add_scaled(cfg.rx_corr[k], -loads[k].imag());
        }
        a.add_scaled(identity, -z.real());
        c.add_scaled(identity, z.imag());
        const SplitInverse inv = split_inverse(a, c);

        residual = 0.0;
        for (int k = 0; k < num_users; ++k) {
            e_next[k] = cplx(cfg.rx_corr[k].trace_product(inv.p),
                             cfg.rx_corr[k].trace_product(inv.q)) /
                        static_cast<double>(cfg.num_rx);
            residual = std::max(residual, std::abs(e_next[k] - e[k]));
        }
        e.swap(e_next);
        if (residual <= opts.epsilon_fp) {
            FixedPointSolution sol;
            sol.z = z;
            sol.iterations = iter;
            sol.residual = residual;
            sol.e = e;
            for (int k = 0; k < num_users; ++k)
                sol.delta.push_back(tx_load_complex(tx_eigs[k], cfg.dim_ratio(k), e[k]) / (-z));
            return sol;
        }
    }
    throw ConvergenceError("solve_fixed_point: iteration budget exhausted (residual " +
                               std::to_string(residual) + ")",
                           residual);
}

}  // namespace

std::vector<HermitianMatrix> effective_tx_covariances(const SystemConfig& cfg,
                                                      const PrecoderSet* precoders) {
    std::vector<HermitianMatrix> tx_eff;
    tx_eff.reserve(cfg.num_users);
    for (int k = 0; k < cfg.num_users; ++k) {
        if (!precoders) {
            tx_eff.push_back(cfg.tx_corr[k]);
            continue;
        }
        if (precoders->precoders[k].dim() != cfg.num_tx[k])
            throw std::invalid_argument("precoder " + std::to_string(k) + " has wrong dimension");
        const HermitianMatrix root = hermitian_sqrt(cfg.tx_corr[k]);
        tx_eff.push_back(HermitianMatrix::congruence(root, precoders->precoders[k]));
    }
    return tx_eff;
}

FixedPointSolution solve_fixed_point_effective(const SystemConfig& cfg, cplx z,
                                               const std::vector<HermitianMatrix>& tx_eff,
                                               const SolverOptions& opts) {
    cfg.validate();
    check_evaluation_point(z);
    if (static_cast<int>(tx_eff.size()) != cfg.num_users)
        throw std::invalid_argument("solve_fixed_point: need one effective covariance per user");
    if (z.imag() == 0.0) return solve_real(cfg, -z.real(), tx_eff, opts);
    return solve_complex(cfg, z, tx_eff, opts);
}

FixedPointSolution solve_fixed_point(const SystemConfig& cfg, cplx z,
                                     const PrecoderSet* precoders, const SolverOptions& opts) {
    return solve_fixed_point_effective(cfg, z, effective_tx_covariances(cfg, precoders), opts);
}

cplx stieltjes_de(const SystemConfig& cfg, cplx z, const FixedPointSolution& sol) {
    check_evaluation_point(z);
    if (z.imag() == 0.0) {
        const double x = -z.real();
        std::vector<double> loads(cfg.num_users);
        for (int k = 0; k < cfg.num_users; ++k) loads[k] = x * sol.delta[k].real();
        return CholeskyFactor(resolvent_base(cfg, loads, x)).trace_inverse() / cfg.num_rx;
    }
    if (z.imag() < 0.0) {
        FixedPointSolution conj_sol = sol;
        for (cplx& v : conj_sol.delta) v = std::conj(v);
        return std::conj(stieltjes_de(cfg, std::conj(z), conj_sol));
    }
    const HermitianMatrix identity = HermitianMatrix::identity(cfg.num_rx);
    HermitianMatrix a = cfg.offset ? *cfg.offset : HermitianMatrix::zero(cfg.num_rx);
    HermitianMatrix c = HermitianMatrix::zero(cfg.num_rx);
    for (int k = 0; k < cfg.num_users; ++k) {
        const cplx load = -z * sol.delta[k];
        a.add_scaled(cfg.rx_corr[k], load.real());
        c.add_scaled(cfg.rx_corr[k], -load.imag());
    }
    a.add_scaled(identity, -z.real());
    c.add_scaled(identity, z.imag());
    const SplitInverse inv = split_inverse(a, c);
    return cplx(inv.p.trace(), inv.q.trace()) / static_cast<double>(cfg.num_rx);
}

ShannonValue shannon_value_at(const SystemConfig& cfg, double x,
                              const std::vector<HermitianMatrix>& tx_eff,
                              const FixedPointSolution& sol) {
    if (!(x > 0.0)) throw std::invalid_argument("shannon_value_at: noise power must be > 0");
    ShannonValue v;
    v.x = x;
    v.solution = sol;

    for (int k = 0; k < cfg.num_users; ++k) {
        HermitianMatrix m = HermitianMatrix::identity(cfg.num_tx[k]);
        m.add_scaled(tx_eff[k], cfg.dim_ratio(k) * sol.e_real(k));
        v.logdet_tx_sum += log_det_hpd(m) / cfg.num_rx;
    }
    HermitianMatrix m = HermitianMatrix::identity(cfg.num_rx);
    for (int k = 0; k < cfg.num_users; ++k) m.add_scaled(cfg.rx_corr[k], sol.delta_real(k));
    v.logdet_rx = log_det_hpd(m) / cfg.num_rx;

    for (int k = 0; k < cfg.num_users; ++k)
        v.coupling += x * sol.delta_real(k) * sol.e_real(k);

    v.value = v.logdet_tx_sum + v.logdet_rx - v.coupling;
    return v;
}

ShannonValue shannon_de_effective(const SystemConfig& cfg, double x,
                                  const std::vector<HermitianMatrix>& tx_eff,
                                  const SolverOptions& opts) {
    if (!(x > 0.0)) throw std::invalid_argument("shannon_de: noise power must be > 0");
    return shannon_value_at(cfg, x, tx_eff,
                            solve_fixed_point_effective(cfg, cplx(-x, 0.0), tx_eff, opts));
}

ShannonValue shannon_de(const SystemConfig& cfg, double x, const PrecoderSet* precoders,
                        const SolverOptions& opts) {
    return shannon_de_effective(cfg, x, effective_tx_covariances(cfg, precoders), opts);
}

double shannon_integral_check(const SystemConfig& cfg, double x, double truncation,
                              double abs_tol) {
    if (!(x > 0.0)) throw std::invalid_argument("shannon_integral_check: x must be > 0");
    if (truncation == x) return 0.0;  // empty integral
    if (!(truncation > x)) throw std::invalid_argument("shannon_integral_check: need W >= x");
    cfg.validate();

    const std::vector<HermitianMatrix> tx_eff = effective_tx_covariances(cfg, nullptr);

    // Successive evaluation points are close, so the previous solution is an
    // effective warm start for the next one.
    SolverOptions warm;
    auto integrand = [&](double w) {
        const FixedPointSolution sol =
            solve_fixed_point_effective(cfg, cplx(-w, 0.0), tx_eff, warm);
        warm.initial_e = sol.e;
        return 1.0 / w - stieltjes_de(cfg, cplx(-w, 0.0), sol).real();
    };

    const int num_segments =
        std::max(1, static_cast<int>(std::ceil(std::log2(truncation / x))));
    const double segment_tol = abs_tol / num_segments;
    double integral = 0.0;
    double lo = x;
    while (lo < truncation) {
        const double hi = std::min(2.0 * lo, truncation);
        integral += integrate_adaptive(integrand, lo, hi, segment_tol);
        lo = hi;
    }

    // Tail: beyond W the integrand behaves like C/w^2; fit C at W/2 and W and
    // add the closed-form remainder C/W.
    const double mid = std::max(0.5 * truncation, x);
    const double g_end = integrand(truncation);
    const double g_mid = integrand(mid);
    const double fit_end = g_end * truncation * truncation;
    const double fit_mid = g_mid * mid * mid;
    const double tail_c = (mid < truncation) ? 2.0 * fit_end - fit_mid : fit_end;
    return integral + tail_c / truncation;
}

std::map<UserSubset, double> rate_region_constraints(const SystemConfig& cfg,
                                                     const PrecoderSet& precoders) {
    cfg.validate();
    if (cfg.num_users > 16)
        throw std::invalid_argument("rate_region_constraints: at most 16 users supported");
    std::map<UserSubset, double> constraints;
    const UserSubset all = full_subset(cfg.num_users);
    for (UserSubset mask = 1; mask <= all; ++mask) {
        const SystemConfig sub = cfg.restricted(mask);
        const PrecoderSet sub_precoders = precoders.restricted(mask);
        constraints[mask] = shannon_de(sub, cfg.sigma2, &sub_precoders).value;
    }
    return constraints;
}

}  // namespace detmac

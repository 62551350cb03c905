#include "detmac/precoder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace detmac {

WaterfillStep waterfill_step(const std::vector<double>& tx_eigs, double c, double e,
                             double budget) {
    const int n = static_cast<int>(tx_eigs.size());
    if (n == 0) throw std::invalid_argument("waterfill_step: no eigenmodes");
    if (!(c > 0.0) || !(e > 0.0) || !(budget > 0.0))
        throw std::invalid_argument("waterfill_step: c, e and budget must be > 0");

    std::vector<double> floors(n);
    for (int i = 0; i < n; ++i) {
        if (!(tx_eigs[i] > 0.0))
            throw std::invalid_argument("waterfill_step: eigenmode gains must be > 0");
        floors[i] = 1.0 / (c * e * tx_eigs[i]);
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return floors[a] < floors[b]; });

    // Largest active set m with water level (n*budget + sum of m lowest
    // floors)/m above the m-th floor.
    double mu = 0.0;
    double prefix = 0.0;
    int active = 0;
    for (int m = 1; m <= n; ++m) {
        prefix += floors[order[m - 1]];
        const double level = (n * budget + prefix) / m;
        if (level > floors[order[m - 1]]) {
            mu = level;
            active = m;
        }
    }

    WaterfillStep step;
    step.water_level = mu;
    step.powers.assign(n, 0.0);
    for (int m = 0; m < active; ++m) step.powers[order[m]] = mu - floors[order[m]];
    return step;
}

namespace {

struct UserModes {
    EigenDecomposition basis;       // of T_k, eigenvalues descending
    std::vector<double> active_t;   // gains above the rank threshold
    std::vector<int> active_index;  // positions of those gains
    double adjusted_budget = 0.0;   // budget rescaled to the active modes
};

UserModes reduce_modes(const HermitianMatrix& tx_corr, double budget) {
    UserModes modes;
    modes.basis = hermitian_eig(tx_corr);
    const int n = tx_corr.dim();
    const double t_max = modes.basis.eigenvalues.empty() ? 0.0 : modes.basis.eigenvalues[0];
    const double threshold = 1e-12 * t_max;
    for (int i = 0; i < n; ++i) {
        if (modes.basis.eigenvalues[i] > threshold) {
            modes.active_t.push_back(modes.basis.eigenvalues[i]);
            modes.active_index.push_back(i);
        }
    }
    if (modes.active_t.empty())
        throw std::invalid_argument("iterative_waterfill: transmit correlation has no positive eigenmodes");
    modes.adjusted_budget =
        budget * static_cast<double>(n) / static_cast<double>(modes.active_t.size());
    return modes;
}

std::vector<HermitianMatrix> effective_from_powers(const std::vector<UserModes>& modes,
                                                   const std::vector<std::vector<double>>& powers) {
    std::vector<HermitianMatrix> tx_eff;
    tx_eff.reserve(modes.size());
    for (size_t k = 0; k < modes.size(); ++k) {
        std::vector<double> scaled(modes[k].basis.eigenvalues.size());
        for (size_t i = 0; i < scaled.size(); ++i)
            scaled[i] = modes[k].basis.eigenvalues[i] < 0.0
                            ? 0.0
                            : modes[k].basis.eigenvalues[i] * powers[k][i];
        tx_eff.push_back(HermitianMatrix::sandwich(modes[k].basis.eigenvectors, scaled));
    }
    return tx_eff;
}

}  // namespace

WaterfillResult iterative_waterfill(const SystemConfig& cfg, UserSubset subset,
                                    const WaterfillOptions& opts) {
    cfg.validate();
    const SystemConfig sub = cfg.restricted(subset);
    const int num_users = sub.num_users;

    std::vector<UserModes> modes;
    modes.reserve(num_users);
    for (int k = 0; k < num_users; ++k)
        modes.push_back(reduce_modes(sub.tx_corr[k], sub.power_budget[k]));

    // Every mode starts at the full per-user budget.
    std::vector<std::vector<double>> powers(num_users);
    for (int k = 0; k < num_users; ++k)
        powers[k].assign(sub.num_tx[k], sub.power_budget[k]);

    SolverOptions inner;
    inner.epsilon_fp = opts.inner_epsilon;

    WaterfillResult result;
    std::vector<double> water_levels(num_users, 0.0);
    std::vector<std::vector<double>> best_powers = powers;
    double best_objective = -std::numeric_limits<double>::infinity();
    double change = std::numeric_limits<double>::infinity();

    FixedPointSolution sol;
    int iter = 0;
    while (iter < opts.max_outer_iterations) {
        ++iter;
        const std::vector<HermitianMatrix> tx_eff = effective_from_powers(modes, powers);
        sol = solve_fixed_point_effective(sub, cplx(-sub.sigma2, 0.0), tx_eff, inner);
        inner.initial_e = sol.e;  // warm start across outer iterations

        const double objective = shannon_value_at(sub, sub.sigma2, tx_eff, sol).value;
        result.objective_trace.push_back(objective);
        if (objective > best_objective) {
            best_objective = objective;
            best_powers = powers;
        }

        change = 0.0;
        for (int k = 0; k < num_users; ++k) {
            const WaterfillStep step = waterfill_step(modes[k].active_t, sub.dim_ratio(k),
                                                      sol.e_real(k), modes[k].adjusted_budget);
            water_levels[k] = step.water_level;
            std::vector<double> updated(sub.num_tx[k], 0.0);
            for (size_t i = 0; i < modes[k].active_index.size(); ++i)
                updated[modes[k].active_index[i]] = step.powers[i];
            for (int i = 0; i < sub.num_tx[k]; ++i)
                change = std::max(change, std::abs(updated[i] - powers[k][i]));
            powers[k] = std::move(updated);
        }
        if (change <= opts.eta) {
            result.converged = true;
            break;
        }
    }
    result.outer_iterations = iter;
    result.last_power_change = change;
    if (!result.converged) powers = best_powers;

    // Final consistent solve at the returned powers.
    const std::vector<HermitianMatrix> tx_eff = effective_from_powers(modes, powers);
    sol = solve_fixed_point_effective(sub, cplx(-sub.sigma2, 0.0), tx_eff, inner);
    result.objective = shannon_value_at(sub, sub.sigma2, tx_eff, sol).value;
    result.e_final.resize(num_users);
    for (int k = 0; k < num_users; ++k) result.e_final[k] = sol.e_real(k);

    // Stationarity of the returned powers against the water-filling map at
    // the final e.
    result.kkt_residual = 0.0;
    for (int k = 0; k < num_users; ++k) {
        const WaterfillStep step = waterfill_step(modes[k].active_t, sub.dim_ratio(k),
                                                  sol.e_real(k), modes[k].adjusted_budget);
        water_levels[k] = step.water_level;
        for (size_t i = 0; i < modes[k].active_t.size(); ++i) {
            const double floor = 1.0 / (sub.dim_ratio(k) * sol.e_real(k) * modes[k].active_t[i]);
            const double p = powers[k][modes[k].active_index[i]];
            const double deviation =
                p > 0.0 ? std::abs(p + floor - step.water_level)
                        : std::max(0.0, step.water_level - floor);
            result.kkt_residual = std::max(result.kkt_residual, deviation);
        }
    }
    result.water_levels = water_levels;

    for (int k = 0; k < num_users; ++k) {
        result.precoders.precoders.push_back(
            HermitianMatrix::sandwich(modes[k].basis.eigenvectors, powers[k]));
        result.precoders.budgets.push_back(sub.power_budget[k]);
    }
    return result;
}

ConcavityReport concavity_probe(const SystemConfig& cfg,
                                const std::vector<std::pair<PrecoderSet, PrecoderSet>>& pairs,
                                int grid) {
    if (grid < 2) throw std::invalid_argument("concavity_probe: grid must be >= 2");
    cfg.validate();
    ConcavityReport report;
    report.max_second_difference = -std::numeric_limits<double>::infinity();
    for (const auto& [pa, pb] : pairs) {
        std::vector<double> values(grid + 1);
        for (int j = 0; j <= grid; ++j) {
            const double lambda = static_cast<double>(j) / grid;
            const PrecoderSet mixed = mix_precoders(pa, pb, lambda);
            values[j] = shannon_de(cfg, cfg.sigma2, &mixed).value;
        }
        double pair_max = -std::numeric_limits<double>::infinity();
        for (int j = 1; j < grid; ++j) {
            const double d2 = values[j + 1] - 2.0 * values[j] + values[j - 1];
            pair_max = std::max(pair_max, d2);
            if (d2 >= 0.0) report.all_interior_negative = false;
        }
        report.per_pair_max.push_back(pair_max);
        report.max_second_difference = std::max(report.max_second_difference, pair_max);
    }
    return report;
}

}  // namespace detmac

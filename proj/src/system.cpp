#include "detmac/system.hpp"

#include <cmath>
#include <string>

namespace detmac {

std::vector<int> subset_users(UserSubset subset, int num_users) {
    std::vector<int> users;
    for (int k = 0; k < num_users; ++k)
        if (subset & (UserSubset{1} << k)) users.push_back(k);
    return users;
}

UserSubset full_subset(int num_users) {
    return (num_users >= 32) ? ~UserSubset{0} : ((UserSubset{1} << num_users) - 1);
}

void SystemConfig::validate() const {
    if (num_users < 1) throw std::invalid_argument("SystemConfig: need at least one user");
    if (num_rx < 1) throw std::invalid_argument("SystemConfig: need at least one receive antenna");
    if (static_cast<int>(num_tx.size()) != num_users ||
        static_cast<int>(rx_corr.size()) != num_users ||
        static_cast<int>(tx_corr.size()) != num_users ||
        static_cast<int>(power_budget.size()) != num_users)
        throw std::invalid_argument("SystemConfig: per-user vectors must have K entries");
    for (int k = 0; k < num_users; ++k) {
        if (num_tx[k] < 1)
            throw std::invalid_argument("SystemConfig: user " + std::to_string(k) +
                                        " needs at least one transmit antenna");
        if (rx_corr[k].dim() != num_rx)
            throw std::invalid_argument("SystemConfig: rx_corr[" + std::to_string(k) +
                                        "] must be N x N");
        if (tx_corr[k].dim() != num_tx[k])
            throw std::invalid_argument("SystemConfig: tx_corr[" + std::to_string(k) +
                                        "] must be n_k x n_k");
        if (!(power_budget[k] > 0.0))
            throw std::invalid_argument("SystemConfig: power budgets must be > 0");
    }
    if (offset && offset->dim() != num_rx)
        throw std::invalid_argument("SystemConfig: offset must be N x N");
    if (!(sigma2 > 0.0) || !std::isfinite(sigma2))
        throw std::invalid_argument("SystemConfig: sigma2 must be finite and > 0");
}

SystemConfig SystemConfig::restricted(UserSubset subset) const {
    const std::vector<int> users = subset_users(subset, num_users);
    if (users.empty()) throw std::invalid_argument("SystemConfig: subset must be nonempty");
    SystemConfig sub;
    sub.num_users = static_cast<int>(users.size());
    sub.num_rx = num_rx;
    sub.offset = offset;
    sub.sigma2 = sigma2;
    for (int k : users) {
        sub.num_tx.push_back(num_tx[k]);
        sub.rx_corr.push_back(rx_corr[k]);
        sub.tx_corr.push_back(tx_corr[k]);
        sub.power_budget.push_back(power_budget[k]);
    }
    return sub;
}

PrecoderSet PrecoderSet::uniform(const SystemConfig& cfg) {
    PrecoderSet set;
    for (int k = 0; k < cfg.num_users; ++k) {
        set.precoders.push_back(
            HermitianMatrix::identity(cfg.num_tx[k]).scaled(cfg.power_budget[k]));
        set.budgets.push_back(cfg.power_budget[k]);
    }
    return set;
}

PrecoderSet PrecoderSet::restricted(UserSubset subset) const {
    const std::vector<int> users = subset_users(subset, static_cast<int>(precoders.size()));
    PrecoderSet sub;
    for (int k : users) {
        sub.precoders.push_back(precoders[k]);
        sub.budgets.push_back(budgets[k]);
    }
    return sub;
}

PrecoderSet mix_precoders(const PrecoderSet& a, const PrecoderSet& b, double lambda) {
    if (a.precoders.size() != b.precoders.size())
        throw std::invalid_argument("mix_precoders: user count mismatch");
    PrecoderSet mixed;
    for (size_t k = 0; k < a.precoders.size(); ++k) {
        mixed.precoders.push_back(
            a.precoders[k].scaled(lambda).plus(b.precoders[k], 1.0 - lambda));
        mixed.budgets.push_back(std::max(a.budgets[k], b.budgets[k]));
    }
    return mixed;
}

}  // namespace detmac

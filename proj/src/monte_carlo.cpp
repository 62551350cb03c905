#include "detmac/monte_carlo.hpp"

#include <cmath>
#include <exception>
#include <stdexcept>

namespace detmac {

namespace {

double pairwise_sum_range(const std::vector<double>& v, size_t lo, size_t hi) {
    if (hi - lo <= 8) {
        double s = 0.0;
        for (size_t i = lo; i < hi; ++i) s += v[i];
        return s;
    }
    const size_t mid = lo + (hi - lo) / 2;
    return pairwise_sum_range(v, lo, mid) + pairwise_sum_range(v, mid, hi);
}

// Runs body(t) for t in [0, count), in parallel when OpenMP is available,
// rethrowing the first captured exception.
template <typename Body>
void for_each_trial(int count, Body&& body) {
    std::exception_ptr failure;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (int t = 0; t < count; ++t) {
        try {
            body(t);
        } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
}

template <typename Body>
void for_each_trial_serial(int count, Body&& body) {
    for (int t = 0; t < count; ++t) body(t);
}

MonteCarloReport reduce_report(const SystemConfig& cfg, const PrecoderSet* precoders,
                               UserSubset subset, std::vector<double>&& values) {
    MonteCarloReport report;
    report.trials = static_cast<int>(values.size());
    report.mean = pairwise_sum(values) / report.trials;
    for (double& v : values) {
        const double d = v - report.mean;
        v = d * d;
    }
    const double sample_var = pairwise_sum(values) / (report.trials - 1);
    report.std_error = std::sqrt(sample_var / report.trials);

    const SystemConfig sub = cfg.restricted(subset);
    if (precoders) {
        const PrecoderSet sub_precoders = precoders->restricted(subset);
        report.det_equiv = shannon_de(sub, cfg.sigma2, &sub_precoders).value;
    } else {
        report.det_equiv = shannon_de(sub, cfg.sigma2, nullptr).value;
    }
    report.rel_gap = std::abs(report.mean - report.det_equiv) / std::max(report.det_equiv, 1e-300);
    return report;
}

HermitianMatrix gram_sum(const ChannelRealization& realization) {
    const int n = realization.channels.front().rows();
    HermitianMatrix b = HermitianMatrix::zero(n);
    for (const CMatrix& h : realization.channels)
        b.add_scaled(HermitianMatrix::gram(h), 1.0);
    return b;
}

cplx stieltjes_of_realization(const ChannelRealization& realization, cplx z) {
    const HermitianMatrix b = gram_sum(realization);
    const int n = b.dim();
    if (z.imag() == 0.0) {
        HermitianMatrix shifted = b;
        shifted.add_scaled(HermitianMatrix::identity(n), -z.real());
        return CholeskyFactor(shifted).trace_inverse() / n;
    }
    const EigenDecomposition d = hermitian_eig(b);
    cplx sum = 0.0;
    for (double lambda : d.eigenvalues) sum += 1.0 / (lambda - z);
    return sum / static_cast<double>(n);
}

}  // namespace

double pairwise_sum(const std::vector<double>& values) {
    if (values.empty()) return 0.0;
    return pairwise_sum_range(values, 0, values.size());
}

ChannelSampler::ChannelSampler(const SystemConfig& cfg, std::uint64_t seed)
    : num_tx_(cfg.num_tx), num_rx_(cfg.num_rx), seed_(seed) {
    cfg.validate();
    for (int k = 0; k < cfg.num_users; ++k) {
        rx_root_.push_back(hermitian_sqrt(cfg.rx_corr[k]));
        tx_root_.push_back(hermitian_sqrt(cfg.tx_corr[k]));
    }
}

ChannelRealization ChannelSampler::sample(int trial) const {
    ChannelRealization realization;
    realization.trial_index = trial;
    realization.seed = seed_;
    const int num_users = static_cast<int>(tx_root_.size());
    for (int k = 0; k < num_users; ++k) {
        const std::uint64_t stream =
            static_cast<std::uint64_t>(trial) * num_users + static_cast<std::uint64_t>(k);
        const ComplexGaussianMatrix x =
            sample_complex_gaussian(num_rx_, num_tx_[k], 1.0 / num_tx_[k], seed_, stream);
        realization.channels.push_back(rx_root_[k].full() * x.entries * tx_root_[k].full());
    }
    return realization;
}

ChannelRealization sample_channel(const SystemConfig& cfg, int trial, std::uint64_t seed) {
    return ChannelSampler(cfg, seed).sample(trial);
}

double empirical_mutual_info(const ChannelRealization& realization, const PrecoderSet* precoders,
                             double sigma2, UserSubset subset) {
    if (!(sigma2 > 0.0)) throw std::invalid_argument("empirical_mutual_info: sigma2 must be > 0");
    const int num_users = static_cast<int>(realization.channels.size());
    const std::vector<int> users = subset_users(subset, num_users);
    if (users.empty()) throw std::invalid_argument("empirical_mutual_info: subset must be nonempty");

    const int n = realization.channels.front().rows();
    HermitianMatrix g = HermitianMatrix::identity(n);
    for (int k : users) {
        const CMatrix& h = realization.channels[k];
        if (precoders) {
            const CMatrix hp = h * precoders->precoders[k].full();
            g.add_scaled(HermitianMatrix::from_upper(hp * h.adjoint()), 1.0 / sigma2);
        } else {
            g.add_scaled(HermitianMatrix::gram(h), 1.0 / sigma2);
        }
    }
    return log_det_hpd(g) / n;
}

MonteCarloReport ergodic_estimate(const SystemConfig& cfg, const PrecoderSet* precoders,
                                  UserSubset subset, int trials, std::uint64_t seed) {
    if (trials < 2) throw std::invalid_argument("ergodic_estimate: need at least 2 trials");
    const ChannelSampler sampler(cfg, seed);
    std::vector<double> values(trials);
    for_each_trial(trials, [&](int t) {
        values[t] = empirical_mutual_info(sampler.sample(t), precoders, cfg.sigma2, subset);
    });
    return reduce_report(cfg, precoders, subset, std::move(values));
}

MonteCarloReport ergodic_estimate_serial(const SystemConfig& cfg, const PrecoderSet* precoders,
                                         UserSubset subset, int trials, std::uint64_t seed) {
    if (trials < 2) throw std::invalid_argument("ergodic_estimate: need at least 2 trials");
    const ChannelSampler sampler(cfg, seed);
    std::vector<double> values(trials);
    for_each_trial_serial(trials, [&](int t) {
        values[t] = empirical_mutual_info(sampler.sample(t), precoders, cfg.sigma2, subset);
    });
    return reduce_report(cfg, precoders, subset, std::move(values));
}

namespace {

cplx stieltjes_average(const SystemConfig& cfg, int trials, cplx z, std::uint64_t seed,
                       bool parallel) {
    if (trials < 1) throw std::invalid_argument("empirical_stieltjes: need at least 1 trial");
    if (z.imag() == 0.0 && z.real() >= 0.0)
        throw std::invalid_argument("empirical_stieltjes: z must lie off the closed positive real axis");
    const ChannelSampler sampler(cfg, seed);
    std::vector<double> re(trials), im(trials);
    auto body = [&](int t) {
        const cplx v = stieltjes_of_realization(sampler.sample(t), z);
        re[t] = v.real();
        im[t] = v.imag();
    };
    if (parallel)
        for_each_trial(trials, body);
    else
        for_each_trial_serial(trials, body);
    return cplx(pairwise_sum(re), pairwise_sum(im)) / static_cast<double>(trials);
}

}  // namespace

cplx empirical_stieltjes(const SystemConfig& cfg, int trials, cplx z, std::uint64_t seed) {
    return stieltjes_average(cfg, trials, z, seed, true);
}

cplx empirical_stieltjes_serial(const SystemConfig& cfg, int trials, cplx z, std::uint64_t seed) {
    return stieltjes_average(cfg, trials, z, seed, false);
}

}  // namespace detmac

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "detmac/correlation.hpp"
#include "detmac/det_equiv.hpp"
#include "detmac/monte_carlo.hpp"
#include "detmac/precoder.hpp"
#include "experiment_config.hpp"
#include "json.hpp"

using namespace detmac;
using detmac::cli::ConfigError;
using detmac::cli::ExperimentConfig;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr int kExitConfig = 2;
constexpr int kExitNonConvergence = 3;
const double kNatsPerBit = std::log(2.0);

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string subset_label(UserSubset mask, int num_users) {
    std::string label;
    for (int k = 0; k < num_users; ++k) {
        if (!(mask & (UserSubset{1} << k))) continue;
        if (!label.empty()) label += '+';
        label += std::to_string(k + 1);
    }
    return label;
}

PrecoderSet make_precoders(const SystemConfig& system, const std::string& policy,
                           double eta, double epsilon_fp) {
    if (policy == "uniform") return PrecoderSet::uniform(system);
    WaterfillOptions opts;
    opts.eta = eta;
    opts.inner_epsilon = std::min(epsilon_fp, 1e-12);
    return iterative_waterfill(system, full_subset(system.num_users), opts).precoders;
}

int run_experiment(const ExperimentConfig& cfg) {
    const auto started = std::chrono::steady_clock::now();

    std::ostringstream csv;
    const bool with_mc = cfg.trials > 0;
    csv << "schema_version,scenario,N,precoding,subset,units,det_equiv";
    if (with_mc) csv << ",mc_mean,mc_std_error,rel_gap";
    csv << ",iterations\n";

    SolverOptions solver;
    solver.epsilon_fp = cfg.epsilon_fp;

    for (int rx : cfg.rx_antennas) {
        const SystemConfig system = cfg.build_system(rx);
        for (const std::string& policy : cfg.precodings) {
            const PrecoderSet precoders =
                make_precoders(system, policy, cfg.eta, cfg.epsilon_fp);
            const UserSubset all = full_subset(system.num_users);
            for (UserSubset mask = 1; mask <= all; ++mask) {
                const SystemConfig sub = system.restricted(mask);
                const PrecoderSet sub_precoders = precoders.restricted(mask);
                const ShannonValue det =
                    shannon_de(sub, system.sigma2, &sub_precoders, solver);
                const double det_bits = det.value / kNatsPerBit;

                csv << "1," << cfg.scenario << ',' << rx << ',' << policy << ','
                    << subset_label(mask, system.num_users) << ",bits," << fmt(det_bits);
                if (with_mc) {
                    const MonteCarloReport report = ergodic_estimate(
                        system, &precoders, mask, cfg.trials, cfg.seed);
                    csv << ',' << fmt(report.mean / kNatsPerBit) << ','
                        << fmt(report.std_error / kNatsPerBit) << ',' << fmt(report.rel_gap);
                }
                csv << ',' << det.solution.iterations << '\n';
            }
        }
    }

    std::ofstream out(cfg.output_path, std::ios::binary);
    if (!out) throw ConfigError("cannot write output file: " + cfg.output_path);
    out << csv.str();
    out.close();

    const double wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    nlohmann::json sidecar;
    sidecar["schema_version"] = 1;
    sidecar["generator"] = "detmac";
    sidecar["version"] = kVersion;
    sidecar["config"] = cfg.normalized();
    sidecar["wall_time_seconds"] = wall_seconds;
    std::ofstream meta(cfg.output_path + ".meta.json", std::ios::binary);
    if (!meta) throw ConfigError("cannot write sidecar: " + cfg.output_path + ".meta.json");
    meta << sidecar.dump(2) << '\n';

    std::cout << "wrote " << cfg.output_path << " and sidecar (" << fmt(wall_seconds)
              << " s)\n";
    return 0;
}

int run_fixed_point(const ExperimentConfig& cfg, double z_re, double z_im, bool z_given) {
    const SystemConfig system = cfg.build_system(cfg.rx_antennas.front());
    const cplx z = z_given ? cplx(z_re, z_im) : cplx(-system.sigma2, 0.0);
    SolverOptions solver;
    solver.epsilon_fp = cfg.epsilon_fp;
    const FixedPointSolution sol = solve_fixed_point(system, z, nullptr, solver);
    std::printf("z = %.12g + %.12gi\n", z.real(), z.imag());
    for (int k = 0; k < system.num_users; ++k) {
        std::printf("e[%d]     = %.12g%+.12gi\n", k + 1, sol.e[k].real(), sol.e[k].imag());
        std::printf("delta[%d] = %.12g%+.12gi\n", k + 1, sol.delta[k].real(),
                    sol.delta[k].imag());
    }
    std::printf("iterations = %d, residual = %.3g\n", sol.iterations, sol.residual);
    return 0;
}

int run_shannon(const ExperimentConfig& cfg, double truncation) {
    const SystemConfig system = cfg.build_system(cfg.rx_antennas.front());
    SolverOptions solver;
    solver.epsilon_fp = cfg.epsilon_fp;
    const ShannonValue v = shannon_de(system, system.sigma2, nullptr, solver);
    const double integral = shannon_integral_check(system, system.sigma2, truncation);
    std::printf("shannon value   = %.12g nats (%.12g bits) per rx antenna\n", v.value,
                v.value / kNatsPerBit);
    std::printf("integral check  = %.12g nats\n", integral);
    std::printf("gap             = %.3g\n", std::abs(v.value - integral));
    std::printf("terms: logdet_tx = %.12g, logdet_rx = %.12g, coupling = %.12g\n",
                v.logdet_tx_sum, v.logdet_rx, v.coupling);
    return 0;
}

int run_waterfill(const ExperimentConfig& cfg) {
    const SystemConfig system = cfg.build_system(cfg.rx_antennas.front());
    WaterfillOptions opts;
    opts.eta = cfg.eta;
    opts.inner_epsilon = std::min(cfg.epsilon_fp, 1e-12);
    const WaterfillResult r = iterative_waterfill(system, full_subset(system.num_users), opts);
    for (int k = 0; k < system.num_users; ++k) {
        std::printf("user %d: mu = %.12g, powers =", k + 1, r.water_levels[k]);
        for (double lambda : hermitian_eig(r.precoders.precoders[k]).eigenvalues)
            std::printf(" %.6g", lambda);
        std::printf("\n");
    }
    std::printf("objective      = %.12g nats (%.12g bits) per rx antenna\n", r.objective,
                r.objective / kNatsPerBit);
    std::printf("kkt residual   = %.3g\n", r.kkt_residual);
    std::printf("outer iterations = %d (%s)\n", r.outer_iterations,
                r.converged ? "converged" : "budget exhausted; best iterate returned");
    return r.converged ? 0 : kExitNonConvergence;
}

int run_rate_region(const ExperimentConfig& cfg) {
    std::ostringstream csv;
    csv << "schema_version,scenario,N,precoding,subset,units,constraint\n";
    for (int rx : cfg.rx_antennas) {
        const SystemConfig system = cfg.build_system(rx);
        for (const std::string& policy : cfg.precodings) {
            const PrecoderSet precoders =
                make_precoders(system, policy, cfg.eta, cfg.epsilon_fp);
            for (const auto& [mask, value] : rate_region_constraints(system, precoders))
                csv << "1," << cfg.scenario << ',' << rx << ',' << policy << ','
                    << subset_label(mask, system.num_users) << ",bits,"
                    << fmt(value / kNatsPerBit) << '\n';
        }
    }
    std::cout << csv.str();
    return 0;
}

int run_montecarlo(const ExperimentConfig& cfg) {
    if (cfg.trials < 2) throw ConfigError("montecarlo needs trials >= 2");
    const SystemConfig system = cfg.build_system(cfg.rx_antennas.front());
    const std::string policy = cfg.precodings.front();
    const PrecoderSet precoders = make_precoders(system, policy, cfg.eta, cfg.epsilon_fp);
    const MonteCarloReport report = ergodic_estimate(
        system, &precoders, full_subset(system.num_users), cfg.trials, cfg.seed);
    std::printf("trials      = %d (seed %llu, %s precoding)\n", report.trials,
                static_cast<unsigned long long>(cfg.seed), policy.c_str());
    std::printf("mc mean     = %.12g nats per rx antenna\n", report.mean);
    std::printf("std error   = %.3g\n", report.std_error);
    std::printf("det equiv   = %.12g\n", report.det_equiv);
    std::printf("rel gap     = %.3g\n", report.rel_gap);
    return 0;
}

int run_selftest() {
    int failures = 0;
    auto check = [&](bool ok, const std::string& what) {
        std::printf("[%s] %s\n", ok ? "ok" : "FAIL", what.c_str());
        if (!ok) ++failures;
    };

    SystemConfig mp;
    mp.num_users = 1;
    mp.num_rx = 8;
    mp.num_tx = {8};
    mp.rx_corr = {HermitianMatrix::identity(8)};
    mp.tx_corr = {HermitianMatrix::identity(8)};
    mp.sigma2 = 1.0;
    mp.power_budget = {1.0};

    const double e_ref = (std::sqrt(5.0) - 1.0) / 2.0;
    const double v_ref = 2.0 * std::log(1.0 + e_ref) - e_ref * e_ref;

    const FixedPointSolution sol = solve_fixed_point(mp, cplx(-1.0, 0.0));
    check(std::abs(sol.e[0].real() - e_ref) <= 1e-8, "closed-form fixed point e");
    check(std::abs(shannon_de(mp, 1.0).value - v_ref) <= 1e-8, "closed-form shannon value");
    check(std::abs(shannon_de(mp, 1.0).value - shannon_integral_check(mp, 1.0, 1e6)) <= 1e-4,
          "integral identity cross-check");

    const WaterfillStep step = waterfill_step({2.0, 1.0}, 1.0, 1.0, 1.0);
    check(std::abs(step.water_level - 1.75) <= 1e-12 &&
              std::abs(step.powers[0] - 1.25) <= 1e-12,
          "hand-solved water-filling step");

    const ComplexGaussianMatrix a = sample_complex_gaussian(16, 16, 1.0 / 16, 7, 3);
    const ComplexGaussianMatrix b = sample_complex_gaussian(16, 16, 1.0 / 16, 7, 3);
    check(a.entries == b.entries, "bit-identical resampling");

    const CorrelationMatrix jakes =
        jakes_correlation(grid_array(2, 1, 1, 0.35, 1.0), {0.0, 2.0 * M_PI});
    check(std::abs(jakes.matrix(0, 1).real() - std::cyl_bessel_j(0.0, 2.0 * M_PI * 0.35)) <=
              1e-9,
          "full-circle Bessel identity");

    std::printf("%s\n", failures == 0 ? "selftest passed" : "selftest FAILED");
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"deterministic-equivalent rate analysis for correlated multi-user MIMO"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);

    std::string config_path;
    double z_re = 0.0, z_im = 0.0;
    bool z_given = false;
    double truncation = 1e6;

    auto add_config = [&](CLI::App* cmd) {
        cmd->add_option("-c,--config", config_path, "JSON experiment config (see docs/config.md)")
            ->required();
    };

    CLI::App* cmd_run = app.add_subcommand("run", "run a full experiment, write CSV + sidecar");
    add_config(cmd_run);

    CLI::App* cmd_fp =
        app.add_subcommand("fixed-point", "solve the e/delta system at one evaluation point");
    add_config(cmd_fp);
    cmd_fp->add_option("--z-re", z_re, "real part of z (default -sigma2)");
    CLI::Option* z_im_opt = cmd_fp->add_option("--z-im", z_im, "imaginary part of z");

    CLI::App* cmd_shannon =
        app.add_subcommand("shannon", "deterministic Shannon value and integral cross-check");
    add_config(cmd_shannon);
    cmd_shannon->add_option("--truncation", truncation, "integral truncation point (default 1e6)");

    CLI::App* cmd_wf = app.add_subcommand("waterfill", "optimize precoders by water-filling");
    add_config(cmd_wf);

    CLI::App* cmd_rr =
        app.add_subcommand("rate-region", "emit all subset constraints as CSV on stdout");
    add_config(cmd_rr);

    CLI::App* cmd_mc =
        app.add_subcommand("montecarlo", "Monte Carlo estimate against the deterministic value");
    add_config(cmd_mc);

    app.add_subcommand("selftest", "closed-form and oracle smoke checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (app.got_subcommand("selftest")) return run_selftest();
        const ExperimentConfig cfg = ExperimentConfig::from_file(config_path);
        if (app.got_subcommand(cmd_run)) return run_experiment(cfg);
        if (app.got_subcommand(cmd_fp)) {
            z_given = cmd_fp->count("--z-re") > 0 || z_im_opt->count() > 0;
            return run_fixed_point(cfg, z_re, z_im, z_given);
        }
        if (app.got_subcommand(cmd_shannon)) return run_shannon(cfg, truncation);
        if (app.got_subcommand(cmd_wf)) return run_waterfill(cfg);
        if (app.got_subcommand(cmd_rr)) return run_rate_region(cfg);
        if (app.got_subcommand(cmd_mc)) return run_montecarlo(cfg);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const ConvergenceError& e) {
        std::cerr << "numerical non-convergence: " << e.what() << '\n';
        return kExitNonConvergence;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

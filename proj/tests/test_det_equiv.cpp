#include <cmath>
#include <complex>

#include "detmac/det_equiv.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace detmac;
using detmac::testing::mp_config;
using detmac::testing::random_config;
using detmac::testing::random_precoders;

TEST_CASE("Marchenko-Pastur closed form at z = -1") {
    const SystemConfig cfg = mp_config(8);
    const FixedPointSolution sol = solve_fixed_point(cfg, cplx(-1.0, 0.0));
    CHECK(std::abs(sol.e[0] - testing::mp_e_reference()) <= 1e-9);
    CHECK(std::abs(sol.delta[0] - sol.e[0]) <= 1e-9);
    CHECK(sol.residual <= 1e-10);

    const cplx m = stieltjes_de(cfg, cplx(-1.0, 0.0), sol);
    CHECK(std::abs(m - testing::mp_e_reference()) <= 1e-9);

    const ShannonValue v = shannon_de(cfg, 1.0);
    CHECK(std::abs(v.value - testing::mp_shannon_reference()) <= 1e-9);
    CHECK(v.value == doctest::Approx(v.logdet_tx_sum + v.logdet_rx - v.coupling).epsilon(1e-14));
}

TEST_CASE("zero transmit correlation gives the resolvent of the zero matrix") {
    SystemConfig cfg = random_config(3, {.max_users = 1, .max_rx = 8, .max_tx = 8});
    for (auto& t : cfg.tx_corr) t = HermitianMatrix::zero(t.dim());
    const double x = 2.5;
    const FixedPointSolution sol = solve_fixed_point(cfg, cplx(-x, 0.0));
    CHECK(sol.e[0].real() ==
          doctest::Approx(cfg.rx_corr[0].trace() / (cfg.num_rx * x)).epsilon(1e-12));
    CHECK(sol.delta[0] == cplx(0.0, 0.0));
}

TEST_CASE("symmetric two-user configs have identical coordinates") {
    const SystemConfig one = random_config(11, {.max_users = 1, .max_rx = 10, .max_tx = 10});
    SystemConfig two = one;
    two.num_users = 2;
    two.num_tx.push_back(one.num_tx[0]);
    two.rx_corr.push_back(one.rx_corr[0]);
    two.tx_corr.push_back(one.tx_corr[0]);
    two.power_budget.push_back(one.power_budget[0]);
    const FixedPointSolution sol = solve_fixed_point(two, cplx(-two.sigma2, 0.0));
    CHECK(std::abs(sol.e[0] - sol.e[1]) <= 1e-12);
    CHECK(std::abs(sol.delta[0] - sol.delta[1]) <= 1e-12);
}

TEST_CASE("identity receive correlation collapses the Stieltjes value onto e") {
    SystemConfig cfg = random_config(5, {.max_users = 1, .max_rx = 6, .max_tx = 9});
    cfg.rx_corr[0] = HermitianMatrix::identity(cfg.num_rx);
    const cplx z(-0.7, 0.0);
    const FixedPointSolution sol = solve_fixed_point(cfg, z);
    CHECK(std::abs(stieltjes_de(cfg, z, sol) - sol.e[0]) <= 1e-10);
}

TEST_CASE("resolvent normalization far from the spectrum") {
    const SystemConfig cfg = random_config(7, {.max_users = 2, .max_rx = 8, .max_tx = 8});
    double previous = 1.0;
    for (double t : {1e2, 1e4, 1e6}) {
        const cplx z(0.0, t);
        const FixedPointSolution sol = solve_fixed_point(cfg, z);
        const double gap = std::abs(z * stieltjes_de(cfg, z, sol) + 1.0);
        CHECK(gap < previous);
        previous = gap;
    }
    CHECK(previous < 1e-5);
}

TEST_CASE("Herglotz sign conditions in the upper half-plane") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const SystemConfig cfg =
            random_config(900 + seed, {.max_users = 3, .max_rx = 8, .max_tx = 8,
                                       .with_offset = (seed % 2 == 1)});
        const CounterRng rng(seed, 31);
        const cplx z(4.0 * rng.uniform_open(0) - 2.0, 0.05 + 2.0 * rng.uniform_open(1));
        const FixedPointSolution sol = solve_fixed_point(cfg, z);
        for (const cplx& e : sol.e) CHECK(e.imag() > 0.0);
        const cplx m = stieltjes_de(cfg, z, sol);
        CHECK(m.imag() > 0.0);
        CHECK((z * m).imag() > 0.0);
    }
}

TEST_CASE("lower half-plane values conjugate the upper half-plane ones") {
    const SystemConfig cfg = random_config(13, {.max_users = 2, .max_rx = 6, .max_tx = 6});
    const cplx z(-0.4, 0.8);
    const FixedPointSolution up = solve_fixed_point(cfg, z);
    const FixedPointSolution down = solve_fixed_point(cfg, std::conj(z));
    for (int k = 0; k < cfg.num_users; ++k)
        CHECK(std::abs(down.e[k] - std::conj(up.e[k])) <= 1e-12);
    CHECK(std::abs(stieltjes_de(cfg, std::conj(z), down) -
                   std::conj(stieltjes_de(cfg, z, up))) <= 1e-12);
}

TEST_CASE("distinct admissible initializations reach the same fixed point") {
    for (std::uint64_t seed = 40; seed < 44; ++seed) {
        const SystemConfig cfg = random_config(seed);
        const double x = cfg.sigma2;
        SolverOptions far_start;
        far_start.initial_e.assign(cfg.num_users, cplx(10.0 / x, 0.0));
        const FixedPointSolution a = solve_fixed_point(cfg, cplx(-x, 0.0));
        const FixedPointSolution b = solve_fixed_point(cfg, cplx(-x, 0.0), nullptr, far_start);
        for (int k = 0; k < cfg.num_users; ++k)
            CHECK(std::abs(a.e[k] - b.e[k]) <= 10.0 * 1e-10);
    }
}

TEST_CASE("Shannon value decreases in the noise power") {
    const SystemConfig cfg = random_config(17);
    double previous = 1e300;
    for (double x : {0.01, 0.1, 1.0, 10.0, 100.0}) {
        const double value = shannon_de(cfg, x).value;
        CHECK(value >= 0.0);
        CHECK(value < previous);
        previous = value;
    }
}

TEST_CASE("noise/power rescaling leaves the Shannon value unchanged") {
    const SystemConfig cfg = random_config(19);
    const PrecoderSet precoders = random_precoders(cfg, 23);
    const double base = shannon_de(cfg, cfg.sigma2, &precoders).value;

    const double alpha = 2.0;
    SystemConfig scaled_cfg = cfg;
    scaled_cfg.sigma2 *= alpha;
    PrecoderSet scaled = precoders;
    for (auto& p : scaled.precoders) p = p.scaled(alpha);
    for (auto& b : scaled.budgets) b *= alpha;
    const double rescaled = shannon_de(scaled_cfg, scaled_cfg.sigma2, &scaled).value;
    CHECK(rescaled == doctest::Approx(base).epsilon(1e-9));
}

TEST_CASE("zero precoders give exactly zero rate") {
    const SystemConfig cfg = random_config(29, {.max_users = 2, .max_rx = 6, .max_tx = 6});
    PrecoderSet zero;
    for (int k = 0; k < cfg.num_users; ++k) {
        zero.precoders.push_back(HermitianMatrix::zero(cfg.num_tx[k]));
        zero.budgets.push_back(cfg.power_budget[k]);
    }
    CHECK(shannon_de(cfg, cfg.sigma2, &zero).value == 0.0);
}

TEST_CASE("integral identity on the Marchenko-Pastur case") {
    const SystemConfig cfg = mp_config(8);
    const double direct = shannon_de(cfg, 1.0).value;
    const double integral = shannon_integral_check(cfg, 1.0, 1e6);
    CHECK(std::abs(direct - integral) <= 1e-4);
    CHECK(shannon_integral_check(cfg, 1.0, 1.0) == 0.0);
}

TEST_CASE("integral identity on a random config") {
    const SystemConfig cfg = random_config(31, {.max_users = 2, .max_rx = 10, .max_tx = 10});
    const double direct = shannon_de(cfg, cfg.sigma2).value;
    const double integral = shannon_integral_check(cfg, cfg.sigma2, 1e6);
    CHECK(std::abs(direct - integral) <= 1e-4);
}

TEST_CASE("rate region constraints: lattice structure") {
    SystemConfig cfg = random_config(37, {.max_users = 3, .max_rx = 8, .max_tx = 8});
    const PrecoderSet uniform = PrecoderSet::uniform(cfg);
    const auto constraints = rate_region_constraints(cfg, uniform);
    CHECK(constraints.size() == (size_t{1} << cfg.num_users) - 1);

    // one user: the single constraint is the Shannon value itself
    if (cfg.num_users == 1)
        CHECK(constraints.at(1) ==
              doctest::Approx(shannon_de(cfg, cfg.sigma2, &uniform).value));

    // adding a user never decreases a constraint
    for (const auto& [mask, value] : constraints) {
        for (int k = 0; k < cfg.num_users; ++k) {
            const UserSubset with = mask | (UserSubset{1} << k);
            if (with == mask) continue;
            CHECK(constraints.at(with) >= value - 1e-12);
        }
    }
}

TEST_CASE("rate region of a symmetric pair is symmetric") {
    const SystemConfig one = random_config(41, {.max_users = 1, .max_rx = 8, .max_tx = 8});
    SystemConfig two = one;
    two.num_users = 2;
    two.num_tx.push_back(one.num_tx[0]);
    two.rx_corr.push_back(one.rx_corr[0]);
    two.tx_corr.push_back(one.tx_corr[0]);
    two.power_budget.push_back(one.power_budget[0]);
    const auto constraints = rate_region_constraints(two, PrecoderSet::uniform(two));
    CHECK(constraints.at(0b01) == doctest::Approx(constraints.at(0b10)).epsilon(1e-12));
}

TEST_CASE("solver rejects invalid evaluation points and exhausted budgets") {
    const SystemConfig cfg = mp_config(4);
    CHECK_THROWS_AS((void)solve_fixed_point(cfg, cplx(1.0, 0.0)), std::invalid_argument);
    CHECK_THROWS_AS((void)solve_fixed_point(cfg, cplx(0.0, 0.0)), std::invalid_argument);
    SolverOptions strangled;
    strangled.max_iterations = 2;
    strangled.epsilon_fp = 1e-16;
    CHECK_THROWS_AS((void)solve_fixed_point(cfg, cplx(-1.0, 0.0), nullptr, strangled),
                    ConvergenceError);
}

TEST_CASE("precoded solve matches a manually absorbed transmit covariance") {
    const SystemConfig cfg = random_config(43, {.max_users = 2, .max_rx = 6, .max_tx = 6});
    const PrecoderSet precoders = random_precoders(cfg, 47);
    const FixedPointSolution via_precoders =
        solve_fixed_point(cfg, cplx(-cfg.sigma2, 0.0), &precoders);
    const FixedPointSolution via_effective = solve_fixed_point_effective(
        cfg, cplx(-cfg.sigma2, 0.0), effective_tx_covariances(cfg, &precoders));
    for (int k = 0; k < cfg.num_users; ++k)
        CHECK(std::abs(via_precoders.e[k] - via_effective.e[k]) == 0.0);
}

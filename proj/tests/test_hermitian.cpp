#include <cmath>
#include <complex>

#include "detmac/hermitian.hpp"
#include "detmac/rng.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace detmac;

namespace {

double reconstruction_error(const HermitianMatrix& a, const EigenDecomposition& d) {
    const HermitianMatrix rebuilt = HermitianMatrix::sandwich(d.eigenvectors, d.eigenvalues);
    HermitianMatrix diff = rebuilt;
    diff.add_scaled(a, -1.0);
    return diff.frobenius_norm();
}

double unitarity_error(const CMatrix& u) {
    const int n = u.rows();
    CMatrix g = u.adjoint() * u;
    for (int i = 0; i < n; ++i) g(i, i) -= 1.0;
    return g.frobenius_norm();
}

HermitianMatrix random_hermitian(int dim, std::uint64_t seed) {
    const ComplexGaussianMatrix g = sample_complex_gaussian(dim, dim, 1.0, seed, 17);
    CMatrix sym(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = i; j < dim; ++j)
            sym(i, j) = i == j ? g.entries(i, j).real() : g.entries(i, j);
    return HermitianMatrix::from_upper(sym);
}

}  // namespace

TEST_CASE("hermitian structure is exact by construction") {
    const HermitianMatrix a = random_hermitian(7, 11);
    const HermitianMatrix products[] = {
        HermitianMatrix::gram(a.full()),
        HermitianMatrix::congruence(a, HermitianMatrix::identity(7)),
        testing::random_normalized_psd(7, 5, 6),
    };
    for (const HermitianMatrix& h : products) {
        double worst = 0.0;
        for (int i = 0; i < h.dim(); ++i)
            for (int j = 0; j < h.dim(); ++j)
                worst = std::max(worst, std::abs(h(i, j) - std::conj(h(j, i))));
        CHECK(worst == 0.0);
    }
}

TEST_CASE("eig of the identity") {
    const EigenDecomposition d = hermitian_eig(HermitianMatrix::identity(3));
    for (double lambda : d.eigenvalues) CHECK(lambda == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(unitarity_error(d.eigenvectors) < 1e-12);
}

TEST_CASE("eig of a diagonal matrix sorts descending") {
    const EigenDecomposition d = hermitian_eig(HermitianMatrix::diagonal({3.0, 1.0, 2.0}));
    CHECK(d.eigenvalues[0] == doctest::Approx(3.0));
    CHECK(d.eigenvalues[1] == doctest::Approx(2.0));
    CHECK(d.eigenvalues[2] == doctest::Approx(1.0));
    // permutation eigenvectors: each column has a single unit entry
    for (int k = 0; k < 3; ++k) {
        double colmax = 0.0;
        for (int i = 0; i < 3; ++i) colmax = std::max(colmax, std::abs(d.eigenvectors(i, k)));
        CHECK(colmax == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("eig reconstruction on random instances up to dim 32") {
    for (int rep = 0; rep < 1000; ++rep) {
        const CounterRng rng(rep, 99);
        const int dim = 1 + static_cast<int>(rng.bits(0) % 32);
        const HermitianMatrix a = random_hermitian(dim, 1000 + rep);
        const EigenDecomposition d = hermitian_eig(a);
        const double norm = a.frobenius_norm();
        CHECK(reconstruction_error(a, d) <= 1e-10 * std::max(norm, 1e-30));
        CHECK(unitarity_error(d.eigenvectors) <= 1e-10 * std::sqrt(static_cast<double>(dim)));
        for (size_t i = 1; i < d.eigenvalues.size(); ++i)
            CHECK(d.eigenvalues[i - 1] >= d.eigenvalues[i]);
    }
}

TEST_CASE("log_det_hpd closed forms") {
    CHECK(log_det_hpd(HermitianMatrix::identity(4)) == 0.0);
    const double e1 = std::exp(1.0);
    CHECK(log_det_hpd(HermitianMatrix::diagonal({e1, e1 * e1})) ==
          doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("log_det_hpd matches the eigenvalue oracle") {
    for (int rep = 0; rep < 20; ++rep) {
        const int dim = 3 + rep % 10;
        HermitianMatrix a = HermitianMatrix::gram(
            sample_complex_gaussian(dim, dim, 1.0, 42 + rep, 3).entries);
        a.add_scaled(HermitianMatrix::identity(dim), 1.0);
        double oracle = 0.0;
        for (double lambda : hermitian_eig(a).eigenvalues) oracle += std::log(lambda);
        CHECK(log_det_hpd(a) == doctest::Approx(oracle).epsilon(1e-10));
    }
}

TEST_CASE("log_det_hpd scaling identity") {
    for (double c : {0.5, 2.0, 13.7}) {
        const HermitianMatrix a = testing::random_normalized_psd(9, 7, 8, 0.5);
        const double lhs = log_det_hpd(a.scaled(c));
        const double rhs = 9.0 * std::log(c) + log_det_hpd(a);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("log_det_hpd rejects indefinite input") {
    CHECK_THROWS_AS((void)log_det_hpd(HermitianMatrix::diagonal({1.0, -1.0})),
                    NotPositiveDefiniteError);
    HermitianMatrix a = random_hermitian(5, 3);  // mean-zero spectrum, some pivot fails
    CHECK_THROWS_AS((void)log_det_hpd(a.plus(HermitianMatrix::identity(5), -100.0)),
                    NotPositiveDefiniteError);
}

TEST_CASE("hermitian_sqrt closed forms") {
    CHECK(hermitian_sqrt(HermitianMatrix::identity(4)).plus(HermitianMatrix::identity(4), -1.0)
              .frobenius_norm() < 1e-12);
    const HermitianMatrix r = hermitian_sqrt(HermitianMatrix::diagonal({4.0, 9.0}));
    CHECK(r(0, 0).real() == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(r(1, 1).real() == doctest::Approx(3.0).epsilon(1e-13));
}

TEST_CASE("hermitian_sqrt reconstruction on random PSD input") {
    for (int rep = 0; rep < 25; ++rep) {
        const int dim = 2 + rep;
        const HermitianMatrix a = testing::random_normalized_psd(dim, 77 + rep, 1);
        const HermitianMatrix root = hermitian_sqrt(a);
        HermitianMatrix diff = HermitianMatrix::congruence(root, HermitianMatrix::identity(dim));
        diff.add_scaled(a, -1.0);
        CHECK(diff.frobenius_norm() <= 1e-9 * a.frobenius_norm());
        for (double lambda : hermitian_eig(root).eigenvalues) CHECK(lambda >= -1e-12);
    }
}

TEST_CASE("hermitian_sqrt clamps round-off negatives and rejects real ones") {
    const EigenDecomposition basis = hermitian_eig(testing::random_normalized_psd(4, 5, 2));
    const HermitianMatrix tiny =
        HermitianMatrix::sandwich(basis.eigenvectors, {2.0, 1.0, 0.5, -1e-12});
    CHECK_NOTHROW((void)hermitian_sqrt(tiny));
    const HermitianMatrix bad =
        HermitianMatrix::sandwich(basis.eigenvectors, {2.0, 1.0, 0.5, -0.1});
    CHECK_THROWS_AS((void)hermitian_sqrt(bad), std::invalid_argument);
}

TEST_CASE("cholesky inverse and trace agree") {
    const HermitianMatrix a = testing::random_normalized_psd(8, 21, 4, 0.3);
    const CholeskyFactor chol(a);
    const HermitianMatrix inv = chol.inverse();
    CHECK(chol.trace_inverse() == doctest::Approx(inv.trace()).epsilon(1e-12));
    // a * a^-1 = I
    CMatrix prod = a.full() * inv.full();
    for (int i = 0; i < 8; ++i) prod(i, i) -= 1.0;
    CHECK(prod.frobenius_norm() < 1e-10);
}

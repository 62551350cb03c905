#include "detmac/hermitian.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace detmac {

CMatrix CMatrix::identity(int n) {
    CMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

CMatrix CMatrix::adjoint() const {
    CMatrix r(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) r(j, i) = std::conj((*this)(i, j));
    return r;
}

double CMatrix::frobenius_norm() const {
    double s = 0.0;
    for (const cplx& v : data_) s += std::norm(v);
    return std::sqrt(s);
}

CMatrix operator*(const CMatrix& a, const CMatrix& b) {
    if (a.cols_ != b.rows_) throw std::invalid_argument("CMatrix multiply: shape mismatch");
    CMatrix r(a.rows_, b.cols_);
    for (int i = 0; i < a.rows_; ++i) {
        for (int k = 0; k < a.cols_; ++k) {
            const cplx aik = a(i, k);
            if (aik == cplx(0.0)) continue;
            for (int j = 0; j < b.cols_; ++j) r(i, j) += aik * b(k, j);
        }
    }
    return r;
}

HermitianMatrix HermitianMatrix::from_upper(const CMatrix& full) {
    if (full.rows() != full.cols())
        throw std::invalid_argument("HermitianMatrix: matrix must be square");
    const int n = full.rows();
    HermitianMatrix h(n);
    for (int i = 0; i < n; ++i) {
        h.m_(i, i) = full(i, i).real();
        for (int j = i + 1; j < n; ++j) {
            h.m_(i, j) = full(i, j);
            h.m_(j, i) = std::conj(full(i, j));
        }
    }
    return h;
}

HermitianMatrix HermitianMatrix::identity(int dim) {
    HermitianMatrix h(dim);
    for (int i = 0; i < dim; ++i) h.m_(i, i) = 1.0;
    return h;
}

HermitianMatrix HermitianMatrix::zero(int dim) { return HermitianMatrix(dim); }

HermitianMatrix HermitianMatrix::diagonal(const std::vector<double>& d) {
    HermitianMatrix h(static_cast<int>(d.size()));
    for (size_t i = 0; i < d.size(); ++i) h.m_(static_cast<int>(i), static_cast<int>(i)) = d[i];
    return h;
}

HermitianMatrix HermitianMatrix::gram(const CMatrix& a) {
    const int n = a.rows();
    const int m = a.cols();
    HermitianMatrix h(n);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            cplx s = 0.0;
            for (int k = 0; k < m; ++k) s += a(i, k) * std::conj(a(j, k));
            if (i == j) s = s.real();
            h.m_(i, j) = s;
            h.m_(j, i) = std::conj(s);
        }
    }
    return h;
}

HermitianMatrix HermitianMatrix::sandwich(const CMatrix& u, const std::vector<double>& d) {
    if (u.cols() != static_cast<int>(d.size()))
        throw std::invalid_argument("sandwich: dimension mismatch");
    const int n = u.rows();
    const int m = u.cols();
    HermitianMatrix h(n);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            cplx s = 0.0;
            for (int k = 0; k < m; ++k) s += d[k] * u(i, k) * std::conj(u(j, k));
            if (i == j) s = s.real();
            h.m_(i, j) = s;
            h.m_(j, i) = std::conj(s);
        }
    }
    return h;
}

HermitianMatrix HermitianMatrix::congruence(const HermitianMatrix& s, const HermitianMatrix& p) {
    return from_upper(s.full() * p.full() * s.full());
}

void HermitianMatrix::set_upper(int i, int j, cplx v) {
    if (i > j) throw std::invalid_argument("set_upper: need i <= j");
    if (i == j) v = v.real();
    m_(i, j) = v;
    m_(j, i) = std::conj(v);
}

double HermitianMatrix::trace() const {
    double t = 0.0;
    for (int i = 0; i < dim(); ++i) t += m_(i, i).real();
    return t;
}

HermitianMatrix HermitianMatrix::scaled(double s) const {
    HermitianMatrix h(dim());
    for (size_t i = 0; i < m_.data().size(); ++i) h.m_.data()[i] = m_.data()[i] * s;
    return h;
}

HermitianMatrix HermitianMatrix::plus(const HermitianMatrix& other, double weight) const {
    HermitianMatrix h = *this;
    h.add_scaled(other, weight);
    return h;
}

void HermitianMatrix::add_scaled(const HermitianMatrix& other, double weight) {
    if (other.dim() != dim()) throw std::invalid_argument("add_scaled: dimension mismatch");
    for (size_t i = 0; i < m_.data().size(); ++i) m_.data()[i] += weight * other.m_.data()[i];
}

double HermitianMatrix::trace_product(const HermitianMatrix& other) const {
    if (other.dim() != dim()) throw std::invalid_argument("trace_product: dimension mismatch");
    // tr(AB) = sum_ij A_ij B_ji = sum_ij A_ij conj(B_ij); real for Hermitian A, B.
    double t = 0.0;
    const auto& a = m_.data();
    const auto& b = other.m_.data();
    for (size_t i = 0; i < a.size(); ++i)
        t += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
    return t;
}

namespace {

double off_diagonal_norm(const CMatrix& a) {
    double s = 0.0;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
}

}  // namespace

EigenDecomposition hermitian_eig(const HermitianMatrix& input) {
    const int n = input.dim();
    CMatrix a = input.full();
    CMatrix v = CMatrix::identity(n);

    const double norm_a = a.frobenius_norm();
    const double threshold = 1e-13 * norm_a;
    const int max_sweeps = 30;

    double off = off_diagonal_norm(a);
    int sweep = 0;
    while (off > threshold && sweep < max_sweeps) {
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const cplx apq = a(p, q);
                const double beta = std::abs(apq);
                if (beta == 0.0) continue;
                const cplx phase = apq / beta;  // e^{i phi}
                const double alpha = a(p, p).real();
                const double gamma = a(q, q).real();
                const double tau = (gamma - alpha) / (2.0 * beta);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                const cplx gpq = s * phase;              // G_pq
                const cplx gqp = -s * std::conj(phase);  // G_qp

                // Columns p and q of a <- a G, then rows by conjugation (a <- G^H a G).
                for (int j = 0; j < n; ++j) {
                    const cplx ajp = a(j, p);
                    const cplx ajq = a(j, q);
                    a(j, p) = c * ajp + gqp * ajq;
                    a(j, q) = gpq * ajp + c * ajq;
                }
                for (int j = 0; j < n; ++j) {
                    a(p, j) = std::conj(a(j, p));
                    a(q, j) = std::conj(a(j, q));
                }
                a(p, p) = alpha - t * beta;
                a(q, q) = gamma + t * beta;
                a(p, q) = 0.0;
                a(q, p) = 0.0;

                for (int j = 0; j < n; ++j) {
                    const cplx vjp = v(j, p);
                    const cplx vjq = v(j, q);
                    v(j, p) = c * vjp + gqp * vjq;
                    v(j, q) = gpq * vjp + c * vjq;
                }
            }
        }
        off = off_diagonal_norm(a);
        ++sweep;
    }
    if (off > threshold)
        throw ConvergenceError("hermitian_eig: sweep budget exhausted, off-diagonal norm " +
                                   std::to_string(off),
                               off);

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int i, int j) { return a(i, i).real() > a(j, j).real(); });

    EigenDecomposition d;
    d.eigenvalues.resize(n);
    d.eigenvectors = CMatrix(n, n);
    for (int k = 0; k < n; ++k) {
        d.eigenvalues[k] = a(order[k], order[k]).real();
        for (int i = 0; i < n; ++i) d.eigenvectors(i, k) = v(i, order[k]);
    }
    return d;
}

CholeskyFactor::CholeskyFactor(const HermitianMatrix& a) : l_(a.dim(), a.dim()) {
    const int n = a.dim();
    for (int j = 0; j < n; ++j) {
        double d = a(j, j).real();
        for (int k = 0; k < j; ++k) d -= std::norm(l_(j, k));
        if (!(d > 0.0))
            throw NotPositiveDefiniteError("cholesky: not positive definite (pivot " +
                                           std::to_string(d) + " at index " + std::to_string(j) +
                                           ")");
        const double ljj = std::sqrt(d);
        l_(j, j) = ljj;
        for (int i = j + 1; i < n; ++i) {
            cplx s = a(i, j);
            for (int k = 0; k < j; ++k) s -= l_(i, k) * std::conj(l_(j, k));
            l_(i, j) = s / ljj;
        }
    }
}

double CholeskyFactor::log_det() const {
    double s = 0.0;
    for (int i = 0; i < dim(); ++i) s += std::log(l_(i, i).real());
    return 2.0 * s;
}

void CholeskyFactor::solve_lower_in_place(CMatrix& x) const {
    const int n = dim();
    if (x.rows() != n) throw std::invalid_argument("solve_lower: shape mismatch");
    const int m = x.cols();
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < i; ++k) {
            const cplx lik = l_(i, k);
            if (lik == cplx(0.0)) continue;
            for (int j = 0; j < m; ++j) x(i, j) -= lik * x(k, j);
        }
        const double lii = l_(i, i).real();
        for (int j = 0; j < m; ++j) x(i, j) /= lii;
    }
}

void CholeskyFactor::solve_lower_adjoint_in_place(CMatrix& x) const {
    const int n = dim();
    if (x.rows() != n) throw std::invalid_argument("solve_lower_adjoint: shape mismatch");
    const int m = x.cols();
    for (int i = n - 1; i >= 0; --i) {
        for (int k = i + 1; k < n; ++k) {
            const cplx lki = std::conj(l_(k, i));
            if (lki == cplx(0.0)) continue;
            for (int j = 0; j < m; ++j) x(i, j) -= lki * x(k, j);
        }
        const double lii = l_(i, i).real();
        for (int j = 0; j < m; ++j) x(i, j) /= lii;
    }
}

HermitianMatrix CholeskyFactor::inverse() const {
    const int n = dim();
    CMatrix x = CMatrix::identity(n);
    solve_lower_in_place(x);          // x = l^-1
    solve_lower_adjoint_in_place(x);  // x = l^-H l^-1 = a^-1
    return HermitianMatrix::from_upper(x);
}

double CholeskyFactor::trace_inverse() const {
    // tr(a^-1) = ||l^-1||_F^2
    CMatrix x = CMatrix::identity(dim());
    solve_lower_in_place(x);
    double s = 0.0;
    for (const cplx& v : x.data()) s += std::norm(v);
    return s;
}

double log_det_hpd(const HermitianMatrix& a) { return CholeskyFactor(a).log_det(); }

HermitianMatrix hermitian_sqrt(const HermitianMatrix& a) {
    EigenDecomposition d = hermitian_eig(a);
    const double scale =
        d.eigenvalues.empty() ? 0.0 : std::max(std::abs(d.eigenvalues.front()),
                                               std::abs(d.eigenvalues.back()));
    std::vector<double> roots(d.eigenvalues.size());
    for (size_t i = 0; i < d.eigenvalues.size(); ++i) {
        double lambda = d.eigenvalues[i];
        if (lambda < -1e-10 * scale)
            throw std::invalid_argument("hermitian_sqrt: not nonnegative definite (eigenvalue " +
                                        std::to_string(lambda) + ")");
        if (lambda < 0.0) lambda = 0.0;
        roots[i] = std::sqrt(lambda);
    }
    return HermitianMatrix::sandwich(d.eigenvectors, roots);
}

}  // namespace detmac

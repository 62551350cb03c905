#ifndef DETMAC_HERMITIAN_HPP
#define DETMAC_HERMITIAN_HPP

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace detmac {

using cplx = std::complex<double>;

/// Thrown when an iterative kernel fails to reach its tolerance.
struct ConvergenceError : std::runtime_error {
    ConvergenceError(const std::string& what, double residual_)
        : std::runtime_error(what), residual(residual_) {}
    double residual;
};

/// Thrown when a factorization meets a non-positive pivot.
struct NotPositiveDefiniteError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Dense complex matrix, row-major.
class CMatrix {
  public:
    CMatrix() = default;
    CMatrix(int rows, int cols)
        : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols) {
        if (rows < 1 || cols < 1) throw std::invalid_argument("CMatrix: dimensions must be >= 1");
    }

    static CMatrix identity(int n);

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    cplx& operator()(int i, int j) { return data_[static_cast<size_t>(i) * cols_ + j]; }
    const cplx& operator()(int i, int j) const { return data_[static_cast<size_t>(i) * cols_ + j]; }

    const std::vector<cplx>& data() const { return data_; }
    std::vector<cplx>& data() { return data_; }

    CMatrix adjoint() const;
    double frobenius_norm() const;

    friend CMatrix operator*(const CMatrix& a, const CMatrix& b);
    friend bool operator==(const CMatrix& a, const CMatrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

  private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<cplx> data_;
};

/// Hermitian matrix; only the upper triangle is authoritative, the lower
/// triangle and the real diagonal are filled in at construction.
class HermitianMatrix {
  public:
    HermitianMatrix() = default;
    explicit HermitianMatrix(int dim) : m_(dim, dim) {}

    /// Mirrors the upper triangle of `full` and drops any imaginary part on
    /// the diagonal. Entries below the diagonal are ignored.
    static HermitianMatrix from_upper(const CMatrix& full);

    static HermitianMatrix identity(int dim);
    static HermitianMatrix zero(int dim);
    static HermitianMatrix diagonal(const std::vector<double>& d);

    /// a * aᴴ (always Hermitian nonnegative definite).
    static HermitianMatrix gram(const CMatrix& a);
    /// u * diag(d) * uᴴ with real d.
    static HermitianMatrix sandwich(const CMatrix& u, const std::vector<double>& d);
    /// s * p * s for Hermitian s, p (symmetrized through the upper triangle).
    static HermitianMatrix congruence(const HermitianMatrix& s, const HermitianMatrix& p);

    int dim() const { return m_.rows(); }
    const cplx& operator()(int i, int j) const { return m_(i, j); }
    const CMatrix& full() const { return m_; }

    void set_upper(int i, int j, cplx v);

    double trace() const;
    double frobenius_norm() const { return m_.frobenius_norm(); }

    HermitianMatrix scaled(double s) const;
    HermitianMatrix plus(const HermitianMatrix& other, double weight = 1.0) const;
    /// this += weight * other
    void add_scaled(const HermitianMatrix& other, double weight);

    /// Re tr(this * other); exact for Hermitian pairs where the product trace is real.
    double trace_product(const HermitianMatrix& other) const;

    friend bool operator==(const HermitianMatrix& a, const HermitianMatrix& b) {
        return a.m_ == b.m_;
    }

  private:
    CMatrix m_;
};

/// Spectral decomposition of a Hermitian matrix: a = u diag(lambda) uᴴ with
/// eigenvalues sorted descending and unitary u.
struct EigenDecomposition {
    std::vector<double> eigenvalues;
    CMatrix eigenvectors;
};

/// Cyclic complex Jacobi diagonalization. Off-diagonal Frobenius threshold is
/// 1e-13 * ||a||_F with a budget of 30 sweeps; past the budget a
/// ConvergenceError carrying the final off-diagonal norm is thrown.
EigenDecomposition hermitian_eig(const HermitianMatrix& a);

/// Cholesky factor of a Hermitian positive definite matrix (a = l lᴴ, l lower
/// triangular with positive real diagonal).
class CholeskyFactor {
  public:
    explicit CholeskyFactor(const HermitianMatrix& a);

    int dim() const { return l_.rows(); }
    const CMatrix& lower() const { return l_; }

    double log_det() const;
    HermitianMatrix inverse() const;
    double trace_inverse() const;

    /// x := l^-1 x (forward substitution, matrix right-hand side).
    void solve_lower_in_place(CMatrix& x) const;
    /// x := l^-H x (back substitution).
    void solve_lower_adjoint_in_place(CMatrix& x) const;

  private:
    CMatrix l_;
};

/// log det of a Hermitian positive definite matrix via triangular
/// factorization (natural logarithm). Throws NotPositiveDefiniteError on a
/// non-positive pivot.
double log_det_hpd(const HermitianMatrix& a);

/// Hermitian nonnegative square root. Eigenvalues in [-1e-10*||a||, 0) are
/// clamped to zero; anything below that bound raises an error.
HermitianMatrix hermitian_sqrt(const HermitianMatrix& a);

}  // namespace detmac

#endif

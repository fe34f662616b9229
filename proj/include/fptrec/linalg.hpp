#pragma once

#include <cstddef>
#include <vector>

namespace fptrec::linalg {

using Vector = std::vector<double>;

/// Dense row-major matrix of doubles. Small and unclever on purpose:
/// everything downstream is at most a few hundred square.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return rows_ == 0 || cols_ == 0; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix transpose(const Matrix& a);
Matrix matmul(const Matrix& a, const Matrix& b);
Vector matvec(const Matrix& a, const Vector& x);

double dot(const Vector& a, const Vector& b);
double norm2(const Vector& a);
double frobenius_norm(const Matrix& a);

/// How a rank tolerance is interpreted: Relative scales by the largest
/// R diagonal magnitude, Absolute is used as-is.
enum class TolMode { Relative, Absolute };

/// Householder QR of A·Π with column pivoting (largest residual column
/// norm first). Packed LAPACK-style: R on and above the diagonal,
/// reflector tails below, v0 ≡ 1 implicit.
class QrFactorization {
public:
    QrFactorization(Matrix packed, Vector tau, std::vector<std::size_t> perm);

    std::size_t rows() const { return packed_.rows(); }
    std::size_t cols() const { return packed_.cols(); }

    /// perm[j] = original column of A sitting at position j of A·Π.
    const std::vector<std::size_t>& perm() const { return perm_; }

    /// |R(k,k)| for k < min(m,n); non-increasing by the pivoting rule.
    Vector diag_abs() const;

    /// Number of diagonal entries at or above the tolerance threshold.
    std::size_t rank(double tol, TolMode mode) const;

    /// Thin orthogonal factor, m × min(m,n).
    Matrix thin_q() const;

    /// Upper-trapezoidal factor, min(m,n) × n.
    Matrix r() const;

    /// y = Qᵀx restricted to the first min(m,n) entries.
    Vector apply_qt(const Vector& x) const;

private:
    Matrix packed_;
    Vector tau_;
    std::vector<std::size_t> perm_;
};

QrFactorization qr_column_pivoted(const Matrix& a);

/// Minimum-norm least-squares solution of A x ≈ b with the rank decided
/// by truncating R diagonal entries below the threshold; the retained
/// part is solved through a complete orthogonal decomposition, so the
/// result matches the truncated pseudo-inverse. rank_out, if given,
/// receives the retained rank.
Vector min_norm_lstsq(const Matrix& a, const Vector& b, double tol, TolMode mode,
                      std::size_t* rank_out = nullptr);

/// Solve a square nonsingular system. Throws NumericError when the QR
/// diagonal ratio |R_nn|/|R_11| drops below 1e-14.
Vector solve_linear(const Matrix& a, const Vector& b);

/// Singular values, descending, via one-sided Jacobi orthogonalization.
Vector singular_values(const Matrix& a);

struct EigenDecomposition {
    Vector values;   ///< ascending
    Matrix vectors;  ///< column k pairs with values[k]; orthonormal
};

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. Throws
/// ValidationError if ‖S − Sᵀ‖_F > 1e-10 ‖S‖_F.
EigenDecomposition sym_eigen(const Matrix& s);

}  // namespace fptrec::linalg

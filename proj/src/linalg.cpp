#include "fptrec/linalg.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <utility>

#include "fptrec/errors.hpp"

namespace fptrec::linalg {

namespace {

double sign_of(double x) { return x < 0.0 ? -1.0 : 1.0; }

/// In-place Householder QR of `a`, optionally with column pivoting.
/// On return `a` is packed (R upper, reflector tails below, v0 ≡ 1),
/// `tau[k]` the reflector scales, `perm[j]` the source column at slot j.
void householder_qr(Matrix& a, Vector& tau, std::vector<std::size_t>& perm, bool pivot) {
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    const std::size_t kmax = std::min(m, n);
    tau.assign(kmax, 0.0);
    perm.resize(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});

    for (std::size_t k = 0; k < kmax; ++k) {
        if (pivot) {
            // Residual norms recomputed from scratch each step: immune to
            // the cancellation drift of downdating, cheap at this scale.
            std::size_t best = k;
            double best_norm = -1.0;
            for (std::size_t j = k; j < n; ++j) {
                double s = 0.0;
                for (std::size_t i = k; i < m; ++i) s += a(i, j) * a(i, j);
                if (s > best_norm) {
                    best_norm = s;
                    best = j;
                }
            }
            if (best != k) {
                for (std::size_t i = 0; i < m; ++i) std::swap(a(i, k), a(i, best));
                std::swap(perm[k], perm[best]);
            }
        }

        double normx = 0.0;
        for (std::size_t i = k; i < m; ++i) normx += a(i, k) * a(i, k);
        normx = std::sqrt(normx);
        if (normx == 0.0) {
            tau[k] = 0.0;
            continue;
        }

        const double alpha = a(k, k);
        const double beta = -sign_of(alpha) * normx;
        tau[k] = (beta - alpha) / beta;
        const double v0 = alpha - beta;
        for (std::size_t i = k + 1; i < m; ++i) a(i, k) /= v0;
        a(k, k) = beta;

        for (std::size_t j = k + 1; j < n; ++j) {
            double w = a(k, j);
            for (std::size_t i = k + 1; i < m; ++i) w += a(i, k) * a(i, j);
            w *= tau[k];
            a(k, j) -= w;
            for (std::size_t i = k + 1; i < m; ++i) a(i, j) -= w * a(i, k);
        }
    }
}

/// Forward substitution with the lower-triangular transpose of upper
/// triangular `r` (kxk leading block): solves Rᵀ y = c.
Vector solve_rt_forward(const Matrix& r, const Vector& c) {
    const std::size_t k = c.size();
    Vector y(k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        double s = c[i];
        for (std::size_t j = 0; j < i; ++j) s -= r(j, i) * y[j];
        y[i] = s / r(i, i);
    }
    return y;
}

/// Back substitution: solves R z = c for the kxk leading block.
Vector solve_r_backward(const Matrix& r, const Vector& c) {
    const std::size_t k = c.size();
    Vector z(k, 0.0);
    for (std::size_t ii = k; ii-- > 0;) {
        double s = c[ii];
        for (std::size_t j = ii + 1; j < k; ++j) s -= r(ii, j) * z[j];
        z[ii] = s / r(ii, ii);
    }
    return z;
}

}  // namespace

Matrix transpose(const Matrix& a) {
    Matrix t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    assert(a.cols() == b.rows());
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

Vector matvec(const Matrix& a, const Vector& x) {
    assert(a.cols() == x.size());
    Vector y(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

double dot(const Vector& a, const Vector& b) {
    assert(a.size() == b.size());
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(const Vector& a) { return std::sqrt(dot(a, a)); }

double frobenius_norm(const Matrix& a) {
    double s = 0.0;
    for (double v : a.data()) s += v * v;
    return std::sqrt(s);
}

QrFactorization::QrFactorization(Matrix packed, Vector tau, std::vector<std::size_t> perm)
    : packed_(std::move(packed)), tau_(std::move(tau)), perm_(std::move(perm)) {}

Vector QrFactorization::diag_abs() const {
    const std::size_t kmax = std::min(rows(), cols());
    Vector d(kmax, 0.0);
    for (std::size_t k = 0; k < kmax; ++k) d[k] = std::abs(packed_(k, k));
    return d;
}

std::size_t QrFactorization::rank(double tol, TolMode mode) const {
    const Vector d = diag_abs();
    if (d.empty()) return 0;
    const double dmax = *std::max_element(d.begin(), d.end());
    if (dmax == 0.0) return 0;
    const double thresh = mode == TolMode::Relative ? tol * dmax : tol;
    std::size_t r = 0;
    while (r < d.size() && d[r] >= thresh) ++r;
    return r;
}

Matrix QrFactorization::thin_q() const {
    const std::size_t m = rows();
    const std::size_t kmax = std::min(m, cols());
    Matrix q(m, kmax);
    for (std::size_t j = 0; j < kmax; ++j) q(j, j) = 1.0;
    // Q = H_0 · … · H_{kmax-1}; applied to I right-to-left.
    for (std::size_t kk = kmax; kk-- > 0;) {
        if (tau_[kk] == 0.0) continue;
        for (std::size_t j = 0; j < kmax; ++j) {
            double w = q(kk, j);
            for (std::size_t i = kk + 1; i < m; ++i) w += packed_(i, kk) * q(i, j);
            w *= tau_[kk];
            q(kk, j) -= w;
            for (std::size_t i = kk + 1; i < m; ++i) q(i, j) -= w * packed_(i, kk);
        }
    }
    return q;
}

Matrix QrFactorization::r() const {
    const std::size_t kmax = std::min(rows(), cols());
    Matrix r(kmax, cols());
    for (std::size_t i = 0; i < kmax; ++i)
        for (std::size_t j = i; j < cols(); ++j) r(i, j) = packed_(i, j);
    return r;
}

Vector QrFactorization::apply_qt(const Vector& x) const {
    assert(x.size() == rows());
    const std::size_t m = rows();
    const std::size_t kmax = std::min(m, cols());
    Vector y = x;
    for (std::size_t k = 0; k < kmax; ++k) {
        if (tau_[k] == 0.0) continue;
        double w = y[k];
        for (std::size_t i = k + 1; i < m; ++i) w += packed_(i, k) * y[i];
        w *= tau_[k];
        y[k] -= w;
        for (std::size_t i = k + 1; i < m; ++i) y[i] -= w * packed_(i, k);
    }
    y.resize(kmax);
    return y;
}

QrFactorization qr_column_pivoted(const Matrix& a) {
    if (a.empty()) throw ValidationError("qr_column_pivoted: empty matrix");
    Matrix packed = a;
    Vector tau;
    std::vector<std::size_t> perm;
    householder_qr(packed, tau, perm, /*pivot=*/true);
    return QrFactorization(std::move(packed), std::move(tau), std::move(perm));
}

Vector min_norm_lstsq(const Matrix& a, const Vector& b, double tol, TolMode mode,
                      std::size_t* rank_out) {
    if (tol <= 0.0) throw ValidationError("min_norm_lstsq: tol must be positive");
    if (b.size() != a.rows()) throw ValidationError("min_norm_lstsq: dimension mismatch");
    const std::size_t n = a.cols();

    const QrFactorization qr = qr_column_pivoted(a);
    const std::size_t rk = qr.rank(tol, mode);
    if (rank_out != nullptr) *rank_out = rk;
    Vector x(n, 0.0);
    if (rk == 0) return x;

    Vector c = qr.apply_qt(b);
    c.resize(rk);

    // Retained rows of R form an rk×n trapezoid R1; the minimum-norm
    // solution of R1 z = c lives in its row space. Factor R1ᵀ = Q2 R2,
    // then z = Q2 · (R2ᵀ)⁻¹ c.
    const Matrix rfull = qr.r();
    Matrix g(n, rk);
    for (std::size_t i = 0; i < rk; ++i)
        for (std::size_t j = 0; j < n; ++j) g(j, i) = rfull(i, j);
    Vector tau2;
    std::vector<std::size_t> perm2;
    householder_qr(g, tau2, perm2, /*pivot=*/false);
    const QrFactorization qr2(std::move(g), std::move(tau2), std::move(perm2));

    const Vector y = solve_rt_forward(qr2.r(), c);
    const Vector z = matvec(qr2.thin_q(), y);

    const auto& perm = qr.perm();
    for (std::size_t j = 0; j < n; ++j) x[perm[j]] = z[j];
    return x;
}

Vector solve_linear(const Matrix& a, const Vector& b) {
    if (a.rows() != a.cols()) throw ValidationError("solve_linear: matrix not square");
    if (b.size() != a.rows()) throw ValidationError("solve_linear: dimension mismatch");
    const std::size_t n = a.rows();
    if (n == 0) return {};

    const QrFactorization qr = qr_column_pivoted(a);
    const Vector d = qr.diag_abs();
    if (d[0] == 0.0 || d[n - 1] < 1e-14 * d[0])
        throw NumericError("solve_linear: system is numerically singular");

    Vector c = qr.apply_qt(b);
    const Vector z = solve_r_backward(qr.r(), c);
    Vector x(n, 0.0);
    const auto& perm = qr.perm();
    for (std::size_t j = 0; j < n; ++j) x[perm[j]] = z[j];
    return x;
}

Vector singular_values(const Matrix& a) {
    if (a.empty()) throw ValidationError("singular_values: empty matrix");
    // One-sided Jacobi on the tall orientation: rotate column pairs until
    // mutually orthogonal; the surviving column norms are the singular values.
    Matrix b = a.rows() >= a.cols() ? a : transpose(a);
    const std::size_t m = b.rows();
    const std::size_t n = b.cols();

    for (int sweep = 0; sweep < 60; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                double app = 0.0, aqq = 0.0, apq = 0.0;
                for (std::size_t i = 0; i < m; ++i) {
                    app += b(i, p) * b(i, p);
                    aqq += b(i, q) * b(i, q);
                    apq += b(i, p) * b(i, q);
                }
                const double denom = std::sqrt(app * aqq);
                if (std::abs(apq) <= 1e-15 * denom) continue;
                off = std::max(off, std::abs(apq) / denom);

                const double zeta = (aqq - app) / (2.0 * apq);
                const double t = std::abs(zeta) > 1e150
                                     ? 1.0 / (2.0 * zeta)
                                     : sign_of(zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double cs = 1.0 / std::sqrt(1.0 + t * t);
                const double sn = cs * t;
                for (std::size_t i = 0; i < m; ++i) {
                    const double bip = b(i, p);
                    const double biq = b(i, q);
                    b(i, p) = cs * bip - sn * biq;
                    b(i, q) = sn * bip + cs * biq;
                }
            }
        }
        if (off < 1e-14) break;
    }

    Vector sv(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += b(i, j) * b(i, j);
        sv[j] = std::sqrt(s);
    }
    std::sort(sv.begin(), sv.end(), std::greater<>());
    return sv;
}

EigenDecomposition sym_eigen(const Matrix& s) {
    if (s.rows() != s.cols()) throw ValidationError("sym_eigen: matrix not square");
    const std::size_t n = s.rows();
    if (n == 0) return {{}, {}};

    const double fnorm = frobenius_norm(s);
    double asym = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double d = s(i, j) - s(j, i);
            asym += d * d;
        }
    if (std::sqrt(asym) > 1e-10 * std::max(fnorm, 1e-300))
        throw ValidationError("sym_eigen: matrix is not symmetric");

    Matrix a = s;
    Matrix v = Matrix::identity(n);
    // Force exact symmetry so the rotations keep it.
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double avg = 0.5 * (a(i, j) + a(j, i));
            a(i, j) = a(j, i) = avg;
        }

    bool converged = fnorm == 0.0;
    for (int sweep = 0; sweep < 100 && !converged; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
        if (std::sqrt(2.0 * off) <= 1e-15 * fnorm) {
            converged = true;
            break;
        }
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = std::abs(theta) > 1e150
                                     ? 1.0 / (2.0 * theta)
                                     : sign_of(theta) / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double sgn = t * c;

                const double app = a(p, p);
                const double aqq = a(q, q);
                a(p, p) = app - t * apq;
                a(q, q) = aqq + t * apq;
                a(p, q) = a(q, p) = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    if (i == p || i == q) continue;
                    const double aip = a(i, p);
                    const double aiq = a(i, q);
                    a(i, p) = a(p, i) = c * aip - sgn * aiq;
                    a(i, q) = a(q, i) = sgn * aip + c * aiq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double vip = v(i, p);
                    const double viq = v(i, q);
                    v(i, p) = c * vip - sgn * viq;
                    v(i, q) = sgn * vip + c * viq;
                }
            }
        }
    }
    if (!converged) {
        // Final re-check: the last sweep may have finished the job.
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
        if (std::sqrt(2.0 * off) > 1e-12 * fnorm)
            throw NumericError("sym_eigen: Jacobi iteration did not converge");
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });

    EigenDecomposition out;
    out.values.resize(n);
    out.vectors = Matrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = a(order[k], order[k]);
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
    }
    return out;
}

}  // namespace fptrec::linalg

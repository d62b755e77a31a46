#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "portopt/errors.hpp"

/// Closed-form solver for equality-constrained quadratic programs
///
///     minimize (1/2) x^T Q x   subject to   A x = b
///
/// with Q positive definite and A of full row rank s < n. The minimizer is
///
///     x* = Q^{-1} A^T (A Q^{-1} A^T)^{-1} b,
///
/// evaluated through Cholesky factorizations; no matrix is ever inverted
/// explicitly.
namespace portopt::qp {

/// Cholesky factorization A = L L^T with a relative pivot floor.
///
/// The factorization succeeds if and only if every pivot (the squared diagonal
/// entry before its square root) stays above rel_tol * max|A_ij|; that is the
/// library-wide working definition of "positive definite".
template <class Scalar>
class SpdFactor {
public:
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    template <class Derived>
    static SpdFactor factor(const Eigen::MatrixBase<Derived>& a,
                            Scalar rel_tol = Scalar(1e-12)) {
        SpdFactor f;
        const Eigen::Index n = a.rows();
        if (n != a.cols()) throw ValidationError("SpdFactor: matrix must be square");
        const Scalar scale = (n == 0) ? Scalar(0) : a.cwiseAbs().maxCoeff();
        const Scalar pivot_tol = rel_tol * scale;
        f.l_ = Matrix::Zero(n, n);
        f.ok_ = n > 0;
        for (Eigen::Index j = 0; j < n && f.ok_; ++j) {
            Scalar d = a(j, j);
            for (Eigen::Index k = 0; k < j; ++k) d -= f.l_(j, k) * f.l_(j, k);
            if (!(d > pivot_tol)) {
                f.ok_ = false;
                break;
            }
            using std::sqrt;
            const Scalar ljj = sqrt(d);
            f.l_(j, j) = ljj;
            for (Eigen::Index i = j + 1; i < n; ++i) {
                Scalar v = a(i, j);
                for (Eigen::Index k = 0; k < j; ++k) v -= f.l_(i, k) * f.l_(j, k);
                f.l_(i, j) = v / ljj;
            }
        }
        return f;
    }

    [[nodiscard]] bool positive_definite() const noexcept { return ok_; }

    [[nodiscard]] const Matrix& matrix_l() const noexcept { return l_; }

    /// Solves A x = rhs (one column per right-hand side) by forward and
    /// backward substitution. Requires positive_definite().
    template <class Derived>
    [[nodiscard]] Matrix solve(const Eigen::MatrixBase<Derived>& rhs) const {
        if (!ok_) throw NotPositiveDefiniteError("SpdFactor::solve: factorization failed");
        const Eigen::Index n = l_.rows();
        if (rhs.rows() != n) throw ValidationError("SpdFactor::solve: right-hand side shape");
        Matrix x = rhs;
        for (Eigen::Index c = 0; c < x.cols(); ++c) {
            // L y = rhs
            for (Eigen::Index i = 0; i < n; ++i) {
                Scalar v = x(i, c);
                for (Eigen::Index k = 0; k < i; ++k) v -= l_(i, k) * x(k, c);
                x(i, c) = v / l_(i, i);
            }
            // L^T z = y
            for (Eigen::Index i = n - 1; i >= 0; --i) {
                Scalar v = x(i, c);
                for (Eigen::Index k = i + 1; k < n; ++k) v -= l_(k, i) * x(k, c);
                x(i, c) = v / l_(i, i);
            }
        }
        return x;
    }

private:
    Matrix l_;
    bool ok_ = false;
};

/// Throws ValidationError when q strays from symmetry by more than 1e-12
/// relative to its largest entry.
template <class Derived>
void require_symmetric(const Eigen::MatrixBase<Derived>& q, const std::string& who) {
    using Scalar = typename Derived::Scalar;
    if (q.rows() != q.cols()) throw ValidationError(who + ": matrix must be square");
    if (q.rows() == 0) throw ValidationError(who + ": matrix is empty");
    const Scalar scale = std::max(q.cwiseAbs().maxCoeff(), Scalar(1));
    const Scalar asym = (q.derived() - q.derived().transpose()).cwiseAbs().maxCoeff();
    if (asym > Scalar(1e-12) * scale)
        throw ValidationError(who + ": matrix is not symmetric");
}

/// True iff the symmetric matrix q admits a Cholesky factorization with every
/// pivot above 1e-12 * max|q_ij|. Asymmetric input is a caller bug and raises
/// ValidationError.
template <class Derived>
[[nodiscard]] bool is_positive_definite(const Eigen::MatrixBase<Derived>& q) {
    using Scalar = typename Derived::Scalar;
    require_symmetric(q, "is_positive_definite");
    return SpdFactor<Scalar>::factor(q.derived()).positive_definite();
}

template <class Scalar>
struct EqQpProblem {
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    Matrix q;  ///< n x n symmetric positive definite quadratic form
    Matrix a;  ///< s x n constraint matrix, full row rank, s < n
    Vector b;  ///< s constraint targets
};

template <class Scalar>
struct EqQpSolution {
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    Vector x_star;               ///< minimizer
    Vector lambda;               ///< constraint multipliers, Q x* = A^T lambda
    Scalar objective;            ///< (1/2) x*^T Q x*
    Scalar constraint_residual;  ///< max |A x* - b|
};

/// Solves the equality-constrained QP in closed form.
///
/// Both Kuhn-Tucker residuals, max|Q x* - A^T lambda| and max|A x* - b|, are
/// checked against 1e-8 * (1 + max|b|); exceeding that bound raises
/// NumericalError, since it signals conditioning the closed form cannot
/// handle.
template <class Scalar>
[[nodiscard]] EqQpSolution<Scalar> solve_eq_qp(const EqQpProblem<Scalar>& p) {
    using Matrix = typename EqQpProblem<Scalar>::Matrix;

    const Eigen::Index n = p.q.rows();
    const Eigen::Index s = p.a.rows();
    require_symmetric(p.q, "solve_eq_qp");
    if (p.a.cols() != n) throw ValidationError("solve_eq_qp: constraint matrix width");
    if (p.b.size() != s) throw ValidationError("solve_eq_qp: constraint target length");
    if (s < 1) throw ValidationError("solve_eq_qp: need at least one constraint");
    if (s >= n)
        throw ValidationError("solve_eq_qp: constraint count must be strictly below "
                              "the variable count");

    const auto fq = SpdFactor<Scalar>::factor(p.q);
    if (!fq.positive_definite())
        throw NotPositiveDefiniteError("solve_eq_qp: quadratic form is not positive definite");

    const Matrix w = fq.solve(p.a.transpose());  // Q^{-1} A^T
    Matrix gram = p.a * w;                       // A Q^{-1} A^T, symmetric PD when A has full row rank
    gram = ((gram + gram.transpose()) / Scalar(2)).eval();
    const auto fg = SpdFactor<Scalar>::factor(gram);
    if (!fg.positive_definite())
        throw RankDeficiencyError("solve_eq_qp: constraint matrix is rank deficient");

    EqQpSolution<Scalar> sol;
    sol.lambda = fg.solve(p.b);
    sol.x_star = w * sol.lambda;
    sol.objective = Scalar(0.5) * sol.x_star.dot(p.q * sol.x_star);
    sol.constraint_residual = (p.a * sol.x_star - p.b).cwiseAbs().maxCoeff();

    const Scalar stationarity =
        (p.q * sol.x_star - p.a.transpose() * sol.lambda).cwiseAbs().maxCoeff();
    const Scalar tol = Scalar(1e-8) * (Scalar(1) + p.b.cwiseAbs().maxCoeff());
    if (sol.constraint_residual > tol || stationarity > tol)
        throw NumericalError("solve_eq_qp: optimality residuals exceed tolerance");
    return sol;
}

}  // namespace portopt::qp

#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "portopt/errors.hpp"
#include "portopt/qp.hpp"

/// Mean-variance portfolio analytics.
///
/// For an asset universe with mean-return vector M and positive-definite
/// covariance matrix V, the efficient frontier is parametrized in closed form
/// by the constants
///
///     a = M^T V^{-1} e,  b = M^T V^{-1} M,  c = e^T V^{-1} e,  delta = b c - a^2,
///
/// giving, for every target return r > 0,
///
///     x(r)     = ((c r - a) / delta) V^{-1} M - ((a r - b) / delta) V^{-1} e,
///     sigma(r) = sqrt((c r^2 - 2 a r + b) / delta),
///
/// a hyperbola branch in (sigma, r) space whose vertex is the minimum-risk
/// portfolio x_min = V^{-1} e / c with return a / c and risk 1 / sqrt(c).
namespace portopt {

/// Frontier constants plus the cached factorization they were computed from.
/// Immutable after construction; safe to share across threads.
template <class Scalar>
struct FrontierModel {
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    Vector m;       ///< mean returns
    Matrix v;       ///< covariance matrix
    Scalar a;       ///< M^T V^{-1} e
    Scalar b;       ///< M^T V^{-1} M
    Scalar c;       ///< e^T V^{-1} e
    Scalar delta;   ///< b c - a^2

    qp::SpdFactor<Scalar> v_factor;
    Vector v_inv_m;  ///< V^{-1} M
    Vector v_inv_e;  ///< V^{-1} e
};

template <class Scalar>
struct MinRiskPortfolio {
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    Vector weights;          ///< x_min, sums to 1
    Scalar expected_return;  ///< a / c
    Scalar risk;             ///< 1 / sqrt(c)
};

/// Builds the frontier constants for a universe.
///
/// Raises NotPositiveDefiniteError when V fails its factorization and
/// DegenerateUniverseError when M is numerically collinear with the ones
/// vector (no frontier exists: every portfolio has the same mean).
template <class DerivedM, class DerivedV>
[[nodiscard]] FrontierModel<typename DerivedM::Scalar> frontier_constants(
    const Eigen::MatrixBase<DerivedM>& m, const Eigen::MatrixBase<DerivedV>& v) {
    using Scalar = typename DerivedM::Scalar;
    using Vector = typename FrontierModel<Scalar>::Vector;

    const Eigen::Index n = m.size();
    if (n < 1) throw ValidationError("frontier_constants: empty mean vector");
    if (v.rows() != n || v.cols() != n)
        throw ValidationError("frontier_constants: covariance shape does not match means");
    qp::require_symmetric(v, "frontier_constants");

    const Scalar mean_level = m.sum() / static_cast<Scalar>(n);
    const Scalar deviation = (m.derived().array() - mean_level).abs().maxCoeff();
    if (deviation <= Scalar(1e-12) * m.cwiseAbs().maxCoeff())
        throw DegenerateUniverseError(
            "frontier_constants: mean returns are collinear with the ones vector");

    FrontierModel<Scalar> f;
    f.m = m;
    f.v = v;
    f.v_factor = qp::SpdFactor<Scalar>::factor(v.derived());
    if (!f.v_factor.positive_definite())
        throw NotPositiveDefiniteError("frontier_constants: covariance is not positive definite");

    const Vector ones = Vector::Ones(n);
    f.v_inv_m = f.v_factor.solve(f.m);
    f.v_inv_e = f.v_factor.solve(ones);
    f.a = f.m.dot(f.v_inv_e);
    f.b = f.m.dot(f.v_inv_m);
    f.c = ones.dot(f.v_inv_e);
    f.delta = f.b * f.c - f.a * f.a;
    if (!(f.b > Scalar(0)) || !(f.c > Scalar(0)) || !(f.b * f.delta > Scalar(0)))
        throw DegenerateUniverseError("frontier_constants: frontier constants are degenerate");
    return f;
}

/// Frontier allocation x(r) for a target mean return r > 0.
/// Satisfies e^T x = 1 and M^T x = r up to solver tolerance.
template <class Scalar>
[[nodiscard]] typename FrontierModel<Scalar>::Vector frontier_allocation(
    const FrontierModel<Scalar>& f, Scalar r) {
    if (!(r > Scalar(0)))
        throw ValidationError("frontier_allocation: target return must be positive");
    return ((f.c * r - f.a) / f.delta) * f.v_inv_m - ((f.a * r - f.b) / f.delta) * f.v_inv_e;
}

/// Frontier risk sigma(r) for a target mean return r > 0.
template <class Scalar>
[[nodiscard]] Scalar frontier_risk(const FrontierModel<Scalar>& f, Scalar r) {
    if (!(r > Scalar(0)))
        throw ValidationError("frontier_risk: target return must be positive");
    const Scalar radicand = (f.c * r * r - Scalar(2) * f.a * r + f.b) / f.delta;
    // The radicand equals sigma(r)^2 >= 1/c > 0 for every valid model.
    if (radicand < -Scalar(1e-12))
        throw NumericalError("frontier_risk: negative radicand");
    using std::sqrt;
    return sqrt(std::max(radicand, Scalar(0)));
}

/// Vertex of the frontier: the least-risk fully invested portfolio.
template <class Scalar>
[[nodiscard]] MinRiskPortfolio<Scalar> min_risk_portfolio(const FrontierModel<Scalar>& f) {
    using std::sqrt;
    MinRiskPortfolio<Scalar> p;
    p.weights = f.v_inv_e / f.c;
    p.expected_return = f.a / f.c;
    p.risk = Scalar(1) / sqrt(f.c);
    return p;
}

/// Weighted per-period portfolio returns: row i maps to sum_j x_j * r_ij.
template <class DerivedR, class DerivedX>
[[nodiscard]] Eigen::Matrix<typename DerivedR::Scalar, Eigen::Dynamic, 1>
portfolio_return_series(const Eigen::MatrixBase<DerivedR>& returns,
                        const Eigen::MatrixBase<DerivedX>& weights) {
    if (returns.cols() != weights.size())
        throw ValidationError("portfolio_return_series: weight count does not match assets");
    return returns.derived() * weights.derived();
}

/// Portfolio mean return M^T x.
template <class DerivedM, class DerivedX>
[[nodiscard]] typename DerivedM::Scalar portfolio_mean(const Eigen::MatrixBase<DerivedM>& m,
                                                       const Eigen::MatrixBase<DerivedX>& weights) {
    if (m.size() != weights.size())
        throw ValidationError("portfolio_mean: weight count does not match assets");
    return m.derived().dot(weights.derived());
}

/// Portfolio risk sqrt(x^T V x); equals the population standard deviation of
/// the portfolio return series. Tiny negative quadratic forms (roundoff) clamp
/// to zero; anything below -1e-12 raises NumericalError.
template <class DerivedV, class DerivedX>
[[nodiscard]] typename DerivedV::Scalar portfolio_risk(const Eigen::MatrixBase<DerivedV>& v,
                                                       const Eigen::MatrixBase<DerivedX>& weights) {
    using Scalar = typename DerivedV::Scalar;
    if (v.rows() != weights.size() || v.cols() != weights.size())
        throw ValidationError("portfolio_risk: covariance shape does not match weights");
    const Scalar q = weights.derived().dot(v.derived() * weights.derived());
    if (q < -Scalar(1e-12)) throw NumericalError("portfolio_risk: negative quadratic form");
    using std::sqrt;
    return sqrt(std::max(q, Scalar(0)));
}

/// Cumulative return divided by per-period volatility; the cross-strategy
/// performance measure. Requires risk > 0.
template <class Scalar>
[[nodiscard]] Scalar performance_quotient(Scalar total_return, Scalar risk) {
    if (!(risk > Scalar(0)))
        throw ValidationError("performance_quotient: risk must be positive");
    return total_return / risk;
}

}  // namespace portopt

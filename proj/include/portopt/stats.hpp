#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "portopt/errors.hpp"

/// Descriptive statistics over data vectors and return matrices.
///
/// All dispersion measures use population normalization, dividing by the
/// number of observations m rather than m - 1. That choice makes the
/// product-moment identity Cov(v, u) = mean(vu) - mean(v) mean(u) hold
/// exactly, along with the variance expansion of sums and the quadratic
/// scaling law; those identities are load-bearing for the portfolio layer.
namespace portopt::stats {

/// Arithmetic mean of a data vector.
template <class Derived>
[[nodiscard]] typename Derived::Scalar mean(const Eigen::MatrixBase<Derived>& v) {
    if (v.size() == 0) throw ValidationError("mean: empty data vector");
    return v.sum() / static_cast<typename Derived::Scalar>(v.size());
}

/// Population variance: (1/m) * sum((v_i - mean)^2).
template <class Derived>
[[nodiscard]] typename Derived::Scalar variance_population(const Eigen::MatrixBase<Derived>& v) {
    using Scalar = typename Derived::Scalar;
    if (v.size() == 0) throw ValidationError("variance_population: empty data vector");
    const Scalar mu = mean(v);
    return (v.array() - mu).square().sum() / static_cast<Scalar>(v.size());
}

/// Population standard deviation: sqrt((1/m) * sum((v_i - mean)^2)).
template <class Derived>
[[nodiscard]] typename Derived::Scalar stddev_population(const Eigen::MatrixBase<Derived>& v) {
    using std::sqrt;
    return sqrt(variance_population(v));
}

/// Population covariance: (1/m) * sum((v_i - mean(v)) * (u_i - mean(u))).
/// Satisfies Cov(v, u) = mean(vu) - mean(v) * mean(u).
template <class DerivedV, class DerivedU>
[[nodiscard]] typename DerivedV::Scalar covariance(const Eigen::MatrixBase<DerivedV>& v,
                                                   const Eigen::MatrixBase<DerivedU>& u) {
    using Scalar = typename DerivedV::Scalar;
    if (v.size() != u.size())
        throw ValidationError("covariance: data vectors differ in length");
    if (v.size() == 0) throw ValidationError("covariance: empty data vectors");
    const Scalar mu_v = mean(v);
    const Scalar mu_u = mean(u);
    return ((v.array() - mu_v) * (u.array() - mu_u)).sum() / static_cast<Scalar>(v.size());
}

/// Pearson correlation, Cov(v, u) / (sigma_v * sigma_u), clamped into [-1, 1].
/// A value outside [-1 - 1e-12, 1 + 1e-12] before clamping indicates a broken
/// invariant and raises NumericalError; a zero standard deviation on either
/// side raises DegenerateSeriesError.
template <class DerivedV, class DerivedU>
[[nodiscard]] typename DerivedV::Scalar correlation(const Eigen::MatrixBase<DerivedV>& v,
                                                    const Eigen::MatrixBase<DerivedU>& u) {
    using Scalar = typename DerivedV::Scalar;
    const Scalar sd_v = stddev_population(v);
    const Scalar sd_u = stddev_population(u);
    if (sd_v == Scalar(0) || sd_u == Scalar(0))
        throw DegenerateSeriesError("correlation: a series has zero standard deviation");
    const Scalar rho = covariance(v, u) / (sd_v * sd_u);
    constexpr Scalar eps = Scalar(1e-12);
    if (rho < Scalar(-1) - eps || rho > Scalar(1) + eps)
        throw NumericalError("correlation: value escaped [-1, 1] beyond tolerance");
    return std::min(Scalar(1), std::max(Scalar(-1), rho));
}

/// Population covariance matrix of the columns of an m x n observation matrix:
/// V = (1/m) * C^T C with C the column-centered data. The result is symmetric
/// by construction (lower triangle mirrored onto the upper), and V(j, j) equals
/// variance_population of column j.
template <class Derived>
[[nodiscard]] Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
covariance_matrix(const Eigen::MatrixBase<Derived>& observations) {
    using Scalar = typename Derived::Scalar;
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    const Eigen::Index m = observations.rows();
    if (m < 2) throw ValidationError("covariance_matrix: need at least 2 observation rows");
    const Matrix centered =
        observations.derived().rowwise() - observations.derived().colwise().mean();
    Matrix v = (centered.adjoint() * centered) / static_cast<Scalar>(m);
    v = v.template selfadjointView<Eigen::Lower>();
    return v;
}

}  // namespace portopt::stats

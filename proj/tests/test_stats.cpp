#include <Eigen/Dense>
#include <random>

#include "doctest.h"
#include "generators.hpp"
#include "portopt/errors.hpp"
#include "portopt/stats.hpp"

using portopt::DegenerateSeriesError;
using portopt::ValidationError;
namespace stats = portopt::stats;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> xs) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v(i++) = x;
    return v;
}

}  // namespace

TEST_CASE("mean of a singleton is the element") {
    CHECK(stats::mean(vec({5.0})) == doctest::Approx(5.0));
}

TEST_CASE("mean rejects an empty vector") {
    Eigen::VectorXd empty(0);
    CHECK_THROWS_AS((void)stats::mean(empty), ValidationError);
}

TEST_CASE("mean is additive and homogeneous on generated vectors") {
    testgen::Rng rng(42);
    for (int trial = 0; trial < 1000; ++trial) {
        const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng() % 40);
        const Eigen::VectorXd v = testgen::uniform_vector(rng, n, -5.0, 5.0);
        const Eigen::VectorXd u = testgen::uniform_vector(rng, n, -5.0, 5.0);
        const double scale = 1.0 + std::abs(stats::mean(v)) + std::abs(stats::mean(u));
        CHECK(stats::mean((v + u).eval()) ==
              doctest::Approx(stats::mean(v) + stats::mean(u)).epsilon(1e-12).scale(scale));
        CHECK(stats::mean((-2.0 * v).eval()) ==
              doctest::Approx(-2.0 * stats::mean(v)).epsilon(1e-12).scale(scale));
    }
}

TEST_CASE("population dispersion of a constant vector is zero") {
    CHECK(stats::variance_population(vec({3.0, 3.0, 3.0})) == doctest::Approx(0.0));
    CHECK(stats::stddev_population(vec({3.0, 3.0, 3.0})) == doctest::Approx(0.0));
}

TEST_CASE("population variance divides by the observation count") {
    // Two observations, mean 1, squared deviations 1 each: variance 1, not 2.
    CHECK(stats::variance_population(vec({0.0, 2.0})) == doctest::Approx(1.0));
    CHECK(stats::stddev_population(vec({0.0, 2.0})) == doctest::Approx(1.0));
}

TEST_CASE("dispersion scales quadratically and absolutely") {
    testgen::Rng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const Eigen::VectorXd v = testgen::uniform_vector(rng, 12, -1.0, 1.0);
        const double var = stats::variance_population(v);
        CHECK(stats::variance_population((-2.0 * v).eval()) ==
              doctest::Approx(4.0 * var).epsilon(1e-12));
        CHECK(stats::stddev_population((-2.0 * v).eval()) ==
              doctest::Approx(2.0 * stats::stddev_population(v)).epsilon(1e-12));
    }
}

TEST_CASE("self-covariance is the variance and constants decouple") {
    const Eigen::VectorXd v = vec({0.1, -0.4, 0.3, 0.2});
    CHECK(stats::covariance(v, v) == doctest::Approx(stats::variance_population(v)));
    CHECK(stats::covariance(v, vec({2.0, 2.0, 2.0, 2.0})) == doctest::Approx(0.0));
}

TEST_CASE("covariance equals the product-moment identity") {
    testgen::Rng rng(99);
    for (int trial = 0; trial < 1000; ++trial) {
        const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng() % 30);
        const Eigen::VectorXd v = testgen::uniform_vector(rng, n, -2.0, 2.0);
        const Eigen::VectorXd u = testgen::uniform_vector(rng, n, -2.0, 2.0);
        const double lhs = stats::covariance(v, u);
        const double rhs =
            stats::mean(v.cwiseProduct(u).eval()) - stats::mean(v) * stats::mean(u);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12).scale(1.0 + std::abs(rhs)));
    }
}

TEST_CASE("variance of a sum expands through the covariance") {
    testgen::Rng rng(123);
    for (int trial = 0; trial < 1000; ++trial) {
        const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng() % 30);
        const Eigen::VectorXd v = testgen::uniform_vector(rng, n, -2.0, 2.0);
        const Eigen::VectorXd u = testgen::uniform_vector(rng, n, -2.0, 2.0);
        const double lhs = stats::variance_population((v + u).eval());
        const double rhs = stats::variance_population(v) + stats::variance_population(u) +
                           2.0 * stats::covariance(v, u);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12).scale(1.0 + std::abs(rhs)));
    }
}

TEST_CASE("covariance rejects mismatched lengths") {
    CHECK_THROWS_AS((void)stats::covariance(vec({1.0, 2.0}), vec({1.0, 2.0, 3.0})),
                    ValidationError);
}

TEST_CASE("correlation of a vector with itself and its negation") {
    const Eigen::VectorXd v = vec({0.3, -0.1, 0.7, 0.2, -0.5});
    CHECK(stats::correlation(v, v) == doctest::Approx(1.0));
    CHECK(stats::correlation(v, (-v).eval()) == doctest::Approx(-1.0));
}

TEST_CASE("correlation stays within [-1, 1] on generated pairs") {
    testgen::Rng rng(2024);
    for (int trial = 0; trial < 1000; ++trial) {
        const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng() % 30);
        const Eigen::VectorXd v = testgen::uniform_vector(rng, n, -2.0, 2.0);
        const Eigen::VectorXd u = testgen::uniform_vector(rng, n, -2.0, 2.0);
        const double rho = stats::correlation(v, u);
        CHECK(rho >= -1.0);
        CHECK(rho <= 1.0);
    }
}

TEST_CASE("correlation with a constant series is degenerate") {
    CHECK_THROWS_AS((void)stats::correlation(vec({1.0, 2.0, 3.0}), vec({4.0, 4.0, 4.0})),
                    DegenerateSeriesError);
}

TEST_CASE("covariance matrix of a single column is its variance") {
    Eigen::MatrixXd obs(4, 1);
    obs << 0.1, -0.2, 0.4, 0.3;
    const Eigen::MatrixXd v = stats::covariance_matrix(obs);
    REQUIRE(v.rows() == 1);
    CHECK(v(0, 0) == doctest::Approx(stats::variance_population(obs.col(0))));
}

TEST_CASE("covariance matrix matches pairwise covariance entrywise") {
    testgen::Rng rng(5151);
    const Eigen::MatrixXd obs = testgen::uniform_matrix(rng, 5, 3, -1.0, 1.0);
    const Eigen::MatrixXd v = stats::covariance_matrix(obs);
    for (Eigen::Index i = 0; i < 3; ++i)
        for (Eigen::Index j = 0; j < 3; ++j)
            CHECK(std::abs(v(i, j) - stats::covariance(obs.col(i), obs.col(j))) < 1e-12);
}

TEST_CASE("covariance matrix is exactly symmetric with non-negative diagonal") {
    testgen::Rng rng(31337);
    for (int trial = 0; trial < 200; ++trial) {
        const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng() % 5);
        const Eigen::Index m = n + 1 + static_cast<Eigen::Index>(rng() % 20);
        const Eigen::MatrixXd obs = testgen::uniform_matrix(rng, m, n, -1.0, 1.0);
        const Eigen::MatrixXd v = stats::covariance_matrix(obs);
        CHECK((v - v.transpose()).cwiseAbs().maxCoeff() == 0.0);
        CHECK(v.diagonal().minCoeff() >= 0.0);
    }
}

TEST_CASE("covariance matrix needs two observation rows") {
    Eigen::MatrixXd obs(1, 3);
    obs << 1.0, 2.0, 3.0;
    CHECK_THROWS_AS((void)stats::covariance_matrix(obs), ValidationError);
}

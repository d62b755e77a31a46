#pragma once

#include <Eigen/Dense>
#include <random>
#include <stdexcept>

// Seeded random instances for the property suites. Every generator takes the
// engine by reference so a test owns one seed and replays deterministically.
namespace testgen {

using Rng = std::mt19937_64;

inline Eigen::VectorXd uniform_vector(Rng& rng, Eigen::Index n, double lo, double hi) {
    std::uniform_real_distribution<double> dist(lo, hi);
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = dist(rng);
    return v;
}

inline Eigen::MatrixXd uniform_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols,
                                      double lo, double hi) {
    std::uniform_real_distribution<double> dist(lo, hi);
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = dist(rng);
    return m;
}

// A^T A + d I with d in [0.1, 1]: symmetric positive definite with smallest
// eigenvalue at least d.
inline Eigen::MatrixXd spd_matrix(Rng& rng, Eigen::Index n) {
    const Eigen::MatrixXd a = uniform_matrix(rng, n, n, -1.0, 1.0);
    std::uniform_real_distribution<double> shift(0.1, 1.0);
    Eigen::MatrixXd q = a.transpose() * a + shift(rng) * Eigen::MatrixXd::Identity(n, n);
    q = (q + q.transpose()) / 2.0;
    return q;
}

// s x n with full row rank, checked by rank-revealing QR.
inline Eigen::MatrixXd full_row_rank_matrix(Rng& rng, Eigen::Index s, Eigen::Index n) {
    for (int attempt = 0; attempt < 100; ++attempt) {
        Eigen::MatrixXd a = uniform_matrix(rng, s, n, -1.0, 1.0);
        if (Eigen::ColPivHouseholderQR<Eigen::MatrixXd>(a).rank() == s) return a;
    }
    throw std::runtime_error("full_row_rank_matrix: generation failed");
}

// Synthetic daily return sample: m periods, n assets, mild drift and noise
// scaled like daily equity data.
inline Eigen::MatrixXd return_sample(Rng& rng, Eigen::Index m, Eigen::Index n) {
    std::normal_distribution<double> noise(0.0, 0.02);
    std::uniform_real_distribution<double> drift(-0.002, 0.004);
    Eigen::MatrixXd r(m, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const double mu = drift(rng);
        for (Eigen::Index i = 0; i < m; ++i) r(i, j) = mu + noise(rng);
    }
    return r;
}

struct Universe {
    Eigen::VectorXd m;  // mean returns
    Eigen::MatrixXd v;  // population covariance
};

// Mean/covariance pair from a random return sample; regenerates on the
// (measure-zero) degenerate draws so every result admits a frontier.
inline Universe frontier_universe(Rng& rng, Eigen::Index n, Eigen::Index periods = 0) {
    for (int attempt = 0; attempt < 100; ++attempt) {
        const Eigen::Index m =
            periods > 0 ? periods : static_cast<Eigen::Index>(8 + rng() % 33);
        if (m <= n) continue;
        const Eigen::MatrixXd r = return_sample(rng, m, n);
        Universe u;
        u.m = r.colwise().mean();
        const Eigen::MatrixXd centered = r.rowwise() - u.m.transpose();
        u.v = (centered.transpose() * centered) / static_cast<double>(m);
        u.v = (u.v + u.v.transpose()) / 2.0;

        const Eigen::LLT<Eigen::MatrixXd> llt(u.v);
        if (llt.info() != Eigen::Success) continue;
        const double level = u.m.mean();
        if ((u.m.array() - level).abs().maxCoeff() <= 1e-9) continue;
        return u;
    }
    throw std::runtime_error("frontier_universe: generation failed");
}

}  // namespace testgen

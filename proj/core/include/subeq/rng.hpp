#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>

namespace subeq {

using Rng = std::mt19937_64;

inline double gauss(Rng& rng) {
    std::normal_distribution<double> d(0.0, 1.0);
    return d(rng);
}

inline double uniform(Rng& rng, double lo, double hi) {
    std::uniform_real_distribution<double> d(lo, hi);
    return d(rng);
}

inline Eigen::VectorXd gauss_vector(Rng& rng, int n, double scale = 1.0) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = scale * gauss(rng);
    return v;
}

inline Eigen::MatrixXd gauss_matrix(Rng& rng, int rows, int cols, double scale = 1.0) {
    Eigen::MatrixXd m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = scale * gauss(rng);
    return m;
}

// Symmetrized Gaussian matrix.
inline Eigen::MatrixXd gauss_symmetric(Rng& rng, int n, double scale = 1.0) {
    Eigen::MatrixXd m = gauss_matrix(rng, n, n, scale);
    return 0.5 * (m + m.transpose());
}

inline Eigen::MatrixXd gauss_psd(Rng& rng, int n, double scale = 1.0) {
    Eigen::MatrixXd g = gauss_matrix(rng, n, n, scale);
    return g * g.transpose() / double(n);
}

// Haar-ish random orthogonal matrix via QR with sign fix.
inline Eigen::MatrixXd random_orthogonal(Rng& rng, int n) {
    Eigen::MatrixXd g = gauss_matrix(rng, n, n);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ();
    Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int i = 0; i < n; ++i)
        if (r(i, i) < 0) q.col(i) = -q.col(i);
    return q;
}

// Uniform point in the unit ball of R^n.
inline Eigen::VectorXd uniform_ball(Rng& rng, int n) {
    Eigen::VectorXd v = gauss_vector(rng, n);
    double nrm = v.norm();
    if (nrm == 0.0) return Eigen::VectorXd::Zero(n);
    double u = std::pow(uniform(rng, 0.0, 1.0), 1.0 / n);
    return v * (u / nrm);
}

}  // namespace subeq

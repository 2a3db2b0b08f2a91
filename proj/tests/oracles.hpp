// Independent reference computations used by the unit tests. Nothing here
// calls into the library's operator builders.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <random>

namespace oracle {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline Mat lower(int n) {
    Mat a = Mat::Zero(n, n);
    for (int k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(double(k));
    return a;
}

// exp(A) by scaling and squaring with a long Taylor series.
inline Mat expm(const Mat& A) {
    const double norm = A.cwiseAbs().rowwise().sum().maxCoeff();
    int squarings = 0;
    if (norm > 0.5) squarings = int(std::ceil(std::log2(norm / 0.5)));
    const Mat B = A / std::ldexp(1.0, squarings);
    Mat result = Mat::Identity(A.rows(), A.cols());
    Mat term = result;
    for (int k = 1; k <= 40; ++k) {
        term = term * B / double(k);
        result += term;
    }
    for (int i = 0; i < squarings; ++i) result = result * result;
    return result;
}

// D(β) = exp(β(a† − a)) in dimension n
inline Mat displacement(int n, double beta) {
    const Mat a = lower(n);
    return expm(beta * (a.adjoint() - a));
}

// S(γ) = exp(γ(a†² − a²)/2) in dimension n
inline Mat squeeze(int n, double gamma) {
    const Mat a = lower(n);
    const Mat a2 = a * a;
    return expm(0.5 * gamma * (a2.adjoint() - a2));
}

// Rabi Hamiltonian written out entry by entry, index 2n+s, s=0 is σ_z=+1.
inline Mat rabi(int n, double omega, double lambda, double omega0) {
    Mat h = Mat::Zero(2 * n, 2 * n);
    for (int k = 0; k < n; ++k) {
        h(2 * k, 2 * k) = omega * k + omega0 / 2;
        h(2 * k + 1, 2 * k + 1) = omega * k - omega0 / 2;
        if (k + 1 < n) {
            const double c = lambda * std::sqrt(double(k + 1));
            // σₓ flips s, (a + a†) moves k ↔ k+1
            h(2 * k, 2 * (k + 1) + 1) = c;
            h(2 * k + 1, 2 * (k + 1)) = c;
            h(2 * (k + 1) + 1, 2 * k) = c;
            h(2 * (k + 1), 2 * k + 1) = c;
        }
    }
    return h;
}

// H̃ₚ = ωn + λ(a + a†) − (ω₀/2) p (−1)ⁿ
inline Mat reduced(int n, double omega, double lambda, double omega0, int p) {
    Mat h = Mat::Zero(n, n);
    for (int k = 0; k < n; ++k) {
        h(k, k) = omega * k - 0.5 * omega0 * p * (k % 2 ? -1.0 : 1.0);
        if (k + 1 < n) h(k, k + 1) = h(k + 1, k) = lambda * std::sqrt(double(k + 1));
    }
    return h;
}

// Eigen's solver stands in for a second diagonalizer.
inline Eigen::VectorXd eigenvalues(const Mat& h) {
    return Eigen::SelfAdjointEigenSolver<Mat>(h, Eigen::EigenvaluesOnly).eigenvalues();
}

// Normalized complex Gaussian vector with support on the first `support`
// entries of a length-`dim` vector.
inline Vec random_vector(std::mt19937_64& rng, int dim, int support) {
    std::normal_distribution<double> g;
    Vec v = Vec::Zero(dim);
    for (int i = 0; i < support; ++i) v(i) = cplx(g(rng), g(rng));
    return v / v.norm();
}

inline double max_abs(const Mat& m) { return m.cwiseAbs().maxCoeff(); }

} // namespace oracle

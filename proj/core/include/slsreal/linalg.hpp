#pragma once

#include "slsreal/types.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace sls {

/// Relative singular-value cutoff for pseudo-inverses.
inline constexpr double kPinvCutoff = 1e-10;

/// Relative threshold for numerical-rank tests.
inline constexpr double kRankTol = 1e-8;

/// Moore-Penrose pseudo-inverse via SVD with a relative cutoff.
inline Matrix pinv(const Matrix& X, double rel_cutoff = kPinvCutoff) {
    Eigen::JacobiSVD<Matrix> svd(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    double cut = rel_cutoff * (s.size() > 0 ? s(0) : 0.0);
    Vector inv = Vector::Zero(s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > cut) inv(i) = 1.0 / s(i);
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

/// Numerical rank with threshold tol * sigma_max.
inline int numerical_rank(const Matrix& X, double tol = kRankTol) {
    Eigen::JacobiSVD<Matrix> svd(X);
    const auto& s = svd.singularValues();
    if (s.size() == 0) return 0;
    int r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > tol * s(0)) ++r;
    return r;
}

/// Sum of absolute eigenvalues of a square matrix; similarity-invariant.
inline double feature_M(const Matrix& X) {
    Eigen::EigenSolver<Matrix> es(X, /*computeEigenvectors=*/false);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < X.rows(); ++i) sum += std::abs(es.eigenvalues()(i));
    return sum;
}

/// Sorted eigenvalues (by real part, then imaginary part) for spectra comparisons.
inline std::vector<std::complex<double>> sorted_eigenvalues(const Matrix& X) {
    Eigen::EigenSolver<Matrix> es(X, /*computeEigenvectors=*/false);
    std::vector<std::complex<double>> ev(static_cast<std::size_t>(X.rows()));
    for (Eigen::Index i = 0; i < X.rows(); ++i) ev[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
    std::sort(ev.begin(), ev.end(), [](const auto& a, const auto& b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return ev;
}

inline double spectral_radius(const Matrix& X) {
    Eigen::EigenSolver<Matrix> es(X, false);
    double r = 0.0;
    for (Eigen::Index i = 0; i < X.rows(); ++i) r = std::max(r, std::abs(es.eigenvalues()(i)));
    return r;
}

inline double min_abs_eigenvalue(const Matrix& X) {
    Eigen::EigenSolver<Matrix> es(X, false);
    double r = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < X.rows(); ++i) r = std::min(r, std::abs(es.eigenvalues()(i)));
    return r;
}

/// Extended observability matrix with q block rows: [C; CA; ...; CA^{q-1}].
inline Matrix extended_observability(const Matrix& A, const Matrix& C, int q) {
    Matrix O(C.rows() * q, A.cols());
    Matrix P = C;
    for (int s = 0; s < q; ++s) {
        O.middleRows(s * C.rows(), C.rows()) = P;
        if (s + 1 < q) P = P * A;
    }
    return O;
}

/// Extended controllability matrix with r block columns: [B, AB, ..., A^{r-1}B].
inline Matrix extended_controllability(const Matrix& A, const Matrix& B, int r) {
    Matrix R(A.rows(), B.cols() * r);
    Matrix P = B;
    for (int t = 0; t < r; ++t) {
        R.middleCols(t * B.cols(), B.cols()) = P;
        if (t + 1 < r) P = A * P;
    }
    return R;
}

}  // namespace sls

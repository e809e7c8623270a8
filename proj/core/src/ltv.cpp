#include "slsreal/ltv.hpp"

#include "slsreal/linalg.hpp"
#include "slsreal/model.hpp"

namespace sls::ltv {

std::pair<int, int> window(int N, int n) {
    require_window(N, n);
    return {2 * n + 1, N - 4 * n};
}

ObsCtrlPair factorize(const HankelMatrix& H, int n, double* sigma_n) {
    Eigen::JacobiSVD<Matrix> svd(H.data, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    if (s.size() < n || s(n - 1) <= kRankTol * s(0))
        throw std::runtime_error("Hankel matrix at k = " + std::to_string(H.k) +
                                 " is numerically rank-deficient below n = " + std::to_string(n));
    if (sigma_n) *sigma_n = s(n - 1);
    Matrix U = svd.matrixU().leftCols(n);
    Matrix V = svd.matrixV().leftCols(n);
    // Deterministic sign convention: first nonzero entry of each left
    // singular vector made nonnegative.
    for (int j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < U.rows(); ++i) {
            if (std::abs(U(i, j)) > 1e-12) {
                if (U(i, j) < 0.0) {
                    U.col(j) *= -1.0;
                    V.col(j) *= -1.0;
                }
                break;
            }
        }
    }
    Vector sqrt_s = s.head(n).array().sqrt();
    ObsCtrlPair oc;
    oc.O_q = U * sqrt_s.asDiagonal();
    oc.R_r = sqrt_s.asDiagonal() * V.transpose();
    return oc;
}

AnchorData realize_at(const MarkovSequence& markov, int n, int k) {
    auto [k_lo, k_hi] = window(markov.N(), n);
    if (k < k_lo || k > k_hi)
        throw std::out_of_range("anchor " + std::to_string(k) + " outside window [" +
                                std::to_string(k_lo) + ", " + std::to_string(k_hi) + "]");
    const int q = 2 * n + 1, r = 2 * n;
    const int p = markov.p(), m = markov.m();

    AnchorData a;
    HankelMatrix Hk = hankel::build(markov, q, r, k);
    HankelMatrix Hk1 = hankel::build(markov, q, r, k + 1);
    ObsCtrlPair f0 = factorize(Hk, n, &a.sigma_n);
    ObsCtrlPair f1 = factorize(Hk1, n);

    a.O = f0.O_q;
    a.R_prev = f0.R_r;
    a.O_next = f1.O_q;
    a.R = f1.R_r;

    // A_hat(k) = (O(k+1) without its last block row)^+ (O(k) without its first block row)
    a.quad.A = pinv(a.O_next.topRows((q - 1) * p)) * a.O.bottomRows((q - 1) * p);
    a.quad.C = a.O.topRows(p);
    a.quad.B = a.R.leftCols(m);
    a.quad.D = markov.at(k, k);
    return a;
}

LtvRealization realize_range(const MarkovSequence& markov, int n, const std::vector<int>& anchors) {
    LtvRealization real;
    real.n = n;
    real.m = markov.m();
    real.p = markov.p();
    std::tie(real.k_lo, real.k_hi) = window(markov.N(), n);
    std::vector<int> ks = anchors;
    if (ks.empty())
        for (int k = real.k_lo; k <= real.k_hi; ++k) ks.push_back(k);
    for (int k : ks) {
        try {
            real.anchors.emplace(k, realize_at(markov, n, k));
        } catch (const std::exception& e) {
            throw std::runtime_error("anchor " + std::to_string(k) + ": " + e.what());
        }
    }
    return real;
}

Matrix reconstruct_markov(const LtvRealization& real, int k, int l) {
    if (k == l) return real.at(k).quad.D;
    if (l > k) return Matrix::Zero(real.p, real.m);
    Matrix P = real.at(l).quad.B;
    for (int j = l + 1; j < k; ++j) P = real.at(j).quad.A * P;
    return real.at(k).quad.C * P;
}

}  // namespace sls::ltv

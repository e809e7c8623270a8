#include "slsreal/metrics.hpp"

#include "slsreal/linalg.hpp"

#include <algorithm>
#include <numeric>

namespace sls::metrics {

std::vector<double> vaf(const std::vector<Vector>& y_true, const std::vector<Vector>& y_pred) {
    if (y_true.size() != y_pred.size() || y_true.empty())
        throw std::invalid_argument("vaf: sequences must be nonempty and equal length");
    const int p = static_cast<int>(y_true[0].size());
    const double N = static_cast<double>(y_true.size());
    std::vector<double> out(static_cast<std::size_t>(p));
    for (int c = 0; c < p; ++c) {
        double mean_y = 0.0, mean_e = 0.0;
        for (std::size_t i = 0; i < y_true.size(); ++i) {
            mean_y += y_true[i](c);
            mean_e += y_true[i](c) - y_pred[i](c);
        }
        mean_y /= N;
        mean_e /= N;
        double var_y = 0.0, var_e = 0.0;
        for (std::size_t i = 0; i < y_true.size(); ++i) {
            var_y += std::pow(y_true[i](c) - mean_y, 2);
            var_e += std::pow(y_true[i](c) - y_pred[i](c) - mean_e, 2);
        }
        if (var_y <= 0.0) throw std::invalid_argument("vaf: zero-variance truth channel " + std::to_string(c));
        out[static_cast<std::size_t>(c)] = (1.0 - var_e / var_y) * 100.0;
    }
    return out;
}

double fit_phi(const std::vector<int>& phi, const std::vector<int>& phi_hat) {
    if (phi.size() != phi_hat.size() || phi.empty())
        throw std::invalid_argument("fit_phi: spans must be nonempty and equal");
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < phi.size(); ++i)
        if (phi[i] != phi_hat[i]) ++wrong;
    return (1.0 - static_cast<double>(wrong) / static_cast<double>(phi.size())) * 100.0;
}

/// Gauge transform aligning an estimated quadruple to a true one, fitted via
/// the 2n-block observability matrices: when the estimate is the truth in a
/// transformed basis (A_hat = T^{-1} A T, C_hat = C T), O_hat = O T, so the
/// regression recovers T.
static Matrix fit_gauge(const DiscreteState& truth, const DiscreteState& est) {
    const int n = truth.n();
    Matrix Ot = extended_observability(truth.A, truth.C, 2 * n);
    Matrix Oe = extended_observability(est.A, est.C, 2 * n);
    return pinv(Ot) * Oe;
}

double delta_P(const std::vector<DiscreteState>& truth, const std::vector<DiscreteState>& estimate) {
    if (truth.size() != estimate.size())
        throw std::invalid_argument("delta_P: submodel-set cardinality mismatch");
    const std::size_t sigma = truth.size();
    std::vector<std::size_t> perm(sigma);
    std::iota(perm.begin(), perm.end(), std::size_t{0});

    double best = std::numeric_limits<double>::infinity();
    do {
        // One global gauge per matching, fitted on the first pair.
        Matrix T = fit_gauge(truth[0], estimate[perm[0]]);
        Matrix Tinv = T.inverse();
        double total = 0.0;
        for (std::size_t j = 0; j < sigma; ++j) {
            const DiscreteState& e = estimate[perm[j]];
            DiscreteState aligned;
            aligned.A = T * e.A * Tinv;
            aligned.B = T * e.B;
            aligned.C = e.C * Tinv;
            aligned.D = e.D;
            total += (truth[j].stacked() - aligned.stacked()).norm() / truth[j].stacked().norm();
        }
        best = std::min(best, total);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

double hankel_mismatch(const MarkovSequence& markov_true, const std::vector<DiscreteState>& common,
                       const SwitchEstimate& phi_hat, int n, int k) {
    const int q = 2 * n + 1, r = 2 * n;
    HankelMatrix H = hankel::build(markov_true, q, r, k);
    const int p = markov_true.p(), m = markov_true.m();
    auto label_at = [&](int kk) {
        kk = std::clamp(kk, phi_hat.k_lo, phi_hat.k_hi);
        int lab = phi_hat.at(kk);
        if (lab == 0) throw std::runtime_error("phi_hat unassigned at k = " + std::to_string(kk));
        return lab;
    };
    auto h_hat = [&](int kk, int l) -> Matrix {
        if (kk == l) return common.at(static_cast<std::size_t>(label_at(kk) - 1)).D;
        Matrix P = common.at(static_cast<std::size_t>(label_at(l) - 1)).B;
        for (int j = l + 1; j < kk; ++j) P = common.at(static_cast<std::size_t>(label_at(j) - 1)).A * P;
        return common.at(static_cast<std::size_t>(label_at(kk) - 1)).C * P;
    };
    Matrix Hhat(q * p, r * m);
    for (int s = 1; s <= q; ++s)
        for (int t = 1; t <= r; ++t) Hhat.block((s - 1) * p, (t - 1) * m, p, m) = h_hat(k + s - 1, k - t);
    return (H.data - Hhat).norm();
}

}  // namespace sls::metrics

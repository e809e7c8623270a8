#pragma once

#include "slsreal/hankel.hpp"
#include "slsreal/types.hpp"

#include <map>

namespace sls {

/// Per-anchor output of the SVD realization step.
///
/// Besides the quadruple, the SVD factors of both Hankel matrices at the
/// anchor are retained: the switch detectors consume O(k), O(k+1), R(k-1)
/// and R(k) directly and would otherwise re-run the decompositions.
struct AnchorData {
    DiscreteState quad;   ///< (A_hat(k), B_hat(k), C_hat(k), D_hat(k)); label unset
    Matrix O;             ///< O_hat_{2n+1}(k), from the SVD of H(k)
    Matrix R_prev;        ///< R_hat_{2n}(k-1), from the SVD of H(k)
    Matrix O_next;        ///< O_hat_{2n+1}(k+1), from the SVD of H(k+1)
    Matrix R;             ///< R_hat_{2n}(k), from the SVD of H(k+1)
    double sigma_n = 0.0; ///< n-th singular value of H(k)
};

/// Time-varying realization over the anchor window [k', k''].
struct LtvRealization {
    int n = 0, m = 0, p = 0;
    int k_lo = 0, k_hi = 0;  ///< window [k', k''] = [2n+1, N-4n]
    std::map<int, AnchorData> anchors;

    const AnchorData& at(int k) const {
        auto it = anchors.find(k);
        if (it == anchors.end()) throw std::out_of_range("no realization at anchor " + std::to_string(k));
        return it->second;
    }
    bool has(int k) const { return anchors.count(k) > 0; }
};

namespace ltv {

/// Anchor window [k', k''] for a sequence of length N and order n.
std::pair<int, int> window(int N, int n);

/// Rank-n truncated SVD factorization H = O R with the Sigma^(1/2) split and
/// a deterministic sign convention (first nonzero entry of each left singular
/// vector nonnegative).
ObsCtrlPair factorize(const HankelMatrix& H, int n, double* sigma_n = nullptr);

/// Realizes the quadruple at anchor k from the Hankel SVDs at k and k + 1.
AnchorData realize_at(const MarkovSequence& markov, int n, int k);

/// Realizes all requested anchors (whole window when anchors is empty).
LtvRealization realize_range(const MarkovSequence& markov, int n, const std::vector<int>& anchors = {});

/// Markov parameter rebuilt from the realized quadruples:
/// C_hat(k) A_hat(k-1) ... A_hat(l+1) B_hat(l), D_hat(k) on the diagonal.
Matrix reconstruct_markov(const LtvRealization& real, int k, int l);

}  // namespace ltv

}  // namespace sls

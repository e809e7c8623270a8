#pragma once

#include "slsreal/rng.hpp"
#include "slsreal/types.hpp"

namespace sls {

/// Time-indexed block Hankel matrix: block (s, t) holds h(k + s - 1, k - t)
/// for 1 <= s <= q, 1 <= t <= r. Requires k > r and k + q - 1 <= N.
struct HankelMatrix {
    int k = 0;  ///< anchor time
    int q = 0;  ///< block rows
    int r = 0;  ///< block columns
    Matrix data;  ///< (q p) x (r m)
};

/// Extended observability / controllability factor pair with O_q R_r = H.
struct ObsCtrlPair {
    Matrix O_q;  ///< (q p) x n
    Matrix R_r;  ///< n x (r m)
};

namespace hankel {

/// Builds H_{q,r}(k) from stored Markov blocks.
HankelMatrix build(const MarkovSequence& markov, int q, int r, int k);

/// Shifts an existing Hankel matrix from anchor k to k + 1, reusing the
/// shared submatrix and fetching only the q + r - 1 new blocks.
HankelMatrix advance(const HankelMatrix& H, const MarkovSequence& markov);

/// Observability and controllability Gramians G_o = O'O, G_c = R R'.
std::pair<Matrix, Matrix> gramians(const ObsCtrlPair& oc);

/// Noise injection mode for Markov sequences.
enum class NoiseMode {
    AmplitudeBound,  ///< per-block perturbation uniform on the Frobenius eps-ball
    TargetSnrDb,     ///< i.i.d. Gaussian entries scaled to a target SNR over the stored band
};

/// Returns a perturbed copy of the sequence; deterministic given the rng
/// state. The realized noise bound (max block perturbation norm) is recorded
/// on the output.
MarkovSequence add_noise(const MarkovSequence& markov, NoiseMode mode, double level, Rng& rng);

}  // namespace hankel

}  // namespace sls

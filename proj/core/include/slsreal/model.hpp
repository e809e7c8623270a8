#pragma once

#include "slsreal/rng.hpp"
#include "slsreal/types.hpp"

#include <optional>

namespace sls {

/// State transition matrix Phi(k, l) = A(k-1) ... A(l); identity for k = l.
Matrix state_transition(const SlsModel& model, int k, int l);

/// Markov parameter h(k, l): C(k) Phi(k, l+1) B(l) for k > l; D(k) for k = l.
Matrix markov(const SlsModel& model, int k, int l);

/// Generates exact Markov parameters for the model.
///
/// band < 0 stores the full lower triangle (O(N^2) blocks); band = L stores
/// only lags 0..L, which is all that the realization pipeline consumes for
/// L >= 4n + 1.
MarkovSequence generate_markov(const SlsModel& model, int band = -1);

/// Simulates y(k) for k in [start, start + inputs.size() - 1] via the state
/// recursion; x0 is the state at time `start`.
std::vector<Vector> simulate(const SlsModel& model, const Vector& x0, int start,
                             const std::vector<Vector>& inputs);

/// Same response computed through the convolution form
/// y(k) = C(k) Phi(k, l) x(l) + sum_j h(k, j) u(j); used as a cross-check.
std::vector<Vector> simulate_convolution(const SlsModel& model, const Vector& x0, int start,
                                         const std::vector<Vector>& inputs);

/// Structural assumption identifiers accepted by check_assumptions.
enum class Assumption {
    Stability,          ///< each A_j BIBO-stable with full MacMillan degree n
    MinimumDwell,       ///< delta_*(chi) >= n
    Unimodality,        ///< pairwise gaps of the eigenvalue feature M(A_j)
    StateCoverage,      ///< every submodel visited; N_S > 5n
    SwitchDetectability,///< the two correction-feature expressions differ from n at switches
    StackDistinctness,  ///< [C_j D_j] row stacks and [B_j; D_j] column stacks pairwise distinct
    NoZeroPoles,        ///< no submodel eigenvalue at the origin
};

struct AssumptionResult {
    Assumption which;
    bool pass = false;
    std::string diagnostic;
};

/// Evaluates the selected structural assumptions numerically. Failures are
/// report entries, never exceptions.
std::vector<AssumptionResult> check_assumptions(const SlsModel& model,
                                                const std::vector<Assumption>& which);

/// All assumptions relevant to the full pipeline.
std::vector<Assumption> all_assumptions();

/// Samples sigma Gaussian quadruples, rescaling A to spectral radius
/// <= 1 - margin, and rejection-resamples until the structural assumptions
/// hold. Deterministic given the seed.
std::vector<DiscreteState> random_sls(int n, int m, int p, int sigma, double margin,
                                      double separation, Rng& rng, int max_tries = 200);

/// Segment-class mix for random switching sequences.
enum class DwellMode {
    Uniform,     ///< all dwell times >= floor
    ThreeClass,  ///< medium-to-long / short / very short mix with thresholds 6n+1 / 4n+2 / 2n+1
};

/// Uniformly sampled switching sequence with adjacent-distinct labels and
/// per-segment dwell floors. In ThreeClass mode at least one segment of each
/// class is present.
SwitchingSequence random_switching(int N, int n, int sigma, int dwell_floor, Rng& rng,
                                   DwellMode mode = DwellMode::Uniform);

/// Minimal admissible N for the realization window [2n+1, N-4n].
inline int minimal_N(int n) { return 6 * n + 2; }

/// Throws a sizing error naming the minimal N when N is too small.
void require_window(int N, int n);

}  // namespace sls

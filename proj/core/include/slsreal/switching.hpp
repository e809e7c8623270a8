#pragma once

#include "slsreal/cluster.hpp"
#include "slsreal/ltv.hpp"
#include "slsreal/types.hpp"

namespace sls {

/// Which detector produced an assignment or switch.
enum class Provenance : int {
    Unassigned = 0,
    Cluster = 1,      ///< stationary-interval labeling
    MarkovMatch = 2,  ///< Markov-parameter matching detector
    Correction = 3,   ///< correction-operator detector
    ShortSegment = 4, ///< Hankel-signature detector for short segments
    Fill = 5,         ///< nearest-neighbor fallback fill
};

struct DetectedSwitch {
    int k = 0;                ///< estimated switch instant
    int label_before = 0;     ///< 0 when unknown
    int label_after = 0;
    Provenance prov = Provenance::Unassigned;
    bool forward = true;      ///< direction of the sweep that found it
    int steps = 0;            ///< sweep iterations until detection
};

/// Estimated switching sequence over the anchor window, with an unassigned
/// sentinel (label 0) and per-index provenance.
struct SwitchEstimate {
    int k_lo = 0, k_hi = 0;
    std::vector<int> phi_hat;           ///< size k_hi - k_lo + 1; 0 = unassigned
    std::vector<Provenance> prov;
    std::vector<DetectedSwitch> switches;
    bool tolerant = false;              ///< conflicts unassign instead of throwing

    SwitchEstimate() = default;
    SwitchEstimate(int lo, int hi)
        : k_lo(lo), k_hi(hi),
          phi_hat(static_cast<std::size_t>(hi - lo + 1), 0),
          prov(static_cast<std::size_t>(hi - lo + 1), Provenance::Unassigned) {}

    int at(int k) const { return phi_hat.at(static_cast<std::size_t>(k - k_lo)); }
    Provenance prov_at(int k) const { return prov.at(static_cast<std::size_t>(k - k_lo)); }

    /// Assigns label on [lo, hi] clamped to the window; existing conflicting
    /// assignments raise an error naming both provenances, or — in tolerant
    /// mode — drop back to unassigned so a later stage re-classifies the gap.
    void assign(int lo, int hi, int label, Provenance p);

    /// Sorts switches and verifies strict monotonicity.
    void finalize_switches();
};

/// Detection and matching tolerances; see calibrate_tolerances.
struct DetectionTolerances {
    double correction = 1e-6;  ///< threshold on |M(V) - n| and |M(W) - n|
    double match = 1e-6;       ///< threshold on ||C_check - C|| + ||D_check - D||
    bool tolerant = false;     ///< resolve label conflicts instead of throwing
};

namespace switching {

/// Forward correction operator V_{2n+1}(k) = O^+(k) O(k+1).
Matrix forward_correction(const LtvRealization& real, int k);

/// Backward correction operator W_{2n}(k) = R(k-1) R^+(k).
Matrix backward_correction(const LtvRealization& real, int k);

struct ForwardMatch {
    Matrix C_check;  ///< p x n
    Matrix D_check;  ///< p x m
    double mismatch = 0.0;
    bool same_state = false;
};

struct BackwardMatch {
    Matrix B_check;  ///< n x m
    Matrix D_check;
    double mismatch = 0.0;
    bool same_state = false;
};

/// Tests whether the submodel `rep` is still active at time l by rebuilding
/// C from H_{1,2n}(l) and the controllability matrix of (A, B).
ForwardMatch match_forward(const MarkovSequence& markov, const DiscreteState& rep, int l, double tol);

/// Mirror test rebuilding B from H_{2n,1}(l+1) and the observability matrix.
BackwardMatch match_backward(const MarkovSequence& markov, const DiscreteState& rep, int l, double tol);

/// (n+1) x n block Hankel signature of an LTI quadruple; block (s, t) is
/// C A^(s+t-2) B. Invariant under similarity of the quadruple.
Matrix hankel_signature(const DiscreteState& quad);

/// Labels every maximal stationary interval by the nearest cluster feature
/// center (qualifying intervals keep their cluster assignment).
std::vector<int> label_intervals(const LtvRealization& real, const StationarySet& ss,
                                 const ClusterResult& clusters);

/// Self-calibrates detection tolerances on noisy data: 10x the median
/// deviation of each test statistic over known-stationary anchors, floored
/// at the exact-data defaults.
DetectionTolerances calibrate_tolerances(const LtvRealization& real, const MarkovSequence& markov,
                                         const StationarySet& ss, const ClusterResult& clusters,
                                         const std::vector<int>& interval_labels);

/// Markov-matching detector over the intervals with beta - alpha >= 2n - 1.
SwitchEstimate detect_markov(const LtvRealization& real, const MarkovSequence& markov,
                             const ClusterResult& clusters, const StationarySet& ss,
                             const std::vector<int>& interval_labels, const DetectionTolerances& tol);

/// Correction-operator detector over the remaining (shorter) intervals.
SwitchEstimate detect_correction(const LtvRealization& real, const StationarySet& ss,
                                 const ClusterResult& clusters, const std::vector<int>& interval_labels,
                                 const DetectionTolerances& tol);

/// Short-segment detector: fills unassigned gaps of `est` by classifying the
/// active submodel against the cluster Hankel signatures and extending with
/// the Markov matcher. Modifies and returns the estimate.
SwitchEstimate detect_short(const MarkovSequence& markov, const ClusterResult& clusters,
                            SwitchEstimate est, const DetectionTolerances& tol);

/// Merges detector fragments (applied in the order given), errors on label
/// conflicts, and reports remaining unassigned indices.
SwitchEstimate assemble_phi(const std::vector<SwitchEstimate>& fragments, int k_lo, int k_hi);

/// Nearest-assigned-neighbor fill for any indices still unassigned.
void fill_unassigned(SwitchEstimate& est);

}  // namespace switching

}  // namespace sls

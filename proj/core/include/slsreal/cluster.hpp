#pragma once

#include "slsreal/ltv.hpp"
#include "slsreal/types.hpp"

namespace sls {

/// One maximal interval [alpha, beta] of the stationary set.
struct StationaryInterval {
    int alpha = 0;
    int beta = 0;
    int gamma() const { return (alpha + beta) / 2; }
    int length() const { return beta - alpha + 1; }
};

/// Stationary set of the sliding Hankel trajectory.
///
/// `intervals` keeps every maximal interval; `qualifying` indexes the subset
/// with beta - alpha >= nu * n that feeds the clustering step. The short
/// intervals are retained because the correction-based switch detector
/// starts from them.
struct StationarySet {
    double epsilon_Z = 0.0;
    int nu = 0;
    std::vector<int> members;                   ///< sorted k with ||delta_H(k)||_F <= epsilon_Z
    std::vector<StationaryInterval> intervals;  ///< all maximal intervals
    std::vector<int> qualifying;                ///< indices into intervals
    std::vector<double> diff_norms;             ///< ||delta_H(k)||_F for k in [k', k''-1]
    int k_lo = 0, k_hi = 0;

    bool is_member(int k) const {
        return std::binary_search(members.begin(), members.end(), k);
    }
};

/// Result of the eigenvalue-feature clustering over qualifying intervals.
struct ClusterResult {
    int sigma_hat = 0;
    std::vector<int> assignments;        ///< per qualifying interval (parallel to ss.qualifying), label 1..sigma_hat
    std::vector<DiscreteState> representatives;  ///< indexed by label - 1
    std::vector<double> features;        ///< per qualifying interval
    std::vector<double> centers;         ///< mean feature per label
};

namespace cluster {

/// delta_H(k) = H_{2n+1,2n}(k+1) - H_{2n+1,2n}(k).
Matrix hankel_diff(const MarkovSequence& markov, int n, int k);

/// Scans the window for members and maximal intervals.
StationarySet stationary_set(const MarkovSequence& markov, int n, double epsilon_Z, int nu);

/// Adaptive threshold for noisy data: a multiple of the median difference
/// norm, floored to keep exact data at the configured base value.
double auto_epsilon_Z(const MarkovSequence& markov, int n, double base = 1e-4, double factor = 2.0);

/// Eigenvalue feature M(A_hat(gamma_i)) of every qualifying interval.
std::vector<double> interval_features(const LtvRealization& real, const StationarySet& ss);

/// Noise-hardened interval features: each feature is computed from a model
/// realized on the lag-averaged Markov blocks of the interval rather than a
/// single anchor Hankel matrix, shrinking the per-interval feature noise by
/// roughly the square root of the interval length. Falls back to the anchor
/// feature when a lag has no stored sample.
std::vector<double> averaged_interval_features(const LtvRealization& real,
                                               const MarkovSequence& markov,
                                               const StationarySet& ss, int n);

/// Data-driven clustering radius for noisy features: sorts the consecutive
/// feature gaps and, when a dominant gap exists, returns the midpoint between
/// the smallest separating gap (>= a quarter of the largest) and the largest
/// within-cluster gap. Falls back to `base` when no gap dominates.
double adaptive_radius(const std::vector<double>& features, double base);

/// 1-D density clustering of the features M(A_hat(gamma_i)) over qualifying
/// intervals: a sorted-gap sweep equivalent to density clustering with
/// min points = 1 at the given neighborhood radius.
/// When `features` is given it overrides the anchor-based features (same
/// order as ss.qualifying).
ClusterResult cluster_states(const LtvRealization& real, const StationarySet& ss, double radius,
                             const std::vector<double>* features = nullptr);

/// Merges clusters supported only by intervals shorter than min_support into
/// the nearest surviving cluster by feature distance.
ClusterResult recluster(const ClusterResult& result, const StationarySet& ss, int min_support);

/// Re-estimates each cluster representative from lag-averaged Markov blocks.
///
/// Within a stationary interval the dynamics are LTI, so every h(k, k - d)
/// drawn from the same segment estimates the same lag-d parameter; averaging
/// over all supporting intervals and re-realizing shrinks the noise on the
/// representative by roughly the square root of the sample count. Exact data
/// is reproduced unchanged (up to the state basis).
ClusterResult refine_representatives(const MarkovSequence& markov, const StationarySet& ss,
                                     ClusterResult clusters, int n);

/// Noise-robust consolidation of an initial clustering: iterates a
/// k-means-style reassignment of qualifying intervals to the nearest cluster
/// in lag-averaged Markov-parameter space (a basis-invariant signature far
/// richer than the scalar eigenvalue feature) with a merge of clusters whose
/// pooled parameters agree to within the noise expected of two independent
/// sample means. Ends with a representative refinement pass.
ClusterResult consolidate_clusters(const LtvRealization& real, const MarkovSequence& markov,
                                   const StationarySet& ss, ClusterResult clusters, int n);

}  // namespace cluster

}  // namespace sls

#pragma once

#include "slsreal/cluster.hpp"
#include "slsreal/switching.hpp"
#include "slsreal/types.hpp"

#include <map>

namespace sls {

/// Cross-basis transforms Pi_j placing every recovered submodel in the basis
/// of label 1 (Pi_1 = I).
struct BasisTransforms {
    std::map<int, Matrix> pi;                 ///< label -> n x n nonsingular matrix
    std::map<int, std::vector<int>> path;     ///< label -> chain of switch instants used
    std::map<int, double> condition_numbers;  ///< conditioning of each Pi_j
};

namespace basis {

/// Basis ratio T_{j2} T_{j1}^{-1}, assembled from the Markov parameters
/// h(k_i + xi, k_i - eta) that straddle the switch k_i from label j_pre to
/// j_post. Requires dwell >= depth on both sides of the switch; depth = 0
/// uses the minimum n. Depths beyond n add rows/columns to the observability
/// and controllability stacks, turning the extraction into an overdetermined
/// least-squares problem that averages out measurement noise.
Matrix cross_product_at_switch(const MarkovSequence& markov, const ClusterResult& clusters,
                               int k_i, int j_pre, int j_post, int depth = 0);

/// Solves for all Pi_j by breadth-first composition over the switch graph,
/// starting from label 1. All switches joining the same ordered label pair
/// are averaged into one edge; edges with a basis ratio conditioned worse
/// than the guard are skipped in favor of another route.
BasisTransforms solve_transforms(const MarkovSequence& markov, const ClusterResult& clusters,
                                 const SwitchEstimate& est, double cond_guard = 1e8);

/// Applies the transforms: A -> Pi^{-1} A Pi, B -> Pi^{-1} B, C -> C Pi.
std::vector<DiscreteState> apply_transforms(const ClusterResult& clusters,
                                            const BasisTransforms& transforms);

/// State recursion with the common-basis submodels switched by phi_hat
/// (constant continuation outside the estimation window).
std::vector<Vector> predict_output(const std::vector<DiscreteState>& common,
                                   const SwitchEstimate& phi_hat, const Vector& x0, int start,
                                   const std::vector<Vector>& inputs);

}  // namespace basis

}  // namespace sls

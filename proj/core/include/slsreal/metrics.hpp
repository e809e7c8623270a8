#pragma once

#include "slsreal/switching.hpp"
#include "slsreal/types.hpp"

namespace sls {

namespace metrics {

/// Variance-accounted-for percentage per output channel:
/// (1 - var(y - y_hat) / var(y)) * 100. Unbounded below.
std::vector<double> vaf(const std::vector<Vector>& y_true, const std::vector<Vector>& y_pred);

/// Percentage of time indices with matching labels.
double fit_phi(const std::vector<int>& phi, const std::vector<int>& phi_hat);

/// Submodel-set error: sum over matched labels of the relative Frobenius
/// error of the stacked [[A, B], [C, D]] matrices.
///
/// The estimates live in an arbitrary common basis, so before comparing, a
/// gauge transform is fitted per candidate matching (from the observability
/// matrices of the first matched pair) and the matching minimizing the total
/// error over all permutations is reported.
double delta_P(const std::vector<DiscreteState>& truth, const std::vector<DiscreteState>& estimate);

/// epsilon_H(k) = || H_{2n+1,2n}(k) - H_hat_{2n+1,2n}(k) ||_F where the
/// estimate is rebuilt from the common-basis submodels and phi_hat.
double hankel_mismatch(const MarkovSequence& markov_true, const std::vector<DiscreteState>& common,
                       const SwitchEstimate& phi_hat, int n, int k);

}  // namespace metrics

}  // namespace sls

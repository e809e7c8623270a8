#pragma once

#include "slsreal/pipeline.hpp"
#include "slsreal/types.hpp"

#include <string>

namespace sls::io {

/// Model files are JSON with explicit matrix row lists plus the switching
/// labels. Markov files are a one-line JSON header {N, p, m, n, band,
/// noise_bound} followed by CSV rows `k,l,entry_11,...,entry_pm` in
/// row-major block order.

void save_model(const std::string& path, const SlsModel& model);
SlsModel load_model(const std::string& path);

void save_markov(const std::string& path, const MarkovSequence& markov, int n);
/// Loads a Markov file; `n` receives the model order recorded in the header.
MarkovSequence load_markov(const std::string& path, int& n);

void save_report(const std::string& path, const EstimationReport& report);

void write_stationary_csv(const std::string& path, const StationarySet& ss);
void write_clusters_csv(const std::string& path, const StationarySet& ss, const ClusterResult& clusters);
void write_phi_csv(const std::string& path, const SwitchEstimate& est,
                   const std::vector<int>* phi_true = nullptr);
void write_montecarlo_csv(const std::string& path, const pipeline::MonteCarloResult& result);

}  // namespace sls::io

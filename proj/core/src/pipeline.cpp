#include "slsreal/pipeline.hpp"

#include "slsreal/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sls::pipeline {

std::vector<int> match_labels(const std::vector<DiscreteState>& truth_states,
                              const ClusterResult& clusters) {
    const std::size_t sigma_hat = static_cast<std::size_t>(clusters.sigma_hat);
    std::vector<double> truth_features;
    truth_features.reserve(truth_states.size());
    for (const auto& s : truth_states) truth_features.push_back(feature_M(s.A));

    std::vector<int> map(sigma_hat, 1);
    if (sigma_hat == truth_states.size()) {
        // Bijective matching minimizing the total feature distance.
        std::vector<std::size_t> perm(sigma_hat);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        double best = std::numeric_limits<double>::infinity();
        do {
            double total = 0.0;
            for (std::size_t c = 0; c < sigma_hat; ++c)
                total += std::abs(clusters.centers[c] - truth_features[perm[c]]);
            if (total < best) {
                best = total;
                for (std::size_t c = 0; c < sigma_hat; ++c) map[c] = static_cast<int>(perm[c]) + 1;
            }
        } while (std::next_permutation(perm.begin(), perm.end()));
    } else {
        // Cardinality mismatch: nearest feature per cluster.
        for (std::size_t c = 0; c < sigma_hat; ++c) {
            std::size_t best_j = 0;
            for (std::size_t j = 1; j < truth_features.size(); ++j)
                if (std::abs(clusters.centers[c] - truth_features[j]) <
                    std::abs(clusters.centers[c] - truth_features[best_j]))
                    best_j = j;
            map[c] = static_cast<int>(best_j) + 1;
        }
    }
    return map;
}

std::vector<int> phi_hat_full(const EstimationReport& report, int N) {
    std::vector<int> out(static_cast<std::size_t>(N));
    const auto& est = report.phi_hat;
    for (int k = 1; k <= N; ++k) {
        int kk = std::clamp(k, est.k_lo, est.k_hi);
        int lab = est.at(kk);
        if (!report.label_map.empty() && lab >= 1 &&
            lab <= static_cast<int>(report.label_map.size()))
            lab = report.label_map[static_cast<std::size_t>(lab - 1)];
        out[static_cast<std::size_t>(k - 1)] = lab;
    }
    return out;
}

EstimationReport meta_run(const MarkovSequence& markov, const RunConfig& config,
                          const SlsModel* truth) {
    if (config.n <= 0) throw std::invalid_argument("config.n must be set");
    const int n = config.n;
    EstimationReport report;
    report.config = config;

    // Stage 1: LTV realization on the full anchor window.
    try {
        report.real = ltv::realize_range(markov, n);
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("stage 1 (realization): ") + e.what());
    }

    // Stage 2: stationary set and feature clustering.
    try {
        double eps = config.auto_epsilon ? cluster::auto_epsilon_Z(markov, n, config.epsilon_Z)
                                         : config.epsilon_Z;
        report.ss = cluster::stationary_set(markov, n, eps, config.nu);
        double radius = config.radius;
        std::vector<double> feats;
        if (config.noisy) {
            feats = cluster::averaged_interval_features(report.real, markov, report.ss, n);
            radius = cluster::adaptive_radius(feats, config.radius);
        }
        report.clusters = cluster::cluster_states(report.real, report.ss, radius,
                                                  config.noisy ? &feats : nullptr);
        if (config.noisy) {
            int support = config.min_support > 0 ? config.min_support : config.nu * n;
            report.clusters = cluster::recluster(report.clusters, report.ss, support);
            report.clusters =
                cluster::consolidate_clusters(report.real, markov, report.ss, report.clusters, n);
        } else {
            report.clusters = cluster::refine_representatives(markov, report.ss, report.clusters, n);
        }
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("stage 2 (clustering): ") + e.what());
    }

    // Stage 3: switch detection, staged matching -> corrections -> short segments.
    try {
        auto labels = switching::label_intervals(report.real, report.ss, report.clusters);
        report.tolerances =
            config.noisy
                ? switching::calibrate_tolerances(report.real, markov, report.ss, report.clusters, labels)
                : DetectionTolerances{};
        auto frag_markov =
            switching::detect_markov(report.real, markov, report.clusters, report.ss, labels, report.tolerances);
        auto frag_corr =
            switching::detect_correction(report.real, report.ss, report.clusters, labels, report.tolerances);
        report.phi_hat =
            switching::assemble_phi({frag_markov, frag_corr}, report.real.k_lo, report.real.k_hi);
        report.phi_hat = switching::detect_short(markov, report.clusters, report.phi_hat, report.tolerances);
        switching::fill_unassigned(report.phi_hat);
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("stage 3 (switch detection): ") + e.what());
    }

    // Stage 4: basis alignment.
    try {
        if (config.align && report.clusters.sigma_hat > 1) {
            report.transforms =
                basis::solve_transforms(markov, report.clusters, report.phi_hat, config.cond_guard);
        } else {
            for (int j = 1; j <= report.clusters.sigma_hat; ++j) {
                report.transforms.pi[j] = Matrix::Identity(n, n);
                report.transforms.condition_numbers[j] = 1.0;
                report.transforms.path[j] = {};
            }
        }
        report.submodels = basis::apply_transforms(report.clusters, report.transforms);
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("stage 4 (basis alignment): ") + e.what());
    }

    // Metrics against ground truth.
    if (truth) {
        report.label_map = match_labels(truth->states, report.clusters);
        auto phi_full = phi_hat_full(report, truth->N());
        std::vector<int> phi_true;
        phi_true.reserve(static_cast<std::size_t>(truth->N()));
        for (int k = 1; k <= truth->N(); ++k) phi_true.push_back(truth->switching.at(k));
        report.fit = metrics::fit_phi(phi_true, phi_full);

        if (report.clusters.sigma_hat == truth->sigma())
            report.delta = metrics::delta_P(truth->states, report.submodels);

        // Output-prediction check on a seeded Gaussian input, zero initial state.
        Rng vrng = Rng(config.seed ^ 0x56414611ULL);
        std::vector<Vector> u;
        u.reserve(static_cast<std::size_t>(truth->N()));
        for (int k = 1; k <= truth->N(); ++k) {
            Vector uk(truth->m());
            for (int j = 0; j < truth->m(); ++j) uk(j) = vrng.gaussian();
            u.push_back(uk);
        }
        Vector x0 = Vector::Zero(truth->n());
        auto y_true = simulate(*truth, x0, 1, u);
        auto y_hat = basis::predict_output(report.submodels, report.phi_hat, x0, 1, u);
        report.vaf_values = metrics::vaf(y_true, y_hat);

        MarkovSequence exact = generate_markov(*truth, markov.band());
        report.hankel_errors.reserve(static_cast<std::size_t>(report.real.k_hi - report.real.k_lo + 1));
        for (int k = report.real.k_lo; k <= report.real.k_hi; ++k)
            report.hankel_errors.push_back(
                metrics::hankel_mismatch(exact, report.submodels, report.phi_hat, n, k));
    }
    return report;
}

MonteCarloResult monte_carlo(const MonteCarloConfig& config) {
    MonteCarloResult result;
    const int dwell_floor =
        config.dwell_floor > 0 ? config.dwell_floor : (6 + config.base.nu) * config.n + 1;

    for (std::size_t si = 0; si < config.snr_db.size(); ++si) {
        MonteCarloRow row;
        row.snr_db = config.snr_db[si];
        double fit_sum = 0.0, delta_sum = 0.0, rms_sum = 0.0;
        int delta_count = 0;
        for (int r = 0; r < config.runs; ++r) {
            Rng rng = Rng(config.seed).stream(static_cast<std::uint64_t>(si) * 10000 +
                                              static_cast<std::uint64_t>(r));
            try {
                SlsModel model;
                model.states = random_sls(config.n, config.m, config.p, config.sigma, config.margin,
                                          config.separation, rng);
                model.switching =
                    random_switching(config.N, config.n, config.sigma, dwell_floor, rng);
                MarkovSequence exact = generate_markov(model, 4 * config.n + 1);
                MarkovSequence noisy =
                    hankel::add_noise(exact, hankel::NoiseMode::TargetSnrDb, row.snr_db, rng);

                RunConfig rc = config.base;
                rc.n = config.n;
                rc.noisy = true;
                rc.auto_epsilon = true;
                rc.seed = config.seed + static_cast<std::uint64_t>(r);
                EstimationReport rep = meta_run(noisy, rc, &model);

                if (!rep.fit) throw std::runtime_error("metrics unavailable");
                fit_sum += *rep.fit;
                // delta_P needs sigma_hat == sigma; average it where defined.
                if (rep.delta) {
                    delta_sum += *rep.delta;
                    ++delta_count;
                }
                double rms = 0.0;
                for (double e : rep.hankel_errors) rms += e * e;
                rms = std::sqrt(rms / static_cast<double>(rep.hankel_errors.size()));
                rms_sum += rms;
                ++row.successes;
            } catch (const std::exception& e) {
                ++row.failures;
                result.failure_messages.push_back("snr " + std::to_string(row.snr_db) + " run " +
                                                  std::to_string(r) + ": " + e.what());
            }
        }
        if (row.successes > 0) {
            row.fit_avg = fit_sum / row.successes;
            row.rms_hankel_avg = rms_sum / row.successes;
        }
        if (delta_count > 0) row.delta_avg = delta_sum / delta_count;
        result.rows.push_back(row);
    }
    return result;
}

}  // namespace sls::pipeline

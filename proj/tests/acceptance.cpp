// Acceptance gate: one pass/fail line per criterion, nonzero exit on any failure.
#include "slsreal/linalg.hpp"
#include "slsreal/metrics.hpp"
#include "slsreal/model.hpp"
#include "slsreal/pipeline.hpp"
#include "slsreal/presets.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

using namespace sls;

namespace {

int g_failures = 0;

void report(int index, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %d: %s — %s\n", pass ? "PASS" : "FAIL", index, name.c_str(),
                detail.c_str());
    if (!pass) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

SlsModel mixed_model(int N = 600) {
    SlsModel model;
    model.states = presets::mimo3_states();
    model.switching = presets::mimo3_mixed_switching(N);
    return model;
}

// 1. Discrete-state recovery from exact data at N = 1000 under random switching.
void criterion1() {
    auto t0 = std::chrono::steady_clock::now();
    const int n = 3, N = 1000;
    SlsModel model;
    model.states = presets::mimo3_states();
    Rng rng(2024);
    model.switching = random_switching(N, n, 3, 6 * n + 1, rng);
    auto seq = generate_markov(model, 4 * n + 1);
    auto real = ltv::realize_range(seq, n);
    auto ss = cluster::stationary_set(seq, n, 1e-4, 6);
    auto clusters = cluster::cluster_states(real, ss, 1e-5);
    double elapsed = seconds_since(t0);

    bool pass = clusters.sigma_hat == 3;
    double worst = 0.0;
    if (pass) {
        auto map = pipeline::match_labels(model.states, clusters);
        for (int c = 1; c <= 3; ++c) {
            auto ev_hat = sorted_eigenvalues(clusters.representatives[static_cast<std::size_t>(c - 1)].A);
            auto ev_true =
                sorted_eigenvalues(model.states[static_cast<std::size_t>(map[static_cast<std::size_t>(c - 1)] - 1)].A);
            for (std::size_t i = 0; i < ev_hat.size(); ++i)
                worst = std::max(worst, std::abs(ev_hat[i] - ev_true[i]));
        }
        pass = worst < 1e-6 && elapsed < 30.0;
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "sigma_hat=%d, worst eigenvalue gap %.2e, %.1f s",
                  clusters.sigma_hat, worst, elapsed);
    report(1, "noiseless discrete-state recovery", pass, buf);
}

// 2. Exact switching recovery on the mixed-length sequence.
void criterion2(const EstimationReport& rep) {
    bool pass = rep.fit.has_value() && *rep.fit == 100.0;
    char buf[80];
    std::snprintf(buf, sizeof buf, "FIT = %.4f%%", rep.fit.value_or(-1.0));
    report(2, "noiseless switching recovery", pass, buf);
}

// 3. Common-basis prediction plus the alignment-off negative control.
void criterion3(const SlsModel& model, const MarkovSequence& seq, const EstimationReport& rep) {
    auto u = presets::mimo3_multisine_input(model.N());
    Vector x0 = Vector::Zero(model.n());
    auto y_true = simulate(model, x0, 1, u);
    auto y_hat = basis::predict_output(rep.submodels, rep.phi_hat, x0, 1, u);
    auto v = metrics::vaf(y_true, y_hat);
    bool aligned_ok = v.size() == 2 && v[0] >= 99.9 && v[1] >= 99.9;

    RunConfig rc = rep.config;
    rc.align = false;
    auto rep_off = pipeline::meta_run(seq, rc);
    auto y_off = basis::predict_output(rep_off.submodels, rep_off.phi_hat, x0, 1, u);
    auto v_off = metrics::vaf(y_true, y_off);
    bool control_ok = v_off[0] < 99.0 || v_off[1] < 99.0;

    char buf[160];
    std::snprintf(buf, sizeof buf, "VAF = (%.3f, %.3f), alignment off = (%.2f, %.2f)", v[0], v[1],
                  v_off[0], v_off[1]);
    report(3, "basis transform and output prediction", aligned_ok && control_ok, buf);
}

// 4. Smallest nonzero singular values of the per-submodel LTI Hankel matrices
//    at the (2n+1, 2n) sizing.
void criterion4() {
    auto states = presets::mimo3_states();
    const double expected[3] = {0.4063, 0.3560, 0.0180};
    double got[3];
    bool pass = true;
    for (std::size_t j = 0; j < 3; ++j) {
        SlsModel lti;
        lti.states = {states[j]};
        lti.states[0].label = 1;
        lti.switching = SwitchingSequence(std::vector<int>(40, 1));
        auto seq = generate_markov(lti, 13);
        auto H = hankel::build(seq, 7, 6, 20);
        Eigen::JacobiSVD<Matrix> svd(H.data);
        got[j] = svd.singularValues()(2);
        pass = pass && std::abs(got[j] - expected[j]) < 1e-3;
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "sigma_min = {%.4f, %.4f, %.4f}", got[0], got[1], got[2]);
    report(4, "per-submodel Hankel singular values", pass, buf);
}

// 5. Amplitude-noise robustness trend and 40 dB mismatch-series shape.
void criterion5(const SlsModel& model, const MarkovSequence& exact) {
    const int n = 3;
    std::vector<double> eps = {1e-2, 1e-3, 1e-4};
    std::vector<double> errs;
    for (std::size_t i = 0; i < eps.size(); ++i) {
        Rng rng(900 + static_cast<std::uint64_t>(i));
        auto noisy = hankel::add_noise(exact, hankel::NoiseMode::AmplitudeBound, eps[i], rng);
        auto real = ltv::realize_range(noisy, n);
        double worst = 0.0;
        for (int k = real.k_lo; k <= real.k_hi; ++k)
            for (int l = std::max(real.k_lo, k - 2 * n); l <= k; ++l)
                worst = std::max(worst, (ltv::reconstruct_markov(real, k, l) - exact.at(k, l)).norm());
        errs.push_back(worst);
    }
    // Least-squares log-log slope of error versus epsilon.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < eps.size(); ++i) {
        double x = std::log10(eps[i]), y = std::log10(errs[i]);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    double m = static_cast<double>(eps.size());
    double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    bool trend_ok = slope >= 0.9;

    // Mismatch series at 40 dB: flat within segments, spikes only near switches.
    Rng rng(1234);
    auto noisy = hankel::add_noise(exact, hankel::NoiseMode::TargetSnrDb, 40.0, rng);
    RunConfig rc;
    rc.n = n;
    rc.noisy = true;
    rc.auto_epsilon = true;
    SlsModel truth = model;
    auto rep = pipeline::meta_run(noisy, rc, &truth);
    auto sw = model.switching.switches();
    auto near_switch = [&](int k) {
        for (int s : sw)
            if (std::abs(k - s) <= 2 * n + 1) return true;
        return false;
    };
    std::vector<double> away, near;
    for (std::size_t i = 0; i < rep.hankel_errors.size(); ++i) {
        int k = rep.real.k_lo + static_cast<int>(i);
        (near_switch(k) ? near : away).push_back(rep.hankel_errors[i]);
    }
    double mean = 0.0;
    for (double e : away) mean += e;
    mean /= static_cast<double>(away.size());
    double var = 0.0;
    for (double e : away) var += (e - mean) * (e - mean);
    double cv = std::sqrt(var / static_cast<double>(away.size())) / mean;
    double peak_near = 0.0;
    for (double e : near) peak_near = std::max(peak_near, e);
    bool shape_ok = cv < 0.5 && peak_near > 3.0 * mean;

    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "log-log slope %.3f, away-from-switch CV %.3f, switch peak/mean %.1f", slope, cv,
                  peak_near / mean);
    report(5, "noise robustness trend and mismatch shape", trend_ok && shape_ok, buf);
}

// 6. Randomized Monte-Carlo study at 50 dB and 20 dB.
void criterion6() {
    auto t0 = std::chrono::steady_clock::now();
    pipeline::MonteCarloConfig mc;
    mc.runs = 50;
    mc.snr_db = {50.0, 20.0};
    auto result = pipeline::monte_carlo(mc);
    double elapsed = seconds_since(t0);

    const auto& hi = result.rows[0];
    const auto& lo = result.rows[1];
    bool pass = hi.fit_avg >= 99.5 && hi.delta_avg >= 0.004 && hi.delta_avg <= 0.03 &&
                lo.fit_avg >= 90.0 && elapsed < 600.0;
    char buf[220];
    std::snprintf(buf, sizeof buf,
                  "50 dB: FIT %.2f, delta_P %.4f (%d ok); 20 dB: FIT %.2f (%d ok); %.0f s",
                  hi.fit_avg, hi.delta_avg, hi.successes, lo.fit_avg, lo.successes, elapsed);
    report(6, "randomized Monte-Carlo study", pass, buf);
}

// 7. Property suites are exercised by the unit-test binary; spot-check the
//    invariants that are cheap to re-verify here.
void criterion7(const EstimationReport& rep) {
    bool steps_ok = true;
    const int n = 3;
    for (const auto& s : rep.phi_hat.switches) {
        if (s.prov == Provenance::Fill) continue;
        steps_ok = steps_ok && (s.forward ? s.steps <= 2 * n + 1 : s.steps <= 2 * n);
    }
    Rng rng(777);
    bool m_ok = true;
    for (int trial = 0; trial < 100; ++trial) {
        Matrix A(3, 3), T(3, 3);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                A(i, j) = rng.gaussian();
                T(i, j) = rng.gaussian();
            }
        T += 4.0 * Matrix::Identity(3, 3);
        m_ok = m_ok && std::abs(feature_M(A) - feature_M(T.inverse() * A * T)) < 1e-9;
    }
    report(7, "property suites (full set in unit_tests)", steps_ok && m_ok,
           steps_ok && m_ok ? "step-count bounds and feature invariance hold"
                            : "an invariant was violated");
}

// 8. Items intentionally out of reproduction scope.
void criterion8() {
    report(8, "out-of-reproduction declaration", true,
           "competitor-method comparison columns, the input-output identification front end, and "
           "printed basis-transform matrices are basis- and upstream-method dependent and are not "
           "reproduced; their roles are covered by criteria 3 and 6");
}

}  // namespace

int main() {
    try {
        criterion1();

        auto model = mixed_model();
        auto seq = generate_markov(model, 13);
        RunConfig rc;
        rc.n = 3;
        auto rep = pipeline::meta_run(seq, rc, &model);

        criterion2(rep);
        criterion3(model, seq, rep);
        criterion4();
        criterion5(model, seq);
        criterion6();
        criterion7(rep);
        criterion8();
    } catch (const std::exception& e) {
        std::printf("[FAIL] unexpected exception: %s\n", e.what());
        return 1;
    }
    std::printf("%s\n", g_failures == 0 ? "all acceptance criteria passed"
                                        : "acceptance criteria failed");
    return g_failures == 0 ? 0 : 1;
}

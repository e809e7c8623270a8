#include <doctest.h>

#include "slsreal/linalg.hpp"
#include "slsreal/model.hpp"
#include "slsreal/pipeline.hpp"
#include "slsreal/presets.hpp"

using namespace sls;

namespace {

struct Fixture {
    SlsModel model;
    MarkovSequence seq;
    EstimationReport report;

    explicit Fixture(int N = 600) {
        model.states = presets::mimo3_states();
        model.switching = presets::mimo3_mixed_switching(N);
        seq = generate_markov(model, 13);
        RunConfig rc;
        rc.n = 3;
        rc.align = false;
        report = pipeline::meta_run(seq, rc, &model);
    }
};

const Fixture& fixture() {
    static Fixture f;
    return f;
}

}  // namespace

TEST_CASE("noiseless switching recovery is exact on the mixed sequence") {
    const auto& f = fixture();
    REQUIRE(f.report.fit.has_value());
    CHECK(*f.report.fit == doctest::Approx(100.0));
    // Every true switch inside the window is found at the exact instant.
    auto sw_true = f.model.switching.switches();
    std::vector<int> sw_hat;
    for (const auto& s : f.report.phi_hat.switches) sw_hat.push_back(s.k);
    for (int k : sw_true) {
        if (k <= f.report.real.k_lo || k > f.report.real.k_hi) continue;
        CHECK(std::find(sw_hat.begin(), sw_hat.end(), k) != sw_hat.end());
    }
}

TEST_CASE("detected switches respect the sweep step-count bounds") {
    const auto& f = fixture();
    const int n = 3;
    for (const auto& s : f.report.phi_hat.switches) {
        if (s.prov == Provenance::Fill) continue;
        INFO("switch at " << s.k);
        if (s.forward)
            CHECK(s.steps <= 2 * n + 1);
        else
            CHECK(s.steps <= 2 * n);
    }
}

TEST_CASE("every index carries a provenance and short segments use the signature detector") {
    const auto& f = fixture();
    const auto& est = f.report.phi_hat;
    bool saw_short = false, saw_markov = false, saw_correction = false;
    for (int k = est.k_lo; k <= est.k_hi; ++k) {
        CHECK(est.at(k) >= 1);
        CHECK(est.prov_at(k) != Provenance::Unassigned);
        switch (est.prov_at(k)) {
            case Provenance::ShortSegment: saw_short = true; break;
            case Provenance::MarkovMatch: saw_markov = true; break;
            case Provenance::Correction: saw_correction = true; break;
            default: break;
        }
    }
    // The mixed preset exercises all three detectors.
    CHECK(saw_markov);
    CHECK(saw_correction);
    CHECK(saw_short);
}

TEST_CASE("forward correction feature equals n exactly on the stationary set") {
    const auto& f = fixture();
    const int n = 3;
    // gamma of the first long interval is well inside segment 1.
    const auto& iv = f.report.ss.intervals[static_cast<std::size_t>(f.report.ss.qualifying[0])];
    Matrix V = switching::forward_correction(f.report.real, iv.gamma());
    CHECK(std::abs(feature_M(V) - n) < 1e-9);
    Matrix W = switching::backward_correction(f.report.real, iv.gamma());
    CHECK(std::abs(feature_M(W) - n) < 1e-9);
}

TEST_CASE("hankel signature is similarity-invariant") {
    auto states = presets::mimo3_states();
    Rng rng(17);
    Matrix T(3, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) T(i, j) = rng.gaussian();
    T += 3.0 * Matrix::Identity(3, 3);
    DiscreteState sim;
    sim.A = T.inverse() * states[0].A * T;
    sim.B = T.inverse() * states[0].B;
    sim.C = states[0].C * T;
    sim.D = states[0].D;
    CHECK((switching::hankel_signature(states[0]) - switching::hankel_signature(sim)).norm() < 1e-10);
}

TEST_CASE("assemble_phi rejects conflicting fragments") {
    SwitchEstimate a(10, 20), b(10, 20);
    a.assign(10, 15, 1, Provenance::MarkovMatch);
    b.assign(14, 20, 2, Provenance::Correction);
    CHECK_THROWS_AS(switching::assemble_phi({a, b}, 10, 20), std::runtime_error);
}

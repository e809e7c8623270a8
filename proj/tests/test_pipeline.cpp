#include <doctest.h>

#include "slsreal/pipeline.hpp"
#include "slsreal/presets.hpp"

using namespace sls;

namespace {

SlsModel preset_model(int N = 600) {
    SlsModel model;
    model.states = presets::mimo3_states();
    model.switching = presets::mimo3_mixed_switching(N);
    return model;
}

}  // namespace

TEST_CASE("noiseless meta run recovers everything") {
    auto model = preset_model();
    auto seq = generate_markov(model, 13);
    RunConfig rc;
    rc.n = 3;
    auto report = pipeline::meta_run(seq, rc, &model);
    CHECK(report.clusters.sigma_hat == 3);
    REQUIRE(report.fit.has_value());
    CHECK(*report.fit == doctest::Approx(100.0));
    REQUIRE(report.delta.has_value());
    CHECK(*report.delta < 1e-8);
    for (double v : report.vaf_values) CHECK(v > 99.99);
    for (double e : report.hankel_errors) CHECK(e < 1e-8);
}

TEST_CASE("meta run is deterministic under a fixed seed") {
    auto model = preset_model(400);
    auto exact = generate_markov(model, 13);
    Rng r1(21), r2(21);
    auto n1 = hankel::add_noise(exact, hankel::NoiseMode::TargetSnrDb, 50.0, r1);
    auto n2 = hankel::add_noise(exact, hankel::NoiseMode::TargetSnrDb, 50.0, r2);
    RunConfig rc;
    rc.n = 3;
    rc.noisy = true;
    rc.auto_epsilon = true;
    rc.seed = 77;
    auto rep1 = pipeline::meta_run(n1, rc, &model);
    auto rep2 = pipeline::meta_run(n2, rc, &model);
    REQUIRE(rep1.fit.has_value());
    REQUIRE(rep2.fit.has_value());
    CHECK(*rep1.fit == *rep2.fit);
    CHECK(rep1.phi_hat.phi_hat == rep2.phi_hat.phi_hat);
}

TEST_CASE("noisy meta run at 50 dB still classifies well") {
    auto model = preset_model(400);
    auto exact = generate_markov(model, 13);
    Rng rng(33);
    auto noisy = hankel::add_noise(exact, hankel::NoiseMode::TargetSnrDb, 50.0, rng);
    RunConfig rc;
    rc.n = 3;
    rc.noisy = true;
    rc.auto_epsilon = true;
    auto report = pipeline::meta_run(noisy, rc, &model);
    REQUIRE(report.fit.has_value());
    CHECK(*report.fit > 95.0);
}

TEST_CASE("stage-tagged errors identify the failing stage") {
    // An order mismatch makes the realization rank check fail in stage 1.
    auto model = preset_model(400);
    auto seq = generate_markov(model, 13);
    RunConfig rc;
    rc.n = 5;
    CHECK_THROWS_WITH_AS(pipeline::meta_run(seq, rc), doctest::Contains("stage 1"), std::runtime_error);
}

#include <doctest.h>

#include "slsreal/metrics.hpp"
#include "slsreal/model.hpp"
#include "slsreal/pipeline.hpp"
#include "slsreal/presets.hpp"

using namespace sls;

namespace {

struct Fixture {
    SlsModel model;
    MarkovSequence seq;
    EstimationReport report;

    Fixture() {
        model.states = presets::mimo3_states();
        model.switching = presets::mimo3_mixed_switching(600);
        seq = generate_markov(model, 13);
        RunConfig rc;
        rc.n = 3;
        report = pipeline::meta_run(seq, rc, &model);
    }
};

const Fixture& fixture() {
    static Fixture f;
    return f;
}

}  // namespace

TEST_CASE("transforms exist for every label and are well conditioned") {
    const auto& f = fixture();
    CHECK(f.report.transforms.pi.size() == 3);
    CHECK((f.report.transforms.pi.at(1) - Matrix::Identity(3, 3)).norm() == doctest::Approx(0.0));
    for (const auto& [label, cond] : f.report.transforms.condition_numbers) {
        INFO("label " << label);
        CHECK(cond < 1e6);
    }
}

TEST_CASE("common-basis submodels match the truth up to one global similarity") {
    const auto& f = fixture();
    REQUIRE(f.report.delta.has_value());
    CHECK(*f.report.delta < 1e-8);
}

TEST_CASE("aligned submodels reproduce cross-switch Markov parameters") {
    const auto& f = fixture();
    // Rebuild h(k, l) across the first switch (k_1 = 46) from the aligned set
    // and the estimated switching sequence; only a consistent common basis
    // makes the mixed product collapse correctly.
    auto label_at = [&](int k) { return f.report.phi_hat.at(k); };
    auto quad = [&](int k) -> const DiscreteState& {
        return f.report.submodels[static_cast<std::size_t>(label_at(k) - 1)];
    };
    for (int k = 47; k <= 50; ++k) {
        int l = 44;
        Matrix prod = Matrix::Identity(3, 3);
        for (int j = l + 1; j <= k - 1; ++j) prod = quad(j).A * prod;
        Matrix h_hat = quad(k).C * prod * quad(l).B;
        // Compare in truth labels via the pipeline label map where needed; the
        // Markov parameter itself is label-free.
        CHECK((h_hat - f.seq.at(k, l)).norm() < 1e-8);
    }
}

TEST_CASE("predicted output matches the true response on a multi-sine input") {
    const auto& f = fixture();
    auto u = presets::mimo3_multisine_input(600);
    Vector x0 = Vector::Zero(3);
    auto y_true = simulate(f.model, x0, 1, u);
    auto y_hat = basis::predict_output(f.report.submodels, f.report.phi_hat, x0, 1, u);
    auto v = metrics::vaf(y_true, y_hat);
    REQUIRE(v.size() == 2);
    CHECK(v[0] >= 99.9);
    CHECK(v[1] >= 99.9);
}

TEST_CASE("skipping the alignment stage degrades prediction") {
    const auto& f = fixture();
    SlsModel model = f.model;
    RunConfig rc;
    rc.n = 3;
    rc.align = false;
    auto report = pipeline::meta_run(f.seq, rc, &model);
    auto u = presets::mimo3_multisine_input(600);
    Vector x0 = Vector::Zero(3);
    auto y_true = simulate(model, x0, 1, u);
    auto y_hat = basis::predict_output(report.submodels, report.phi_hat, x0, 1, u);
    auto v = metrics::vaf(y_true, y_hat);
    CHECK((v[0] < 99.0 || v[1] < 99.0));
}

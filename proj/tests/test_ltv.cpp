#include <doctest.h>

#include "slsreal/linalg.hpp"
#include "slsreal/ltv.hpp"
#include "slsreal/model.hpp"
#include "slsreal/presets.hpp"

using namespace sls;

namespace {

SlsModel mixed_model(int N = 600) {
    SlsModel model;
    model.states = presets::mimo3_states();
    model.switching = presets::mimo3_mixed_switching(N);
    return model;
}

}  // namespace

TEST_CASE("rank-n factorization reproduces the Hankel matrix") {
    auto model = mixed_model();
    auto seq = generate_markov(model, 13);
    int n = 3;
    auto H = hankel::build(seq, 2 * n + 1, 2 * n, 20);
    double sigma_n = 0.0;
    auto oc = ltv::factorize(H, n, &sigma_n);
    CHECK(sigma_n > 0.0);
    CHECK((oc.O_q * oc.R_r - H.data).norm() / H.data.norm() <= 1e-8);
    CHECK(numerical_rank(H.data) == n);
}

TEST_CASE("realized quadruples reproduce the Markov parameters") {
    auto model = mixed_model(400);
    auto seq = generate_markov(model, 13);
    auto real = ltv::realize_range(seq, 3);
    CHECK(real.k_lo == 7);
    CHECK(real.k_hi == 400 - 12);
    double worst = 0.0;
    for (int k = real.k_lo; k <= real.k_hi; ++k)
        for (int l = std::max(real.k_lo, k - 6); l <= k; ++l)
            worst = std::max(worst, (ltv::reconstruct_markov(real, k, l) - seq.at(k, l)).norm());
    CHECK(worst < 1e-10);
}

TEST_CASE("anchors well inside a segment recover the active submodel spectrum") {
    auto model = mixed_model();
    auto seq = generate_markov(model, 13);
    auto real = ltv::realize_range(seq, 3, {25, 105, 170});
    // Segment interiors: phi = 1 on [1,45], 3 on [86,123], 2 on [155,194].
    struct Probe { int k; int label; };
    for (auto [k, label] : {Probe{25, 1}, Probe{105, 3}, Probe{170, 2}}) {
        auto ev_hat = sorted_eigenvalues(real.at(k).quad.A);
        auto ev_true = sorted_eigenvalues(model.states[static_cast<std::size_t>(label - 1)].A);
        for (std::size_t i = 0; i < ev_hat.size(); ++i)
            CHECK(std::abs(ev_hat[i] - ev_true[i]) < 1e-6);
        // D is basis-free and must match exactly.
        CHECK((real.at(k).quad.D - model.states[static_cast<std::size_t>(label - 1)].D).norm() < 1e-12);
    }
}

TEST_CASE("per-submodel LTI Hankel smallest nonzero singular values") {
    // (2n+1, 2n)-sized Hankel matrices of the three built-in submodels.
    auto states = presets::mimo3_states();
    const double expected[3] = {0.4063, 0.3560, 0.0180};
    for (std::size_t j = 0; j < 3; ++j) {
        SlsModel lti;
        lti.states = {states[j]};
        lti.states[0].label = 1;
        lti.switching = SwitchingSequence(std::vector<int>(40, 1));
        auto seq = generate_markov(lti, 13);
        auto H = hankel::build(seq, 7, 6, 20);
        Eigen::JacobiSVD<Matrix> svd(H.data);
        double smallest_nonzero = svd.singularValues()(2);  // rank is n = 3
        CHECK(std::abs(smallest_nonzero - expected[j]) < 1e-3);
    }
}

#include <doctest.h>

#include "slsreal/metrics.hpp"
#include "slsreal/presets.hpp"
#include "slsreal/rng.hpp"

using namespace sls;

TEST_CASE("vaf is 100 for a perfect prediction and decreases with error") {
    Rng rng(1);
    std::vector<Vector> y, y_noisy;
    for (int k = 0; k < 200; ++k) {
        Vector v(2);
        v << rng.gaussian(), rng.gaussian();
        y.push_back(v);
        y_noisy.push_back(v + 0.1 * Vector::Ones(2));
    }
    auto perfect = metrics::vaf(y, y);
    CHECK(perfect[0] == doctest::Approx(100.0));
    CHECK(perfect[1] == doctest::Approx(100.0));
    // A constant offset leaves the variance untouched, so perturb the signal instead.
    for (auto& v : y_noisy) v(0) += 0.2 * rng.gaussian();
    auto degraded = metrics::vaf(y, y_noisy);
    CHECK(degraded[0] < 100.0);
}

TEST_CASE("fit_phi counts matching labels") {
    std::vector<int> a = {1, 1, 2, 2, 3};
    std::vector<int> b = {1, 2, 2, 2, 3};
    CHECK(metrics::fit_phi(a, a) == doctest::Approx(100.0));
    CHECK(metrics::fit_phi(a, b) == doctest::Approx(80.0));
}

TEST_CASE("delta_P vanishes for a permuted, similarity-transformed copy") {
    auto truth = presets::mimo3_states();
    Rng rng(9);
    Matrix T(3, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) T(i, j) = rng.gaussian();
    T += 3.0 * Matrix::Identity(3, 3);
    std::vector<DiscreteState> est;
    for (std::size_t j : {2u, 0u, 1u}) {
        DiscreteState s;
        s.A = T.inverse() * truth[j].A * T;
        s.B = T.inverse() * truth[j].B;
        s.C = truth[j].C * T;
        s.D = truth[j].D;
        s.label = static_cast<int>(est.size()) + 1;
        est.push_back(s);
    }
    CHECK(metrics::delta_P(truth, est) < 1e-9);
    // A genuine perturbation registers.
    est[0].A(0, 0) += 0.05;
    CHECK(metrics::delta_P(truth, est) > 1e-3);
}

#include <doctest.h>

#include "slsreal/hankel.hpp"
#include "slsreal/model.hpp"
#include "slsreal/presets.hpp"

using namespace sls;

namespace {

SlsModel preset_model(int N = 120) {
    SlsModel model;
    model.states = presets::mimo3_states();
    model.switching = SwitchingSequence(std::vector<int>(static_cast<std::size_t>(N), 1));
    return model;
}

}  // namespace

TEST_CASE("hankel build places h(k+s-1, k-t) at block (s, t)") {
    auto model = preset_model();
    auto seq = generate_markov(model, 20);
    int n = 3, k = 15;
    auto H = hankel::build(seq, 2 * n + 1, 2 * n, k);
    CHECK(H.data.rows() == (2 * n + 1) * 2);
    CHECK(H.data.cols() == 2 * n * 2);
    for (int s = 1; s <= 2 * n + 1; ++s)
        for (int t = 1; t <= 2 * n; ++t) {
            Matrix block = H.data.block((s - 1) * 2, (t - 1) * 2, 2, 2);
            CHECK((block - seq.at(k + s - 1, k - t)).norm() == doctest::Approx(0.0));
        }
}

TEST_CASE("hankel advance equals a fresh build at k + 1") {
    auto model = preset_model();
    auto seq = generate_markov(model, 20);
    auto H = hankel::build(seq, 7, 6, 10);
    auto H2 = hankel::advance(H, seq);
    auto H2_ref = hankel::build(seq, 7, 6, 11);
    CHECK(H2.k == 11);
    CHECK((H2.data - H2_ref.data).norm() == doctest::Approx(0.0));
}

TEST_CASE("amplitude-bounded noise stays inside the epsilon ball") {
    auto model = preset_model();
    auto seq = generate_markov(model, 10);
    Rng rng(11);
    double eps = 1e-3;
    auto noisy = hankel::add_noise(seq, hankel::NoiseMode::AmplitudeBound, eps, rng);
    double worst = 0.0;
    for (const auto& [key, block] : noisy.blocks())
        worst = std::max(worst, (block - seq.at(key.first, key.second)).norm());
    CHECK(worst <= eps + 1e-15);
    CHECK(worst > 0.0);
    CHECK(noisy.noise_bound() == doctest::Approx(worst));
}

TEST_CASE("snr-mode noise is deterministic given the seed") {
    auto model = preset_model();
    auto seq = generate_markov(model, 10);
    Rng r1(3), r2(3);
    auto n1 = hankel::add_noise(seq, hankel::NoiseMode::TargetSnrDb, 40.0, r1);
    auto n2 = hankel::add_noise(seq, hankel::NoiseMode::TargetSnrDb, 40.0, r2);
    for (const auto& [key, block] : n1.blocks())
        CHECK((block - n2.at(key.first, key.second)).norm() == doctest::Approx(0.0));
    // Realized SNR over the stored band is close to the target.
    double sig = 0.0, noise = 0.0;
    for (const auto& [key, block] : n1.blocks()) {
        sig += seq.at(key.first, key.second).squaredNorm();
        noise += (block - seq.at(key.first, key.second)).squaredNorm();
    }
    double snr = 10.0 * std::log10(sig / noise);
    CHECK(snr == doctest::Approx(40.0).epsilon(0.05));
}

#include <doctest.h>

#include "slsreal/cluster.hpp"
#include "slsreal/linalg.hpp"
#include "slsreal/model.hpp"
#include "slsreal/presets.hpp"

#include <set>

using namespace sls;

namespace {

struct Fixture {
    SlsModel model;
    MarkovSequence seq;
    LtvRealization real;
    StationarySet ss;

    explicit Fixture(int N = 600) {
        model.states = presets::mimo3_states();
        model.switching = presets::mimo3_mixed_switching(N);
        seq = generate_markov(model, 13);
        real = ltv::realize_range(seq, 3);
        ss = cluster::stationary_set(seq, 3, 1e-4, 6);
    }
};

}  // namespace

TEST_CASE("stationary intervals have exact endpoints between far-apart switches") {
    Fixture f;
    // Between switches k_i and k_{i+1} with long dwell, the maximal interval
    // is exactly [k_i + 2n, k_{i+1} - 2n - 2].
    auto sw = f.model.switching.switches();
    REQUIRE(sw.size() >= 2);
    int k1 = sw[0], k2 = sw[1];  // 46 and 86
    bool found = false;
    for (const auto& iv : f.ss.intervals)
        if (iv.alpha == k1 + 6 && iv.beta == k2 - 8) found = true;
    CHECK(found);
    // {k_{i+1}-1, k_{i+1}} are never both members.
    for (int k : sw)
        CHECK_FALSE((f.ss.is_member(k - 1) && f.ss.is_member(k)));
}

TEST_CASE("qualifying intervals cluster into three labels with the expected features") {
    Fixture f;
    auto clusters = cluster::cluster_states(f.real, f.ss, 1e-5);
    CHECK(clusters.sigma_hat == 3);
    // Eigenvalue features of the three submodels, sorted.
    std::vector<double> expect = {feature_M(f.model.states[0].A), feature_M(f.model.states[1].A),
                                  feature_M(f.model.states[2].A)};
    CHECK(expect[0] == doctest::Approx(2.3163).epsilon(1e-3));
    CHECK(expect[1] == doctest::Approx(2.0237).epsilon(1e-3));
    CHECK(expect[2] == doctest::Approx(1.5902).epsilon(1e-3));
    std::sort(expect.begin(), expect.end());
    std::vector<double> centers = clusters.centers;
    std::sort(centers.begin(), centers.end());
    for (std::size_t i = 0; i < 3; ++i) CHECK(centers[i] == doctest::Approx(expect[i]).epsilon(1e-8));
    // Every qualifying interval's assignment agrees with the true label at gamma.
    std::set<std::pair<int, int>> seen;  // (assignment, true label) pairs must be a bijection
    for (std::size_t i = 0; i < f.ss.qualifying.size(); ++i) {
        const auto& iv = f.ss.intervals[static_cast<std::size_t>(f.ss.qualifying[i])];
        seen.insert({clusters.assignments[i], f.model.switching.at(iv.gamma())});
    }
    CHECK(seen.size() == 3);
}

TEST_CASE("auto epsilon floors at the base value on exact data") {
    Fixture f(400);
    CHECK(cluster::auto_epsilon_Z(f.seq, 3, 1e-4) == doctest::Approx(1e-4));
}

TEST_CASE("recluster merges low-support clusters into the nearest center") {
    Fixture f;
    auto clusters = cluster::cluster_states(f.real, f.ss, 1e-5);
    // A huge support threshold forces merging down to the best-supported cluster.
    auto merged = cluster::recluster(clusters, f.ss, 6 * 3);
    CHECK(merged.sigma_hat == 3);  // all three survive at the default support
    CHECK(merged.assignments.size() == clusters.assignments.size());
}

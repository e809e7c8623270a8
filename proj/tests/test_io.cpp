#include <doctest.h>

#include "slsreal/io.hpp"
#include "slsreal/model.hpp"
#include "slsreal/presets.hpp"

#include <cstdio>
#include <fstream>

using namespace sls;

namespace {

std::string tmp_path(const std::string& name) { return "/tmp/slsreal_test_" + name; }

}  // namespace

TEST_CASE("model JSON round-trip preserves matrices and switching") {
    SlsModel model;
    model.states = presets::mimo3_states();
    model.switching = presets::mimo3_mixed_switching(400);
    auto path = tmp_path("model.json");
    io::save_model(path, model);
    auto back = io::load_model(path);
    REQUIRE(back.sigma() == 3);
    for (int j = 0; j < 3; ++j)
        CHECK((back.states[static_cast<std::size_t>(j)].stacked() -
               model.states[static_cast<std::size_t>(j)].stacked()).norm() == doctest::Approx(0.0));
    CHECK(back.switching.labels() == model.switching.labels());
    std::remove(path.c_str());
}

TEST_CASE("markov file round-trip preserves blocks, band, and noise bound") {
    SlsModel model;
    model.states = presets::mimo3_states();
    model.switching = presets::mimo3_mixed_switching(400);
    auto seq = generate_markov(model, 13);
    seq.set_noise_bound(1.5e-3);
    auto path = tmp_path("markov.dat");
    io::save_markov(path, seq, 3);
    int n = 0;
    auto back = io::load_markov(path, n);
    CHECK(n == 3);
    CHECK(back.N() == seq.N());
    CHECK(back.band() == 13);
    CHECK(back.noise_bound() == doctest::Approx(1.5e-3));
    CHECK(back.blocks().size() == seq.blocks().size());
    double worst = 0.0;
    for (const auto& [key, block] : seq.blocks())
        worst = std::max(worst, (back.at(key.first, key.second) - block).norm());
    CHECK(worst < 1e-15);
    std::remove(path.c_str());
}

TEST_CASE("malformed files raise format errors naming the location") {
    auto path = tmp_path("bad.dat");
    {
        std::ofstream out(path);
        out << "{\"N\": 10, \"p\": 2, \"m\": 2, \"n\": 3, \"band\": 5, \"noise_bound\": 0}\n";
        out << "4,3,1.0,2.0\n";  // too few entries for a 2 x 2 block
    }
    int n = 0;
    CHECK_THROWS_WITH_AS(io::load_markov(path, n), doctest::Contains("missing field"), std::runtime_error);
    std::remove(path.c_str());
}

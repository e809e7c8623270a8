#include "slsreal/presets.hpp"

#include <cmath>

namespace sls::presets {

std::vector<DiscreteState> mimo3_states() {
    std::vector<DiscreteState> states(3);

    states[0].A = (Matrix(3, 3) << 0.15, 0.40, -0.65,
                                  -0.75, 0.10, -0.35,
                                   0.20, 0.70,  0.20).finished();
    states[0].B = (Matrix(3, 2) << -0.20, 0.45,
                                   -0.06, 0.00,
                                    0.22, 0.00).finished();
    states[0].C = (Matrix(2, 3) <<  0.00, 0.40, 0.45,
                                   -1.00, -0.60, 0.90).finished();
    states[0].D = (Matrix(2, 2) <<  0.00, -0.35,
                                   -1.70, -0.25).finished();
    states[0].label = 1;

    states[1].A = (Matrix(3, 3) << 0.27, 0.24, -0.55,
                                   0.24, 0.65,  0.30,
                                  -0.55, 0.30,  0.27).finished();
    states[1].B = (Matrix(3, 2) << -0.55, 0.00,
                                   -1.40, 1.00,
                                    0.05, -0.72).finished();
    states[1].C = (Matrix(2, 3) <<  0.70, 1.00, -0.27,
                                   -0.35, 0.00, -1.10).finished();
    states[1].D = (Matrix(2, 2) <<  2.15, 0.25,
                                    0.00, -0.36).finished();
    states[1].label = 2;

    states[2].A = (Matrix(3, 3) << 0.45, 0.02, 0.42,
                                  -0.17, 0.53, 0.20,
                                   0.38, 0.26, 0.00).finished();
    states[2].B = (Matrix(3, 2) << 0.00, 0.15,
                                   0.27, -0.46,
                                   0.07, 0.54).finished();
    states[2].C = (Matrix(2, 3) << 0.00, 0.60, 0.28,
                                   0.00, 0.86, 0.45).finished();
    states[2].D = (Matrix(2, 2) << 0.00, -0.90,
                                   0.00, 0.85).finished();
    states[2].label = 3;

    return states;
}

SwitchingSequence mimo3_mixed_switching(int N) {
    // With n = 3: medium-to-long >= 6n+1 = 19, short in [14, 18],
    // very short in [7, 13]. The trailing segment absorbs the remainder.
    std::vector<std::pair<int, int>> segments = {
        {1, 45}, {2, 40}, {3, 38},  // medium
        {1, 15}, {3, 16},           // short
        {2, 40},                    // medium
        {3, 9},  {1, 8},            // very short
        {2, 36},                    // medium
        {1, 14},                    // short
        {3, 42},                    // medium
        {2, 10},                    // very short
        {1, 40},                    // medium tail
    };
    int total = 0;
    for (const auto& [lab, len] : segments) total += len;
    if (N < total) throw std::invalid_argument("mixed switching preset needs N >= " + std::to_string(total));
    segments.back().second += N - total;
    return SwitchingSequence::from_segments(segments);
}

std::vector<Vector> mimo3_multisine_input(int N) {
    std::vector<Vector> u;
    u.reserve(static_cast<std::size_t>(N));
    for (int k = 1; k <= N; ++k) {
        Vector uk(2);
        double t = static_cast<double>(k);
        uk(0) = std::sin(0.05 * t) + 0.5 * std::sin(0.31 * t + 0.4) + 0.25 * std::sin(1.3 * t + 1.1);
        uk(1) = std::cos(0.07 * t) + 0.5 * std::sin(0.53 * t + 0.9) + 0.25 * std::cos(0.9 * t + 0.2);
        u.push_back(uk);
    }
    return u;
}

}  // namespace sls::presets

#pragma once

#include "slsreal/types.hpp"

namespace sls::presets {

/// Built-in 3-submodel MIMO example (n = 3, m = p = 2) used by the
/// acceptance experiments and by the CLI `--preset mimo3` flag.
std::vector<DiscreteState> mimo3_states();

/// Deterministic switching sequence over [1, N] mixing medium-to-long,
/// short, and very short segments across the three labels.
SwitchingSequence mimo3_mixed_switching(int N);

/// Multi-sine two-channel input used by the output-prediction experiment.
std::vector<Vector> mimo3_multisine_input(int N);

}  // namespace sls::presets

#pragma once

#include <cmath>
#include <cstdint>

namespace sls {

/// Seedable 64-bit generator with documented stream splitting.
///
/// Uses splitmix64 both as the state update and to derive independent
/// sub-streams, so Monte-Carlo runs are reproducible across platforms.
/// Gaussian variates use an explicit Box-Muller transform instead of the
/// standard-library distribution, whose output is implementation-defined.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    /// Derives an independent stream; stream(i) != stream(j) for i != j.
    Rng stream(std::uint64_t index) const {
        std::uint64_t s = state_;
        s += 0x9e3779b97f4a7c15ULL * (index + 1);
        return Rng(mix(mix(s)));
    }

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix(state_);
    }

    /// Uniform double in [0, 1) with 53 bits of precision.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [lo, hi] inclusive.
    int uniform_int(int lo, int hi) {
        return lo + static_cast<int>(next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
    }

    /// Standard normal via Box-Muller; a cached spare halves the call cost.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        do { u1 = uniform(); } while (u1 <= 0.0);
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double theta = 2.0 * M_PI * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

  private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ULL;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebULL;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace sls

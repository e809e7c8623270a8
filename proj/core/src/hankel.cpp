#include "slsreal/hankel.hpp"

#include <cmath>
#include <sstream>

namespace sls::hankel {

static void check_window(const MarkovSequence& markov, int q, int r, int k) {
    if (k <= r || k + q - 1 > markov.N()) {
        std::ostringstream os;
        os << "Hankel anchor k = " << k << " outside admissible range [" << r + 1 << ", "
           << markov.N() - q + 1 << "] for (q, r) = (" << q << ", " << r << ")";
        throw std::out_of_range(os.str());
    }
}

HankelMatrix build(const MarkovSequence& markov, int q, int r, int k) {
    check_window(markov, q, r, k);
    const int p = markov.p(), m = markov.m();
    HankelMatrix H{k, q, r, Matrix(q * p, r * m)};
    for (int s = 1; s <= q; ++s)
        for (int t = 1; t <= r; ++t)
            H.data.block((s - 1) * p, (t - 1) * m, p, m) = markov.at(k + s - 1, k - t);
    return H;
}

HankelMatrix advance(const HankelMatrix& H, const MarkovSequence& markov) {
    const int q = H.q, r = H.r, k = H.k + 1;
    check_window(markov, q, r, k);
    const int p = markov.p(), m = markov.m();
    HankelMatrix out{k, q, r, Matrix(q * p, r * m)};
    // Blocks (s, t) of H(k+1) with s < q and t > 1 equal blocks (s+1, t-1)
    // of H(k); only the last block row and first block column are new.
    out.data.block(0, m, (q - 1) * p, (r - 1) * m) = H.data.block(p, 0, (q - 1) * p, (r - 1) * m);
    for (int s = 1; s <= q; ++s) out.data.block((s - 1) * p, 0, p, m) = markov.at(k + s - 1, k - 1);
    for (int t = 2; t <= r; ++t) out.data.block((q - 1) * p, (t - 1) * m, p, m) = markov.at(k + q - 1, k - t);
    return out;
}

std::pair<Matrix, Matrix> gramians(const ObsCtrlPair& oc) {
    return {oc.O_q.transpose() * oc.O_q, oc.R_r * oc.R_r.transpose()};
}

MarkovSequence add_noise(const MarkovSequence& markov, NoiseMode mode, double level, Rng& rng) {
    MarkovSequence out = markov;
    const int p = markov.p(), m = markov.m();
    const double pm = static_cast<double>(p) * static_cast<double>(m);

    if (mode == NoiseMode::AmplitudeBound) {
        if (level < 0.0) throw std::invalid_argument("amplitude bound must be >= 0");
        if (level == 0.0) return out;
        double max_norm = 0.0;
        for (auto& [key, block] : out.blocks()) {
            // Direction uniform on the unit Frobenius sphere, radius
            // eps * u^(1/(pm)) for uniform coverage of the eps-ball.
            Matrix E(p, m);
            for (int i = 0; i < p; ++i)
                for (int j = 0; j < m; ++j) E(i, j) = rng.gaussian();
            double nrm = E.norm();
            if (nrm < 1e-300) continue;
            double radius = level * std::pow(rng.uniform(), 1.0 / pm);
            E *= radius / nrm;
            block += E;
            max_norm = std::max(max_norm, E.norm());
        }
        out.set_noise_bound(level);
        return out;
    }

    // Target-SNR mode: scale i.i.d. Gaussian entries so that
    // 10 log10(signal power / noise power) over the stored band hits the target.
    double signal_power = 0.0;
    std::size_t entries = 0;
    for (const auto& [key, block] : markov.blocks()) {
        signal_power += block.squaredNorm();
        entries += static_cast<std::size_t>(block.size());
    }
    if (entries == 0) return out;
    std::vector<double> noise(entries);
    double raw_power = 0.0;
    for (auto& e : noise) {
        e = rng.gaussian();
        raw_power += e * e;
    }
    double target_noise_power = signal_power / std::pow(10.0, level / 10.0);
    double scale = raw_power > 0.0 ? std::sqrt(target_noise_power / raw_power) : 0.0;
    std::size_t idx = 0;
    double max_norm = 0.0;
    for (auto& [key, block] : out.blocks()) {
        Matrix E(p, m);
        for (int i = 0; i < p; ++i)
            for (int j = 0; j < m; ++j) E(i, j) = scale * noise[idx++];
        block += E;
        max_norm = std::max(max_norm, E.norm());
    }
    out.set_noise_bound(max_norm);
    return out;
}

}  // namespace sls::hankel

#pragma once

#include <Eigen/Dense>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace sls {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// One state-space quadruple (A, B, C, D) with dimensions (n, m, p).
/// The label identifies the quadruple within the submodel set.
struct DiscreteState {
    Matrix A;  ///< n x n
    Matrix B;  ///< n x m
    Matrix C;  ///< p x n
    Matrix D;  ///< p x m
    int label = 0;

    int n() const { return static_cast<int>(A.rows()); }
    int m() const { return static_cast<int>(B.cols()); }
    int p() const { return static_cast<int>(C.rows()); }

    /// Stacked [[A, B], [C, D]] matrix, used by the submodel-set error metric.
    Matrix stacked() const {
        Matrix M(n() + p(), n() + m());
        M << A, B, C, D;
        return M;
    }
};

/// Piecewise-constant label sequence over 1..N with derived switch instants.
///
/// Time indices are 1-based throughout; phi(k) is constant on [k_i, k_{i+1})
/// and adjacent segments carry different labels.
class SwitchingSequence {
  public:
    SwitchingSequence() = default;
    explicit SwitchingSequence(std::vector<int> labels) : phi_(std::move(labels)) {
        if (phi_.empty()) throw std::invalid_argument("switching sequence must be nonempty");
        for (std::size_t i = 1; i < phi_.size(); ++i)
            if (phi_[i] != phi_[i - 1]) switches_.push_back(static_cast<int>(i) + 1);
    }

    /// Builds a sequence from (label, segment length) pairs.
    static SwitchingSequence from_segments(const std::vector<std::pair<int, int>>& segments) {
        std::vector<int> labels;
        for (const auto& [lab, len] : segments) {
            if (len <= 0) throw std::invalid_argument("segment length must be positive");
            labels.insert(labels.end(), static_cast<std::size_t>(len), lab);
        }
        return SwitchingSequence(std::move(labels));
    }

    int N() const { return static_cast<int>(phi_.size()); }

    /// Label at 1-based time k; clamped constant continuation outside [1, N].
    int at(int k) const {
        if (k < 1) k = 1;
        if (k > N()) k = N();
        return phi_[static_cast<std::size_t>(k) - 1];
    }

    int operator()(int k) const { return at(k); }

    /// Switch instants k_1 < ... < k_{i*} (each the first index of a new segment).
    const std::vector<int>& switches() const { return switches_; }

    /// Dwell times delta_0 = k_1 - 1, delta_i = k_{i+1} - k_i, delta_{i*} = N - k_{i*}.
    std::vector<int> dwell_times() const {
        std::vector<int> d;
        if (switches_.empty()) {
            d.push_back(N());
            return d;
        }
        d.push_back(switches_.front() - 1);
        for (std::size_t i = 0; i + 1 < switches_.size(); ++i)
            d.push_back(switches_[i + 1] - switches_[i]);
        d.push_back(N() - switches_.back());
        return d;
    }

    /// Minimum dwell time over interior segments; N when there are no switches.
    int min_dwell() const {
        auto d = dwell_times();
        if (d.size() <= 2) return N();
        int mn = d[1];
        for (std::size_t i = 1; i + 1 < d.size(); ++i) mn = std::min(mn, d[i]);
        return mn;
    }

    const std::vector<int>& labels() const { return phi_; }

  private:
    std::vector<int> phi_;
    std::vector<int> switches_;
};

/// Ground-truth switched linear system: a set of submodels plus a switching sequence.
struct SlsModel {
    std::vector<DiscreteState> states;  ///< indexed by label - 1
    SwitchingSequence switching;

    int sigma() const { return static_cast<int>(states.size()); }
    int n() const { return states.at(0).n(); }
    int m() const { return states.at(0).m(); }
    int p() const { return states.at(0).p(); }
    int N() const { return switching.N(); }

    /// Submodel active at time k.
    const DiscreteState& state_at(int k) const { return states.at(static_cast<std::size_t>(switching.at(k)) - 1); }

    void validate() const {
        if (states.empty()) throw std::invalid_argument("model needs at least one submodel");
        for (const auto& s : states) {
            if (s.n() != n() || s.m() != m() || s.p() != p())
                throw std::invalid_argument("submodel dimensions disagree");
            if (s.A.rows() != s.A.cols() || s.B.rows() != s.A.rows() || s.C.cols() != s.A.rows() ||
                s.D.rows() != s.C.rows() || s.D.cols() != s.B.cols())
                throw std::invalid_argument("submodel matrix shapes inconsistent");
        }
        for (int k = 1; k <= N(); ++k) {
            int lab = switching.at(k);
            if (lab < 1 || lab > sigma()) throw std::invalid_argument("switching label out of range");
        }
    }
};

/// Doubly-indexed p x m Markov blocks h(k, l) for l <= k.
///
/// Storage is either the full lower triangle or a band of lags 0..L; the
/// accessor returns an exact zero block for k < l by convention.
class MarkovSequence {
  public:
    MarkovSequence() = default;
    MarkovSequence(int N, int p, int m, int band = -1)
        : N_(N), p_(p), m_(m), band_(band) {}

    int N() const { return N_; }
    int p() const { return p_; }
    int m() const { return m_; }
    /// Stored lag band L, or -1 for the full triangle.
    int band() const { return band_; }
    double noise_bound() const { return noise_bound_; }
    void set_noise_bound(double e) { noise_bound_ = e; }

    bool stored(int k, int l) const {
        if (k < 1 || l < 1 || k > N_ || l > k) return false;
        return band_ < 0 || (k - l) <= band_;
    }

    void set(int k, int l, const Matrix& block) {
        if (!stored(k, l)) throw std::out_of_range("markov block (k,l) outside storage contract");
        blocks_[key(k, l)] = block;
    }

    /// h(k, l); zero for k < l, throws if an in-band block is missing.
    Matrix at(int k, int l) const {
        if (l > k) return Matrix::Zero(p_, m_);
        auto it = blocks_.find(key(k, l));
        if (it == blocks_.end()) throw std::out_of_range("markov block (" + std::to_string(k) + "," + std::to_string(l) + ") not stored");
        return it->second;
    }

    bool has(int k, int l) const { return l > k || blocks_.count(key(k, l)) > 0; }

    const std::map<std::pair<int, int>, Matrix>& blocks() const { return blocks_; }
    std::map<std::pair<int, int>, Matrix>& blocks() { return blocks_; }

  private:
    static std::pair<int, int> key(int k, int l) { return {k, l}; }
    int N_ = 0, p_ = 0, m_ = 0, band_ = -1;
    double noise_bound_ = 0.0;
    std::map<std::pair<int, int>, Matrix> blocks_;
};

}  // namespace sls

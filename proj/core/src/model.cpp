#include "slsreal/model.hpp"

#include "slsreal/linalg.hpp"

#include <sstream>

namespace sls {

void require_window(int N, int n) {
    if (N < minimal_N(n)) {
        std::ostringstream os;
        os << "N = " << N << " leaves no valid anchor window [2n+1, N-4n]; need N >= " << minimal_N(n)
           << " for n = " << n;
        throw std::invalid_argument(os.str());
    }
}

static void check_time(const SlsModel& model, int k, int l) {
    if (l < 1 || k > model.N() || l > k)
        throw std::out_of_range("time indices must satisfy 1 <= l <= k <= N");
}

Matrix state_transition(const SlsModel& model, int k, int l) {
    check_time(model, k, l);
    Matrix Phi = Matrix::Identity(model.n(), model.n());
    for (int j = l; j < k; ++j) Phi = model.state_at(j).A * Phi;
    return Phi;
}

Matrix markov(const SlsModel& model, int k, int l) {
    check_time(model, k, l);
    if (k == l) return model.state_at(k).D;
    // C(k) Phi(k, l+1) B(l), accumulated as a thin product for speed.
    Matrix P = model.state_at(l).B;
    for (int j = l + 1; j < k; ++j) P = model.state_at(j).A * P;
    return model.state_at(k).C * P;
}

MarkovSequence generate_markov(const SlsModel& model, int band) {
    model.validate();
    MarkovSequence seq(model.N(), model.p(), model.m(), band);
    // Accumulate Phi(k, l+1) B(l) column-strips incrementally per l so that a
    // band of width L costs O(N L) matrix products.
    for (int l = 1; l <= model.N(); ++l) {
        seq.set(l, l, model.state_at(l).D);
        Matrix P = model.state_at(l).B;
        int kmax = band < 0 ? model.N() : std::min(model.N(), l + band);
        for (int k = l + 1; k <= kmax; ++k) {
            seq.set(k, l, model.state_at(k).C * P);
            if (k < kmax) P = model.state_at(k).A * P;
        }
    }
    return seq;
}

std::vector<Vector> simulate(const SlsModel& model, const Vector& x0, int start,
                             const std::vector<Vector>& inputs) {
    if (x0.size() != model.n()) throw std::invalid_argument("x0 dimension mismatch");
    std::vector<Vector> out;
    out.reserve(inputs.size());
    Vector x = x0;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        int k = start + static_cast<int>(i);
        if (inputs[i].size() != model.m()) throw std::invalid_argument("input dimension mismatch");
        const auto& P = model.state_at(k);
        out.push_back(P.C * x + P.D * inputs[i]);
        x = P.A * x + P.B * inputs[i];
    }
    return out;
}

std::vector<Vector> simulate_convolution(const SlsModel& model, const Vector& x0, int start,
                                         const std::vector<Vector>& inputs) {
    if (x0.size() != model.n()) throw std::invalid_argument("x0 dimension mismatch");
    std::vector<Vector> out;
    out.reserve(inputs.size());
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        int k = start + static_cast<int>(i);
        Vector y = model.state_at(k).C * state_transition(model, k, start) * x0;
        for (int j = start; j <= k; ++j) y += markov(model, k, j) * inputs[static_cast<std::size_t>(j - start)];
        out.push_back(y);
    }
    return out;
}

std::vector<Assumption> all_assumptions() {
    return {Assumption::Stability,           Assumption::MinimumDwell,
            Assumption::Unimodality,         Assumption::StateCoverage,
            Assumption::SwitchDetectability, Assumption::StackDistinctness,
            Assumption::NoZeroPoles};
}

/// Correction-feature expression for a forward switch j1 -> j2; must differ
/// from n for the switch to be detectable from the observability side.
static double forward_detect_feature(const DiscreteState& P1, const DiscreteState& P2) {
    int n = P1.n();
    Matrix O = extended_observability(P1.A, P1.C, 2 * n + 1);
    Matrix Go = O.transpose() * O;
    Matrix A2n = Matrix::Identity(n, n);
    for (int i = 0; i < 2 * n; ++i) A2n = A2n * P1.A;
    Matrix X = Matrix::Identity(n, n) +
               Go.ldlt().solve(A2n.transpose() * P1.C.transpose() * (P2.C - P1.C) * A2n);
    return feature_M(X);
}

/// Controllability-side analogue: detectability of j1 -> j2 when sweeping
/// backward through the segment of j2.
static double backward_detect_feature(const DiscreteState& P1, const DiscreteState& P2) {
    int n = P2.n();
    Matrix R = extended_controllability(P2.A, P2.B, 2 * n);
    Matrix Gc = R * R.transpose();
    Matrix A2n1 = Matrix::Identity(n, n);
    for (int i = 0; i < 2 * n - 1; ++i) A2n1 = A2n1 * P2.A;
    Matrix X = Matrix::Identity(n, n) +
               A2n1 * (P1.B - P2.B) * P2.B.transpose() * A2n1.transpose() * Gc.inverse();
    return feature_M(X);
}

std::vector<AssumptionResult> check_assumptions(const SlsModel& model,
                                                const std::vector<Assumption>& which) {
    std::vector<AssumptionResult> results;
    const int n = model.n();
    const double feature_gap_tol = 1e-6;

    for (Assumption a : which) {
        AssumptionResult r;
        r.which = a;
        r.pass = true;
        std::ostringstream diag;
        switch (a) {
            case Assumption::Stability: {
                for (const auto& s : model.states) {
                    double rho = spectral_radius(s.A);
                    int ro = numerical_rank(extended_observability(s.A, s.C, n));
                    int rc = numerical_rank(extended_controllability(s.A, s.B, n));
                    if (rho >= 1.0) {
                        r.pass = false;
                        diag << "submodel " << s.label << " unstable (rho=" << rho << "); ";
                    }
                    if (ro < n || rc < n) {
                        r.pass = false;
                        diag << "submodel " << s.label << " MacMillan degree < n (obs rank " << ro
                             << ", ctrl rank " << rc << "); ";
                    }
                }
                break;
            }
            case Assumption::MinimumDwell: {
                int d = model.switching.min_dwell();
                if (d < n) {
                    r.pass = false;
                    diag << "min dwell " << d << " < n = " << n;
                }
                break;
            }
            case Assumption::Unimodality: {
                for (std::size_t i = 0; i < model.states.size(); ++i)
                    for (std::size_t j = i + 1; j < model.states.size(); ++j) {
                        double gap = std::abs(feature_M(model.states[i].A) - feature_M(model.states[j].A));
                        if (gap <= feature_gap_tol) {
                            r.pass = false;
                            diag << "labels " << model.states[i].label << "," << model.states[j].label
                                 << " feature gap " << gap << "; ";
                        }
                    }
                break;
            }
            case Assumption::StateCoverage: {
                // Every submodel must be visited by a segment long enough for
                // interval clustering (dwell > 5n).
                std::vector<int> best(model.states.size(), 0);
                const auto& sw = model.switching.switches();
                std::vector<int> bounds;
                bounds.push_back(1);
                bounds.insert(bounds.end(), sw.begin(), sw.end());
                bounds.push_back(model.N() + 1);
                for (std::size_t i = 0; i + 1 < bounds.size(); ++i) {
                    int lab = model.switching.at(bounds[i]);
                    best[static_cast<std::size_t>(lab - 1)] =
                        std::max(best[static_cast<std::size_t>(lab - 1)], bounds[i + 1] - bounds[i]);
                }
                for (std::size_t j = 0; j < best.size(); ++j)
                    if (best[j] <= 5 * n) {
                        r.pass = false;
                        diag << "label " << j + 1 << " longest dwell " << best[j] << " <= 5n; ";
                    }
                break;
            }
            case Assumption::SwitchDetectability: {
                // Evaluated over all ordered submodel pairs so the check also
                // serves models whose switching sequence is not yet fixed.
                for (const auto& P1 : model.states)
                    for (const auto& P2 : model.states) {
                        if (P1.label == P2.label) continue;
                        double f = std::abs(forward_detect_feature(P1, P2) - n);
                        double b = std::abs(backward_detect_feature(P1, P2) - n);
                        if (f <= feature_gap_tol || b <= feature_gap_tol) {
                            r.pass = false;
                            diag << "pair " << P1.label << "->" << P2.label << " margins (" << f << "," << b
                                 << "); ";
                        }
                    }
                break;
            }
            case Assumption::StackDistinctness: {
                for (std::size_t i = 0; i < model.states.size(); ++i)
                    for (std::size_t j = i + 1; j < model.states.size(); ++j) {
                        const auto& a1 = model.states[i];
                        const auto& a2 = model.states[j];
                        Matrix cd1(a1.p(), a1.n() + a1.m()), cd2(a1.p(), a1.n() + a1.m());
                        cd1 << a1.C, a1.D;
                        cd2 << a2.C, a2.D;
                        Matrix bd1(a1.n() + a1.p(), a1.m()), bd2(a1.n() + a1.p(), a1.m());
                        bd1 << a1.B, a1.D;
                        bd2 << a2.B, a2.D;
                        if ((cd1 - cd2).norm() <= feature_gap_tol || (bd1 - bd2).norm() <= feature_gap_tol) {
                            r.pass = false;
                            diag << "labels " << a1.label << "," << a2.label << " share a stack; ";
                        }
                    }
                break;
            }
            case Assumption::NoZeroPoles: {
                for (const auto& s : model.states) {
                    double mn = min_abs_eigenvalue(s.A);
                    if (mn <= 1e-8) {
                        r.pass = false;
                        diag << "submodel " << s.label << " min |eig| = " << mn << "; ";
                    }
                }
                break;
            }
        }
        r.diagnostic = diag.str();
        results.push_back(std::move(r));
    }
    return results;
}

static Matrix gaussian_matrix(int rows, int cols, Rng& rng) {
    Matrix X(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) X(i, j) = rng.gaussian();
    return X;
}

std::vector<DiscreteState> random_sls(int n, int m, int p, int sigma, double margin,
                                      double separation, Rng& rng, int max_tries) {
    if (sigma < 1) throw std::invalid_argument("sigma must be >= 1");
    if (margin <= 0.0 || margin >= 1.0) throw std::invalid_argument("margin must be in (0,1)");
    std::string last_failure = "assumption set";
    for (int attempt = 0; attempt < max_tries; ++attempt) {
        std::vector<DiscreteState> states;
        for (int j = 0; j < sigma; ++j) {
            DiscreteState s;
            s.A = gaussian_matrix(n, n, rng);
            double rho = spectral_radius(s.A);
            double target = (1.0 - margin) * rng.uniform(0.6, 1.0);
            if (rho > 1e-12) s.A *= target / rho;
            s.B = gaussian_matrix(n, m, rng);
            s.C = gaussian_matrix(p, n, rng);
            s.D = gaussian_matrix(p, m, rng);
            s.label = j + 1;
            states.push_back(std::move(s));
        }
        // Separation of the clustering feature across submodels.
        bool separated = true;
        for (int i = 0; i < sigma && separated; ++i)
            for (int j = i + 1; j < sigma; ++j)
                if (std::abs(feature_M(states[static_cast<std::size_t>(i)].A) -
                             feature_M(states[static_cast<std::size_t>(j)].A)) < separation) {
                    separated = false;
                    last_failure = "feature separation";
                    break;
                }
        if (!separated) continue;

        // Numerical minimality: rank-n is not enough in noise, the order-n
        // Hankel singular values must be comfortably above zero or the
        // submodel is practically unidentifiable. Reject weakly conditioned
        // draws.
        bool conditioned = true;
        for (const auto& s : states) {
            Matrix H = extended_observability(s.A, s.C, 2 * n + 1) *
                       extended_controllability(s.A, s.B, 2 * n);
            Eigen::JacobiSVD<Matrix> svd(H);
            if (svd.singularValues()(n - 1) < 0.1 * svd.singularValues()(0)) {
                conditioned = false;
                last_failure = "hankel conditioning";
                break;
            }
        }
        if (!conditioned) continue;

        SlsModel probe;
        probe.states = states;
        probe.switching = SwitchingSequence(std::vector<int>(1, 1));
        auto checks = check_assumptions(probe, {Assumption::Stability, Assumption::Unimodality,
                                                Assumption::SwitchDetectability,
                                                Assumption::StackDistinctness, Assumption::NoZeroPoles});
        bool ok = true;
        for (const auto& c : checks)
            if (!c.pass) {
                ok = false;
                last_failure = c.diagnostic.empty() ? "assumption check" : c.diagnostic;
            }
        if (ok) return states;
    }
    throw std::runtime_error("random_sls: resampling budget exceeded; last failure: " + last_failure);
}

SwitchingSequence random_switching(int N, int n, int sigma, int dwell_floor, Rng& rng,
                                   DwellMode mode) {
    if (dwell_floor < 1) throw std::invalid_argument("dwell floor must be >= 1");
    if (sigma < 1) throw std::invalid_argument("sigma must be >= 1");
    if (sigma == 1) return SwitchingSequence(std::vector<int>(static_cast<std::size_t>(N), 1));

    const int medium = 6 * n + 1, short_lo = 4 * n + 2, vshort_lo = 2 * n + 1;
    for (int attempt = 0; attempt < 500; ++attempt) {
        std::vector<std::pair<int, int>> segments;  // (label, length)
        int used = 0;
        int prev = 0;
        bool have_med = false, have_short = false, have_vshort = false;
        while (true) {
            int len;
            if (mode == DwellMode::ThreeClass) {
                // Lead and trail with medium segments; mix classes in between.
                int cls = (segments.empty() || used > N - 3 * medium) ? 0 : rng.uniform_int(0, 2);
                if (cls == 0) {
                    len = rng.uniform_int(medium, 2 * medium);
                    have_med = true;
                } else if (cls == 1) {
                    len = rng.uniform_int(short_lo, medium - 1);
                    have_short = true;
                } else {
                    len = rng.uniform_int(vshort_lo, short_lo - 1);
                    have_vshort = true;
                }
            } else {
                len = rng.uniform_int(dwell_floor, 2 * dwell_floor);
            }
            int lab;
            do { lab = rng.uniform_int(1, sigma); } while (lab == prev);
            if (used + len > N) {
                // Absorb the remainder into the last segment; keep it valid.
                if (segments.empty()) return SwitchingSequence(std::vector<int>(static_cast<std::size_t>(N), 1));
                segments.back().second += N - used;
                break;
            }
            segments.emplace_back(lab, len);
            prev = lab;
            used += len;
            if (used == N) break;
        }
        auto seq = SwitchingSequence::from_segments(segments);
        // Coverage: every label must occur.
        std::vector<bool> seen(static_cast<std::size_t>(sigma), false);
        for (int lab : seq.labels()) seen[static_cast<std::size_t>(lab - 1)] = true;
        bool all_seen = true;
        for (bool s : seen) all_seen = all_seen && s;
        if (!all_seen) continue;
        if (mode == DwellMode::ThreeClass && !(have_med && have_short && have_vshort)) continue;
        return seq;
    }
    throw std::invalid_argument("random_switching: constraints infeasible for N = " + std::to_string(N));
}

}  // namespace sls

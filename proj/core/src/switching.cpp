#include "slsreal/switching.hpp"

#include "slsreal/linalg.hpp"

#include <algorithm>
#include <sstream>

namespace sls {

void SwitchEstimate::assign(int lo, int hi, int label, Provenance p) {
    lo = std::max(lo, k_lo);
    hi = std::min(hi, k_hi);
    for (int k = lo; k <= hi; ++k) {
        auto idx = static_cast<std::size_t>(k - k_lo);
        if (phi_hat[idx] != 0 && phi_hat[idx] != label) {
            if (tolerant) {
                // Contradictory evidence: neither detector wins; leave the
                // instant for the short-segment / fill stages.
                phi_hat[idx] = 0;
                prov[idx] = Provenance::Unassigned;
                continue;
            }
            std::ostringstream os;
            os << "label conflict at k = " << k << ": " << phi_hat[idx] << " (provenance "
               << static_cast<int>(prov[idx]) << ") vs " << label << " (provenance "
               << static_cast<int>(p) << ")";
            throw std::runtime_error(os.str());
        }
        if (phi_hat[idx] == 0) {
            phi_hat[idx] = label;
            prov[idx] = p;
        }
    }
}

void SwitchEstimate::finalize_switches() {
    std::sort(switches.begin(), switches.end(),
              [](const DetectedSwitch& a, const DetectedSwitch& b) { return a.k < b.k; });
    switches.erase(std::unique(switches.begin(), switches.end(),
                               [](const DetectedSwitch& a, const DetectedSwitch& b) { return a.k == b.k; }),
                   switches.end());
}

namespace switching {

Matrix forward_correction(const LtvRealization& real, int k) {
    const AnchorData& a = real.at(k);
    return pinv(a.O) * a.O_next;
}

Matrix backward_correction(const LtvRealization& real, int k) {
    const AnchorData& a = real.at(k);
    return a.R_prev * pinv(a.R);
}

/// H_{1,2n}(l) = [h(l, l-1) ... h(l, l-2n)].
static Matrix markov_row(const MarkovSequence& markov, int n, int l) {
    const int p = markov.p(), m = markov.m();
    Matrix H(p, 2 * n * m);
    for (int t = 1; t <= 2 * n; ++t) H.middleCols((t - 1) * m, m) = markov.at(l, l - t);
    return H;
}

/// H_{2n,1}(l+1) = [h(l, l); ...; h(l+2n-1, l)] shifted one step past l.
static Matrix markov_col(const MarkovSequence& markov, int n, int l) {
    const int p = markov.p(), m = markov.m();
    Matrix H(2 * n * p, m);
    for (int s = 0; s < 2 * n; ++s) H.middleRows(s * p, p) = markov.at(l + 1 + s, l);
    return H;
}

ForwardMatch match_forward(const MarkovSequence& markov, const DiscreteState& rep, int l, double tol) {
    const int n = rep.n();
    if (l - 2 * n < 1 || l > markov.N())
        throw std::out_of_range("match_forward needs 2n+1 <= l <= N");
    Matrix R = extended_controllability(rep.A, rep.B, 2 * n);
    ForwardMatch out;
    out.C_check = markov_row(markov, n, l) * pinv(R);
    out.D_check = markov.at(l, l);
    out.mismatch = (out.C_check - rep.C).norm() + (out.D_check - rep.D).norm();
    out.same_state = out.mismatch < tol;
    return out;
}

BackwardMatch match_backward(const MarkovSequence& markov, const DiscreteState& rep, int l, double tol) {
    const int n = rep.n();
    if (l < 1 || l + 2 * n > markov.N())
        throw std::out_of_range("match_backward needs 1 <= l <= N - 2n");
    Matrix O = extended_observability(rep.A, rep.C, 2 * n);
    BackwardMatch out;
    out.B_check = pinv(O) * markov_col(markov, n, l);
    out.D_check = markov.at(l, l);
    out.mismatch = (out.B_check - rep.B).norm() + (out.D_check - rep.D).norm();
    out.same_state = out.mismatch < tol;
    return out;
}

Matrix hankel_signature(const DiscreteState& quad) {
    const int n = quad.n(), p = quad.p(), m = quad.m();
    Matrix H((n + 1) * p, n * m);
    // Powers A^0 .. A^(2n-1) appear at anti-diagonals s + t - 2.
    std::vector<Matrix> pow(static_cast<std::size_t>(2 * n));
    pow[0] = Matrix::Identity(n, n);
    for (std::size_t i = 1; i < pow.size(); ++i) pow[i] = pow[i - 1] * quad.A;
    for (int s = 1; s <= n + 1; ++s)
        for (int t = 1; t <= n; ++t)
            H.block((s - 1) * p, (t - 1) * m, p, m) = quad.C * pow[static_cast<std::size_t>(s + t - 2)] * quad.B;
    return H;
}

std::vector<int> label_intervals(const LtvRealization& real, const StationarySet& ss,
                                 const ClusterResult& clusters) {
    std::vector<int> labels(ss.intervals.size(), 0);
    for (std::size_t qi = 0; qi < ss.qualifying.size(); ++qi)
        labels[static_cast<std::size_t>(ss.qualifying[qi])] = clusters.assignments[qi];
    for (std::size_t i = 0; i < ss.intervals.size(); ++i) {
        if (labels[i] != 0) continue;
        double f = feature_M(real.at(ss.intervals[i].gamma()).quad.A);
        int best = 1;
        double best_gap = std::numeric_limits<double>::infinity();
        for (int c = 0; c < clusters.sigma_hat; ++c) {
            double gap = std::abs(f - clusters.centers[static_cast<std::size_t>(c)]);
            if (gap < best_gap) {
                best_gap = gap;
                best = c + 1;
            }
        }
        labels[i] = best;
    }
    return labels;
}

static double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
    return v[v.size() / 2];
}

DetectionTolerances calibrate_tolerances(const LtvRealization& real, const MarkovSequence& markov,
                                         const StationarySet& ss, const ClusterResult& clusters,
                                         const std::vector<int>& interval_labels) {
    DetectionTolerances tol;
    const int n = real.n;
    std::vector<double> corr_dev, match_dev;
    // Sample deep-interior stationary anchors: both statistics are ideally
    // zero there, so their spread measures the noise floor.
    for (std::size_t i = 0; i < ss.intervals.size(); ++i) {
        const auto& iv = ss.intervals[i];
        const DiscreteState& rep =
            clusters.representatives[static_cast<std::size_t>(interval_labels[i] - 1)];
        for (int k = iv.alpha; k <= iv.beta; ++k) {
            if (!real.has(k)) continue;
            corr_dev.push_back(std::abs(feature_M(forward_correction(real, k)) - n));
            corr_dev.push_back(std::abs(feature_M(backward_correction(real, k)) - n));
            if (k - 2 * n >= 1 && k <= markov.N())
                match_dev.push_back(match_forward(markov, rep, k, 1.0).mismatch);
        }
    }
    tol.correction = std::max(1e-6, 10.0 * median_of(corr_dev));
    tol.match = std::max(1e-6, 10.0 * median_of(match_dev));
    // Self-calibration implies noisy data: sweeps from neighboring intervals
    // can then legitimately disagree about a boundary.
    tol.tolerant = true;
    return tol;
}

namespace {

/// Per-interval extent resolved by a detector sweep.
struct Extent {
    int left = 0, right = 0;  ///< phi constant on [left, right)
    bool left_found = false, right_found = false;
    DetectedSwitch left_switch, right_switch;
};

/// Shared assignment step: writes interval extents and their switches into a
/// fragment, reconciling adjacent extents (forward result wins).
void commit_extents(SwitchEstimate& est, const std::vector<std::size_t>& handled,
                    const std::vector<Extent>& extents, const std::vector<int>& labels,
                    Provenance prov) {
    for (std::size_t idx : handled) {
        const Extent& e = extents[idx];
        est.assign(e.left, e.right - 1, labels[idx], prov);
        if (e.left_found) est.switches.push_back(e.left_switch);
        if (e.right_found) est.switches.push_back(e.right_switch);
    }
}

}  // namespace

SwitchEstimate detect_markov(const LtvRealization& real, const MarkovSequence& markov,
                             const ClusterResult& clusters, const StationarySet& ss,
                             const std::vector<int>& interval_labels, const DetectionTolerances& tol) {
    const int n = real.n;
    SwitchEstimate est(real.k_lo, real.k_hi);
    est.tolerant = tol.tolerant;
    std::vector<Extent> extents(ss.intervals.size());
    std::vector<std::size_t> handled;

    for (std::size_t i = 0; i < ss.intervals.size(); ++i) {
        const auto& iv = ss.intervals[i];
        if (iv.beta - iv.alpha < 2 * n - 1) continue;  // routed to the correction detector
        int label = interval_labels[i];
        const DiscreteState& rep = clusters.representatives[static_cast<std::size_t>(label - 1)];
        Extent& e = extents[i];

        // Forward sweep: first mismatch at l marks the switch k_next = l.
        // Starting at beta + 2 skips one probe that is stationary by
        // construction, so the exact-data flag lands within 2n + 1 steps.
        int fwd_cap = (i + 1 < ss.intervals.size()) ? ss.intervals[i + 1].alpha - 1 : markov.N();
        e.right = fwd_cap + 1;
        int steps = 0;
        for (int l = iv.beta + 2; l <= fwd_cap; ++l, ++steps) {
            if (!match_forward(markov, rep, l, tol.match).same_state) {
                e.right = l;
                e.right_found = true;
                e.right_switch = {l, label, 0, Provenance::MarkovMatch, true, steps + 1};
                break;
            }
        }
        if (!e.right_found && i + 1 < ss.intervals.size() &&
            interval_labels[i + 1] != label) {
            // The sweep reached the next interval without firing; place the
            // boundary at its start as the best available guess.
            e.right_found = true;
            e.right_switch = {e.right, label, interval_labels[i + 1], Provenance::MarkovMatch, true, steps};
        }

        // Backward sweep: first mismatch at l marks the switch k_i = l + 1.
        // The alpha - 2 start mirrors the forward case (flag within 2n steps).
        int bwd_cap = (i > 0) ? ss.intervals[i - 1].beta + 1 : std::max(1, real.k_lo - 2 * n);
        e.left = bwd_cap;
        steps = 0;
        for (int l = iv.alpha - 2; l >= bwd_cap && l + 2 * n <= markov.N(); --l, ++steps) {
            if (!match_backward(markov, rep, l, tol.match).same_state) {
                e.left = l + 1;
                e.left_found = true;
                e.left_switch = {l + 1, 0, label, Provenance::MarkovMatch, false, steps + 1};
                break;
            }
        }
        handled.push_back(i);
    }

    // Reconcile adjacent eligible intervals. Both sweeps refer to the same
    // boundary only when they agree on the instant; when they disagree there
    // is at least one whole segment in between and the gap is left for the
    // short-segment detector.
    for (std::size_t j = 1; j < handled.size(); ++j) {
        std::size_t a = handled[j - 1], b = handled[j];
        if (b != a + 1) continue;  // not adjacent in the interval list
        Extent& ea = extents[a];
        Extent& eb = extents[b];
        if (ea.right_found && eb.left_found) {
            if (ea.right_switch.k == eb.left_switch.k) {
                ea.right_switch.label_after = interval_labels[b];
                eb.left_switch.label_before = interval_labels[a];
            }
        } else if (ea.right_found) {
            eb.left = ea.right;
            ea.right_switch.label_after = interval_labels[b];
        } else if (eb.left_found) {
            ea.right = eb.left;
            eb.left_switch.label_before = interval_labels[a];
        }
    }

    commit_extents(est, handled, extents, interval_labels, Provenance::MarkovMatch);
    est.finalize_switches();
    return est;
}

SwitchEstimate detect_correction(const LtvRealization& real, const StationarySet& ss,
                                 const ClusterResult& clusters, const std::vector<int>& interval_labels,
                                 const DetectionTolerances& tol) {
    (void)clusters;
    const int n = real.n;
    SwitchEstimate est(real.k_lo, real.k_hi);
    est.tolerant = tol.tolerant;
    std::vector<Extent> extents(ss.intervals.size());
    std::vector<std::size_t> handled;

    for (std::size_t i = 0; i < ss.intervals.size(); ++i) {
        const auto& iv = ss.intervals[i];
        if (iv.beta - iv.alpha >= 2 * n - 1) continue;  // handled by the Markov-matching detector
        int label = interval_labels[i];
        Extent& e = extents[i];

        // Forward sweep on M(V(k)): fires within 2n + 1 steps; the start is
        // clamped to alpha so short intervals do not begin on pre-interval
        // anchors where the statistic is nonzero for benign reasons.
        int k0 = std::max(iv.beta - 2 * n + 1, iv.alpha);
        int fwd_cap = std::min(iv.beta + 2 * n + 2, real.k_hi);
        e.right = real.k_hi + 1;
        bool fired = false;
        int steps = 0;
        for (int k = k0; k <= fwd_cap; ++k, ++steps) {
            if (std::abs(feature_M(forward_correction(real, k)) - n) >= tol.correction) {
                int sw = std::min(k + 2 * n + 1, real.k_hi + 1);
                e.right = sw;
                e.right_found = true;
                e.right_switch = {sw, label, 0, Provenance::Correction, true, steps + 1};
                fired = true;
                break;
            }
        }
        if (!fired) e.right = fwd_cap + 1;

        // Backward sweep on M(W(k)): fires within 2n steps.
        int k1 = std::min(iv.alpha + 2 * n - 2, iv.beta);
        int bwd_cap = std::max(iv.alpha - 2 * n - 2, real.k_lo);
        e.left = bwd_cap;
        steps = 0;
        for (int k = k1; k >= bwd_cap; --k, ++steps) {
            if (std::abs(feature_M(backward_correction(real, k)) - n) >= tol.correction) {
                int sw = std::max(k - 2 * n + 1, real.k_lo);
                e.left = sw;
                e.left_found = true;
                e.left_switch = {sw, 0, label, Provenance::Correction, false, steps + 1};
                break;
            }
        }
        handled.push_back(i);
    }

    commit_extents(est, handled, extents, interval_labels, Provenance::Correction);
    est.finalize_switches();
    return est;
}

namespace {

/// Classifies the submodel active around Hankel anchor x by nearest Hankel
/// signature; returns the 1-based cluster label.
int classify_signature(const MarkovSequence& markov, const ClusterResult& clusters, int n, int x) {
    HankelMatrix H = hankel::build(markov, n + 1, n, x);
    int best = 1;
    double d1 = std::numeric_limits<double>::infinity(), d2 = d1;
    for (int c = 0; c < clusters.sigma_hat; ++c) {
        double d = (hankel_signature(clusters.representatives[static_cast<std::size_t>(c)]) - H.data).norm();
        if (d < d1) {
            d2 = d1;
            d1 = d;
            best = c + 1;
        } else {
            d2 = std::min(d2, d);
        }
    }
    if (clusters.sigma_hat > 1 && d2 - d1 <= 1e-9 * (1.0 + d2))
        throw std::runtime_error("ambiguous submodel: two Hankel signatures tie at anchor " + std::to_string(x));
    return best;
}

}  // namespace

SwitchEstimate detect_short(const MarkovSequence& markov, const ClusterResult& clusters,
                            SwitchEstimate est, const DetectionTolerances& tol) {
    const int n = clusters.representatives.at(0).n();

    // Collect maximal unassigned gaps before mutating the estimate.
    std::vector<std::pair<int, int>> gaps;
    for (int k = est.k_lo; k <= est.k_hi;) {
        if (est.at(k) != 0) {
            ++k;
            continue;
        }
        int g0 = k;
        while (k <= est.k_hi && est.at(k) == 0) ++k;
        gaps.emplace_back(g0, k - 1);
    }

    for (auto [g0, g1] : gaps) {
        bool left_known = g0 > est.k_lo && est.at(g0 - 1) != 0;
        bool right_known = g1 < est.k_hi && est.at(g1 + 1) != 0;
        if (!left_known && !right_known)
            throw std::runtime_error("short-segment detection needs a known boundary switch");

        if (left_known) {
            // Forward mode: classify just after the known switch, then extend
            // with the Markov matcher until the next switch fires.
            int cur = g0;
            while (cur <= g1) {
                int x = std::min(cur + n, markov.N() - n);
                int label = classify_signature(markov, clusters, n, x);
                const DiscreteState& rep = clusters.representatives[static_cast<std::size_t>(label - 1)];
                int next = g1 + 1;
                bool found = false;
                int steps = 0;
                for (int l = cur + 2 * n + 1; l <= g1; ++l, ++steps) {
                    if (!match_forward(markov, rep, l, tol.match).same_state) {
                        next = l;
                        found = true;
                        break;
                    }
                }
                est.assign(cur, next - 1, label, Provenance::ShortSegment);
                if (cur > g0 || cur > est.k_lo)
                    est.switches.push_back({cur, 0, label, Provenance::ShortSegment, true, steps});
                cur = next;
                if (!found) break;
            }
        } else {
            // Backward mode for a leading gap: classify just before the known
            // right switch and extend backward.
            int cur_end = g1 + 1;
            while (cur_end > g0) {
                int x = std::max(cur_end - n - 1, n + 1);
                int label = classify_signature(markov, clusters, n, x);
                const DiscreteState& rep = clusters.representatives[static_cast<std::size_t>(label - 1)];
                int prev = g0;
                bool found = false;
                int steps = 0;
                for (int l = cur_end - 2 * n - 2; l >= g0 && l + 2 * n <= markov.N(); --l, ++steps) {
                    if (!match_backward(markov, rep, l, tol.match).same_state) {
                        prev = l + 1;
                        found = true;
                        break;
                    }
                }
                est.assign(prev, cur_end - 1, label, Provenance::ShortSegment);
                if (found) est.switches.push_back({prev, 0, label, Provenance::ShortSegment, false, steps});
                cur_end = prev;
                if (!found) break;
            }
        }
    }
    est.finalize_switches();
    return est;
}

SwitchEstimate assemble_phi(const std::vector<SwitchEstimate>& fragments, int k_lo, int k_hi) {
    SwitchEstimate merged(k_lo, k_hi);
    for (const auto& frag : fragments) merged.tolerant = merged.tolerant || frag.tolerant;
    for (const auto& frag : fragments) {
        for (int k = std::max(k_lo, frag.k_lo); k <= std::min(k_hi, frag.k_hi); ++k) {
            int lab = frag.at(k);
            if (lab != 0) merged.assign(k, k, lab, frag.prov_at(k));
        }
        merged.switches.insert(merged.switches.end(), frag.switches.begin(), frag.switches.end());
    }
    merged.finalize_switches();
    return merged;
}

void fill_unassigned(SwitchEstimate& est) {
    const int size = est.k_hi - est.k_lo + 1;
    for (int i = 0; i < size;) {
        if (est.phi_hat[static_cast<std::size_t>(i)] != 0) {
            ++i;
            continue;
        }
        int j = i;
        while (j < size && est.phi_hat[static_cast<std::size_t>(j)] == 0) ++j;
        int left = (i > 0) ? est.phi_hat[static_cast<std::size_t>(i - 1)] : 0;
        int right = (j < size) ? est.phi_hat[static_cast<std::size_t>(j)] : 0;
        if (left == 0 && right == 0) throw std::runtime_error("fill_unassigned: nothing assigned at all");
        for (int k = i; k < j; ++k) {
            int lab;
            if (left == 0) lab = right;
            else if (right == 0) lab = left;
            else lab = (k - i < j - k) ? left : right;  // split at the midpoint
            est.phi_hat[static_cast<std::size_t>(k)] = lab;
            est.prov[static_cast<std::size_t>(k)] = Provenance::Fill;
        }
        i = j;
    }
}

}  // namespace switching
}  // namespace sls

#include "slsreal/cluster.hpp"

#include "slsreal/linalg.hpp"

#include <algorithm>
#include <numeric>

namespace sls::cluster {

Matrix hankel_diff(const MarkovSequence& markov, int n, int k) {
    const int q = 2 * n + 1, r = 2 * n;
    return hankel::build(markov, q, r, k + 1).data - hankel::build(markov, q, r, k).data;
}

// The Frobenius norm of a noise-only Hankel difference concentrates tightly
// around its median (relative spread ~1/sqrt(2 * entries)), so a factor of 2
// clears the noise floor while keeping weak-contrast switches above the
// threshold.
double auto_epsilon_Z(const MarkovSequence& markov, int n, double base, double factor) {
    auto [k_lo, k_hi] = ltv::window(markov.N(), n);
    std::vector<double> norms;
    HankelMatrix H = hankel::build(markov, 2 * n + 1, 2 * n, k_lo);
    for (int k = k_lo; k < k_hi; ++k) {
        HankelMatrix Hn = hankel::advance(H, markov);
        norms.push_back((Hn.data - H.data).norm());
        H = std::move(Hn);
    }
    if (norms.empty()) return base;
    std::nth_element(norms.begin(), norms.begin() + norms.size() / 2, norms.end());
    double med = norms[norms.size() / 2];
    return std::max(base, factor * med);
}

StationarySet stationary_set(const MarkovSequence& markov, int n, double epsilon_Z, int nu) {
    if (epsilon_Z <= 0.0) throw std::invalid_argument("epsilon_Z must be > 0");
    StationarySet ss;
    ss.epsilon_Z = epsilon_Z;
    ss.nu = nu;
    std::tie(ss.k_lo, ss.k_hi) = ltv::window(markov.N(), n);

    HankelMatrix H = hankel::build(markov, 2 * n + 1, 2 * n, ss.k_lo);
    for (int k = ss.k_lo; k < ss.k_hi; ++k) {
        HankelMatrix Hn = hankel::advance(H, markov);
        double d = (Hn.data - H.data).norm();
        ss.diff_norms.push_back(d);
        if (d <= epsilon_Z) ss.members.push_back(k);
        H = std::move(Hn);
    }

    // Maximal runs of consecutive members.
    for (std::size_t i = 0; i < ss.members.size();) {
        std::size_t j = i;
        while (j + 1 < ss.members.size() && ss.members[j + 1] == ss.members[j] + 1) ++j;
        ss.intervals.push_back({ss.members[i], ss.members[j]});
        i = j + 1;
    }
    for (std::size_t i = 0; i < ss.intervals.size(); ++i)
        if (ss.intervals[i].beta - ss.intervals[i].alpha >= nu * n)
            ss.qualifying.push_back(static_cast<int>(i));
    return ss;
}

std::vector<double> interval_features(const LtvRealization& real, const StationarySet& ss) {
    std::vector<double> features(ss.qualifying.size());
    for (std::size_t i = 0; i < features.size(); ++i) {
        const auto& iv = ss.intervals[static_cast<std::size_t>(ss.qualifying[i])];
        features[i] = feature_M(real.at(iv.gamma()).quad.A);
    }
    return features;
}

namespace {

// Entrywise mean after discarding outliers beyond 10 median absolute
// deviations from the median. The noisy stationary boundaries can overshoot
// the exact ones by a step, letting a handful of cross-switch parameters
// into the pool; those sit far outside the noise cloud and would otherwise
// bias the mean by several percent.
double trimmed_mean(std::vector<double>& v) {
    std::vector<double> sorted = v;
    std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
    double med = sorted[sorted.size() / 2];
    for (double& x : sorted) x = std::abs(x - med);
    std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
    double mad = sorted[sorted.size() / 2];
    double cut = std::max(10.0 * mad, 1e-9 * (1.0 + std::abs(med)));
    double sum = 0.0;
    int count = 0;
    for (double x : v)
        if (std::abs(x - med) <= cut) {
            sum += x;
            ++count;
        }
    return count > 0 ? sum / count : med;
}

// Averages h(k, k - d) for d = 0..4n+1 over the data windows of the given
// intervals. Stationarity on [alpha, beta] certifies a single segment over
// [alpha - 2n, beta + 2n + 1]. Returns false when some lag has no sample.
bool average_lags(const MarkovSequence& markov, const StationarySet& ss,
                  const std::vector<int>& interval_ids, int n, std::vector<Matrix>& hbar) {
    const int p = markov.p(), m = markov.m();
    const int max_lag = 4 * n + 1;
    hbar.assign(static_cast<std::size_t>(max_lag + 1), Matrix::Zero(p, m));
    for (int d = 0; d <= max_lag; ++d) {
        std::vector<Matrix> samples;
        for (int id : interval_ids) {
            const auto& iv = ss.intervals[static_cast<std::size_t>(id)];
            int k_from = std::max(iv.alpha - 2 * n + d, d + 1);
            int k_to = std::min(iv.beta + 2 * n + 1, markov.N());
            for (int k = k_from; k <= k_to; ++k) {
                if (!markov.stored(k, k - d)) continue;
                samples.push_back(markov.at(k, k - d));
            }
        }
        if (samples.empty()) return false;
        Matrix avg(p, m);
        std::vector<double> entry(samples.size());
        for (int i = 0; i < p; ++i)
            for (int j = 0; j < m; ++j) {
                for (std::size_t s = 0; s < samples.size(); ++s) entry[s] = samples[s](i, j);
                avg(i, j) = trimmed_mean(entry);
            }
        hbar[static_cast<std::size_t>(d)] = avg;
    }
    return true;
}

// Eigensystem-realization step on the averaged lags: shift-invariance of the
// lag-Hankel pair recovers (A, B, C) of the order-n model, D = hbar(0).
DiscreteState era_realize(const std::vector<Matrix>& hbar, int n, int p, int m) {
    const int q = 2 * n + 1, r = 2 * n;
    Matrix H0(q * p, r * m), H1(q * p, r * m);
    for (int s = 1; s <= q; ++s)
        for (int t = 1; t <= r; ++t) {
            H0.block((s - 1) * p, (t - 1) * m, p, m) = hbar[static_cast<std::size_t>(s + t - 1)];
            H1.block((s - 1) * p, (t - 1) * m, p, m) = hbar[static_cast<std::size_t>(s + t)];
        }
    HankelMatrix H{0, q, r, H0};
    auto oc = ltv::factorize(H, n);
    DiscreteState quad;
    quad.A = pinv(oc.O_q) * H1 * pinv(oc.R_r);
    quad.B = oc.R_r.leftCols(m);
    quad.C = oc.O_q.topRows(p);
    quad.D = hbar[0];
    return quad;
}

}  // namespace

std::vector<double> averaged_interval_features(const LtvRealization& real,
                                               const MarkovSequence& markov,
                                               const StationarySet& ss, int n) {
    std::vector<double> features(ss.qualifying.size());
    std::vector<Matrix> hbar;
    for (std::size_t i = 0; i < features.size(); ++i) {
        if (average_lags(markov, ss, {ss.qualifying[i]}, n, hbar)) {
            features[i] = feature_M(era_realize(hbar, n, markov.p(), markov.m()).A);
        } else {
            const auto& iv = ss.intervals[static_cast<std::size_t>(ss.qualifying[i])];
            features[i] = feature_M(real.at(iv.gamma()).quad.A);
        }
    }
    return features;
}

double adaptive_radius(const std::vector<double>& features, double base) {
    if (features.size() < 2) return base;
    std::vector<double> f = features;
    std::sort(f.begin(), f.end());
    std::vector<double> gaps;
    gaps.reserve(f.size() - 1);
    for (std::size_t i = 0; i + 1 < f.size(); ++i) gaps.push_back(f[i + 1] - f[i]);
    std::sort(gaps.begin(), gaps.end(), std::greater<double>());
    double median_gap = gaps[gaps.size() / 2];
    // No dominant gap means no cluster structure stands out; keep the
    // exact-data radius rather than inventing boundaries.
    if (gaps[0] < std::max(4.0 * median_gap, 2.0 * base)) return base;
    // Separators are the gaps on the scale of the largest one; everything
    // well below that scale is within-cluster scatter. The threshold is
    // relative to the largest gap so a lone moderate within-cluster jump
    // cannot masquerade as a separator.
    double cut = 0.25 * gaps[0];
    std::size_t n_sep = 0;
    while (n_sep < gaps.size() && gaps[n_sep] >= cut) ++n_sep;
    double largest_within = n_sep < gaps.size() ? gaps[n_sep] : std::max(base, 1e-15);
    return std::max(base, 0.5 * (gaps[n_sep - 1] + largest_within));
}

ClusterResult cluster_states(const LtvRealization& real, const StationarySet& ss, double radius,
                             const std::vector<double>* features) {
    if (ss.qualifying.empty())
        throw std::runtime_error("no qualifying stationary intervals; consider a larger epsilon_Z or smaller nu");

    ClusterResult res;
    const std::size_t nq = ss.qualifying.size();
    res.features = features ? *features : interval_features(real, ss);

    // Sorted-gap sweep: features within `radius` of a chain neighbor share a
    // cluster; equivalent to density clustering with min points = 1 in 1-D.
    std::vector<std::size_t> order(nq);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return res.features[a] < res.features[b];
    });
    res.assignments.assign(nq, 0);
    int label = 0;
    double prev = 0.0;
    for (std::size_t idx = 0; idx < nq; ++idx) {
        double f = res.features[order[idx]];
        if (idx == 0 || f - prev > radius) ++label;
        res.assignments[order[idx]] = label;
        prev = f;
    }
    res.sigma_hat = label;

    // Representative per cluster: the longest qualifying interval.
    res.representatives.resize(static_cast<std::size_t>(label));
    res.centers.assign(static_cast<std::size_t>(label), 0.0);
    std::vector<int> best_len(static_cast<std::size_t>(label), -1);
    std::vector<int> counts(static_cast<std::size_t>(label), 0);
    for (std::size_t i = 0; i < nq; ++i) {
        const auto& iv = ss.intervals[static_cast<std::size_t>(ss.qualifying[i])];
        std::size_t c = static_cast<std::size_t>(res.assignments[i] - 1);
        res.centers[c] += res.features[i];
        counts[c] += 1;
        if (iv.length() > best_len[c]) {
            best_len[c] = iv.length();
            res.representatives[c] = real.at(iv.gamma()).quad;
            res.representatives[c].label = res.assignments[i];
        }
    }
    for (std::size_t c = 0; c < res.centers.size(); ++c) res.centers[c] /= counts[c];
    return res;
}

namespace {

double lag_distance(const std::vector<Matrix>& a, const std::vector<Matrix>& b) {
    double d2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d2 += (a[i] - b[i]).squaredNorm();
    return std::sqrt(d2);
}

// Robust noise scale: 1.4826 x median absolute deviation of the stored
// parameters around their interval-lag medians.
double noise_scale(const MarkovSequence& markov, const StationarySet& ss, int n) {
    const int max_lag = 4 * n + 1;
    std::vector<double> devs;
    for (int qi : ss.qualifying) {
        const auto& iv = ss.intervals[static_cast<std::size_t>(qi)];
        for (int d = 0; d <= max_lag; ++d) {
            int k_from = std::max(iv.alpha - 2 * n + d, d + 1);
            int k_to = std::min(iv.beta + 2 * n + 1, markov.N());
            std::vector<Matrix> samples;
            for (int k = k_from; k <= k_to; ++k)
                if (markov.stored(k, k - d)) samples.push_back(markov.at(k, k - d));
            if (samples.size() < 3) continue;
            for (int i = 0; i < markov.p(); ++i)
                for (int j = 0; j < markov.m(); ++j) {
                    std::vector<double> vals;
                    vals.reserve(samples.size());
                    for (const Matrix& s : samples) vals.push_back(s(i, j));
                    std::nth_element(vals.begin(), vals.begin() + vals.size() / 2, vals.end());
                    double med = vals[vals.size() / 2];
                    for (double v : vals) devs.push_back(std::abs(v - med));
                }
        }
    }
    if (devs.empty()) return 0.0;
    std::nth_element(devs.begin(), devs.begin() + devs.size() / 2, devs.end());
    return 1.4826 * devs[devs.size() / 2];
}

}  // namespace

ClusterResult consolidate_clusters(const LtvRealization& real, const MarkovSequence& markov,
                                   const StationarySet& ss, ClusterResult clusters, int n) {
    const std::size_t nq = clusters.assignments.size();
    if (nq == 0) return clusters;
    const int max_lag = 4 * n + 1;
    const double K = static_cast<double>((max_lag + 1) * markov.p() * markov.m());

    // Per-interval lag averages; intervals whose band lacks a lag keep their
    // current assignment throughout.
    std::vector<std::vector<Matrix>> ivbar(nq);
    std::vector<bool> movable(nq, false);
    std::vector<double> weight(nq, 0.0);  // data share, for merge tolerances
    for (std::size_t i = 0; i < nq; ++i) {
        movable[i] = average_lags(markov, ss, {ss.qualifying[i]}, n, ivbar[i]);
        weight[i] = ss.intervals[static_cast<std::size_t>(ss.qualifying[i])].length() + 4.0 * n;
    }
    const double sigma_n = noise_scale(markov, ss, n);

    std::vector<int> assign = clusters.assignments;
    int sigma_hat = clusters.sigma_hat;
    for (int iter = 0; iter < 3; ++iter) {
        // Cluster lag averages from the current assignment.
        std::vector<std::vector<Matrix>> cbar(static_cast<std::size_t>(sigma_hat));
        std::vector<double> cweight(static_cast<std::size_t>(sigma_hat), 0.0);
        std::vector<bool> cok(static_cast<std::size_t>(sigma_hat), false);
        for (int c = 1; c <= sigma_hat; ++c) {
            std::vector<int> ids;
            for (std::size_t i = 0; i < nq; ++i)
                if (assign[i] == c) {
                    ids.push_back(ss.qualifying[i]);
                    cweight[static_cast<std::size_t>(c - 1)] += weight[i];
                }
            if (!ids.empty())
                cok[static_cast<std::size_t>(c - 1)] =
                    average_lags(markov, ss, ids, n, cbar[static_cast<std::size_t>(c - 1)]);
        }

        // Merge clusters whose averaged parameters agree to within the noise
        // expected of two independent sample means.
        std::vector<int> remap(static_cast<std::size_t>(sigma_hat));
        for (int c = 0; c < sigma_hat; ++c) remap[static_cast<std::size_t>(c)] = c;
        for (int a = 0; a < sigma_hat; ++a)
            for (int b = a + 1; b < sigma_hat; ++b) {
                if (!cok[static_cast<std::size_t>(a)] || !cok[static_cast<std::size_t>(b)]) continue;
                int ra = remap[static_cast<std::size_t>(a)], rb = remap[static_cast<std::size_t>(b)];
                if (ra == rb) continue;
                double tol = 5.0 * sigma_n * std::sqrt(K) *
                             std::sqrt(1.0 / cweight[static_cast<std::size_t>(a)] +
                                       1.0 / cweight[static_cast<std::size_t>(b)]);
                if (lag_distance(cbar[static_cast<std::size_t>(a)], cbar[static_cast<std::size_t>(b)]) <= tol)
                    for (int& r : remap)
                        if (r == rb) r = ra;
            }
        for (std::size_t i = 0; i < nq; ++i) assign[i] = remap[static_cast<std::size_t>(assign[i] - 1)] + 1;
        // Compact labels and cluster averages.
        std::vector<int> compact(static_cast<std::size_t>(sigma_hat), 0);
        int next = 0;
        for (int c = 0; c < sigma_hat; ++c) {
            int r = remap[static_cast<std::size_t>(c)];
            if (compact[static_cast<std::size_t>(r)] == 0) compact[static_cast<std::size_t>(r)] = ++next;
        }
        std::vector<std::vector<Matrix>> mbar(static_cast<std::size_t>(next));
        std::vector<bool> mok(static_cast<std::size_t>(next), false);
        for (std::size_t i = 0; i < nq; ++i)
            assign[i] = compact[static_cast<std::size_t>(assign[i] - 1)];
        sigma_hat = next;
        // Refit cluster averages after the merge.
        for (int c = 1; c <= sigma_hat; ++c) {
            std::vector<int> ids;
            for (std::size_t i = 0; i < nq; ++i)
                if (assign[i] == c) ids.push_back(ss.qualifying[i]);
            mok[static_cast<std::size_t>(c - 1)] =
                !ids.empty() && average_lags(markov, ss, ids, n, mbar[static_cast<std::size_t>(c - 1)]);
        }

        // Reassign each interval to the nearest cluster in parameter space.
        bool changed = false;
        for (std::size_t i = 0; i < nq; ++i) {
            if (!movable[i]) continue;
            int best = assign[i];
            double best_d = std::numeric_limits<double>::infinity();
            for (int c = 1; c <= sigma_hat; ++c) {
                if (!mok[static_cast<std::size_t>(c - 1)]) continue;
                double d = lag_distance(ivbar[i], mbar[static_cast<std::size_t>(c - 1)]);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            if (best != assign[i]) {
                assign[i] = best;
                changed = true;
            }
        }
        // Drop clusters emptied by the reassignment.
        std::vector<int> seen(static_cast<std::size_t>(sigma_hat), 0);
        int live = 0;
        for (std::size_t i = 0; i < nq; ++i)
            if (seen[static_cast<std::size_t>(assign[i] - 1)] == 0)
                seen[static_cast<std::size_t>(assign[i] - 1)] = ++live;
        for (std::size_t i = 0; i < nq; ++i) assign[i] = seen[static_cast<std::size_t>(assign[i] - 1)];
        sigma_hat = live;
        if (!changed && iter > 0) break;
    }

    // Rebuild the result around the consolidated assignment; representatives
    // and centers come from the refinement pass.
    ClusterResult out;
    out.sigma_hat = sigma_hat;
    out.assignments = assign;
    out.features = clusters.features;
    out.representatives.resize(static_cast<std::size_t>(sigma_hat));
    out.centers.assign(static_cast<std::size_t>(sigma_hat), 0.0);
    std::vector<int> counts(static_cast<std::size_t>(sigma_hat), 0);
    std::vector<int> best_len(static_cast<std::size_t>(sigma_hat), -1);
    for (std::size_t i = 0; i < nq; ++i) {
        const auto& iv = ss.intervals[static_cast<std::size_t>(ss.qualifying[i])];
        std::size_t c = static_cast<std::size_t>(assign[i] - 1);
        out.centers[c] += out.features[i];
        counts[c] += 1;
        if (iv.length() > best_len[c]) {
            best_len[c] = iv.length();
            out.representatives[c] = real.at(iv.gamma()).quad;
            out.representatives[c].label = assign[i];
        }
    }
    for (std::size_t c = 0; c < out.centers.size(); ++c) out.centers[c] /= counts[c];
    return refine_representatives(markov, ss, std::move(out), n);
}

ClusterResult refine_representatives(const MarkovSequence& markov, const StationarySet& ss,
                                     ClusterResult clusters, int n) {
    for (int c = 1; c <= clusters.sigma_hat; ++c) {
        std::vector<int> interval_ids;
        for (std::size_t i = 0; i < clusters.assignments.size(); ++i)
            if (clusters.assignments[i] == c)
                interval_ids.push_back(ss.qualifying[i]);
        std::vector<Matrix> hbar;
        if (!average_lags(markov, ss, interval_ids, n, hbar))
            continue;  // keep the single-anchor representative
        DiscreteState quad = era_realize(hbar, n, markov.p(), markov.m());
        quad.label = c;
        clusters.representatives[static_cast<std::size_t>(c - 1)] = quad;
        clusters.centers[static_cast<std::size_t>(c - 1)] = feature_M(quad.A);
    }
    return clusters;
}

ClusterResult recluster(const ClusterResult& result, const StationarySet& ss, int min_support) {
    // Support of a cluster: the longest interval assigned to it.
    std::vector<int> support(static_cast<std::size_t>(result.sigma_hat), 0);
    for (std::size_t i = 0; i < result.assignments.size(); ++i) {
        const auto& iv = ss.intervals[static_cast<std::size_t>(ss.qualifying[i])];
        std::size_t c = static_cast<std::size_t>(result.assignments[i] - 1);
        support[c] = std::max(support[c], iv.length());
    }
    std::vector<bool> survives(static_cast<std::size_t>(result.sigma_hat));
    int n_survivors = 0;
    for (std::size_t c = 0; c < survives.size(); ++c) {
        survives[c] = support[c] >= min_support;
        if (survives[c]) ++n_survivors;
    }
    if (n_survivors == 0) throw std::runtime_error("recluster: every cluster is below the support threshold");
    if (n_survivors == result.sigma_hat) return result;

    // Relabel survivors contiguously; merge dropped clusters into the nearest
    // surviving center.
    std::vector<int> new_label(static_cast<std::size_t>(result.sigma_hat), 0);
    ClusterResult out;
    for (std::size_t c = 0; c < survives.size(); ++c) {
        if (!survives[c]) continue;
        new_label[c] = ++out.sigma_hat;
        out.representatives.push_back(result.representatives[c]);
        out.representatives.back().label = out.sigma_hat;
        out.centers.push_back(result.centers[c]);
    }
    for (std::size_t c = 0; c < survives.size(); ++c) {
        if (survives[c]) continue;
        int nearest = 1;
        double best = std::numeric_limits<double>::infinity();
        for (int d = 0; d < out.sigma_hat; ++d) {
            double gap = std::abs(result.centers[c] - out.centers[static_cast<std::size_t>(d)]);
            if (gap < best) {
                best = gap;
                nearest = d + 1;
            }
        }
        new_label[c] = nearest;
    }
    out.features = result.features;
    out.assignments.resize(result.assignments.size());
    for (std::size_t i = 0; i < result.assignments.size(); ++i)
        out.assignments[i] = new_label[static_cast<std::size_t>(result.assignments[i] - 1)];
    return out;
}

}  // namespace sls::cluster

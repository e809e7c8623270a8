#include "slsreal/basis.hpp"

#include "slsreal/linalg.hpp"

#include <deque>

namespace sls::basis {

Matrix cross_product_at_switch(const MarkovSequence& markov, const ClusterResult& clusters,
                               int k_i, int j_pre, int j_post, int depth) {
    const DiscreteState& P1 = clusters.representatives.at(static_cast<std::size_t>(j_pre - 1));
    const DiscreteState& P2 = clusters.representatives.at(static_cast<std::size_t>(j_post - 1));
    const int n = P1.n(), p = P1.p();
    const int q = depth > 0 ? depth : n;
    if (q < n) throw std::invalid_argument("cross product depth below the system order");
    if (k_i - q < 1 || k_i + q > markov.N())
        throw std::out_of_range("switch too close to the data boundary for the cross product");

    // h(k_i + xi, k_i - eta) = C2 A2^xi (T2 T1^{-1}) A1^{eta-1} B1 for
    // xi >= 0, eta >= 1: stacking xi = 0..q keeps the leading C2 row, so the
    // ratio is read off by two pseudoinverses with no inversion of A2.
    Matrix O2 = extended_observability(P2.A, P2.C, q + 1);
    Matrix C1 = extended_controllability(P1.A, P1.B, q);
    Matrix O2p = pinv(O2);
    Matrix X(n, q * P1.m());
    for (int eta = 1; eta <= q; ++eta) {
        Matrix Z((q + 1) * p, P1.m());
        for (int xi = 0; xi <= q; ++xi) Z.middleRows(xi * p, p) = markov.at(k_i + xi, k_i - eta);
        X.middleCols((eta - 1) * P1.m(), P1.m()) = O2p * Z;
    }
    return X * pinv(C1);
}

BasisTransforms solve_transforms(const MarkovSequence& markov, const ClusterResult& clusters,
                                 const SwitchEstimate& est, double cond_guard) {
    const int n = clusters.representatives.at(0).n();
    BasisTransforms out;
    out.pi[1] = Matrix::Identity(n, n);
    out.path[1] = {};
    out.condition_numbers[1] = 1.0;
    if (clusters.sigma_hat == 1) return out;

    // Usable edges: detected switches with at least n steps of dwell on both
    // sides and distinct labels. The depth grows with the surrounding dwell
    // (capped by the stored band) so that each switch contributes as much
    // straddling data as its neighborhood certifies.
    struct Edge {
        int k = 0, depth = 0;
    };
    std::map<std::pair<int, int>, std::vector<Edge>> groups;  // (j1, j2) -> edges
    auto label_in_window = [&](int k) {
        return (k >= est.k_lo && k <= est.k_hi) ? est.at(k) : 0;
    };
    int depth_cap = 2 * n;
    if (markov.band() >= 0) depth_cap = std::min(depth_cap, markov.band() / 2);
    for (const auto& sw : est.switches) {
        int before = label_in_window(sw.k - 1);
        int after = label_in_window(sw.k);
        if (before == 0 || after == 0 || before == after) continue;
        // Largest depth with constant labels over the blocks consumed:
        // label `before` on [k - q, k - 1] and `after` on [k, k + q].
        int q = 0;
        while (q < depth_cap && sw.k - (q + 1) >= 1 && sw.k + (q + 1) <= markov.N()) {
            int lb = label_in_window(sw.k - (q + 1));
            int la = label_in_window(sw.k + (q + 1));
            if ((lb != 0 && lb != before) || (la != 0 && la != after)) break;
            ++q;
        }
        if (q < n) continue;
        groups[{before, after}].push_back({sw.k, q});
    }

    // Each ordered pair (j1, j2) yields one averaged estimate of
    // T_{j2} T_{j1}^{-1}: the per-switch cross products measure the same
    // matrix, so their mean suppresses independent noise.
    struct PairEdge {
        int j1 = 0, j2 = 0;
        Matrix ratio;
        std::vector<int> switches;
    };
    std::vector<PairEdge> edges;
    for (const auto& [pair, group] : groups) {
        Matrix Y = Matrix::Zero(n, n);
        PairEdge pe;
        for (const auto& e : group) {
            Y += cross_product_at_switch(markov, clusters, e.k, pair.first, pair.second, e.depth);
            pe.switches.push_back(e.k);
        }
        Y /= static_cast<double>(group.size());
        Eigen::JacobiSVD<Matrix> svd(Y);
        double cond = svd.singularValues()(0) / std::max(svd.singularValues()(n - 1), 1e-300);
        if (cond > cond_guard) continue;  // degenerate transition; prefer another edge
        pe.j1 = pair.first;
        pe.j2 = pair.second;
        pe.ratio = std::move(Y);  // T_{j2} T_{j1}^{-1}
        edges.push_back(std::move(pe));
    }

    // Breadth-first composition from label 1; edges usable in either
    // direction through the inversion rule.
    std::deque<int> queue{1};
    while (!queue.empty()) {
        int u = queue.front();
        queue.pop_front();
        for (const auto& e : edges) {
            int v = (e.j1 == u) ? e.j2 : (e.j2 == u ? e.j1 : 0);
            if (v == 0 || out.pi.count(v)) continue;
            Matrix pi_v;
            if (v == e.j2) {
                pi_v = e.ratio * out.pi.at(e.j1);  // T_v T_1^{-1} = (T_{j2} T_{j1}^{-1})(T_{j1} T_1^{-1})
            } else {
                pi_v = e.ratio.partialPivLu().solve(out.pi.at(e.j2));
            }
            out.pi[v] = pi_v;
            out.path[v] = out.path.at(u);
            out.path[v].insert(out.path[v].end(), e.switches.begin(), e.switches.end());
            Eigen::JacobiSVD<Matrix> svp(pi_v);
            out.condition_numbers[v] =
                svp.singularValues()(0) / std::max(svp.singularValues()(n - 1), 1e-300);
            queue.push_back(v);
        }
    }

    for (int j = 1; j <= clusters.sigma_hat; ++j)
        if (!out.pi.count(j))
            throw std::runtime_error("label " + std::to_string(j) +
                                     " unreachable from label 1 through the detected switches");
    return out;
}

std::vector<DiscreteState> apply_transforms(const ClusterResult& clusters,
                                            const BasisTransforms& transforms) {
    std::vector<DiscreteState> out;
    for (const auto& rep : clusters.representatives) {
        const Matrix& Pi = transforms.pi.at(rep.label);
        auto lu = Pi.partialPivLu();
        DiscreteState s;
        s.A = lu.solve(rep.A * Pi);
        s.B = lu.solve(rep.B);
        s.C = rep.C * Pi;
        s.D = rep.D;
        s.label = rep.label;
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<Vector> predict_output(const std::vector<DiscreteState>& common,
                                          const SwitchEstimate& phi_hat, const Vector& x0, int start,
                                          const std::vector<Vector>& inputs) {
    const int n = common.at(0).n();
    if (x0.size() != n) throw std::invalid_argument("x0 dimension mismatch");
    std::vector<Vector> out;
    out.reserve(inputs.size());
    Vector x = x0;
    auto label_at = [&](int k) {
        int kk = std::clamp(k, phi_hat.k_lo, phi_hat.k_hi);  // constant continuation
        int lab = phi_hat.at(kk);
        if (lab == 0) throw std::runtime_error("phi_hat unassigned at k = " + std::to_string(kk));
        return lab;
    };
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        int k = start + static_cast<int>(i);
        const DiscreteState& P = common.at(static_cast<std::size_t>(label_at(k) - 1));
        if (inputs[i].size() != P.m()) throw std::invalid_argument("input dimension mismatch");
        out.push_back(P.C * x + P.D * inputs[i]);
        x = P.A * x + P.B * inputs[i];
    }
    return out;
}

}  // namespace sls::basis

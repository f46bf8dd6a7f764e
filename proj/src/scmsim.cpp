#include "causalattn/scmsim.hpp"

#include <algorithm>
#include <deque>

namespace causalattn {

std::vector<int> Scm::parents(int node) const {
    std::vector<int> out;
    for (int j = 0; j < node; ++j)
        if (g(node, j) != 0.0) out.push_back(j);
    return out;
}

std::vector<int> Scm::children(int node) const {
    std::vector<int> out;
    for (int i = node + 1; i < n; ++i)
        if (g(i, node) != 0.0) out.push_back(i);
    return out;
}

std::vector<int> Scm::observed_nodes() const {
    std::vector<int> out;
    for (int i = 0; i < n; ++i)
        if (latents.count(i) == 0) out.push_back(i);
    return out;
}

Scm random_scm(const ScmOptions& opts) {
    if (opts.n < 2) throw Error("random_scm needs n >= 2");
    if (opts.edge_density < 0.0 || opts.edge_density > 1.0)
        throw Error("edge density must lie in [0, 1]");
    if (opts.weight_min <= 0.0 || opts.weight_max < opts.weight_min)
        throw Error("weight range must be positive with min <= max");
    if (opts.latent_count < 0 || opts.latent_count >= opts.n)
        throw Error("latent count must lie in [0, n)");

    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> weight(opts.weight_min, opts.weight_max);

    for (int attempt = 0; attempt < 1000; ++attempt) {
        Scm scm;
        scm.n = opts.n;
        scm.g = Eigen::MatrixXd::Zero(opts.n, opts.n);
        scm.exo_cov = Eigen::VectorXd::Ones(opts.n);
        for (int i = 0; i < opts.n; ++i) {
            for (int j = 0; j < i; ++j) {
                // Latent candidates are the earliest nodes and stay parentless.
                if (i < opts.latent_count) continue;
                if (unit(rng) < opts.edge_density) {
                    double w = weight(rng);
                    if (opts.signed_weights && unit(rng) < 0.5) w = -w;
                    scm.g(i, j) = w;
                }
            }
        }
        bool ok = true;
        for (int k = 0; k < opts.latent_count; ++k) {
            if (static_cast<int>(scm.children(k).size()) < 2) {
                ok = false;
                break;
            }
            scm.latents.insert(k);
        }
        if (ok) return scm;
    }
    throw CannotPlaceLatentsError("could not place parentless latent confounders with >= 2 children "
                                  "after 1000 resamples");
}

EffectMatrix effect_matrix(const Scm& scm) {
    const Eigen::MatrixXd img = Eigen::MatrixXd::Identity(scm.n, scm.n) - scm.g;
    Eigen::MatrixXd m = img.triangularView<Eigen::Lower>().solve(
        Eigen::MatrixXd::Identity(scm.n, scm.n));
    for (int i = 0; i < scm.n; ++i) {
        m(i, i) = 1.0;
        for (int j = i + 1; j < scm.n; ++j) m(i, j) = 0.0;
    }
    return EffectMatrix::from_matrix(m);
}

EffectMatrix marginalize(const EffectMatrix& m, const std::set<int>& latents) {
    const int n = m.size();
    for (int l : latents)
        if (l < 0 || l >= n) throw Error("latent index out of range");
    std::vector<int> keep;
    for (int i = 0; i < n; ++i)
        if (latents.count(i) == 0) keep.push_back(i);
    Eigen::MatrixXd out(keep.size(), keep.size());
    for (size_t a = 0; a < keep.size(); ++a)
        for (size_t b = 0; b < keep.size(); ++b) out(a, b) = m(keep[a], keep[b]);
    return EffectMatrix::from_matrix(out);
}

CovarianceMatrix scm_covariance(const Scm& scm) {
    const auto m = effect_matrix(scm);
    Eigen::MatrixXd c = m.entries() * scm.exo_cov.asDiagonal() * m.entries().transpose();
    c = ((c + c.transpose()) / 2.0).eval();
    return CovarianceMatrix::from_matrix(c);
}

CovarianceMatrix observed_covariance(const Scm& scm) {
    const auto full = scm_covariance(scm);
    const auto keep = scm.observed_nodes();
    Eigen::MatrixXd out(keep.size(), keep.size());
    for (size_t a = 0; a < keep.size(); ++a)
        for (size_t b = 0; b < keep.size(); ++b) out(a, b) = full(keep[a], keep[b]);
    return CovarianceMatrix::from_matrix(out);
}

CorrelationMatrix observed_correlation(const Scm& scm) {
    return correlation(observed_covariance(scm));
}

Eigen::MatrixXd sample_data(const Scm& scm, int m, std::uint64_t seed) {
    if (m < 1) throw Error("sample_data needs m >= 1");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd data(m, scm.n);
    Eigen::VectorXd sd = scm.exo_cov.cwiseSqrt();
    const Eigen::MatrixXd img = Eigen::MatrixXd::Identity(scm.n, scm.n) - scm.g;
    for (int row = 0; row < m; ++row) {
        Eigen::VectorXd u(scm.n);
        for (int i = 0; i < scm.n; ++i) u(i) = gauss(rng) * sd(i);
        data.row(row) = img.triangularView<Eigen::Lower>().solve(u).transpose();
    }
    return data;
}

bool d_separated(const Scm& scm, int i, int j, std::span<const int> z) {
    if (i == j) throw Error("d_separated needs distinct endpoints");
    std::vector<bool> in_z(scm.n, false);
    for (int v : z) {
        if (v == i || v == j) throw Error("conditioning set must exclude the endpoints");
        in_z[v] = true;
    }
    // Ancestors of the conditioning set (inclusive), for collider activation.
    std::vector<bool> anc_z = in_z;
    std::deque<int> queue;
    for (int v : z) queue.push_back(v);
    while (!queue.empty()) {
        const int v = queue.front();
        queue.pop_front();
        for (int p : scm.parents(v)) {
            if (!anc_z[p]) {
                anc_z[p] = true;
                queue.push_back(p);
            }
        }
    }

    // Reachability over (node, trail-direction) states. "Up" means the trail
    // leaves through the node's parents side next.
    enum : int { Up = 0, Down = 1 };
    std::vector<std::array<bool, 2>> visited(scm.n, {false, false});
    std::deque<std::pair<int, int>> frontier{{i, Up}};
    while (!frontier.empty()) {
        auto [v, dir] = frontier.front();
        frontier.pop_front();
        if (visited[v][dir]) continue;
        visited[v][dir] = true;
        if (v == j) return false;  // active trail found
        if (dir == Up) {
            if (in_z[v]) continue;
            for (int p : scm.parents(v)) frontier.emplace_back(p, Up);
            for (int c : scm.children(v)) frontier.emplace_back(c, Down);
        } else {
            if (!in_z[v]) {
                for (int c : scm.children(v)) frontier.emplace_back(c, Down);
            }
            if (anc_z[v]) {
                for (int p : scm.parents(v)) frontier.emplace_back(p, Up);
            }
        }
    }
    return true;
}

Pag oracle_fci(const Scm& scm, const FciRuleConfig& rules) {
    const auto observed = scm.observed_nodes();
    const int m = static_cast<int>(observed.size());
    if (m < 1) throw Error("oracle_fci needs at least one observed node");
    Pag g = Pag::complete_over(m);

    // Exhaustive separating-set search over observed subsets, smallest first.
    for (int a = 0; a < m; ++a) {
        for (int b = a + 1; b < m; ++b) {
            std::vector<int> others;
            for (int k = 0; k < m; ++k)
                if (k != a && k != b) others.push_back(k);
            bool separated = false;
            for (int size = 0; size <= static_cast<int>(others.size()) && !separated; ++size) {
                std::vector<int> mask(others.size(), 0);
                std::fill(mask.end() - size, mask.end(), 1);
                // Iterate combinations via permutation of the selection mask.
                std::sort(mask.begin(), mask.end());
                std::vector<int> cond_obs, cond_full;
                do {
                    cond_obs.clear();
                    cond_full.clear();
                    for (size_t t = 0; t < others.size(); ++t) {
                        if (mask[t]) {
                            cond_obs.push_back(others[t]);
                            cond_full.push_back(observed[others[t]]);
                        }
                    }
                    if (static_cast<int>(cond_obs.size()) != size) continue;
                    if (d_separated(scm, observed[a], observed[b], cond_full)) {
                        g.remove_edge_with_sepset(a, b, cond_obs);
                        separated = true;
                        break;
                    }
                } while (std::next_permutation(mask.begin(), mask.end()));
            }
        }
    }

    reorient(g, rules);
    return g;
}

AttentionMatrix attention_from_scm(const Scm& scm) {
    return synthesize_attention(marginalize(effect_matrix(scm), scm.latents));
}

AttentionMatrix random_attention(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(1e-6, 1.0);  // keep the diagonal invertible
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) a(i, j) = unit(rng);
        a.row(i) /= a.row(i).head(i + 1).sum();
    }
    return AttentionMatrix::validate(a);
}

Scm chain_scm(int n, double weight) {
    if (n < 2) throw Error("chain_scm needs n >= 2");
    Scm scm;
    scm.n = n;
    scm.g = Eigen::MatrixXd::Zero(n, n);
    scm.exo_cov = Eigen::VectorXd::Ones(n);
    for (int i = 1; i < n; ++i) scm.g(i, i - 1) = weight;
    return scm;
}

}  // namespace causalattn

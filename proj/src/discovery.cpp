#include "causalattn/discovery.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <set>

namespace causalattn {

namespace {

// All size-r subsets of a sorted pool, lexicographic.
std::vector<std::vector<int>> subsets_of_size(const std::vector<int>& pool, int r) {
    std::vector<std::vector<int>> out;
    if (r == 0) {
        out.push_back({});
        return out;
    }
    if (r > static_cast<int>(pool.size())) return out;
    std::vector<int> idx(r);
    std::vector<int> cur(r);
    // Iterative combination enumeration.
    for (int i = 0; i < r; ++i) idx[i] = i;
    const int n = static_cast<int>(pool.size());
    while (true) {
        for (int i = 0; i < r; ++i) cur[i] = pool[idx[i]];
        out.push_back(cur);
        int i = r - 1;
        while (i >= 0 && idx[i] == n - r + i) --i;
        if (i < 0) break;
        ++idx[i];
        for (int k = i + 1; k < r; ++k) idx[k] = idx[k - 1] + 1;
    }
    return out;
}

// BFS hop distances from src over the skeleton.
std::vector<int> bfs_distances(const Pag& g, int src) {
    std::vector<int> dist(g.node_count(), std::numeric_limits<int>::max());
    dist[src] = 0;
    std::deque<int> queue{src};
    while (!queue.empty()) {
        const int u = queue.front();
        queue.pop_front();
        for (int v : g.neighbors(u)) {
            if (dist[v] == std::numeric_limits<int>::max()) {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    return dist;
}

// Runs one CI test, appending to the trace. Returns the independence verdict;
// an InsufficientSamples condition counts as dependent and leaves no record.
bool tested_independent(const CorrelationMatrix& r, int x, int y, const std::vector<int>& cond,
                        const CiConfig& ci, DiscoveryTrace& trace) {
    CiRecord rec;
    try {
        rec = ci_test(r, x, y, cond, ci);
    } catch (const InsufficientSamplesError&) {
        return false;
    }
    trace.records.push_back(rec);
    return rec.independent;
}

}  // namespace

std::vector<std::vector<int>> pd_sep_range(int x, int y, int r, const Pag& g) {
    if (!g.has_edge(x, y)) throw NoSuchEdgeError("pd_sep_range: edge {x, y} must exist");
    if (r == 0) return {{}};

    std::set<int> pool_set;
    for (int v : possible_d_sep(g, x)) pool_set.insert(v);
    for (int v : possible_d_sep(g, y)) pool_set.insert(v);
    pool_set.erase(x);
    pool_set.erase(y);

    // ICD distance condition: every member must lie on a skeleton path
    // between x and y of length at most r + 1.
    const auto dx = bfs_distances(g, x);
    const auto dy = bfs_distances(g, y);
    std::vector<int> pool;
    for (int v : pool_set) {
        if (dx[v] == std::numeric_limits<int>::max() || dy[v] == std::numeric_limits<int>::max())
            continue;
        if (dx[v] + dy[v] <= r + 1) pool.push_back(v);
    }
    return subsets_of_size(pool, r);
}

void icd_refine(const std::vector<std::pair<int, int>>& edge_list, Pag& g,
                const CorrelationMatrix& r, const DiscoveryConfig& cfg, DiscoveryTrace& trace) {
    for (const auto& [x, y] : edge_list) {
        if (!g.has_edge(x, y)) throw NoSuchEdgeError("icd_refine: edge list references missing edge");
    }
    const int n = g.node_count();
    bool done = false;
    for (int radius = 0; radius <= n && !done; ++radius) {
        done = true;
        for (const auto& [x, y] : edge_list) {
            if (!g.has_edge(x, y)) continue;
            const auto candidates = pd_sep_range(x, y, radius, g);
            if (!candidates.empty()) done = false;
            for (const auto& cond : candidates) {
                if (tested_independent(r, x, y, cond, cfg.ci, trace)) {
                    g.remove_edge_with_sepset(x, y, cond);
                    break;
                }
            }
        }
        reorient(g, cfg.rules);
    }
}

DiscoveryResult learn_structure_from_correlation(const CorrelationMatrix& r,
                                                 const DiscoveryConfig& cfg) {
    const int n = r.size();
    DiscoveryResult result{Pag(n), {}, 0};
    // Prefixes of length 1..n stand in for the recursion: level k adds node k
    // connected to all predecessors with circle marks and refines only those
    // edges. The prefix graph is never revisited.
    for (int k = 1; k < n; ++k) {
        std::vector<std::pair<int, int>> level_edges;
        for (int i = 0; i < k; ++i) {
            result.pag.add_edge(i, k);
            level_edges.emplace_back(i, k);
        }
        icd_refine(level_edges, result.pag, r, cfg, result.trace);
    }
    return result;
}

DiscoveryResult learn_structure(const AttentionMatrix& a, const DiscoveryConfig& cfg) {
    DiscoveryConfig effective = cfg;
    if (effective.ci.n_eff == 0) effective.ci.n_eff = a.size();
    const auto r = correlation(covariance(to_uni_triangular(a)));
    return learn_structure_from_correlation(r, effective);
}

std::vector<DiscoveryResult> learn_all_heads(const std::vector<AttentionMatrix>& heads,
                                             const DiscoveryConfig& cfg) {
    std::vector<DiscoveryResult> results;
    results.reserve(heads.size());
    for (size_t h = 0; h < heads.size(); ++h) {
        if (heads[h].size() != heads[0].size()) {
            throw Error("learn_all_heads: all heads must share the same token count");
        }
        try {
            auto res = learn_structure(heads[h], cfg);
            res.head_index = static_cast<int>(h);
            results.push_back(std::move(res));
        } catch (const Error& e) {
            throw Error("head " + std::to_string(h) + ": " + e.what());
        }
    }
    return results;
}

DiscoveryResult fci_reference(const CorrelationMatrix& r, const DiscoveryConfig& cfg) {
    const int n = r.size();
    DiscoveryResult result{Pag::complete_over(n), {}, 0};
    Pag& g = result.pag;

    // Phase 1: PC-style skeleton over adjacency sets.
    for (int radius = 0; radius <= n; ++radius) {
        bool any_pool = false;
        for (const auto& [x, y] : g.edges()) {
            if (!g.has_edge(x, y)) continue;
            bool removed = false;
            for (int side : {x, y}) {
                const int other = side == x ? y : x;
                auto pool = g.neighbors(side);
                pool.erase(std::remove(pool.begin(), pool.end(), other), pool.end());
                if (static_cast<int>(pool.size()) >= radius) any_pool = true;
                for (const auto& cond : subsets_of_size(pool, radius)) {
                    if (tested_independent(r, x, y, cond, cfg.ci, result.trace)) {
                        g.remove_edge_with_sepset(x, y, cond);
                        removed = true;
                        break;
                    }
                }
                if (removed || radius == 0) break;  // empty set is side-symmetric
            }
        }
        if (!any_pool) break;
    }

    reorient(g, cfg.rules);

    // Phase 2: possible-d-sep search on the partially oriented graph.
    for (const auto& [x, y] : g.edges()) {
        if (!g.has_edge(x, y)) continue;
        bool removed = false;
        for (int side : {x, y}) {
            auto pool = possible_d_sep(g, side);
            pool.erase(std::remove(pool.begin(), pool.end(), x), pool.end());
            pool.erase(std::remove(pool.begin(), pool.end(), y), pool.end());
            for (int size = 1; size <= static_cast<int>(pool.size()) && !removed; ++size) {
                for (const auto& cond : subsets_of_size(pool, size)) {
                    if (tested_independent(r, x, y, cond, cfg.ci, result.trace)) {
                        g.remove_edge_with_sepset(x, y, cond);
                        removed = true;
                        break;
                    }
                }
            }
            if (removed) break;
        }
    }

    reorient(g, cfg.rules);
    return result;
}

}  // namespace causalattn

#pragma once

#include <vector>

#include "causalattn/attnmat.hpp"
#include "causalattn/citest.hpp"
#include "causalattn/pag.hpp"

namespace causalattn {

// Ordered log of every CI test performed during one discovery.
struct DiscoveryTrace {
    std::vector<CiRecord> records;

    int tests_performed() const { return static_cast<int>(records.size()); }
};

struct DiscoveryResult {
    Pag pag;
    DiscoveryTrace trace;
    int head_index = 0;
};

struct DiscoveryConfig {
    CiConfig ci;
    FciRuleConfig rules;
};

// Candidate conditioning sets for edge {x, y} at radius r: all size-r subsets
// of the possible-d-sep pool of x and y, restricted to members lying on a
// skeleton path between x and y of length at most r + 1. Emitted in
// lexicographic order; r = 0 yields exactly the empty set.
std::vector<std::vector<int>> pd_sep_range(int x, int y, int r, const Pag& g);

// Iterative refinement over a fixed edge list: grows the conditioning-set
// radius, removes edges on the first independence found, re-orients after
// every radius sweep. Terminates when no candidate sets remain or r > n.
void icd_refine(const std::vector<std::pair<int, int>>& edge_list, Pag& g,
                const CorrelationMatrix& r, const DiscoveryConfig& cfg, DiscoveryTrace& trace);

// Recursive structure learning exploiting the causal order fixed by the
// masked-attention triangular form: processes prefixes of increasing length,
// connecting each new node to all predecessors and refining only those edges.
// Realized iteratively; semantics identical to the recursive formulation.
DiscoveryResult learn_structure_from_correlation(const CorrelationMatrix& r,
                                                 const DiscoveryConfig& cfg);

// Convenience wrapper: attention -> uni-triangular -> covariance ->
// correlation -> discovery. When cfg.ci.n_eff is 0 it defaults to the token
// count.
DiscoveryResult learn_structure(const AttentionMatrix& a, const DiscoveryConfig& cfg);

// One independent discovery per head; traces are never shared.
std::vector<DiscoveryResult> learn_all_heads(const std::vector<AttentionMatrix>& heads,
                                             const DiscoveryConfig& cfg);

// Unrestricted FCI on the same correlation matrix: PC-style skeleton phase,
// v-structures, possible-d-sep phase, final orientation. Reference point for
// the CI-test-count comparison; independent of the recursive path above.
DiscoveryResult fci_reference(const CorrelationMatrix& r, const DiscoveryConfig& cfg);

}  // namespace causalattn

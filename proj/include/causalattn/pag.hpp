#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "causalattn/errors.hpp"

namespace causalattn {

// Endpoint mark of a mixed-graph edge.
enum class Mark { Circle, Arrow, Tail };

struct FciRuleConfig {
    // R5-R7 handle selection bias; the attention world model has no selection
    // variables, so they are off by default.
    bool selection_bias_rules = false;
};

// Partial ancestral graph: at most one edge per unordered pair, one mark per
// endpoint, plus the separating set recorded when an edge was removed.
// Mutable during discovery; a single discovery owns its Pag exclusively.
class Pag {
public:
    explicit Pag(int n);

    // Complete graph with circle marks everywhere: the no-knowledge state.
    static Pag complete_over(int n);

    int node_count() const { return n_; }
    int edge_count() const { return static_cast<int>(edges_.size()); }

    bool has_edge(int i, int j) const;
    void add_edge(int i, int j, Mark at_i = Mark::Circle, Mark at_j = Mark::Circle);

    // Mark at `node`'s end of edge {node, other}.
    Mark mark_at(int node, int other) const;
    void set_mark(int node, int other, Mark m);

    // Removes the edge and records the separating set. Throws NoSuchEdgeError.
    void remove_edge_with_sepset(int i, int j, std::vector<int> sepset);

    // Separating set recorded for {i, j}, or nullptr if none.
    const std::vector<int>* sepset(int i, int j) const;

    std::vector<int> neighbors(int i) const;
    // All edges as (i, j) with i < j, ascending.
    std::vector<std::pair<int, int>> edges() const;

    void reset_marks_to_circle();

    // Orients every unshielded triple i-k-j with k absent from the recorded
    // separating set of (i, j) as a collider.
    void orient_v_structures();

    // Applies the complete orientation rule set (R1-R4, optionally R5-R7,
    // then R8-R10) to a fixed point. Deterministic: pairs iterate ascending.
    void apply_fci_rules(const FciRuleConfig& cfg = {});

private:
    using Key = std::pair<int, int>;
    static Key key(int i, int j);
    void check_node(int i) const;

    int n_;
    std::map<Key, std::pair<Mark, Mark>> edges_;  // marks stored as (at i, at j), i < j
    std::map<Key, std::vector<int>> sepsets_;
};

// True iff identical skeletons and identical marks at every endpoint.
bool pag_equal(const Pag& a, const Pag& b);

// Resets marks to circles, re-orients v-structures and re-applies the rules.
// Discovery calls this after every refinement sweep.
void reorient(Pag& g, const FciRuleConfig& cfg = {});

// Possible-d-separating set of x: every node reachable from x along a path
// whose interior vertices are each a collider or part of a triangle.
std::vector<int> possible_d_sep(const Pag& g, int x);

}  // namespace causalattn

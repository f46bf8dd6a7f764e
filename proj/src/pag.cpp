#include "causalattn/pag.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <sstream>

namespace causalattn {

Pag::Pag(int n) : n_(n) {
    if (n < 1) throw Error("Pag needs n >= 1");
}

Pag Pag::complete_over(int n) {
    Pag g(n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) g.add_edge(i, j);
    return g;
}

Pag::Key Pag::key(int i, int j) {
    return {std::min(i, j), std::max(i, j)};
}

void Pag::check_node(int i) const {
    if (i < 0 || i >= n_) throw Error("node index out of range");
}

bool Pag::has_edge(int i, int j) const {
    check_node(i);
    check_node(j);
    return i != j && edges_.count(key(i, j)) > 0;
}

void Pag::add_edge(int i, int j, Mark at_i, Mark at_j) {
    check_node(i);
    check_node(j);
    if (i == j) throw Error("self-edges are not allowed");
    if (i > j) std::swap(at_i, at_j);
    edges_[key(i, j)] = {at_i, at_j};
    sepsets_.erase(key(i, j));
}

Mark Pag::mark_at(int node, int other) const {
    auto it = edges_.find(key(node, other));
    if (it == edges_.end()) throw NoSuchEdgeError("mark_at: no such edge");
    return node < other ? it->second.first : it->second.second;
}

void Pag::set_mark(int node, int other, Mark m) {
    auto it = edges_.find(key(node, other));
    if (it == edges_.end()) throw NoSuchEdgeError("set_mark: no such edge");
    (node < other ? it->second.first : it->second.second) = m;
}

void Pag::remove_edge_with_sepset(int i, int j, std::vector<int> sepset) {
    auto k = key(i, j);
    if (edges_.erase(k) == 0) {
        std::ostringstream msg;
        msg << "no edge {" << i << ", " << j << "} to remove";
        throw NoSuchEdgeError(msg.str());
    }
    std::sort(sepset.begin(), sepset.end());
    sepsets_[k] = std::move(sepset);
}

const std::vector<int>* Pag::sepset(int i, int j) const {
    auto it = sepsets_.find(key(i, j));
    return it == sepsets_.end() ? nullptr : &it->second;
}

std::vector<int> Pag::neighbors(int i) const {
    check_node(i);
    std::vector<int> out;
    for (const auto& [k, marks] : edges_) {
        if (k.first == i) out.push_back(k.second);
        else if (k.second == i) out.push_back(k.first);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::pair<int, int>> Pag::edges() const {
    std::vector<std::pair<int, int>> out;
    out.reserve(edges_.size());
    for (const auto& [k, marks] : edges_) out.push_back(k);
    return out;
}

void Pag::reset_marks_to_circle() {
    for (auto& [k, marks] : edges_) marks = {Mark::Circle, Mark::Circle};
}

void Pag::orient_v_structures() {
    for (int k = 0; k < n_; ++k) {
        const auto nbs = neighbors(k);
        for (size_t a = 0; a < nbs.size(); ++a) {
            for (size_t b = a + 1; b < nbs.size(); ++b) {
                const int i = nbs[a];
                const int j = nbs[b];
                if (has_edge(i, j)) continue;  // shielded
                const auto* sep = sepset(i, j);
                if (sep == nullptr) continue;
                if (!std::binary_search(sep->begin(), sep->end(), k)) {
                    set_mark(k, i, Mark::Arrow);
                    set_mark(k, j, Mark::Arrow);
                }
            }
        }
    }
}

namespace {

// Shorthand predicates over endpoint marks. "a *-> b" reads: the edge {a,b}
// carries an arrow at b.
struct Rules {
    Pag& g;
    int n;
    bool changed = false;

    bool adj(int a, int b) const { return g.has_edge(a, b); }
    bool arrow_at(int node, int other) const { return g.mark_at(node, other) == Mark::Arrow; }
    bool tail_at(int node, int other) const { return g.mark_at(node, other) == Mark::Tail; }
    bool circle_at(int node, int other) const { return g.mark_at(node, other) == Mark::Circle; }
    // a -> b
    bool directed(int a, int b) const {
        return adj(a, b) && tail_at(a, b) && arrow_at(b, a);
    }

    void put(int node, int other, Mark m) {
        if (g.mark_at(node, other) != m) {
            g.set_mark(node, other, m);
            changed = true;
        }
    }

    // Edge traversable from u to v on a possibly-directed path: no arrow back
    // into u and no tail at v.
    bool pd_step(int u, int v) const {
        return adj(u, v) && !arrow_at(u, v) && !tail_at(v, u);
    }

    // R1: a *-> b o-* c, a and c nonadjacent  =>  b -> c.
    void r1() {
        for (int b = 0; b < n; ++b) {
            const auto nbs = g.neighbors(b);
            for (int a : nbs) {
                if (!arrow_at(b, a)) continue;
                for (int c : nbs) {
                    if (c == a || adj(a, c) || !circle_at(b, c)) continue;
                    put(b, c, Mark::Tail);
                    put(c, b, Mark::Arrow);
                }
            }
        }
    }

    // R2: (a -> b *-> c) or (a *-> b -> c), and a *-o c  =>  a *-> c.
    void r2() {
        for (int a = 0; a < n; ++a) {
            for (int c = 0; c < n; ++c) {
                if (a == c || !adj(a, c) || !circle_at(c, a)) continue;
                for (int b = 0; b < n; ++b) {
                    if (b == a || b == c || !adj(a, b) || !adj(b, c)) continue;
                    const bool chain1 = directed(a, b) && arrow_at(c, b);
                    const bool chain2 = arrow_at(b, a) && directed(b, c);
                    if (chain1 || chain2) {
                        put(c, a, Mark::Arrow);
                        break;
                    }
                }
            }
        }
    }

    // R3: a *-> b <-* c, a *-o d o-* c, a and c nonadjacent, d *-o b  =>  d *-> b.
    void r3() {
        for (int d = 0; d < n; ++d) {
            const auto nbs = g.neighbors(d);
            for (int b : nbs) {
                if (!circle_at(b, d)) continue;
                bool fired = false;
                for (int a : nbs) {
                    if (fired) break;
                    if (a == b || !adj(a, b) || !arrow_at(b, a) || !circle_at(d, a)) continue;
                    for (int c : nbs) {
                        if (c == a || c == b || adj(a, c)) continue;
                        if (adj(c, b) && arrow_at(b, c) && circle_at(d, c)) {
                            put(b, d, Mark::Arrow);
                            fired = true;
                            break;
                        }
                    }
                }
            }
        }
    }

    // R4: discriminating path <d, v1, ..., vk, b, c> for b, with b o-* c.
    // Every vi is a collider on the path and a parent of c; d is not adjacent
    // to c. If b is in sepset(d, c), orient b -> c; otherwise vk <-> b <-> c.
    void r4() {
        for (int b = 0; b < n; ++b) {
            for (int c : g.neighbors(b)) {
                if (!circle_at(b, c)) continue;
                r4_search(b, c);
            }
        }
    }

    void r4_search(int b, int c) {
        // Walk backwards from b through colliders that are parents of c.
        // Exhaustive DFS over simple paths; graphs here are small.
        struct Frame {
            int node;
            std::vector<int> path;  // from b backwards: [vk, v_{k-1}, ...]
        };
        std::deque<Frame> stack;
        for (int vk : g.neighbors(b)) {
            if (vk == c) continue;
            if (arrow_at(vk, b) && directed(vk, c)) stack.push_back({vk, {vk}});
        }
        while (!stack.empty()) {
            Frame f = stack.back();
            stack.pop_back();
            const int vi = f.node;
            for (int w : g.neighbors(vi)) {
                if (w == b || w == c) continue;
                if (std::find(f.path.begin(), f.path.end(), w) != f.path.end()) continue;
                if (!arrow_at(vi, w)) continue;  // path edge must point into vi
                if (!adj(w, c)) {
                    // w is the discriminating endpoint d.
                    const auto* sep = g.sepset(w, c);
                    if (sep == nullptr) continue;
                    const int vk = f.path.front();
                    if (std::binary_search(sep->begin(), sep->end(), b)) {
                        put(b, c, Mark::Tail);
                        put(c, b, Mark::Arrow);
                    } else {
                        put(vk, b, Mark::Arrow);
                        put(b, vk, Mark::Arrow);
                        put(b, c, Mark::Arrow);
                        put(c, b, Mark::Arrow);
                    }
                    return;
                }
                // To extend, w must itself be a collider on the path and a
                // parent of c.
                if (arrow_at(w, vi) && directed(w, c)) {
                    Frame nf = f;
                    nf.node = w;
                    nf.path.push_back(w);
                    stack.push_back(std::move(nf));
                }
            }
        }
    }

    // R5: a o-o b with an uncovered circle path <a, c, ..., d, b>, a
    // nonadjacent to d and b nonadjacent to c  =>  the whole cycle becomes
    // undirected (tails everywhere).
    void r5() {
        for (int a = 0; a < n; ++a) {
            for (int b : g.neighbors(a)) {
                if (b < a || !circle_at(a, b) || !circle_at(b, a)) continue;
                std::vector<int> path;
                if (find_circle_path(a, b, path)) {
                    put(a, b, Mark::Tail);
                    put(b, a, Mark::Tail);
                    int prev = a;
                    for (int v : path) {
                        put(prev, v, Mark::Tail);
                        put(v, prev, Mark::Tail);
                        prev = v;
                    }
                    put(prev, b, Mark::Tail);
                    put(b, prev, Mark::Tail);
                }
            }
        }
    }

    bool find_circle_path(int a, int b, std::vector<int>& out) {
        // Uncovered path <a, c, ..., d, b> of circle-circle edges with c
        // nonadjacent to b and d nonadjacent to a. Returns the interior
        // vertices c..d in order.
        struct Frame {
            int node;
            std::vector<int> path;  // interior so far, starting with c
        };
        std::deque<Frame> stack;
        for (int c : g.neighbors(a)) {
            if (c == b || adj(c, b)) continue;
            if (circle_at(a, c) && circle_at(c, a)) stack.push_back({c, {c}});
        }
        while (!stack.empty()) {
            Frame f = stack.back();
            stack.pop_back();
            const int d = f.node;
            // Close the path: d adjacent to b via a circle-circle edge,
            // nonadjacent to a, and triple (pred, d, b) uncovered.
            const int pred = f.path.size() >= 2 ? f.path[f.path.size() - 2] : a;
            if (!adj(d, a) && adj(d, b) && circle_at(d, b) && circle_at(b, d) && !adj(pred, b)) {
                out = f.path;
                return true;
            }
            for (int w : g.neighbors(d)) {
                if (w == a || w == b) continue;
                if (std::find(f.path.begin(), f.path.end(), w) != f.path.end()) continue;
                if (!circle_at(d, w) || !circle_at(w, d)) continue;
                if (adj(pred, w)) continue;  // keep the path uncovered
                Frame nf = f;
                nf.node = w;
                nf.path.push_back(w);
                stack.push_back(std::move(nf));
            }
        }
        return false;
    }

    // R6: a - b o-* c  =>  tail at b on {b, c}.
    void r6() {
        for (int b = 0; b < n; ++b) {
            const auto nbs = g.neighbors(b);
            bool undirected = false;
            for (int a : nbs) {
                if (tail_at(a, b) && tail_at(b, a)) {
                    undirected = true;
                    break;
                }
            }
            if (!undirected) continue;
            for (int c : nbs) {
                if (circle_at(b, c)) put(b, c, Mark::Tail);
            }
        }
    }

    // R7: a -o b o-* c, a and c nonadjacent  =>  tail at b on {b, c}.
    void r7() {
        for (int b = 0; b < n; ++b) {
            const auto nbs = g.neighbors(b);
            for (int a : nbs) {
                if (!(tail_at(a, b) && circle_at(b, a))) continue;
                for (int c : nbs) {
                    if (c == a || adj(a, c)) continue;
                    if (circle_at(b, c)) put(b, c, Mark::Tail);
                }
            }
        }
    }

    // R8: (a -> b -> c) or (a -o b -> c), and a o-> c  =>  a -> c.
    void r8() {
        for (int a = 0; a < n; ++a) {
            for (int c : g.neighbors(a)) {
                if (!(circle_at(a, c) && arrow_at(c, a))) continue;
                for (int b = 0; b < n; ++b) {
                    if (b == a || b == c || !adj(a, b) || !adj(b, c)) continue;
                    const bool first = directed(a, b) || (tail_at(a, b) && circle_at(b, a));
                    if (first && directed(b, c)) {
                        put(a, c, Mark::Tail);
                        break;
                    }
                }
            }
        }
    }

    // R9: a o-> c with an uncovered possibly-directed path <a, b, ..., c>,
    // b nonadjacent to c  =>  a -> c.
    void r9() {
        for (int a = 0; a < n; ++a) {
            for (int c : g.neighbors(a)) {
                if (!(circle_at(a, c) && arrow_at(c, a))) continue;
                if (has_uncovered_pd_path(a, c, /*skip_direct=*/true)) put(a, c, Mark::Tail);
            }
        }
    }

    // Uncovered possibly-directed path from a to target whose first
    // intermediate node is nonadjacent to target.
    bool has_uncovered_pd_path(int a, int target, bool skip_direct) {
        struct Frame {
            int node;
            std::vector<int> path;
        };
        std::deque<Frame> stack;
        for (int b : g.neighbors(a)) {
            if (b == target) continue;
            if (skip_direct && adj(b, target)) continue;
            if (pd_step(a, b)) stack.push_back({b, {b}});
        }
        while (!stack.empty()) {
            Frame f = stack.back();
            stack.pop_back();
            for (int w : g.neighbors(f.node)) {
                if (w == a) continue;
                if (std::find(f.path.begin(), f.path.end(), w) != f.path.end()) continue;
                if (!pd_step(f.node, w)) continue;
                const int before = f.path.size() >= 2 ? f.path[f.path.size() - 2] : a;
                if (adj(before, w)) continue;  // covered triple
                if (w == target) return true;
                Frame nf = f;
                nf.node = w;
                nf.path.push_back(w);
                stack.push_back(std::move(nf));
            }
        }
        return false;
    }

    // First vertices of uncovered possibly-directed paths from a to target
    // (the target itself when the single edge a-target qualifies).
    std::set<int> pd_path_first_vertices(int a, int target) {
        std::set<int> firsts;
        if (pd_step(a, target)) firsts.insert(target);
        struct Frame {
            int node;
            int first;
            std::vector<int> path;
        };
        std::deque<Frame> stack;
        for (int b : g.neighbors(a)) {
            if (b == target) continue;
            if (pd_step(a, b)) stack.push_back({b, b, {b}});
        }
        while (!stack.empty()) {
            Frame f = stack.back();
            stack.pop_back();
            for (int w : g.neighbors(f.node)) {
                if (w == a) continue;
                if (std::find(f.path.begin(), f.path.end(), w) != f.path.end()) continue;
                if (!pd_step(f.node, w)) continue;
                const int before = f.path.size() >= 2 ? f.path[f.path.size() - 2] : a;
                if (adj(before, w)) continue;
                if (w == target) {
                    firsts.insert(f.first);
                    continue;
                }
                Frame nf = f;
                nf.node = w;
                nf.path.push_back(w);
                stack.push_back(std::move(nf));
            }
        }
        return firsts;
    }

    // R10: a o-> c, b -> c <- d, uncovered p.d. paths from a to b and from a
    // to d whose first vertices mu != omega are nonadjacent  =>  a -> c.
    void r10() {
        for (int a = 0; a < n; ++a) {
            for (int c : g.neighbors(a)) {
                if (!(circle_at(a, c) && arrow_at(c, a))) continue;
                std::vector<int> parents;
                for (int p : g.neighbors(c)) {
                    if (p != a && directed(p, c)) parents.push_back(p);
                }
                bool fired = false;
                for (size_t x = 0; x < parents.size() && !fired; ++x) {
                    for (size_t y = x + 1; y < parents.size() && !fired; ++y) {
                        const auto mu_set = pd_path_first_vertices(a, parents[x]);
                        if (mu_set.empty()) continue;
                        const auto om_set = pd_path_first_vertices(a, parents[y]);
                        for (int mu : mu_set) {
                            for (int om : om_set) {
                                if (mu != om && !adj(mu, om)) {
                                    put(a, c, Mark::Tail);
                                    fired = true;
                                    break;
                                }
                            }
                            if (fired) break;
                        }
                    }
                }
            }
        }
    }
};

}  // namespace

void Pag::apply_fci_rules(const FciRuleConfig& cfg) {
    Rules rules{*this, n_};
    do {
        rules.changed = false;
        rules.r1();
        rules.r2();
        rules.r3();
        rules.r4();
        if (cfg.selection_bias_rules) {
            rules.r5();
            rules.r6();
            rules.r7();
        }
        rules.r8();
        rules.r9();
        rules.r10();
    } while (rules.changed);
}

bool pag_equal(const Pag& a, const Pag& b) {
    if (a.node_count() != b.node_count()) return false;
    const auto ea = a.edges();
    const auto eb = b.edges();
    if (ea != eb) return false;
    for (const auto& [i, j] : ea) {
        if (a.mark_at(i, j) != b.mark_at(i, j)) return false;
        if (a.mark_at(j, i) != b.mark_at(j, i)) return false;
    }
    return true;
}

void reorient(Pag& g, const FciRuleConfig& cfg) {
    g.reset_marks_to_circle();
    g.orient_v_structures();
    g.apply_fci_rules(cfg);
}

std::vector<int> possible_d_sep(const Pag& g, int x) {
    std::set<int> result;
    std::set<std::pair<int, int>> visited;  // (prev, cur) edge states
    std::deque<std::pair<int, int>> queue;
    for (int nb : g.neighbors(x)) {
        result.insert(nb);
        queue.emplace_back(x, nb);
        visited.insert({x, nb});
    }
    while (!queue.empty()) {
        auto [prev, cur] = queue.front();
        queue.pop_front();
        for (int nxt : g.neighbors(cur)) {
            if (nxt == prev || nxt == x) continue;
            const bool collider = g.mark_at(cur, prev) == Mark::Arrow &&
                                  g.mark_at(cur, nxt) == Mark::Arrow;
            const bool triangle = g.has_edge(prev, nxt);
            if (!collider && !triangle) continue;
            if (visited.insert({cur, nxt}).second) {
                result.insert(nxt);
                queue.emplace_back(cur, nxt);
            }
        }
    }
    return {result.begin(), result.end()};
}

}  // namespace causalattn

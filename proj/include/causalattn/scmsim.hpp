#pragma once

#include <cstdint>
#include <random>
#include <set>
#include <span>
#include <vector>

#include "causalattn/attnmat.hpp"
#include "causalattn/pag.hpp"

namespace causalattn {

// Linear-Gaussian structural model: strictly lower-triangular weight matrix
// over causally sorted nodes, optional latent confounders (parentless by
// construction), diagonal exogenous covariance (defaults to the identity).
struct Scm {
    int n = 0;
    Eigen::MatrixXd g;           // strictly lower triangular weights
    std::set<int> latents;
    Eigen::VectorXd exo_cov;     // diagonal of C_U

    // Directed adjacency: true where g(child, parent) != 0.
    bool has_edge(int parent, int child) const { return g(child, parent) != 0.0; }
    std::vector<int> parents(int node) const;
    std::vector<int> children(int node) const;
    std::vector<int> observed_nodes() const;
};

struct ScmOptions {
    int n = 0;
    double edge_density = 0.3;
    double weight_min = 0.5;
    double weight_max = 1.5;
    int latent_count = 0;
    std::uint64_t seed = 0;
    // Strictly positive weights keep the synthesized attention nonnegative
    // and rule out path cancellation; the signed mode exists for stress tests.
    bool signed_weights = false;
};

// Each lower-triangular cell independently nonzero with the given density.
// Latents are placed on the earliest-ordered nodes and must have at least two
// children and no parents; resampled up to 1000 times before
// CannotPlaceLatentsError.
Scm random_scm(const ScmOptions& opts);

// (I - G)^{-1}: entry (i, j) is the cumulative effect of j on i over all
// directed paths. Computed by forward substitution.
EffectMatrix effect_matrix(const Scm& scm);

// Removes the latent rows and columns; stays uni-triangular because latents
// have no observed parents.
EffectMatrix marginalize(const EffectMatrix& m, const std::set<int>& latents);

// C_X = (I - G)^{-1} C_U (I - G)^{-T} over all nodes.
CovarianceMatrix scm_covariance(const Scm& scm);

// Covariance over observed nodes only: the full covariance with latent rows
// and columns dropped, so confounding correlations are retained.
CovarianceMatrix observed_covariance(const Scm& scm);
CorrelationMatrix observed_correlation(const Scm& scm);

// m i.i.d. draws of the endogenous vector, one per row.
Eigen::MatrixXd sample_data(const Scm& scm, int m, std::uint64_t seed);

// Exact d-separation of i and j given z in the SCM's DAG, by reachability
// with collider activation through ancestors of z.
bool d_separated(const Scm& scm, int i, int j, std::span<const int> z);

// Ground-truth PAG over observed nodes: exhaustive-subset FCI driven by the
// d-separation oracle (latents never enter a conditioning set), oriented with
// the same rule set as discovery. Node k of the output is the k-th observed
// node of the SCM.
Pag oracle_fci(const Scm& scm, const FciRuleConfig& rules = {});

// Attention head implied by the SCM: marginalized effect matrix row-normalized
// back into row-stochastic form.
AttentionMatrix attention_from_scm(const Scm& scm);

// Structure-free control: i.i.d. uniform entries on the lower triangle,
// row-normalized.
AttentionMatrix random_attention(int n, std::uint64_t seed);

// The canonical 0 -> 1 -> 2 -> ... chain with constant edge weight.
Scm chain_scm(int n, double weight = 1.0);

}  // namespace causalattn

#include <doctest.h>

#include <cmath>

#include "causalattn/citest.hpp"
#include "causalattn/scmsim.hpp"

using namespace causalattn;

namespace {

// 0 -> 1 -> 2 plus direct 0 -> 2: the classic shielded triple.
Scm triangle_scm() {
    Scm scm;
    scm.n = 3;
    scm.g = Eigen::MatrixXd::Zero(3, 3);
    scm.g(1, 0) = 1.0;
    scm.g(2, 1) = 1.0;
    scm.g(2, 0) = 1.0;
    scm.exo_cov = Eigen::VectorXd::Ones(3);
    return scm;
}

// Latent 0 confounds observed 2 and 3; 1 -> 2 and 1 -> 3 are real edges.
Scm confounded_scm() {
    Scm scm;
    scm.n = 4;
    scm.g = Eigen::MatrixXd::Zero(4, 4);
    scm.g(2, 0) = 1.0;
    scm.g(3, 0) = 1.0;
    scm.latents = {0};
    scm.exo_cov = Eigen::VectorXd::Ones(4);
    return scm;
}

}  // namespace

TEST_CASE("random_scm respects density bounds and latent constraints") {
    ScmOptions opts;
    opts.n = 8;
    opts.edge_density = 0.5;
    opts.latent_count = 1;
    opts.seed = 3;
    const auto scm = random_scm(opts);
    CHECK(scm.latents == std::set<int>{0});
    CHECK(scm.parents(0).empty());
    CHECK(scm.children(0).size() >= 2);
    for (int i = 0; i < scm.n; ++i) {
        for (int j = i; j < scm.n; ++j) CHECK(scm.g(i, j) == 0.0);
        for (int j = 0; j < i; ++j) {
            if (scm.g(i, j) != 0.0) {
                CHECK(scm.g(i, j) >= 0.5);
                CHECK(scm.g(i, j) <= 1.5);
            }
        }
    }
}

TEST_CASE("random_scm is reproducible by seed") {
    ScmOptions opts;
    opts.n = 7;
    opts.edge_density = 0.4;
    opts.seed = 99;
    const auto a = random_scm(opts);
    const auto b = random_scm(opts);
    CHECK((a.g - b.g).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("impossible latent placement raises after resampling") {
    ScmOptions opts;
    opts.n = 3;
    opts.edge_density = 0.0;  // no edges, so no latent can have two children
    opts.latent_count = 1;
    CHECK_THROWS_AS(random_scm(opts), CannotPlaceLatentsError);
}

TEST_CASE("effect matrix accumulates path products") {
    const auto m = effect_matrix(triangle_scm());
    CHECK(m(0, 0) == 1.0);
    CHECK(m(1, 0) == doctest::Approx(1.0));
    // Effect of 0 on 2: direct (1) plus through 1 (1 * 1).
    CHECK(m(2, 0) == doctest::Approx(2.0));
    CHECK(m(2, 1) == doctest::Approx(1.0));
}

TEST_CASE("effect matrix inverts I minus G to machine precision") {
    ScmOptions opts;
    opts.n = 8;
    opts.edge_density = 0.6;
    opts.seed = 5;
    const auto scm = random_scm(opts);
    const auto m = effect_matrix(scm);
    const Eigen::MatrixXd product =
        (Eigen::MatrixXd::Identity(scm.n, scm.n) - scm.g) * m.entries();
    CHECK((product - Eigen::MatrixXd::Identity(scm.n, scm.n)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("marginalizing a parentless latent deletes its row and column") {
    const auto full = effect_matrix(confounded_scm());
    const auto obs = marginalize(full, {0});
    CHECK(obs.size() == 3);
    CHECK(obs(0, 0) == 1.0);
    CHECK(obs(1, 0) == 0.0);  // 1 has no observed parents
    CHECK(obs(2, 0) == 0.0);
    CHECK_THROWS_AS(marginalize(full, {7}), Error);
}

TEST_CASE("scm covariance matches the quadratic form") {
    const auto scm = triangle_scm();
    const auto c = scm_covariance(scm);
    CHECK(c(0, 0) == doctest::Approx(1.0));
    CHECK(c(1, 1) == doctest::Approx(2.0));
    CHECK(c(2, 2) == doctest::Approx(6.0));  // var(2*u0 + u1 + u2)
    CHECK(c(2, 0) == doctest::Approx(2.0));
    CHECK(c(2, 1) == doctest::Approx(3.0));
}

TEST_CASE("observed covariance keeps confounding correlations") {
    const auto c = observed_covariance(confounded_scm());
    CHECK(c.size() == 3);
    // Observed nodes are 1, 2, 3; cov(2, 3) = 1 through the latent.
    CHECK(c(1, 2) == doctest::Approx(1.0));
    CHECK(c(0, 1) == doctest::Approx(0.0));
}

TEST_CASE("sample covariance converges to the model covariance") {
    const auto scm = triangle_scm();
    const auto data = sample_data(scm, 200000, 12);
    const Eigen::MatrixXd centered = data.rowwise() - data.colwise().mean();
    const Eigen::MatrixXd emp = centered.transpose() * centered / (data.rows() - 1.0);
    const auto c = scm_covariance(scm);
    CHECK((emp - c.entries()).cwiseAbs().maxCoeff() < 0.1);
}

TEST_CASE("d-separation on the chain and the collider") {
    const auto chain = chain_scm(3);
    CHECK_FALSE(d_separated(chain, 0, 2, {}));
    const int mid[] = {1};
    CHECK(d_separated(chain, 0, 2, mid));

    Scm collider;
    collider.n = 3;
    collider.g = Eigen::MatrixXd::Zero(3, 3);
    collider.g(2, 0) = 1.0;
    collider.g(2, 1) = 1.0;
    collider.exo_cov = Eigen::VectorXd::Ones(3);
    CHECK(d_separated(collider, 0, 1, {}));
    const int sink[] = {2};
    CHECK_FALSE(d_separated(collider, 0, 1, sink));
}

TEST_CASE("d-separation activates colliders through descendants in Z") {
    // 0 -> 2 <- 1, 2 -> 3: conditioning on 3 opens the collider at 2.
    Scm scm;
    scm.n = 4;
    scm.g = Eigen::MatrixXd::Zero(4, 4);
    scm.g(2, 0) = 1.0;
    scm.g(2, 1) = 1.0;
    scm.g(3, 2) = 1.0;
    scm.exo_cov = Eigen::VectorXd::Ones(4);
    const int desc[] = {3};
    CHECK_FALSE(d_separated(scm, 0, 1, desc));
}

TEST_CASE("d-separation agrees with vanishing partial correlation") {
    // Faithfulness check: positive weights rule out path cancellation, so
    // zero partial correlation and d-separation coincide.
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        ScmOptions opts;
        opts.n = 5;
        opts.edge_density = 0.4;
        opts.seed = seed;
        const auto scm = random_scm(opts);
        const auto r = observed_correlation(scm);
        for (int i = 0; i < 5; ++i) {
            for (int j = i + 1; j < 5; ++j) {
                for (int mask = 0; mask < 32; ++mask) {
                    if (mask & ((1 << i) | (1 << j))) continue;
                    std::vector<int> z;
                    for (int k = 0; k < 5; ++k)
                        if (mask & (1 << k)) z.push_back(k);
                    const double rho = partial_correlation(r, i, j, z);
                    CHECK(d_separated(scm, i, j, z) == (std::abs(rho) < 1e-7));
                }
            }
        }
    }
}

TEST_CASE("oracle PAG of the chain has two edges and no collider") {
    const auto g = oracle_fci(chain_scm(3));
    CHECK(g.edge_count() == 2);
    CHECK(g.has_edge(0, 1));
    CHECK(g.has_edge(1, 2));
    CHECK(g.mark_at(1, 0) != Mark::Arrow);
}

TEST_CASE("oracle PAG marks a genuine confounder with a bidirected edge") {
    // Latent L confounds 2 and 3; independent observed parents 1 -> 2 and
    // an extra observed root force arrowheads on both ends of 2 <-> 3.
    Scm scm;
    scm.n = 5;
    scm.g = Eigen::MatrixXd::Zero(5, 5);
    scm.g(3, 0) = 1.0;  // L -> 3
    scm.g(4, 0) = 1.0;  // L -> 4
    scm.g(3, 1) = 1.0;  // 1 -> 3
    scm.g(4, 2) = 1.0;  // 2 -> 4
    scm.latents = {0};
    scm.exo_cov = Eigen::VectorXd::Ones(5);
    const auto g = oracle_fci(scm);
    // Observed relabeling: 1, 2, 3, 4 become 0, 1, 2, 3.
    REQUIRE(g.has_edge(2, 3));
    CHECK(g.mark_at(2, 3) == Mark::Arrow);
    CHECK(g.mark_at(3, 2) == Mark::Arrow);
}

TEST_CASE("attention synthesized from an SCM validates and round trips") {
    ScmOptions opts;
    opts.n = 6;
    opts.edge_density = 0.5;
    opts.seed = 21;
    const auto scm = random_scm(opts);
    const auto a = attention_from_scm(scm);
    CHECK(a.size() == 6);
    const auto m = to_uni_triangular(a);
    const auto expected = effect_matrix(scm);
    CHECK((m.entries() - expected.entries()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("random attention is valid and seed-reproducible") {
    const auto a = random_attention(5, 8);
    const auto b = random_attention(5, 8);
    CHECK((a.entries() - b.entries()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(a.entries().row(4).sum() == doctest::Approx(1.0).epsilon(1e-12));
}

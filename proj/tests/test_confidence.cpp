#include <doctest.h>

#include <cmath>

#include "causalattn/confidence.hpp"
#include "causalattn/scmsim.hpp"

using namespace causalattn;

namespace {

DiscoveryTrace make_trace(std::initializer_list<std::pair<double, int>> pvals_with_cond) {
    DiscoveryTrace trace;
    int node = 0;
    for (const auto& [p, cond_size] : pvals_with_cond) {
        CiRecord rec;
        rec.i = node++;
        rec.j = node++;
        for (int k = 0; k < cond_size; ++k) rec.cond.push_back(100 + k);
        rec.p_value = p;
        rec.independent = p >= 0.01;
        trace.records.push_back(rec);
    }
    return trace;
}

}  // namespace

TEST_CASE("pvalue entropy of an empty or single-cell population") {
    CHECK(pvalue_entropy({}, 10) == 0.0);
    const std::vector<double> same{0.55, 0.57, 0.59};
    CHECK(pvalue_entropy(same, 10) == doctest::Approx(0.0));
}

TEST_CASE("pvalue entropy of a two-cell even split is ln 2") {
    const std::vector<double> p{0.05, 0.15};
    CHECK(pvalue_entropy(p, 10) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("uniform occupancy over all ten cells gives ln 10") {
    std::vector<double> p;
    for (int k = 0; k < 10; ++k) p.push_back(0.05 + 0.1 * k);
    CHECK(pvalue_entropy(p, 10) == doctest::Approx(std::log(10.0)).epsilon(1e-12));
}

TEST_CASE("p = 1 lands in the last cell, p = 0 in the first") {
    const std::vector<double> edge{0.0, 1.0};
    CHECK(pvalue_entropy(edge, 10) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    const std::vector<double> both_last{1.0, 0.95};
    CHECK(pvalue_entropy(both_last, 10) == doctest::Approx(0.0));
}

TEST_CASE("entropy requires at least two bins") {
    CHECK_THROWS_AS(pvalue_entropy(std::vector<double>{0.5}, 1), Error);
    CHECK_NOTHROW(pvalue_entropy(std::vector<double>{0.5}, 2));
}

TEST_CASE("split at alpha puts the boundary on the independence side") {
    const auto trace = make_trace({{0.005, 0}, {0.01, 0}, {0.5, 0}});
    const auto [ind, dep] = split_pvalues(trace, 0.01, CondFilter::All);
    CHECK(ind == std::vector<double>{0.01, 0.5});
    CHECK(dep == std::vector<double>{0.005});
}

TEST_CASE("cond filters select records by conditioning-set size") {
    const auto trace = make_trace({{0.2, 0}, {0.3, 1}, {0.4, 2}, {0.001, 0}});
    auto [i0, d0] = split_pvalues(trace, 0.01, CondFilter::Cond0);
    CHECK(i0.size() == 1);
    CHECK(d0.size() == 1);
    auto [i1, d1] = split_pvalues(trace, 0.01, CondFilter::Cond1);
    CHECK(i1 == std::vector<double>{0.3});
    CHECK(d1.empty());
    auto [i01, d01] = split_pvalues(trace, 0.01, CondFilter::Cond01);
    CHECK(i01.size() == 2);
    auto [ia, da] = split_pvalues(trace, 0.01, CondFilter::All);
    CHECK(ia.size() == 3);
    CHECK(da.size() == 1);
}

TEST_CASE("confidence score is h_ind minus h_dep") {
    // ind population occupies two cells evenly (h = ln 2), dep one cell.
    const auto trace = make_trace({{0.15, 0}, {0.25, 0}, {0.001, 0}, {0.002, 0}});
    const auto rep = confidence_score(trace, 0.01, CondFilter::All, 10);
    CHECK(rep.h_ind == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(rep.h_dep == doctest::Approx(0.0));
    CHECK(rep.r_score == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK_FALSE(rep.degenerate);
}

TEST_CASE("degenerate when a population is empty; empty trace scores zero") {
    const auto trace = make_trace({{0.5, 0}, {0.6, 0}});
    const auto rep = confidence_score(trace, 0.01, CondFilter::All, 10);
    CHECK(rep.degenerate);
    CHECK(rep.r_score == doctest::Approx(std::log(2.0)));
    const auto empty = confidence_score(DiscoveryTrace{}, 0.01, CondFilter::All, 10);
    CHECK(empty.degenerate);
    CHECK(empty.r_score == 0.0);
}

TEST_CASE("filter round trips through strings") {
    for (auto f : {CondFilter::Cond0, CondFilter::Cond1, CondFilter::Cond01, CondFilter::All}) {
        CHECK(cond_filter_from_string(to_string(f)) == f);
    }
    CHECK_THROWS_AS(cond_filter_from_string("cond2"), Error);
}

TEST_CASE("sequence score averages heads and counts degenerate ones at zero") {
    DiscoveryConfig cfg;
    cfg.ci.n_eff = 200;
    std::vector<AttentionMatrix> heads;
    heads.push_back(attention_from_scm(chain_scm(6)));
    heads.push_back(random_attention(6, 4));
    const auto results = learn_all_heads(heads, cfg);
    const auto score = sequence_score(results, 0.01, CondFilter::All, 10);
    double manual = 0.0;
    for (const auto& res : results) {
        const auto rep = confidence_score(res.trace, 0.01, CondFilter::All, 10);
        if (!rep.degenerate) manual += rep.r_score;
    }
    manual /= static_cast<double>(results.size());
    CHECK(score.mean_r == doctest::Approx(manual).epsilon(1e-12));
    CHECK_THROWS_AS(sequence_score({}, 0.01, CondFilter::All, 10), Error);
}

TEST_CASE("group difference wraps the Welch interval") {
    const std::vector<double> a{1.1, 2.3, 0.7, 1.9, 1.5};
    const std::vector<double> b{0.9, 1.2, 0.4, 1.1};
    const auto diff = group_difference(a, b);
    CHECK(diff.mean_diff == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(diff.welch.t == doctest::Approx(1.7955168049937393).epsilon(1e-12));
}

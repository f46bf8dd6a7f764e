#include <doctest.h>

#include "causalattn/harness.hpp"

using namespace causalattn;

namespace {

HeadScoreTable small_table() {
    HeadScoreTable t;
    t.rows = {{"s0", 0, 0.1}, {"s0", 1, 0.9}, {"s1", 0, 0.5},
              {"s1", 1, 0.3}, {"s2", 0, 0.7}};
    return t;
}

}  // namespace

TEST_CASE("nearest-rank percentiles over five scores") {
    // Sorted scores: 0.1 0.3 0.5 0.7 0.9. Rank(20) = ceil(1) = 1 -> 0.1,
    // rank(50) = ceil(2.5) = 3 -> 0.5, rank(90) = ceil(4.5) = 5 -> 0.9.
    const auto t = small_table();
    const std::vector<double> pct{20.0, 50.0, 90.0};
    const auto th = percentile_thresholds(t, pct);
    REQUIRE(th.size() == 3);
    CHECK(th[0] == doctest::Approx(0.1));
    CHECK(th[1] == doctest::Approx(0.5));
    CHECK(th[2] == doctest::Approx(0.9));
    CHECK_THROWS_AS(percentile_thresholds(HeadScoreTable{}, pct), Error);
    const std::vector<double> bad{100.0};
    CHECK_THROWS_AS(percentile_thresholds(t, bad), Error);
    HeadScoreTable four;
    four.rows = {{"s", 0, 0.1}, {"s", 1, 0.2}, {"s", 2, 0.3}, {"s", 3, 0.4}};
    const std::vector<double> fifty{50.0};
    CHECK(percentile_thresholds(four, fifty)[0] == doctest::Approx(0.2));
}

TEST_CASE("ascending prune masks drop heads strictly below the threshold") {
    const auto masks = prune_masks(small_table(), 0.5, PruneOrder::Ascending);
    CHECK(masks.pruned.at("s0") == std::set<int>{0});
    CHECK(masks.pruned.at("s1") == std::set<int>{1});
    CHECK(masks.pruned.at("s2").empty());
}

TEST_CASE("descending prune masks drop heads strictly above the threshold") {
    const auto masks = prune_masks(small_table(), 0.5, PruneOrder::Descending);
    CHECK(masks.pruned.at("s0") == std::set<int>{1});
    CHECK(masks.pruned.at("s1").empty());
    CHECK(masks.pruned.at("s2") == std::set<int>{0});
}

TEST_CASE("asc and desc masks partition the heads away from the threshold") {
    const auto t = small_table();
    const auto asc = prune_masks(t, 0.4, PruneOrder::Ascending);
    const auto desc = prune_masks(t, 0.4, PruneOrder::Descending);
    for (const auto& row : t.rows) {
        const bool in_asc = asc.pruned.at(row.sequence_id).count(row.head_index) > 0;
        const bool in_desc = desc.pruned.at(row.sequence_id).count(row.head_index) > 0;
        CHECK_FALSE((in_asc && in_desc));
        if (row.r_score != 0.4) CHECK(in_asc != in_desc);
    }
}

TEST_CASE("accuracy curve normalizes by the unpruned baseline") {
    std::vector<PruneOutcome> outcomes{
        {0.0, "a", true},  {0.0, "b", true},  {0.0, "c", false}, {0.0, "d", true},
        {20.0, "a", true}, {20.0, "b", false}, {20.0, "c", false}, {20.0, "d", true},
        {40.0, "a", false}, {40.0, "b", false}, {40.0, "c", false}, {40.0, "d", true},
    };
    const auto curve = accuracy_curve(outcomes);
    REQUIRE(curve.points.size() == 3);
    CHECK(curve.points[0].percentile == 0.0);
    CHECK(curve.points[0].accuracy == doctest::Approx(0.75));
    CHECK(curve.points[0].normalized_accuracy == doctest::Approx(1.0));
    CHECK(curve.points[1].normalized_accuracy == doctest::Approx(2.0 / 3.0));
    CHECK(curve.points[2].normalized_accuracy == doctest::Approx(1.0 / 3.0));
    // Raw trapezoid over the percentile axis: a flat curve at 1.0 would give
    // exactly the 40-point range.
    const double expected_auc =
        20.0 * (1.0 + 2.0 / 3.0) / 2.0 + 20.0 * (2.0 / 3.0 + 1.0 / 3.0) / 2.0;
    CHECK(curve.auc == doctest::Approx(expected_auc));
}

TEST_CASE("accuracy curve demands the baseline column and a full grid") {
    std::vector<PruneOutcome> no_base{{10.0, "a", true}};
    CHECK_THROWS_AS(accuracy_curve(no_base), Error);
    std::vector<PruneOutcome> ragged{
        {0.0, "a", true}, {0.0, "b", true}, {10.0, "a", true}};
    CHECK_THROWS_AS(accuracy_curve(ragged), Error);
}

TEST_CASE("equal-count confidence bins, larger bins first") {
    // Seven scores into three bins: sizes 3, 2, 2.
    const std::vector<double> scores{0.7, 0.1, 0.5, 0.3, 0.9, 0.2, 0.6};
    const std::vector<char> legal{1, 0, 1, 0, 1, 0, 1};
    const auto bins = confidence_accuracy_bins(scores, legal, 3);
    REQUIRE(bins.bins.size() == 3);
    CHECK(bins.bins[0].count == 3);
    CHECK(bins.bins[1].count == 2);
    CHECK(bins.bins[2].count == 2);
    // Ascending score: {0.1, 0.2, 0.3}, {0.5, 0.6}, {0.7, 0.9}.
    CHECK(bins.bins[0].mean_accuracy == doctest::Approx(0.0));
    CHECK(bins.bins[1].mean_accuracy == doctest::Approx(1.0));
    CHECK(bins.bins[2].mean_accuracy == doctest::Approx(1.0));
    CHECK(bins.bins[0].r_low == doctest::Approx(0.1));
    CHECK(bins.bins[0].r_high == doctest::Approx(0.3));
    CHECK(bins.overall_accuracy == doctest::Approx(4.0 / 7.0));
}

TEST_CASE("ngram mean over a single self-matching sequence") {
    const SequenceDataset train{{{1, 2, 3}}};
    const SequenceDataset probe{{{1, 2, 3}}};
    const auto res = ngram_occurrence_mean(train, probe, 3, 2);
    CHECK(res.mu == doctest::Approx(1.0));
    CHECK(res.probe_used == 1);
    CHECK(res.train_used == 1);
}

TEST_CASE("ngram counts overlapping occurrences") {
    const SequenceDataset train{{{5, 5, 5, 5}}};
    const SequenceDataset probe{{{9, 9, 5, 5}}};
    // Probe bigram (5, 5) occurs 3 times in the trimmed train sequence.
    const auto res = ngram_occurrence_mean(train, probe, 4, 2);
    CHECK(res.mu == doctest::Approx(3.0));
}

TEST_CASE("ngram trims to ell and skips shorter sequences") {
    const SequenceDataset train{{{1, 2, 3, 4, 9, 9}, {1, 2}}};
    const SequenceDataset probe{{{7, 3, 4, 8}, {1}}};
    // Trim to ell = 4: train {1,2,3,4} (the short one is skipped), probe
    // {7,3,4} is too short? No: probe {7,3,4,8} trims to itself; final bigram
    // (4, 8) never occurs. Probe {1} is skipped.
    const auto res = ngram_occurrence_mean(train, probe, 4, 2);
    CHECK(res.train_used == 1);
    CHECK(res.train_skipped == 1);
    CHECK(res.probe_used == 1);
    CHECK(res.probe_skipped == 1);
    CHECK(res.mu == doctest::Approx(0.0));
}

TEST_CASE("anchor_end matches the suffix only") {
    const SequenceDataset train{{{3, 4, 1, 3, 4}}};
    const SequenceDataset probe{{{9, 9, 9, 3, 4}}};
    const auto anywhere = ngram_occurrence_mean(train, probe, 5, 2);
    CHECK(anywhere.mu == doctest::Approx(2.0));
    NgramOptions opts;
    opts.anchor_end = true;
    const auto anchored = ngram_occurrence_mean(train, probe, 5, 2, opts);
    CHECK(anchored.mu == doctest::Approx(1.0));
}

TEST_CASE("exclude_self removes identical trimmed train sequences") {
    const SequenceDataset train{{{1, 2, 3}, {1, 2, 3}, {4, 2, 3}}};
    const SequenceDataset probe{{{1, 2, 3}}};
    NgramOptions opts;
    opts.exclude_self = true;
    const auto res = ngram_occurrence_mean(train, probe, 3, 2, opts);
    // Both copies of the probe sequence skip the count; the denominator stays
    // the full trimmed-train size, so only {4,2,3} contributes its one match.
    CHECK(res.train_used == 3);
    CHECK(res.mu == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("mu grows as the n-gram shortens") {
    SequenceDataset train;
    for (int s = 0; s < 20; ++s) {
        Sequence seq;
        for (int t = 0; t < 30; ++t) seq.push_back((s * 7 + t * 3) % 5);
        train.sequences.push_back(seq);
    }
    const SequenceDataset probe{{train.sequences[0]}};
    double prev = -1.0;
    for (int n = 6; n >= 1; --n) {
        const auto res = ngram_occurrence_mean(train, probe, 30, n);
        CHECK(res.mu >= prev);
        prev = res.mu;
    }
}

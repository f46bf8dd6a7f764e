#pragma once

#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "causalattn/errors.hpp"

namespace causalattn {

// One structural-confidence score per (sequence, head).
struct HeadScoreTable {
    struct Row {
        std::string sequence_id;
        int head_index = 0;
        double r_score = 0.0;
    };
    std::vector<Row> rows;
};

enum class PruneOrder {
    Ascending,   // prune heads scoring below the threshold
    Descending,  // reverse-order control: prune heads scoring above it
};

// Per-sequence sets of pruned head indices at one threshold.
struct PruneMaskSet {
    double threshold = 0.0;
    PruneOrder order = PruneOrder::Ascending;
    std::map<std::string, std::set<int>> pruned;  // sequence id -> head indices
};

// Nearest-rank percentiles (1-based index ceil(p/100 * N)) over the ascending
// sort of all scores. Throws Error on an empty table.
std::vector<double> percentile_thresholds(const HeadScoreTable& scores,
                                          std::span<const double> percentiles);

PruneMaskSet prune_masks(const HeadScoreTable& scores, double threshold, PruneOrder order);

struct AccuracyPoint {
    double percentile = 0.0;
    double accuracy = 0.0;            // fraction of legal outcomes
    double normalized_accuracy = 0.0; // relative to the unpruned point
};

struct AccuracyCurve {
    std::vector<AccuracyPoint> points;  // ascending percentile
    double auc = 0.0;                   // trapezoid over normalized accuracy
};

// One legality flag per (pruning percentile, sequence). The percentile-0
// column is the unpruned baseline and must be present; a missing
// (percentile, sequence) cell throws Error naming it.
struct PruneOutcome {
    double percentile = 0.0;
    std::string sequence_id;
    bool legal = false;
};

AccuracyCurve accuracy_curve(std::span<const PruneOutcome> outcomes);

struct ConfidenceBin {
    double r_low = 0.0;
    double r_high = 0.0;
    double mean_accuracy = 0.0;
    int count = 0;
};

struct ConfidenceAccuracy {
    std::vector<ConfidenceBin> bins;  // ascending score
    double overall_accuracy = 0.0;
};

// Equal-count bins over the scores (largest bins first when the split is
// uneven), each reporting its score interval and mean legality.
ConfidenceAccuracy confidence_accuracy_bins(std::span<const double> seq_scores,
                                            std::span<const char> legal_flags, int bin_count);

using Sequence = std::vector<int>;

struct SequenceDataset {
    std::vector<Sequence> sequences;
};

struct NgramOptions {
    // Match the probe n-gram only at the end of each trimmed training
    // sequence instead of anywhere.
    bool anchor_end = false;
    // Skip training sequences identical to the probe sequence (for the
    // train-vs-train comparison).
    bool exclude_self = false;
};

struct NgramResult {
    double mu = 0.0;
    int probe_used = 0;
    int probe_skipped = 0;  // shorter than ell
    int train_used = 0;
    int train_skipped = 0;
};

// For each probe sequence trimmed to ell, counts occurrences of its final
// n_gram tokens across all trimmed training sequences (overlaps allowed),
// divides by the trimmed training-corpus size and averages over the probe.
NgramResult ngram_occurrence_mean(const SequenceDataset& train, const SequenceDataset& probe,
                                  int ell, int n_gram, const NgramOptions& opts = {});

}  // namespace causalattn

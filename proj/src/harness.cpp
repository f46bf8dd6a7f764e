#include "causalattn/harness.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace causalattn {

std::vector<double> percentile_thresholds(const HeadScoreTable& scores,
                                          std::span<const double> percentiles) {
    if (scores.rows.empty()) throw Error("percentile_thresholds: empty score table");
    std::vector<double> sorted;
    sorted.reserve(scores.rows.size());
    for (const auto& row : scores.rows) sorted.push_back(row.r_score);
    std::sort(sorted.begin(), sorted.end());
    const auto n = static_cast<double>(sorted.size());
    std::vector<double> out;
    out.reserve(percentiles.size());
    for (double p : percentiles) {
        if (p <= 0.0 || p >= 100.0) throw Error("percentiles must lie strictly inside (0, 100)");
        auto rank = static_cast<long>(std::ceil(p / 100.0 * n));  // 1-based nearest rank
        rank = std::max(rank, 1L);
        out.push_back(sorted[static_cast<size_t>(rank - 1)]);
    }
    return out;
}

PruneMaskSet prune_masks(const HeadScoreTable& scores, double threshold, PruneOrder order) {
    PruneMaskSet masks;
    masks.threshold = threshold;
    masks.order = order;
    for (const auto& row : scores.rows) {
        masks.pruned.try_emplace(row.sequence_id);  // sequences with no pruned heads still appear
        const bool prune = order == PruneOrder::Ascending ? row.r_score < threshold
                                                          : row.r_score > threshold;
        if (prune) masks.pruned[row.sequence_id].insert(row.head_index);
    }
    return masks;
}

AccuracyCurve accuracy_curve(std::span<const PruneOutcome> outcomes) {
    if (outcomes.empty()) throw Error("accuracy_curve: no outcomes supplied");

    std::map<double, std::map<std::string, bool>> by_percentile;
    std::set<std::string> all_sequences;
    for (const auto& o : outcomes) {
        by_percentile[o.percentile][o.sequence_id] = o.legal;
        all_sequences.insert(o.sequence_id);
    }
    if (by_percentile.count(0.0) == 0) {
        throw Error("accuracy_curve: the percentile-0 (unpruned) column is required");
    }
    // The grid must be rectangular: every sequence at every percentile.
    for (const auto& [perc, row] : by_percentile) {
        for (const auto& id : all_sequences) {
            if (row.count(id) == 0) {
                std::ostringstream msg;
                msg << "missing outcome for sequence '" << id << "' at percentile " << perc;
                throw Error(msg.str());
            }
        }
    }

    AccuracyCurve curve;
    for (const auto& [perc, row] : by_percentile) {
        int legal = 0;
        for (const auto& [id, flag] : row) legal += flag ? 1 : 0;
        AccuracyPoint point;
        point.percentile = perc;
        point.accuracy = static_cast<double>(legal) / static_cast<double>(row.size());
        curve.points.push_back(point);
    }
    const double base = curve.points.front().accuracy;
    for (auto& point : curve.points) {
        point.normalized_accuracy = base > 0.0 ? point.accuracy / base : 0.0;
    }
    for (size_t k = 1; k < curve.points.size(); ++k) {
        const auto& a = curve.points[k - 1];
        const auto& b = curve.points[k];
        curve.auc += 0.5 * (a.normalized_accuracy + b.normalized_accuracy) *
                     (b.percentile - a.percentile);
    }
    return curve;
}

ConfidenceAccuracy confidence_accuracy_bins(std::span<const double> seq_scores,
                                            std::span<const char> legal_flags, int bin_count) {
    if (seq_scores.size() != legal_flags.size()) {
        throw Error("confidence_accuracy_bins: score and flag lists differ in length");
    }
    if (seq_scores.empty()) throw Error("confidence_accuracy_bins: empty input");
    if (bin_count < 1) throw Error("confidence_accuracy_bins: bin_count must be >= 1");

    const int n = static_cast<int>(seq_scores.size());
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return seq_scores[a] < seq_scores[b]; });

    ConfidenceAccuracy result;
    int legal_total = 0;
    for (char f : legal_flags) legal_total += f ? 1 : 0;
    result.overall_accuracy = static_cast<double>(legal_total) / n;

    const int bins = std::min(bin_count, n);
    const int base = n / bins;
    const int remainder = n % bins;
    int cursor = 0;
    for (int b = 0; b < bins; ++b) {
        const int size = base + (b < remainder ? 1 : 0);  // largest bins first
        ConfidenceBin bin;
        bin.count = size;
        bin.r_low = seq_scores[order[cursor]];
        bin.r_high = seq_scores[order[cursor + size - 1]];
        int legal = 0;
        for (int k = 0; k < size; ++k) legal += legal_flags[order[cursor + k]] ? 1 : 0;
        bin.mean_accuracy = static_cast<double>(legal) / size;
        result.bins.push_back(bin);
        cursor += size;
    }
    return result;
}

namespace {

int count_occurrences(std::span<const int> haystack, std::span<const int> needle,
                      bool anchor_end) {
    if (needle.size() > haystack.size()) return 0;
    if (anchor_end) {
        return std::equal(needle.begin(), needle.end(), haystack.end() - needle.size()) ? 1 : 0;
    }
    int count = 0;
    for (size_t pos = 0; pos + needle.size() <= haystack.size(); ++pos) {
        if (std::equal(needle.begin(), needle.end(), haystack.begin() + pos)) ++count;
    }
    return count;
}

}  // namespace

NgramResult ngram_occurrence_mean(const SequenceDataset& train, const SequenceDataset& probe,
                                  int ell, int n_gram, const NgramOptions& opts) {
    if (train.sequences.empty() || probe.sequences.empty()) {
        throw Error("ngram_occurrence_mean: empty dataset");
    }
    if (n_gram < 1 || n_gram >= ell) throw Error("ngram_occurrence_mean: need 1 <= n_gram < ell");

    NgramResult result;
    std::vector<std::span<const int>> trimmed_train;
    for (const auto& seq : train.sequences) {
        if (static_cast<int>(seq.size()) < ell) {
            ++result.train_skipped;
            continue;
        }
        trimmed_train.emplace_back(seq.data(), static_cast<size_t>(ell));
    }
    result.train_used = static_cast<int>(trimmed_train.size());
    if (result.train_used == 0) throw Error("ngram_occurrence_mean: no training sequence of length >= ell");

    double sum = 0.0;
    for (const auto& seq : probe.sequences) {
        if (static_cast<int>(seq.size()) < ell) {
            ++result.probe_skipped;
            continue;
        }
        const std::span<const int> trimmed(seq.data(), static_cast<size_t>(ell));
        const auto gram = trimmed.subspan(trimmed.size() - static_cast<size_t>(n_gram));
        long count = 0;
        for (const auto& t : trimmed_train) {
            if (opts.exclude_self && t.size() == trimmed.size() &&
                std::equal(t.begin(), t.end(), trimmed.begin())) {
                continue;
            }
            count += count_occurrences(t, gram, opts.anchor_end);
        }
        sum += static_cast<double>(count) / result.train_used;
        ++result.probe_used;
    }
    if (result.probe_used == 0) throw Error("ngram_occurrence_mean: no probe sequence of length >= ell");
    result.mu = sum / result.probe_used;
    return result;
}

}  // namespace causalattn

#include "causalattn/confidence.hpp"

#include <algorithm>
#include <cmath>

namespace causalattn {

std::string to_string(CondFilter f) {
    switch (f) {
        case CondFilter::Cond0: return "cond0";
        case CondFilter::Cond1: return "cond1";
        case CondFilter::Cond01: return "cond01";
        case CondFilter::All: return "all";
    }
    return "all";
}

CondFilter cond_filter_from_string(const std::string& s) {
    if (s == "cond0") return CondFilter::Cond0;
    if (s == "cond1") return CondFilter::Cond1;
    if (s == "cond01") return CondFilter::Cond01;
    if (s == "all") return CondFilter::All;
    throw Error("unknown filter '" + s + "' (expected cond0, cond1, cond01 or all)");
}

namespace {

bool keep(const CiRecord& rec, CondFilter filter) {
    switch (filter) {
        case CondFilter::Cond0: return rec.cond_size() == 0;
        case CondFilter::Cond1: return rec.cond_size() == 1;
        case CondFilter::Cond01: return rec.cond_size() <= 1;
        case CondFilter::All: return true;
    }
    return true;
}

}  // namespace

std::pair<std::vector<double>, std::vector<double>> split_pvalues(const DiscoveryTrace& trace,
                                                                  double alpha,
                                                                  CondFilter filter) {
    std::vector<double> p_ind;
    std::vector<double> p_dep;
    for (const auto& rec : trace.records) {
        if (!keep(rec, filter)) continue;
        (rec.p_value >= alpha ? p_ind : p_dep).push_back(rec.p_value);
    }
    return {std::move(p_ind), std::move(p_dep)};
}

double pvalue_entropy(std::span<const double> pvals, int bins) {
    if (bins < 2) throw Error("pvalue_entropy needs bins >= 2");
    if (pvals.empty()) return 0.0;
    std::vector<int> counts(bins, 0);
    for (double p : pvals) {
        int cell = static_cast<int>(p * bins);
        cell = std::clamp(cell, 0, bins - 1);  // p = 1 goes to the last cell
        ++counts[cell];
    }
    const double total = static_cast<double>(pvals.size());
    double h = 0.0;
    for (int c : counts) {
        if (c == 0) continue;
        const double q = c / total;
        h -= q * std::log(q);
    }
    return h;
}

ConfidenceReport confidence_score(const DiscoveryTrace& trace, double alpha, CondFilter filter,
                                  int bins) {
    ConfidenceReport report;
    report.alpha = alpha;
    report.filter = filter;
    std::tie(report.p_ind, report.p_dep) = split_pvalues(trace, alpha, filter);
    report.h_ind = pvalue_entropy(report.p_ind, bins);
    report.h_dep = pvalue_entropy(report.p_dep, bins);
    report.r_score = report.h_ind - report.h_dep;
    report.degenerate = report.p_ind.empty() || report.p_dep.empty();
    return report;
}

SequenceScore sequence_score(const std::vector<DiscoveryResult>& results, double alpha,
                             CondFilter filter, int bins) {
    if (results.empty()) throw Error("sequence_score needs at least one head result");
    SequenceScore score;
    double sum = 0.0;
    for (const auto& res : results) {
        const auto report = confidence_score(res.trace, alpha, filter, bins);
        // Degenerate heads enter the mean at 0 and are only counted.
        if (report.degenerate) {
            ++score.degenerate_heads;
        } else {
            sum += report.r_score;
        }
    }
    score.mean_r = sum / static_cast<double>(results.size());
    return score;
}

GroupDifference group_difference(std::span<const double> scores_a,
                                 std::span<const double> scores_b, bool pooled) {
    GroupDifference diff;
    diff.welch = welch_t_interval(scores_a, scores_b, 0.95, pooled);
    diff.mean_diff = diff.welch.mean_diff;
    return diff;
}

}  // namespace causalattn

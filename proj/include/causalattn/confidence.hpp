#pragma once

#include <span>
#include <string>
#include <vector>

#include "causalattn/discovery.hpp"

namespace causalattn {

// Which CI records enter the score, by conditioning-set size.
enum class CondFilter {
    Cond0,   // marginal tests only
    Cond1,   // exactly one conditioning node
    Cond01,  // zero or one conditioning node
    All,
};

std::string to_string(CondFilter f);
CondFilter cond_filter_from_string(const std::string& s);

struct ConfidenceReport {
    double alpha = 0.0;
    CondFilter filter = CondFilter::All;
    std::vector<double> p_ind;
    std::vector<double> p_dep;
    double h_ind = 0.0;   // nats
    double h_dep = 0.0;   // nats
    double r_score = 0.0; // h_ind - h_dep
    bool degenerate = false;  // either population empty
};

// Partitions the filtered trace p-values at alpha; p == alpha lands on the
// independence side.
std::pair<std::vector<double>, std::vector<double>> split_pvalues(const DiscoveryTrace& trace,
                                                                  double alpha, CondFilter filter);

// Plug-in Shannon entropy (nats) of the histogram of pvals over `bins`
// equal-width cells on [0, 1]; p = 1 goes to the last cell. Empty input
// yields 0.
double pvalue_entropy(std::span<const double> pvals, int bins);

ConfidenceReport confidence_score(const DiscoveryTrace& trace, double alpha, CondFilter filter,
                                  int bins);

struct SequenceScore {
    double mean_r = 0.0;
    int degenerate_heads = 0;
};

// Mean of per-head r_score values; degenerate heads enter at 0 and are
// counted. Throws Error on an empty result list.
SequenceScore sequence_score(const std::vector<DiscoveryResult>& results, double alpha,
                             CondFilter filter, int bins);

struct GroupDifference {
    double mean_diff = 0.0;
    WelchResult welch;
};

// Mean difference of the two score populations with the Welch t output at 95%.
GroupDifference group_difference(std::span<const double> scores_a,
                                 std::span<const double> scores_b, bool pooled = false);

}  // namespace causalattn

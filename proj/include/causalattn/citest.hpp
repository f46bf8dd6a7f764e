#pragma once

#include <span>
#include <vector>

#include "causalattn/attnmat.hpp"

namespace causalattn {

// Correlation magnitudes are clamped to this bound before the Fisher
// z-transform; exact collinearity then yields p = 0 instead of aborting.
inline constexpr double kCorrelationClamp = 1.0 - 1e-12;

// One conditional-independence test. cond is kept sorted ascending.
struct CiRecord {
    int i = 0;
    int j = 0;
    std::vector<int> cond;
    double p_value = 0.0;
    bool independent = false;

    int cond_size() const { return static_cast<int>(cond.size()); }
};

enum class CiMode {
    Statistical,  // verdict by Fisher-z p-value against alpha
    Exact,        // verdict by |partial correlation| against a threshold
};

struct CiConfig {
    double alpha = 0.01;
    int n_eff = 0;  // effective sample size; callers default this to the token count
    CiMode mode = CiMode::Statistical;
    double exact_threshold = 1e-7;
};

// Partial correlation rho(i,j | cond) from the precision matrix of the
// sub-correlation over {i,j} U cond. Result is clamped to +-kCorrelationClamp.
// Throws SingularSubmatrixError when the submatrix condition number exceeds
// 1e12 (degenerate or duplicated-token case).
double partial_correlation(const CorrelationMatrix& r, int i, int j, std::span<const int> cond);

// Two-sided p-value of the Fisher z statistic sqrt(n_eff - |Z| - 3) * |atanh r|
// under the standard normal. Throws InsufficientSamplesError when
// n_eff - cond_size - 3 < 1.
double fisher_z_pvalue(double r, int n_eff, int cond_size);

// Composes partial_correlation and fisher_z_pvalue (or the exact-threshold
// verdict). The verdict at the boundary p == alpha is independent.
CiRecord ci_test(const CorrelationMatrix& r, int i, int j, std::span<const int> cond,
                 const CiConfig& cfg);

struct WelchResult {
    double mean_diff = 0.0;
    double t = 0.0;
    double dof = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    // Both samples had zero variance; t is 0 or +-inf and the interval
    // collapses to the mean difference.
    bool degenerate = false;
};

// Unpaired t-statistic for mean(a) - mean(b) with the two-sided confidence
// interval at the given level. Welch-Satterthwaite degrees of freedom by
// default; pooled = true selects the classic equal-variance variant.
WelchResult welch_t_interval(std::span<const double> a, std::span<const double> b,
                             double confidence, bool pooled = false);

}  // namespace causalattn

#include "causalattn/citest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/distributions/students_t.hpp>

namespace causalattn {

namespace {

double clamp_correlation(double r) {
    return std::clamp(r, -kCorrelationClamp, kCorrelationClamp);
}

}  // namespace

double partial_correlation(const CorrelationMatrix& r, int i, int j, std::span<const int> cond) {
    const int n = r.size();
    if (i == j || i < 0 || j < 0 || i >= n || j >= n) {
        throw Error("partial_correlation: indices must be distinct and in range");
    }
    std::vector<int> idx = {i, j};
    for (int z : cond) {
        if (z == i || z == j || z < 0 || z >= n) {
            throw Error("partial_correlation: conditioning index out of range or not distinct");
        }
        idx.push_back(z);
    }
    const int k = static_cast<int>(idx.size());
    Eigen::MatrixXd sub(k, k);
    for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) sub(a, b) = r(idx[a], idx[b]);

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(sub, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double smax = svd.singularValues()(0);
    const double smin = svd.singularValues()(k - 1);
    if (!(smin > 0.0) || smax / smin > 1e12) {
        std::ostringstream msg;
        msg << "sub-correlation over {" << i << ", " << j << "} and |Z|=" << cond.size()
            << " is numerically singular";
        throw SingularSubmatrixError(msg.str());
    }
    const Eigen::MatrixXd prec = sub.inverse();
    const double rho = -prec(0, 1) / std::sqrt(prec(0, 0) * prec(1, 1));
    return clamp_correlation(rho);
}

double fisher_z_pvalue(double r, int n_eff, int cond_size) {
    if (n_eff - cond_size - 3 < 1) {
        std::ostringstream msg;
        msg << "Fisher z needs n_eff - |Z| - 3 >= 1, got n_eff=" << n_eff << " |Z|=" << cond_size;
        throw InsufficientSamplesError(msg.str());
    }
    const double rc = clamp_correlation(r);
    const double z = 0.5 * std::log((1.0 + rc) / (1.0 - rc));
    const double statistic = std::sqrt(static_cast<double>(n_eff - cond_size - 3)) * std::abs(z);
    // 2 * (1 - Phi(statistic)) via erfc; accurate to well below 1e-12 absolute.
    const double p = std::erfc(statistic / std::sqrt(2.0));
    return std::clamp(p, 0.0, 1.0);
}

CiRecord ci_test(const CorrelationMatrix& r, int i, int j, std::span<const int> cond,
                 const CiConfig& cfg) {
    CiRecord rec;
    rec.i = std::min(i, j);
    rec.j = std::max(i, j);
    rec.cond.assign(cond.begin(), cond.end());
    std::sort(rec.cond.begin(), rec.cond.end());

    const double rho = partial_correlation(r, i, j, cond);
    if (cfg.mode == CiMode::Exact) {
        rec.independent = std::abs(rho) < cfg.exact_threshold;
        rec.p_value = rec.independent ? 1.0 : 0.0;
    } else {
        rec.p_value = fisher_z_pvalue(rho, cfg.n_eff, rec.cond_size());
        rec.independent = rec.p_value >= cfg.alpha;
    }
    return rec;
}

WelchResult welch_t_interval(std::span<const double> a, std::span<const double> b,
                             double confidence, bool pooled) {
    const auto na = static_cast<double>(a.size());
    const auto nb = static_cast<double>(b.size());
    if (a.size() < 2 || b.size() < 2) {
        throw TooFewSamplesError("each sample needs at least 2 elements");
    }
    double ma = 0.0, mb = 0.0;
    for (double x : a) ma += x;
    for (double x : b) mb += x;
    ma /= na;
    mb /= nb;
    double va = 0.0, vb = 0.0;
    for (double x : a) va += (x - ma) * (x - ma);
    for (double x : b) vb += (x - mb) * (x - mb);
    va /= (na - 1.0);
    vb /= (nb - 1.0);

    WelchResult res;
    res.mean_diff = ma - mb;

    double se = 0.0;
    if (pooled) {
        const double sp2 = ((na - 1.0) * va + (nb - 1.0) * vb) / (na + nb - 2.0);
        se = std::sqrt(sp2 * (1.0 / na + 1.0 / nb));
        res.dof = na + nb - 2.0;
    } else {
        const double qa = va / na;
        const double qb = vb / nb;
        se = std::sqrt(qa + qb);
        res.dof = (qa + qb) * (qa + qb) /
                  (qa * qa / (na - 1.0) + qb * qb / (nb - 1.0));
        if (!std::isfinite(res.dof)) res.dof = na + nb - 2.0;
    }

    if (se == 0.0) {
        // Both samples constant. Flag rather than abort: t is 0 when the
        // means coincide and +-inf otherwise, interval collapses.
        res.degenerate = true;
        res.t = res.mean_diff == 0.0
                    ? 0.0
                    : std::copysign(std::numeric_limits<double>::infinity(), res.mean_diff);
        res.ci_low = res.ci_high = res.mean_diff;
        res.dof = na + nb - 2.0;
        return res;
    }

    res.t = res.mean_diff / se;
    boost::math::students_t dist(res.dof);
    const double tcrit = boost::math::quantile(dist, 0.5 + confidence / 2.0);
    res.ci_low = res.mean_diff - tcrit * se;
    res.ci_high = res.mean_diff + tcrit * se;
    return res;
}

}  // namespace causalattn

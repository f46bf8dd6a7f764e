#include "causalattn/attnmat.hpp"

#include <cmath>
#include <sstream>

namespace causalattn {

AttentionMatrix AttentionMatrix::validate(const Eigen::MatrixXd& raw) {
    if (raw.rows() < 1 || raw.rows() != raw.cols()) {
        throw ValidationError(ValidationError::Kind::NotLowerTriangular, -1, -1,
                              "attention matrix must be square with n >= 1");
    }
    const int n = static_cast<int>(raw.rows());
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (raw(i, j) != 0.0) {
                std::ostringstream msg;
                msg << "nonzero entry above the diagonal at (" << i << ", " << j << ")";
                throw ValidationError(ValidationError::Kind::NotLowerTriangular, i, j, msg.str());
            }
        }
        for (int j = 0; j <= i; ++j) {
            if (raw(i, j) < 0.0) {
                std::ostringstream msg;
                msg << "negative entry at (" << i << ", " << j << ")";
                throw ValidationError(ValidationError::Kind::NegativeEntry, i, j, msg.str());
            }
        }
        if (raw(i, i) <= 0.0) {
            std::ostringstream msg;
            msg << "zero diagonal entry at row " << i;
            throw ValidationError(ValidationError::Kind::ZeroDiagonal, i, i, msg.str());
        }
        const double row_sum = raw.row(i).head(i + 1).sum();
        if (std::abs(row_sum - 1.0) > kRowSumTolerance) {
            std::ostringstream msg;
            msg << "row " << i << " sums to " << row_sum << ", off by more than " << kRowSumTolerance;
            throw ValidationError(ValidationError::Kind::RowSumOff, i, -1, msg.str());
        }
    }
    return AttentionMatrix(raw);
}

EffectMatrix EffectMatrix::from_matrix(const Eigen::MatrixXd& m) {
    const int n = static_cast<int>(m.rows());
    if (n < 1 || m.cols() != n) {
        throw Error("effect matrix must be square with n >= 1");
    }
    for (int i = 0; i < n; ++i) {
        if (m(i, i) != 1.0) {
            throw Error("effect matrix diagonal must be exactly 1");
        }
        for (int j = i + 1; j < n; ++j) {
            if (m(i, j) != 0.0) {
                throw Error("effect matrix must be lower triangular");
            }
        }
    }
    return EffectMatrix(m);
}

CovarianceMatrix CovarianceMatrix::from_matrix(const Eigen::MatrixXd& m) {
    const int n = static_cast<int>(m.rows());
    if (n < 1 || m.cols() != n) {
        throw Error("covariance matrix must be square with n >= 1");
    }
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > kSymmetryTolerance) {
        throw Error("covariance matrix must be symmetric within 1e-12");
    }
    return CovarianceMatrix(m);
}

CorrelationMatrix CorrelationMatrix::from_matrix(const Eigen::MatrixXd& m) {
    const int n = static_cast<int>(m.rows());
    if (n < 1 || m.cols() != n) {
        throw Error("correlation matrix must be square with n >= 1");
    }
    return CorrelationMatrix(m);
}

EffectMatrix to_uni_triangular(const AttentionMatrix& a) {
    const int n = a.size();
    Eigen::MatrixXd m = a.entries();
    for (int i = 0; i < n; ++i) {
        m.row(i) /= a(i, i);
        m(i, i) = 1.0;  // exact, independent of rounding in the division
    }
    return EffectMatrix::from_matrix(m);
}

CovarianceMatrix covariance(const EffectMatrix& m) {
    Eigen::MatrixXd c = m.entries() * m.entries().transpose();
    // Enforce exact symmetry; the product is symmetric up to rounding.
    c = ((c + c.transpose()) / 2.0).eval();
    return CovarianceMatrix::from_matrix(c);
}

CorrelationMatrix correlation(const CovarianceMatrix& c) {
    const int n = c.size();
    Eigen::VectorXd inv_sd(n);
    for (int i = 0; i < n; ++i) {
        if (c(i, i) <= 0.0) {
            std::ostringstream msg;
            msg << "nonpositive variance at index " << i;
            throw ZeroVarianceError(i, msg.str());
        }
        inv_sd(i) = 1.0 / std::sqrt(c(i, i));
    }
    Eigen::MatrixXd r = inv_sd.asDiagonal() * c.entries() * inv_sd.asDiagonal();
    for (int i = 0; i < n; ++i) r(i, i) = 1.0;
    return CorrelationMatrix::from_matrix(r);
}

AttentionMatrix synthesize_attention(const EffectMatrix& m) {
    const int n = m.size();
    Eigen::MatrixXd a = m.entries();
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            if (a(i, j) < 0.0) {
                std::ostringstream msg;
                msg << "negative effect entry at (" << i << ", " << j
                    << "); softmax attention cannot represent it";
                throw ValidationError(ValidationError::Kind::NegativeEntry, i, j, msg.str());
            }
        }
        a.row(i) /= a.row(i).head(i + 1).sum();
    }
    return AttentionMatrix::validate(a);
}

}  // namespace causalattn

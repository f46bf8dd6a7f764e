#pragma once

#include <Eigen/Dense>

#include "causalattn/errors.hpp"

namespace causalattn {

// Tolerances used when admitting externally exported attention tensors.
// float32 exports accumulate rounding, so validation must not be stricter
// than the data can satisfy.
inline constexpr double kRowSumTolerance = 1e-9;
inline constexpr double kSymmetryTolerance = 1e-12;

class AttentionMatrix;
class EffectMatrix;
class CovarianceMatrix;
class CorrelationMatrix;

// Lower-triangular row-stochastic matrix extracted from one masked attention
// head on one sequence. Immutable after construction.
class AttentionMatrix {
public:
    // Checks triangularity, nonnegativity, a strictly positive diagonal and
    // row sums within kRowSumTolerance of 1. Throws ValidationError naming the
    // first offending index.
    static AttentionMatrix validate(const Eigen::MatrixXd& raw);

    int size() const { return static_cast<int>(entries_.rows()); }
    const Eigen::MatrixXd& entries() const { return entries_; }
    double operator()(int i, int j) const { return entries_(i, j); }

private:
    explicit AttentionMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {}
    Eigen::MatrixXd entries_;
};

// Lower uni-triangular matrix of cumulative effects: unit diagonal, zeros
// above it. Houses both the normalized attention and the SCM path-effect
// matrix, which are equated by the discovery pipeline.
class EffectMatrix {
public:
    // Trusts the caller for triangularity up to exact structure; asserts the
    // unit diagonal and zero upper triangle.
    static EffectMatrix from_matrix(const Eigen::MatrixXd& m);

    int size() const { return static_cast<int>(entries_.rows()); }
    const Eigen::MatrixXd& entries() const { return entries_; }
    double operator()(int i, int j) const { return entries_(i, j); }

private:
    explicit EffectMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {}
    Eigen::MatrixXd entries_;
};

class CovarianceMatrix {
public:
    static CovarianceMatrix from_matrix(const Eigen::MatrixXd& m);

    int size() const { return static_cast<int>(entries_.rows()); }
    const Eigen::MatrixXd& entries() const { return entries_; }
    double operator()(int i, int j) const { return entries_(i, j); }

private:
    explicit CovarianceMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {}
    Eigen::MatrixXd entries_;
};

class CorrelationMatrix {
public:
    static CorrelationMatrix from_matrix(const Eigen::MatrixXd& m);

    int size() const { return static_cast<int>(entries_.rows()); }
    const Eigen::MatrixXd& entries() const { return entries_; }
    double operator()(int i, int j) const { return entries_(i, j); }

private:
    explicit CorrelationMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {}
    Eigen::MatrixXd entries_;
};

// Divides each row of A by its diagonal entry, reverting the softmax
// normalization and exposing the uni-triangular effect structure.
EffectMatrix to_uni_triangular(const AttentionMatrix& a);

// C = M * M^T. Symmetric PSD; diagonal entries are >= 1 because each row of M
// contains a unit diagonal entry.
CovarianceMatrix covariance(const EffectMatrix& m);

// R = diag(C)^{-1/2} C diag(C)^{-1/2}. Throws ZeroVarianceError if any
// diagonal entry of C is nonpositive.
CorrelationMatrix correlation(const CovarianceMatrix& c);

// Inverse of to_uni_triangular: row-normalizes a nonnegative effect matrix
// back into a row-stochastic attention matrix. Throws ValidationError
// (NegativeEntry) if any entry is negative, since softmax output cannot
// represent it.
AttentionMatrix synthesize_attention(const EffectMatrix& m);

}  // namespace causalattn

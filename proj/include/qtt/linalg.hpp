#pragma once

#include <Eigen/Dense>

#include <cstddef>

namespace qtt {

// Row-major storage matches the (sigma, alpha, beta) core layout, so core
// slices and unfoldings can be mapped without copies.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using MatrixMap = Eigen::Map<Matrix>;
using ConstMatrixMap = Eigen::Map<const Matrix>;

struct TruncatedSvd {
    Matrix u;        // rows x rank, orthonormal columns
    Vector s;        // nonincreasing
    Matrix v;        // cols x rank, orthonormal columns
    double discarded = 0.0;  // Frobenius norm of the dropped tail
};

/// Thin SVD truncated to the smallest rank whose dropped tail has Frobenius
/// norm <= `budget`. At least one singular triple is always kept, and at most
/// `max_rank` when that is nonzero.
///
/// Deterministic for a fixed input: the first entry of each left singular
/// vector that is nonzero (above 1e-12 in magnitude) is made nonnegative.
TruncatedSvd truncated_svd(const Matrix& a, double budget, std::size_t max_rank = 0);

/// Singular values only, nonincreasing.
Vector singular_values(const Matrix& a);

/// Number of leading singular values kept for an absolute Frobenius budget
/// (never less than one unless `s` is empty).
std::size_t truncation_rank(const Vector& s, double budget, std::size_t max_rank = 0);

} // namespace qtt

#pragma once

#include "qtt/linalg.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace qtt {

inline constexpr std::size_t kDefaultDenseCap = std::size_t{1} << 26;

enum class Norm { inf, two, frob };

/// A 3-index tensor core indexed (sigma, alpha, beta) with sigma in [ext],
/// alpha in [left], beta in [right]. Storage is sigma-outermost and
/// beta-innermost, the same order used by the binary container.
class Core {
public:
    Core() = default;
    Core(std::size_t ext, std::size_t left, std::size_t right);
    Core(std::size_t ext, std::size_t left, std::size_t right, std::vector<double> data);

    std::size_t ext() const { return ext_; }
    std::size_t left() const { return left_; }
    std::size_t right() const { return right_; }
    std::size_t size() const { return data_.size(); }

    double operator()(std::size_t sigma, std::size_t alpha, std::size_t beta) const
    {
        return data_[(sigma * left_ + alpha) * right_ + beta];
    }
    double& operator()(std::size_t sigma, std::size_t alpha, std::size_t beta)
    {
        return data_[(sigma * left_ + alpha) * right_ + beta];
    }

    /// The left x right matrix for one external index.
    ConstMatrixMap slice(std::size_t sigma) const;
    MatrixMap slice(std::size_t sigma);

    /// (sigma alpha, beta) reshaping: (ext*left) x right.
    ConstMatrixMap left_unfolding() const;

    std::span<const double> data() const { return data_; }
    std::span<double> data() { return data_; }

    friend bool operator==(const Core&, const Core&) = default;

private:
    std::size_t ext_ = 0;
    std::size_t left_ = 0;
    std::size_t right_ = 0;
    std::vector<double> data_;
};

/// Build a core from a (ext*left) x right matrix, rows ordered (sigma, alpha).
Core core_from_left_unfolding(const Matrix& m, std::size_t ext);

/// Tensor train T = A_1 A_2 ... A_K. Construction validates boundary ranks,
/// adjacent rank compatibility and finiteness; instances are immutable.
class TensorTrain {
public:
    TensorTrain() = default;
    explicit TensorTrain(std::vector<Core> cores);

    std::size_t depth() const { return cores_.size(); }
    const Core& core(std::size_t k) const { return cores_.at(k); }
    const std::vector<Core>& cores() const { return cores_; }

    /// r_0 .. r_K.
    std::vector<std::size_t> ranks() const;
    std::vector<std::size_t> external_dims() const;
    std::size_t max_rank() const;
    /// Product of external dims, saturating at SIZE_MAX.
    std::size_t dense_size() const;

    friend bool operator==(const TensorTrain&, const TensorTrain&) = default;

private:
    std::vector<Core> cores_;
};

/// Exact left-to-right chain contraction at one multi-index.
double tt_eval(const TensorTrain& tt, std::span<const std::size_t> index);

/// Full tensor as a flat array in mixed-radix order, first index most
/// significant. Under the dyadic identification entry j of a univariate
/// quantized tensor is f(j 2^-K).
struct DenseTensor {
    std::vector<std::size_t> dims;
    std::vector<double> values;

    std::size_t depth() const { return dims.size(); }
    std::size_t size() const { return values.size(); }
};

DenseTensor tt_to_dense(const TensorTrain& tt, std::size_t cap = kDefaultDenseCap);

/// Quantized tensor of f on D_K.
DenseTensor quantize(const std::function<double(double)>& f, std::size_t depth,
                     std::size_t cap = kDefaultDenseCap);

/// inf = max |entry|, two = sqrt(mean of squares), frob = sqrt(sum of squares).
double tensor_norm(const DenseTensor& x, Norm p);
double tensor_norm(std::span<const double> values, Norm p);

/// Standard TT rounding: QR left-orthogonalization, then a right-to-left
/// truncated-SVD sweep with per-bond budget tol*||T||_F/sqrt(K-1). The result
/// satisfies ||T - T'||_F <= tol ||T||_F and no rank grows.
TensorTrain tt_round(const TensorTrain& tt, double tol);

/// Smallest r with a rank-r approximation of the m-th unfolding within eps in
/// the tensor 2-norm (Frobenius scaled by 1/sqrt(total entries)). Never below 1.
std::size_t unfolding_eps_rank(const DenseTensor& x, std::size_t m, double eps);

/// Bits sigma_1..sigma_K of j (sigma_1 most significant).
std::vector<std::size_t> bits_of(std::uint64_t j, std::size_t depth);
/// Inverse of bits_of.
std::uint64_t flat_of(std::span<const std::size_t> bits);

/// O(r) random access into a tensor train after precomputing contractions
/// of every prefix and every suffix around a split point.
class TTEvaluator {
public:
    explicit TTEvaluator(const TensorTrain& tt);

    double operator()(std::span<const std::size_t> index) const;
    /// Entry at mixed-radix flat index (first index most significant).
    double at(std::uint64_t flat) const;

    std::size_t split() const { return split_; }

private:
    std::size_t split_ = 0;
    std::vector<std::size_t> dims_;
    std::uint64_t suffix_count_ = 1;
    Matrix prefix_;  // prefixes x r_split
    Matrix suffix_;  // suffixes x r_split
};

} // namespace qtt

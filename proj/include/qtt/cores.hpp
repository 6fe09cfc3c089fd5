#pragma once

#include "qtt/cheb.hpp"
#include "qtt/linalg.hpp"
#include "qtt/oracle.hpp"
#include "qtt/tensor_train.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace qtt {

/// Core with column-compressed slices: for every (sigma, beta) the nonzero
/// (alpha, value) pairs, sorted by alpha.
class SparseCore {
public:
    SparseCore(std::size_t ext, std::size_t left, std::size_t right);

    std::size_t ext() const { return ext_; }
    std::size_t left() const { return left_; }
    std::size_t right() const { return right_; }
    std::size_t nonzeros() const { return values_.size(); }

    /// Columns must be appended in (sigma, beta) order.
    void append_column(std::span<const std::pair<std::size_t, double>> entries);

    std::span<const std::size_t> column_rows(std::size_t sigma, std::size_t beta) const;
    std::span<const double> column_values(std::size_t sigma, std::size_t beta) const;
    double operator()(std::size_t sigma, std::size_t alpha, std::size_t beta) const;

    /// r * slice(sigma) for an (m x left) matrix r.
    Matrix left_multiply(const Matrix& r, std::size_t sigma) const;
    Core to_dense() const;

private:
    std::size_t ext_, left_, right_;
    std::vector<std::size_t> starts_{0};
    std::vector<std::size_t> rows_;
    std::vector<double> values_;
};

/// A_L^{1,b}(s) = f((s + c^b)/2). Requests exactly 2(N+1) oracle values.
Core build_left_core(FunctionOracle& f, const ChebSystem& sys);
/// A^{ab}(s) = P^a((s + c^b)/2).
Core build_interp_core(const ChebSystem& sys);
/// A_R^{a,1}(s) = P^a(s/2).
Core build_right_core(const ChebSystem& sys);
/// Local-interpolation version of the interior core: I P^a((s + c^b)/2).
SparseCore build_sparse_core(const LocalInterpSystem& lsys);

struct CoreSet {
    Core left;
    Core interior;
    Core right;
};
CoreSet build_core_set(FunctionOracle& f, const ChebSystem& sys);

/// Grid sizes N_k = ceil(2^-k Omega + Delta), k = 1..K.
class DecaySchedule {
public:
    DecaySchedule(double bandlimit, double margin, std::size_t depth);
    /// Explicit orders N_1..N_K (nonincreasing, each >= 1).
    explicit DecaySchedule(std::vector<std::size_t> orders);

    std::size_t depth() const { return orders_.size(); }
    /// N_k for k = 1..K.
    std::size_t order(std::size_t k) const { return orders_.at(k - 1); }
    const std::vector<std::size_t>& orders() const { return orders_; }
    double bandlimit() const { return bandlimit_; }
    double margin() const { return margin_; }

private:
    std::vector<std::size_t> orders_;
    double bandlimit_ = 0.0;
    double margin_ = 0.0;
};

/// Cores A_2 .. A_{K-1} with A_k^{ab}(s) = P_{N_{k-1}}^a((s + c_{N_k}^b)/2),
/// followed by the right cap A_R^a(s) = P_{N_{K-1}}^a(s/2).
std::vector<Core> build_decay_cores(const DecaySchedule& sched);

/// Generalized inverse G of the interior core:
/// G^{ab}(s) = [s = 0] P^a(2 c^b) for c^b in [0, 1/2],
///             [s = 1] P^a(2 c^b - 1) for c^b in (1/2, 1].
Core build_inverse_core(const ChebSystem& sys);

/// Lagrange weights L^b(s_1..s_q) of the 2^q dyadic nodes sum_k 2^-k s_k for
/// the targets c^b; row = flat index of s_{1:q}. 1 <= q <= 4.
Matrix build_lagrange_tensor(const ChebSystem& sys, std::size_t q);

/// A dyadic prefix sigma_1..sigma_k stored as an integer with sigma_1 the
/// most significant of k bits.
struct Prefix {
    std::uint64_t bits = 0;
    std::size_t length = 0;

    double left_end() const;  // x_{<=k}
    friend bool operator==(const Prefix&, const Prefix&) = default;
};

/// Per-level sets S_k (k = 1..K-1) of dangerous prefixes; S_K is empty.
/// Every prefix at level k+1 must extend a prefix at level k.
class DangerTree {
public:
    /// `levels[k-1]` holds the prefix integers of S_k.
    DangerTree(std::size_t depth, std::vector<std::vector<std::uint64_t>> levels);

    static DangerTree empty(std::size_t depth);
    /// S_k = {0...0} for every k: the intervals [0, 2^-k].
    static DangerTree left_edge(std::size_t depth);

    std::size_t depth() const { return depth_; }
    /// q_k; zero for k = 0 and k >= K.
    std::size_t count(std::size_t k) const;
    std::uint64_t prefix(std::size_t k, std::size_t i) const { return levels_.at(k - 1).at(i); }
    std::optional<std::size_t> find(std::size_t k, std::uint64_t prefix) const;

private:
    std::size_t depth_;
    std::vector<std::vector<std::uint64_t>> levels_;
};

/// Block cores A_1 .. A_K of the multiresolution construction:
/// A_1 = T_{<=1}; A_k = [[A, 0], [F_k, chi_k]]; A_K = [A_R; F_K].
std::vector<Core> build_multires_cores(FunctionOracle& f, const ChebSystem& sys,
                                       const DangerTree& danger);

/// Oracle requests made by build_multires_cores.
std::size_t multires_request_count(const ChebSystem& sys, const DangerTree& danger);

} // namespace qtt

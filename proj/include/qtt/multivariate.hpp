#pragma once

#include "qtt/cheb.hpp"
#include "qtt/cores.hpp"
#include "qtt/linalg.hpp"
#include "qtt/oracle.hpp"
#include "qtt/tensor_train.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace qtt {

enum class Ordering { interleaved, serial };

// Bond space of the multivariate chain: one (N+1)-slot per variable that is
// still open, variables ascending, the lowest variable the slowest index.

struct SlotStep {
    enum class Kind { interp, cap };
    Kind kind = Kind::interp;
    std::size_t variable = 0;
};

/// Steps following the left core, one per bit: K*d - 1 entries.
std::vector<SlotStep> step_schedule(std::size_t dims, std::size_t depth, Ordering ordering);

/// Position of bit k (1-based depth) of variable v in the chain.
std::size_t bit_position(std::size_t variable, std::size_t k, std::size_t dims, std::size_t depth,
                         Ordering ordering);

/// Chain index for per-variable integer coordinates j_v in [0, 2^K).
std::vector<std::size_t> chain_index(std::span<const std::uint64_t> coords, std::size_t depth,
                                     Ordering ordering);

/// Left core f((s + c^b1)/2, c^b2, ..., c^bd) as a 2 x (N+1)^d matrix.
Matrix multivariate_left_samples(FunctionOracle& f, const ChebSystem& sys);

/// r * (I_pre (x) op(sigma) (x) I_post) for r of shape m x (pre*left*post).
/// Columns of the result are ordered (pre, right, post).
Matrix apply_slot(const Matrix& r, std::size_t pre, std::size_t post, const Core& op,
                  std::size_t sigma);
Matrix apply_slot(const Matrix& r, std::size_t pre, std::size_t post, const SparseCore& op,
                  std::size_t sigma);

/// Dense I_pre (x) op (x) I_post, for tests at tiny sizes.
Core kronecker_core(const Core& op, std::size_t pre, std::size_t post);

/// Untruncated chain with materialized Kronecker cores. Memory grows as
/// (N+1)^(2d); meant for brute-force references only.
std::vector<Core> multivariate_dense_cores(FunctionOracle& f, const ChebSystem& sys,
                                           std::size_t depth, Ordering ordering);

} // namespace qtt

#pragma once

#include "qtt/cheb.hpp"
#include "qtt/cores.hpp"
#include "qtt/multivariate.hpp"
#include "qtt/oracle.hpp"
#include "qtt/tensor_train.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace qtt {

enum class TruncationMode {
    absolute,  // Frobenius budget eps * sqrt(2^k) at the SVD producing U_k
    rank_cap,  // keep exactly min(max_rank, available) singular triples
};

struct TruncationPolicy {
    double eps = 0.0;
    std::size_t max_rank = 0;  // 0 = no cap
    TruncationMode mode = TruncationMode::absolute;

    /// Absolute budget for level k (1-based).
    double budget(std::size_t k) const;
    void validate() const;
};

struct BuildReport {
    std::vector<std::size_t> ranks;  // r_0 .. r_K
    std::size_t requests = 0;        // oracle values asked for
    std::size_t evaluations = 0;     // oracle calls that reached f
    std::vector<double> discarded;   // Frobenius mass dropped per level
    double wall_seconds = 0.0;
    double core_seconds = 0.0;       // excluding oracle time
};

struct BuildResult {
    TensorTrain tt;
    BuildReport report;
};

/// S = A_L A^(K-2) A_R; every interior rank is N+1.
BuildResult construct_basic(FunctionOracle& f, const ChebSystem& sys, std::size_t depth);

/// Left-to-right sweep B_k = R_{k-1} A, B_k = U_k R_k by truncated SVD.
/// With `local_order` set, the interior core is the sparse local one.
BuildResult construct_rank_revealing(FunctionOracle& f, const ChebSystem& sys, std::size_t depth,
                                     const TruncationPolicy& policy,
                                     std::optional<std::size_t> local_order = std::nullopt);

/// Decaying grid sizes N_k. Levels with 2^k < N_k + 1 are stored exactly, so
/// the ranks are min(2^k, N_k + 1).
BuildResult construct_decay(FunctionOracle& f, const DecaySchedule& sched);

/// Block cores over the dangerous prefixes; depth taken from the tree.
BuildResult construct_multires(FunctionOracle& f, const ChebSystem& sys, const DangerTree& danger);

/// K*d bit cores in the given ordering, revealed level by level with
/// slot-wise Kronecker products. Dimension is taken from the oracle.
BuildResult construct_multivariate(FunctionOracle& f, const ChebSystem& sys, std::size_t depth,
                                   Ordering ordering, const TruncationPolicy& policy,
                                   std::optional<std::size_t> local_order = std::nullopt);

} // namespace qtt

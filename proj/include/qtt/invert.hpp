#pragma once

#include "qtt/cheb.hpp"
#include "qtt/linalg.hpp"
#include "qtt/oracle.hpp"
#include "qtt/tensor_train.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace qtt {

/// Values approximating f(x_{<=m} + 2^-m c^b) for every prefix s_{1:m}.
///
/// Dense form: a 2^m x (N+1) matrix, row = prefix integer. Lazy form: the
/// first m cores of a tensor train and a tail W (r_m x (N+1)); the row of a
/// prefix is A_1(s_1) ... A_m(s_m) W.
class GridSamples {
public:
    static GridSamples dense(std::size_t level, Matrix values);
    static GridSamples lazy(std::vector<Core> prefix_cores, Matrix tail);

    std::size_t level() const { return level_; }
    std::size_t width() const { return static_cast<std::size_t>(tail_.cols()); }
    bool is_dense() const { return dense_; }

    std::vector<double> row(std::uint64_t prefix) const;
    /// All rows; throws SizeError when 2^m (N+1) exceeds `cap`.
    Matrix to_dense(std::size_t cap = kDefaultDenseCap) const;

    const std::vector<Core>& prefix_cores() const { return cores_; }
    const Matrix& tail() const { return tail_; }

private:
    std::size_t level_ = 0;
    bool dense_ = true;
    std::vector<Core> cores_;
    Matrix tail_;
};

/// Contract the last q cores with the Lagrange tensor. Result level K-q.
GridSamples stage1_recover(const TensorTrain& tt, const ChebSystem& sys, std::size_t q);

/// One level down: S_k^g(s_{1:k}) = sum_{s,b} S_{k+1}^b(s_{1:k}, s) G^{bg}(s).
GridSamples stage2_coarsen(const GridSamples& samples, const Core& g);

/// stage1 followed by K-q-m coarsening steps.
GridSamples recover_grid(const TensorTrain& tt, const ChebSystem& sys, std::size_t q,
                         std::size_t level);

/// Exact samples f(x_{<=m} + 2^-m c^b), dense.
GridSamples sample_grid(FunctionOracle& f, const ChebSystem& sys, std::size_t level);

/// CSV with header prefix_bits,beta,x,value; one row per (prefix, beta).
void write_grid_csv(const GridSamples& samples, const ChebSystem& sys, std::ostream& out,
                    std::size_t cap = kDefaultDenseCap);

} // namespace qtt

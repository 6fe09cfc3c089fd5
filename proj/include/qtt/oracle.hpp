#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace qtt {

/// Black-box f : [0,1]^d -> R with request/evaluation counters and a cache
/// keyed by the exact binary representation of the point.
///
/// `requests()` counts every value asked for, cache hits included, and so
/// matches the operation counts of the construction formulas.
/// `evaluations()` counts calls that actually reached f.
///
/// Batches may be evaluated on several threads; f must then be reentrant.
class FunctionOracle {
public:
    using Univariate = std::function<double(double)>;
    using Multivariate = std::function<double(std::span<const double>)>;

    explicit FunctionOracle(Univariate f, bool cache = true);
    FunctionOracle(std::size_t dimension, Multivariate f, bool cache = true);
    ~FunctionOracle();
    FunctionOracle(FunctionOracle&&) noexcept;
    FunctionOracle& operator=(FunctionOracle&&) noexcept;

    std::size_t dimension() const;

    double operator()(double x);
    double operator()(std::span<const double> point);

    /// `points` holds n points of `dimension()` coordinates each, row-major.
    std::vector<double> evaluate_batch(std::span<const double> points);

    std::size_t requests() const;
    std::size_t evaluations() const;
    void reset_counters();

    /// Worker threads for batch evaluation (default: hardware concurrency).
    void set_threads(std::size_t threads);

private:
    struct State;
    std::unique_ptr<State> state_;
};

} // namespace qtt

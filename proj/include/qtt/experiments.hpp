#pragma once

#include "qtt/bounds.hpp"
#include "qtt/multivariate.hpp"
#include "qtt/oracle.hpp"
#include "qtt/tensor_train.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace qtt {

// ------------------------------------------------------------ functions

/// Standard normals by Box-Muller on mt19937_64 (53-bit uniforms), so the
/// stream is identical on every platform for a given seed.
class NormalStream {
public:
    explicit NormalStream(std::uint64_t seed) : engine_(seed) {}
    double next();

private:
    double uniform();
    std::mt19937_64 engine_;
    std::optional<double> spare_;
};

/// Random trigonometric series sum_j a_j cos(2 pi j x) + b_j sin(2 pi j x)
/// with (a_1, b_1, a_2, b_2, ...) drawn from NormalStream(seed).
struct TrigSeries {
    std::vector<double> a, b;

    TrigSeries(std::size_t terms, std::uint64_t seed);
    double operator()(double x) const;
    /// Total variation of the spectral measure: 2 pi sum_j sqrt(a_j^2 + b_j^2).
    double spectral_mass() const;
};

struct FunctionParams {
    std::size_t terms = 25;      // J for "oscil"
    double alpha = 0.1;          // "alpha", "gaussian"
    double frequency = 8.0;      // w for "cos", "cossin"
    std::uint64_t seed = 20240101;
};

struct RegisteredFunction {
    std::string name;
    std::size_t dimension = 1;
    std::function<double(double)> univariate;
    std::function<double(std::span<const double>)> multivariate;
    std::optional<SmoothnessSpec> spec;

    FunctionOracle oracle(bool cache = true) const;
};

/// Names: const, x, x2, x3, x4, cheb3, exp, sqrt, cos, cossin, oscil, alpha,
/// gaussian, bivariate, sum2, separable.
RegisteredFunction make_function(const std::string& name, const FunctionParams& params = {});
std::vector<std::string> function_names();

// ------------------------------------------------------------ error checks

struct SampleOptions {
    std::size_t random_points = 100000;
    std::size_t grid_level = 10;        // every point of D_level is included
    std::size_t left_edge_points = 0;   // indices 0..n-1 and 2^i + {-1, 0, 1}
    bool full = false;                  // enumerate all of D_K instead
    std::uint64_t seed = 1;
};

/// max |S(j) - f(j 2^-K)| over the sampled dyadic indices j.
double sampled_max_error(const TensorTrain& tt, const std::function<double(double)>& f,
                         const SampleOptions& opt = {});

/// Same on D_K^d for a multivariate chain in the given ordering.
double sampled_max_error(const TensorTrain& tt, std::size_t dims,
                         const std::function<double(std::span<const double>)>& f,
                         Ordering ordering, const SampleOptions& opt = {});

/// Least-squares slope of log2(err) against x.
double fit_log2_slope(const std::vector<double>& x, const std::vector<double>& err);

// ------------------------------------------------------------ experiments

struct ExperimentConfig {
    std::string name;
    std::optional<std::size_t> depth;
    std::vector<std::size_t> orders;   // N sweep override
    std::vector<double> values;        // J, C or alpha sweep override
    std::optional<double> eps;
    std::optional<std::size_t> local_order;
    std::optional<std::size_t> q;
    std::optional<double> alpha;
    std::optional<std::string> mode;   // basic | rr
    std::uint64_t seed = 20240101;
    bool full_grid = false;
};

struct ExperimentTable {
    std::string name;
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, std::string>> params;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

std::vector<std::string> experiment_names();
ExperimentTable run_experiment(const ExperimentConfig& cfg);

/// "# experiment=<name> seed=<seed> k=v ..." then the column line, then rows
/// with 17 significant digits.
void write_csv(const ExperimentTable& table, std::ostream& out);

} // namespace qtt

#pragma once

#include "qtt/oracle.hpp"

#include <cstddef>
#include <span>
#include <variant>

namespace qtt {

/// f is p+1 times differentiable with sup |f^(p+1)| <= C.
struct Differentiable {
    std::size_t p = 1;
    double C = 1.0;
};

/// f extends analytically to (E_rho + 1)/2 and is bounded there by B.
struct Analytic {
    double rho = 2.0;
    double B = 1.0;
};

/// f is the inverse Fourier transform (with the 1/(2 pi) factor) of a
/// measure on [-Omega, Omega] of total variation mu.
struct Bandlimited {
    double omega = 1.0;
    double mu = 1.0;
};

using SmoothnessSpec = std::variant<Differentiable, Analytic, Bandlimited>;

void validate(const SmoothnessSpec& spec);

/// max(0, ln x).
double log_plus(double x);

/// rho_m = max(rho, 2^m (rho - 1)^2 / rho).
double analytic_rho_m(const Analytic& a, std::size_t m);

/// Upper bound on E_{m,N}[f]. Differentiable requires N > p.
double interp_error_bound(const SmoothnessSpec& spec, std::size_t m, std::size_t order);

/// Upper bound on the (eps, inf) rank of the m-th unfolding.
std::size_t rank_bound(const SmoothnessSpec& spec, std::size_t m, double eps);

/// 1 + ceil(min_q { q + (2 C_q 2^-m / (pi q eps))^(1/q) }) for derivative
/// bounds C_q of |f^(q+1)|, q = 1..C.size().
std::size_t multi_order_rank_bound(std::span<const double> derivative_bounds, std::size_t m,
                                   double eps);

/// max over m = 1..62 of min(2^m, rank_bound(m)).
std::size_t uniform_rank_bound(const Bandlimited& spec, double eps);

/// Sampled E_{m,N}[f]: max over u uniform in [0, 1 - 2^-m] (endpoints
/// included) and v at Chebyshev points of the first kind plus 0 and 1 of the
/// interpolation error on [u, u + 2^-m]. A lower bound of the true sup.
double measure_interp_error(FunctionOracle& f, std::size_t m, std::size_t order,
                            std::size_t u_samples = 256, std::size_t v_samples = 256);

/// A priori error bound of the decaying-grid construction.
double decay_construction_bound(const Bandlimited& spec, double margin, std::size_t depth);

} // namespace qtt

#include "qtt/bounds.hpp"

#include "qtt/cheb.hpp"
#include "qtt/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace qtt {

using detail::require;

namespace {

constexpr double kPi = std::numbers::pi;

template <class... F>
struct Overload : F... {
    using F::operator()...;
};
template <class... F>
Overload(F...) -> Overload<F...>;

std::size_t ceil_count(double x)
{
    if (!std::isfinite(x))
        throw NumericalError("rank bound is not finite");
    return x <= 0.0 ? 0 : static_cast<std::size_t>(std::ceil(x));
}

} // namespace

void validate(const SmoothnessSpec& spec)
{
    std::visit(Overload{
                   [](const Differentiable& d) {
                       require(d.p >= 1, "Differentiable: p must be >= 1");
                       require(d.C >= 0.0 && std::isfinite(d.C), "Differentiable: C must be >= 0");
                   },
                   [](const Analytic& a) {
                       require(a.rho > 1.0 && std::isfinite(a.rho), "Analytic: rho must be > 1");
                       require(a.B >= 0.0 && std::isfinite(a.B), "Analytic: B must be >= 0");
                   },
                   [](const Bandlimited& b) {
                       require(b.omega >= 0.0 && std::isfinite(b.omega), "Bandlimited: Omega must be >= 0");
                       require(b.mu >= 0.0 && std::isfinite(b.mu), "Bandlimited: |mu| must be >= 0");
                   },
               },
               spec);
}

double log_plus(double x)
{
    return x > 1.0 ? std::log(x) : 0.0;
}

double analytic_rho_m(const Analytic& a, std::size_t m)
{
    return std::max(a.rho, std::ldexp((a.rho - 1.0) * (a.rho - 1.0) / a.rho, static_cast<int>(m)));
}

double interp_error_bound(const SmoothnessSpec& spec, std::size_t m, std::size_t order)
{
    validate(spec);
    const double scale = std::ldexp(1.0, -static_cast<int>(m));
    const double n = static_cast<double>(order);
    return std::visit(Overload{
                          [&](const Differentiable& d) {
                              if (order <= d.p)
                                  throw ValidationError("interp_error_bound: need N > p");
                              const double p = static_cast<double>(d.p);
                              return 4.0 * d.C / kPi * scale / (p * std::pow(n - p, p));
                          },
                          [&](const Analytic& a) {
                              const double r = analytic_rho_m(a, m);
                              return 4.0 * a.B * std::pow(r, -n) / (r - 1.0);
                          },
                          [&](const Bandlimited& b) {
                              return 2.0 * b.mu / kPi * std::exp(0.5 * (scale * b.omega - n));
                          },
                      },
                      spec);
}

std::size_t rank_bound(const SmoothnessSpec& spec, std::size_t m, double eps)
{
    validate(spec);
    if (!(eps > 0.0))
        throw ValidationError("rank_bound: eps must be > 0");
    const double scale = std::ldexp(1.0, -static_cast<int>(m));
    return std::visit(Overload{
                          [&](const Differentiable& d) -> std::size_t {
                              const double p = static_cast<double>(d.p);
                              const double t = std::pow(4.0 * d.C / kPi * scale / (p * eps), 1.0 / p);
                              return 1 + d.p + ceil_count(t);
                          },
                          [&](const Analytic& a) -> std::size_t {
                              const double r = analytic_rho_m(a, m);
                              const double lr = std::log(r);
                              const double t = (std::log(1.0 / eps) - std::log(r - 1.0) +
                                                (a.B > 0.0 ? std::log(4.0 * a.B) : -INFINITY)) / lr;
                              if (t == -INFINITY)
                                  return 2;
                              return 1 + std::max<std::size_t>(1, ceil_count(t));
                          },
                          [&](const Bandlimited& b) -> std::size_t {
                              const double t = scale * b.omega + 2.0 * log_plus(2.0 * b.mu / (kPi * eps));
                              return 1 + ceil_count(t);
                          },
                      },
                      spec);
}

std::size_t multi_order_rank_bound(std::span<const double> derivative_bounds, std::size_t m,
                                   double eps)
{
    require(!derivative_bounds.empty(), "multi_order_rank_bound: no derivative bounds");
    require(eps > 0.0, "multi_order_rank_bound: eps must be > 0");
    const double scale = std::ldexp(1.0, -static_cast<int>(m));
    double best = INFINITY;
    for (std::size_t i = 0; i < derivative_bounds.size(); ++i) {
        const double q = static_cast<double>(i + 1);
        const double c = derivative_bounds[i];
        require(c >= 0.0 && std::isfinite(c), "multi_order_rank_bound: bounds must be >= 0");
        best = std::min(best, q + std::pow(2.0 * c / kPi * scale / (q * eps), 1.0 / q));
    }
    return 1 + ceil_count(best);
}

std::size_t uniform_rank_bound(const Bandlimited& spec, double eps)
{
    std::size_t best = 1;
    for (std::size_t m = 1; m <= 62; ++m) {
        const std::size_t cap = std::size_t{1} << m;
        best = std::max(best, std::min(cap, rank_bound(spec, m, eps)));
    }
    return best;
}

double measure_interp_error(FunctionOracle& f, std::size_t m, std::size_t order,
                            std::size_t u_samples, std::size_t v_samples)
{
    require(f.dimension() == 1, "measure_interp_error: univariate oracle required");
    require(u_samples >= 64 && v_samples >= 64, "measure_interp_error: need >= 64 samples each");
    require(m < 52, "measure_interp_error: level too deep");
    const ChebSystem sys(order);
    const std::size_t n = sys.size();
    const double h = std::ldexp(1.0, -static_cast<int>(m));
    const double span = 1.0 - h;

    std::vector<double> v(v_samples + 2);
    for (std::size_t j = 0; j < v_samples; ++j)
        v[j] = 0.5 * (1.0 + std::cos(kPi * (2.0 * static_cast<double>(j) + 1.0) /
                                     (2.0 * static_cast<double>(v_samples))));
    v[v_samples] = 0.0;
    v[v_samples + 1] = 1.0;

    const std::size_t us = m == 0 ? 1 : u_samples;
    std::vector<double> points;
    points.reserve(us * (n + v.size()));
    for (std::size_t i = 0; i < us; ++i) {
        const double u = us == 1 ? 0.0 : span * static_cast<double>(i) / static_cast<double>(us - 1);
        for (std::size_t a = 0; a < n; ++a)
            points.push_back(u + h * sys.node(a));
        for (double t : v)
            points.push_back(u + h * t);
    }
    const std::vector<double> values = f.evaluate_batch(points);

    double worst = 0.0;
    const std::size_t stride = n + v.size();
    for (std::size_t i = 0; i < us; ++i) {
        const std::span<const double> nodal(values.data() + i * stride, n);
        for (std::size_t j = 0; j < v.size(); ++j) {
            const double exact = values[i * stride + n + j];
            worst = std::max(worst, std::abs(exact - sys.interpolate(nodal, v[j])));
        }
    }
    return worst;
}

double decay_construction_bound(const Bandlimited& spec, double margin, std::size_t depth)
{
    validate(spec);
    require(margin > 0.0, "decay_construction_bound: margin must be > 0");
    require(depth >= 2, "decay_construction_bound: depth must be >= 2");
    const double lebesgue = lebesgue_upper_bound(
        static_cast<std::size_t>(std::ceil(spec.omega / 2.0 + margin)));
    return 2.0 / kPi * spec.mu * static_cast<double>(depth - 1) *
           std::pow(lebesgue, static_cast<double>(depth - 2)) * std::exp(-margin / 2.0);
}

} // namespace qtt

#include "qtt/cheb.hpp"

#include "qtt/error.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numbers>

namespace qtt {

namespace {
constexpr double kNodeSnap = 1e-14;
}

std::vector<double> lobatto_nodes(std::size_t order)
{
    if (order == 0)
        throw ValidationError("lobatto_nodes: order must be at least 1");
    // (cos(pi a/N) + 1)/2 written as (1 + sin(pi (N - 2a) / 2N)) / 2 so that
    // the grid is exactly symmetric and hits 0, 1/2, 1 exactly.
    std::vector<double> c(order + 1);
    const double n = static_cast<double>(order);
    for (std::size_t a = 0; a <= order; ++a) {
        const double k = n - 2.0 * static_cast<double>(a);
        c[a] = 0.5 * (1.0 + std::sin(std::numbers::pi * k / (2.0 * n)));
    }
    c.front() = 1.0;
    c.back() = 0.0;
    return c;
}

ChebSystem::ChebSystem(std::size_t order) : order_(order), nodes_(lobatto_nodes(order))
{
    weights_.resize(order + 1);
    for (std::size_t a = 0; a <= order; ++a)
        weights_[a] = (a % 2 == 0) ? 1.0 : -1.0;
    weights_.front() *= 0.5;
    weights_.back() *= 0.5;
}

double ChebSystem::angle(std::size_t alpha) const
{
    return static_cast<double>(alpha) * std::numbers::pi / static_cast<double>(order_);
}

void ChebSystem::cardinal_row(double x, std::span<double> out) const
{
    assert(out.size() == nodes_.size());
    const std::size_t n = nodes_.size();
    for (std::size_t a = 0; a < n; ++a) {
        if (std::abs(x - nodes_[a]) < kNodeSnap) {
            std::fill(out.begin(), out.end(), 0.0);
            out[a] = 1.0;
            return;
        }
    }
    double denom = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
        out[a] = weights_[a] / (x - nodes_[a]);
        denom += out[a];
    }
    for (std::size_t a = 0; a < n; ++a)
        out[a] /= denom;
}

std::vector<double> ChebSystem::cardinal_row(double x) const
{
    std::vector<double> out(nodes_.size());
    cardinal_row(x, out);
    return out;
}

double ChebSystem::cardinal(std::size_t alpha, double x) const
{
    if (alpha > order_)
        throw ValidationError("cardinal: alpha out of range");
    assert(x >= -1e-12 && x <= 1.0 + 1e-12 && "cardinal: x outside [0,1]");
    if (std::abs(x - nodes_[alpha]) < kNodeSnap)
        return 1.0;
    double denom = 0.0;
    for (std::size_t a = 0; a < nodes_.size(); ++a) {
        const double d = x - nodes_[a];
        if (std::abs(d) < kNodeSnap)
            return 0.0;
        denom += weights_[a] / d;
    }
    return weights_[alpha] / (x - nodes_[alpha]) / denom;
}

double ChebSystem::interpolate(std::span<const double> values, double x) const
{
    if (values.size() != nodes_.size())
        throw ValidationError("interpolate: expected N+1 values");
    double num = 0.0, denom = 0.0;
    for (std::size_t a = 0; a < nodes_.size(); ++a) {
        const double d = x - nodes_[a];
        if (std::abs(d) < kNodeSnap)
            return values[a];
        const double t = weights_[a] / d;
        num += t * values[a];
        denom += t;
    }
    return num / denom;
}

double lebesgue_constant(const ChebSystem& sys, std::size_t resolution)
{
    if (resolution < 10 * sys.size())
        throw ValidationError("lebesgue_constant: resolution must be >= 10 (N+1)");
    std::vector<double> row(sys.size());
    double best = 0.0;
    for (std::size_t i = 0; i < resolution; ++i) {
        const double x = static_cast<double>(i) / static_cast<double>(resolution - 1);
        sys.cardinal_row(x, row);
        double s = 0.0;
        for (double v : row)
            s += std::abs(v);
        best = std::max(best, s);
    }
    return best;
}

double lebesgue_upper_bound(std::size_t order)
{
    return 1.0 + (2.0 / std::numbers::pi) * std::log(static_cast<double>(order) + 1.0);
}

double angle_of(double x)
{
    x = std::clamp(x, 0.0, 1.0);
    // x = cos^2(theta/2); the half-angle form keeps accuracy near both ends.
    return 2.0 * std::atan2(std::sqrt(1.0 - x), std::sqrt(x));
}

LocalInterpSystem::LocalInterpSystem(ChebSystem base, std::size_t half_width)
    : base_(std::move(base)), half_width_(half_width)
{
    if (half_width_ < 1 || half_width_ > base_.order())
        throw ValidationError("LocalInterpSystem: need 1 <= M <= N");
}

std::size_t LocalInterpSystem::reflect(long index) const
{
    const long n = static_cast<long>(base_.order());
    if (index < -n || index > 2 * n)
        throw ValidationError("reflect: index outside -N..2N");
    if (index < 0)
        return static_cast<std::size_t>(-index);
    if (index > n)
        return static_cast<std::size_t>(2 * n - index);
    return static_cast<std::size_t>(index);
}

std::size_t LocalInterpSystem::nearest(double theta) const
{
    const double t = theta * static_cast<double>(base_.order()) / std::numbers::pi;
    const double i = std::ceil(t - 0.5);
    return static_cast<std::size_t>(std::clamp(i, 0.0, static_cast<double>(base_.order())));
}

std::vector<std::pair<std::size_t, double>> LocalInterpSystem::weights(double x) const
{
    const double theta = angle_of(x);
    const std::size_t centre = nearest(theta);
    if (std::abs(x - base_.node(centre)) < kNodeSnap)
        return {{centre, 1.0}};

    const long m = static_cast<long>(half_width_);
    const long first = static_cast<long>(centre) - m;
    // Lagrange basis in the angular index coordinate t = N theta / pi; the
    // basis is invariant under the affine change from theta.
    const double t = theta * static_cast<double>(base_.order()) / std::numbers::pi;
    std::vector<std::pair<std::size_t, double>> out;
    out.reserve(static_cast<std::size_t>(2 * m + 1));
    for (long g = first; g <= first + 2 * m; ++g) {
        double l = 1.0;
        for (long b = first; b <= first + 2 * m; ++b) {
            if (b != g)
                l *= (t - static_cast<double>(b)) / static_cast<double>(g - b);
        }
        out.emplace_back(reflect(g), l);
    }
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<std::pair<std::size_t, double>> merged;
    merged.reserve(out.size());
    for (const auto& [a, v] : out) {
        if (!merged.empty() && merged.back().first == a)
            merged.back().second += v;
        else
            merged.emplace_back(a, v);
    }
    return merged;
}

double LocalInterpSystem::cardinal(std::size_t alpha, double x) const
{
    if (alpha > base_.order())
        throw ValidationError("local cardinal: alpha out of range");
    for (const auto& [a, v] : weights(x)) {
        if (a == alpha)
            return v;
    }
    return 0.0;
}

} // namespace qtt

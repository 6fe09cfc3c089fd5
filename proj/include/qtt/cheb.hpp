#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace qtt {

/// Chebyshev-Lobatto nodes on [0,1]: c^a = (cos(pi a / N) + 1) / 2, a = 0..N.
/// c^0 = 1 and c^N = 0; the nodes decrease strictly in a.
std::vector<double> lobatto_nodes(std::size_t order);

/// Degree-N interpolation on the Chebyshev-Lobatto grid of [0,1]. Cardinal
/// functions are evaluated with the barycentric formula, which is exact at
/// the nodes and stable in between.
class ChebSystem {
public:
    explicit ChebSystem(std::size_t order);

    std::size_t order() const { return order_; }
    /// Number of nodes, N + 1.
    std::size_t size() const { return nodes_.size(); }
    double node(std::size_t alpha) const { return nodes_.at(alpha); }
    std::span<const double> nodes() const { return nodes_; }
    /// theta^a = a pi / N.
    double angle(std::size_t alpha) const;

    /// P^alpha(x). Arguments outside [0,1] evaluate the polynomial extension.
    double cardinal(std::size_t alpha, double x) const;
    /// P^0(x) .. P^N(x) written to `out` (length N + 1).
    void cardinal_row(double x, std::span<double> out) const;
    std::vector<double> cardinal_row(double x) const;
    /// sum_a values[a] P^a(x).
    double interpolate(std::span<const double> values, double x) const;

private:
    std::size_t order_;
    std::vector<double> nodes_;
    std::vector<double> weights_;
};

/// max over a uniform grid of `resolution` points in [0,1] of sum_a |P^a(x)|.
/// Requires resolution >= 10 (N + 1).
double lebesgue_constant(const ChebSystem& sys, std::size_t resolution);

/// 1 + (2/pi) log(N + 1).
double lebesgue_upper_bound(std::size_t order);

/// Angular coordinate theta(x) in [0, pi] with x = (cos theta + 1) / 2.
double angle_of(double x);

/// Local Lagrange interpolation in the angular coordinate on the window of
/// 2M + 1 angular nodes centred at the node nearest to theta(x). The grid is
/// extended by reflection to indices -N..2N.
class LocalInterpSystem {
public:
    LocalInterpSystem(ChebSystem base, std::size_t half_width);

    const ChebSystem& base() const { return base_; }
    std::size_t half_width() const { return half_width_; }

    /// Representative in 0..N of an extended index in -N..2N
    /// (-g ~ g and N + g ~ N - g).
    std::size_t reflect(long index) const;
    /// Index of the nearest angular node; ties go to the smaller index.
    std::size_t nearest(double theta) const;

    /// Value of the local interpolant of P^alpha at x.
    double cardinal(std::size_t alpha, double x) const;
    /// Nonzero (alpha, I P^alpha(x)) pairs sorted by alpha; reflected window
    /// entries that land on the same alpha are summed. At most 2M + 1 pairs.
    std::vector<std::pair<std::size_t, double>> weights(double x) const;

private:
    ChebSystem base_;
    std::size_t half_width_;
};

} // namespace qtt

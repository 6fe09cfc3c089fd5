#include "qtt/invert.hpp"

#include "qtt/cores.hpp"
#include "qtt/error.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <string>

namespace qtt {

using detail::require;

GridSamples GridSamples::dense(std::size_t level, Matrix values)
{
    require(level < 63, "GridSamples: level too large for dense storage");
    require(static_cast<std::size_t>(values.rows()) == (std::size_t{1} << level),
            "GridSamples: dense values need 2^m rows");
    require(values.cols() > 0, "GridSamples: empty rows");
    require(values.allFinite(), "GridSamples: non-finite entries");
    GridSamples g;
    g.level_ = level;
    g.dense_ = true;
    g.tail_ = std::move(values);
    return g;
}

GridSamples GridSamples::lazy(std::vector<Core> prefix_cores, Matrix tail)
{
    require(!prefix_cores.empty(), "GridSamples: lazy form needs at least one core");
    require(prefix_cores.front().left() == 1, "GridSamples: first core must have left rank 1");
    for (std::size_t k = 0; k + 1 < prefix_cores.size(); ++k)
        require(prefix_cores[k].right() == prefix_cores[k + 1].left(),
                "GridSamples: rank mismatch between prefix cores");
    for (const Core& c : prefix_cores)
        require(c.ext() == 2, "GridSamples: prefix cores must be binary");
    require(static_cast<std::size_t>(tail.rows()) == prefix_cores.back().right(),
            "GridSamples: tail rows must match the last rank");
    require(tail.allFinite(), "GridSamples: non-finite tail");
    GridSamples g;
    g.level_ = prefix_cores.size();
    g.dense_ = false;
    g.cores_ = std::move(prefix_cores);
    g.tail_ = std::move(tail);
    return g;
}

std::vector<double> GridSamples::row(std::uint64_t prefix) const
{
    if (level_ < 63 && prefix >= (std::uint64_t{1} << level_))
        throw ContractViolation("GridSamples::row: prefix out of range");
    if (dense_) {
        const auto r = tail_.row(static_cast<Eigen::Index>(prefix));
        return std::vector<double>(r.begin(), r.end());
    }
    Eigen::RowVectorXd v = Eigen::RowVectorXd::Ones(1);
    for (std::size_t k = 0; k < level_; ++k) {
        const std::size_t s = (prefix >> (level_ - 1 - k)) & 1u;
        v = v * cores_[k].slice(s);
    }
    const Eigen::RowVectorXd out = v * tail_;
    return std::vector<double>(out.data(), out.data() + out.size());
}

Matrix GridSamples::to_dense(std::size_t cap) const
{
    if (dense_)
        return tail_;
    if (level_ >= 63 || (std::size_t{1} << level_) > cap / width())
        throw SizeError("GridSamples::to_dense: 2^m (N+1) exceeds the cap");
    // Prefix environments level by level: rows ordered by prefix integer.
    Matrix env = Matrix::Ones(1, 1);
    for (const Core& c : cores_) {
        Matrix next(env.rows() * 2, static_cast<Eigen::Index>(c.right()));
        for (Eigen::Index p = 0; p < env.rows(); ++p)
            for (std::size_t s = 0; s < 2; ++s)
                next.row(2 * p + static_cast<Eigen::Index>(s)) = env.row(p) * c.slice(s);
        env = std::move(next);
    }
    return env * tail_;
}

GridSamples stage1_recover(const TensorTrain& tt, const ChebSystem& sys, std::size_t q)
{
    const std::size_t K = tt.depth();
    if (q < 1 || q > 4 || q + 1 > K)
        throw ValidationError("stage1_recover: need 1 <= q <= min(4, K-1)");
    for (std::size_t e : tt.external_dims())
        require(e == 2, "stage1_recover: binary cores required");
    const Matrix l = build_lagrange_tensor(sys, q);

    // Y_t for the remaining trailing bits t, contracted right to left.
    std::vector<Matrix> y(static_cast<std::size_t>(l.rows()));
    for (std::size_t t = 0; t < y.size(); ++t)
        y[t] = l.row(static_cast<Eigen::Index>(t));
    for (std::size_t j = K; j > K - q; --j) {
        const Core& a = tt.core(j - 1);
        std::vector<Matrix> next(y.size() / 2);
        for (std::size_t t = 0; t < next.size(); ++t)
            next[t] = a.slice(0) * y[2 * t] + a.slice(1) * y[2 * t + 1];
        y = std::move(next);
    }
    std::vector<Core> prefix(tt.cores().begin(), tt.cores().begin() + static_cast<long>(K - q));
    return GridSamples::lazy(std::move(prefix), std::move(y.front()));
}

GridSamples stage2_coarsen(const GridSamples& samples, const Core& g)
{
    require(samples.level() >= 1, "stage2_coarsen: samples level must be >= 1");
    if (g.ext() != 2 || g.left() != samples.width() || g.right() != samples.width())
        throw ValidationError("stage2_coarsen: G shape does not match the sample width");
    const std::size_t k = samples.level() - 1;

    if (samples.is_dense()) {
        const Matrix& v = samples.tail();
        Matrix out(v.rows() / 2, v.cols());
        const Matrix g0 = g.slice(0), g1 = g.slice(1);
        for (Eigen::Index p = 0; p < out.rows(); ++p)
            out.row(p) = v.row(2 * p) * g0 + v.row(2 * p + 1) * g1;
        return GridSamples::dense(k, std::move(out));
    }

    const auto& cores = samples.prefix_cores();
    const Core& a = cores.back();
    const Matrix& w = samples.tail();
    Matrix tail = a.slice(0) * (w * g.slice(0)) + a.slice(1) * (w * g.slice(1));
    if (k == 0)
        return GridSamples::dense(0, std::move(tail));
    std::vector<Core> prefix(cores.begin(), cores.end() - 1);
    return GridSamples::lazy(std::move(prefix), std::move(tail));
}

GridSamples recover_grid(const TensorTrain& tt, const ChebSystem& sys, std::size_t q,
                         std::size_t level)
{
    const std::size_t K = tt.depth();
    if (q < 1 || q + 1 > K)
        throw ValidationError("recover_grid: need 1 <= q <= K-1");
    if (level < 1 || level > K - q)
        throw ValidationError("recover_grid: need 1 <= m <= K-q");
    GridSamples s = stage1_recover(tt, sys, q);
    const Core g = build_inverse_core(sys);
    while (s.level() > level)
        s = stage2_coarsen(s, g);
    return s;
}

GridSamples sample_grid(FunctionOracle& f, const ChebSystem& sys, std::size_t level)
{
    require(f.dimension() == 1, "sample_grid: univariate oracle required");
    require(level < 40, "sample_grid: level too large");
    const std::size_t rows = std::size_t{1} << level;
    const std::size_t n = sys.size();
    const double h = std::ldexp(1.0, -static_cast<int>(level));
    std::vector<double> points(rows * n);
    for (std::size_t p = 0; p < rows; ++p)
        for (std::size_t b = 0; b < n; ++b)
            points[p * n + b] = h * (static_cast<double>(p) + sys.node(b));
    const std::vector<double> values = f.evaluate_batch(points);
    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(n));
    std::copy(values.begin(), values.end(), m.data());
    return GridSamples::dense(level, std::move(m));
}

void write_grid_csv(const GridSamples& samples, const ChebSystem& sys, std::ostream& out,
                    std::size_t cap)
{
    require(samples.width() == sys.size(), "write_grid_csv: width does not match the grid");
    const std::size_t m = samples.level();
    if (m >= 63 || (std::size_t{1} << m) > cap / samples.width())
        throw SizeError("write_grid_csv: too many rows");
    const double h = std::ldexp(1.0, -static_cast<int>(m));
    out << "prefix_bits,beta,x,value\n";
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (std::uint64_t p = 0; p < (std::uint64_t{1} << m); ++p) {
        std::string bits(m, '0');
        for (std::size_t k = 0; k < m; ++k)
            if ((p >> (m - 1 - k)) & 1u)
                bits[k] = '1';
        const std::vector<double> values = samples.row(p);
        for (std::size_t b = 0; b < values.size(); ++b)
            out << bits << ',' << b << ',' << h * (static_cast<double>(p) + sys.node(b)) << ','
                << values[b] << '\n';
    }
}

} // namespace qtt

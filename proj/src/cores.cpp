#include "qtt/cores.hpp"

#include "qtt/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_set>

namespace qtt {

using detail::require;

// ---------------------------------------------------------------- SparseCore

SparseCore::SparseCore(std::size_t ext, std::size_t left, std::size_t right)
    : ext_(ext), left_(left), right_(right)
{
    require(ext > 0 && left > 0 && right > 0, "SparseCore: dimensions must be positive");
}

void SparseCore::append_column(std::span<const std::pair<std::size_t, double>> entries)
{
    require(starts_.size() <= ext_ * right_, "SparseCore: too many columns");
    for (const auto& [a, v] : entries) {
        require(a < left_, "SparseCore: row index out of range");
        rows_.push_back(a);
        values_.push_back(v);
    }
    starts_.push_back(rows_.size());
}

std::span<const std::size_t> SparseCore::column_rows(std::size_t sigma, std::size_t beta) const
{
    const std::size_t c = sigma * right_ + beta;
    return std::span<const std::size_t>(rows_).subspan(starts_[c], starts_[c + 1] - starts_[c]);
}

std::span<const double> SparseCore::column_values(std::size_t sigma, std::size_t beta) const
{
    const std::size_t c = sigma * right_ + beta;
    return std::span<const double>(values_).subspan(starts_[c], starts_[c + 1] - starts_[c]);
}

double SparseCore::operator()(std::size_t sigma, std::size_t alpha, std::size_t beta) const
{
    const auto rows = column_rows(sigma, beta);
    const auto vals = column_values(sigma, beta);
    const auto it = std::lower_bound(rows.begin(), rows.end(), alpha);
    if (it != rows.end() && *it == alpha)
        return vals[static_cast<std::size_t>(it - rows.begin())];
    return 0.0;
}

Matrix SparseCore::left_multiply(const Matrix& r, std::size_t sigma) const
{
    require(static_cast<std::size_t>(r.cols()) == left_, "SparseCore::left_multiply: shape mismatch");
    require(starts_.size() == ext_ * right_ + 1, "SparseCore: incomplete");
    // Column-major scratch so that each output column is contiguous.
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(r.rows(), static_cast<Eigen::Index>(right_));
    const Eigen::MatrixXd rc = r;
    for (std::size_t b = 0; b < right_; ++b) {
        const auto rows = column_rows(sigma, b);
        const auto vals = column_values(sigma, b);
        auto col = out.col(static_cast<Eigen::Index>(b));
        for (std::size_t i = 0; i < rows.size(); ++i)
            col += vals[i] * rc.col(static_cast<Eigen::Index>(rows[i]));
    }
    return out;
}

Core SparseCore::to_dense() const
{
    Core c(ext_, left_, right_);
    for (std::size_t s = 0; s < ext_; ++s)
        for (std::size_t b = 0; b < right_; ++b) {
            const auto rows = column_rows(s, b);
            const auto vals = column_values(s, b);
            for (std::size_t i = 0; i < rows.size(); ++i)
                c(s, rows[i], b) = vals[i];
        }
    return c;
}

// ------------------------------------------------------------ basic cores

Core build_left_core(FunctionOracle& f, const ChebSystem& sys)
{
    require(f.dimension() == 1, "build_left_core: univariate oracle required");
    const std::size_t n = sys.size();
    std::vector<double> points(2 * n);
    for (std::size_t s = 0; s < 2; ++s)
        for (std::size_t b = 0; b < n; ++b)
            points[s * n + b] = (static_cast<double>(s) + sys.node(b)) / 2.0;
    return Core(2, 1, n, f.evaluate_batch(points));
}

Core build_interp_core(const ChebSystem& sys)
{
    const std::size_t n = sys.size();
    Core a(2, n, n);
    std::vector<double> row(n);
    for (std::size_t s = 0; s < 2; ++s)
        for (std::size_t b = 0; b < n; ++b) {
            sys.cardinal_row((static_cast<double>(s) + sys.node(b)) / 2.0, row);
            for (std::size_t al = 0; al < n; ++al)
                a(s, al, b) = row[al];
        }
    return a;
}

Core build_right_core(const ChebSystem& sys)
{
    const std::size_t n = sys.size();
    Core a(2, n, 1);
    std::vector<double> row(n);
    for (std::size_t s = 0; s < 2; ++s) {
        sys.cardinal_row(static_cast<double>(s) / 2.0, row);
        for (std::size_t al = 0; al < n; ++al)
            a(s, al, 0) = row[al];
    }
    return a;
}

SparseCore build_sparse_core(const LocalInterpSystem& lsys)
{
    const ChebSystem& sys = lsys.base();
    const std::size_t n = sys.size();
    SparseCore a(2, n, n);
    for (std::size_t s = 0; s < 2; ++s)
        for (std::size_t b = 0; b < n; ++b)
            a.append_column(lsys.weights((static_cast<double>(s) + sys.node(b)) / 2.0));
    return a;
}

CoreSet build_core_set(FunctionOracle& f, const ChebSystem& sys)
{
    return {build_left_core(f, sys), build_interp_core(sys), build_right_core(sys)};
}

// ------------------------------------------------------------ decay cores

DecaySchedule::DecaySchedule(double bandlimit, double margin, std::size_t depth)
    : bandlimit_(bandlimit), margin_(margin)
{
    require(bandlimit > 0.0, "DecaySchedule: bandlimit must be positive");
    require(margin > 0.0, "DecaySchedule: margin must be positive");
    require(depth >= 2 && depth < 63, "DecaySchedule: depth must be in [2, 62]");
    orders_.resize(depth);
    for (std::size_t k = 1; k <= depth; ++k)
        orders_[k - 1] = static_cast<std::size_t>(
            std::ceil(std::ldexp(bandlimit, -static_cast<int>(k)) + margin));
}

DecaySchedule::DecaySchedule(std::vector<std::size_t> orders) : orders_(std::move(orders))
{
    require(orders_.size() >= 2, "DecaySchedule: depth must be at least 2");
    for (std::size_t k = 0; k < orders_.size(); ++k) {
        require(orders_[k] >= 1, "DecaySchedule: orders must be >= 1");
        require(k == 0 || orders_[k] <= orders_[k - 1], "DecaySchedule: orders must be nonincreasing");
    }
}

std::vector<Core> build_decay_cores(const DecaySchedule& sched)
{
    const std::size_t K = sched.depth();
    std::vector<Core> cores;
    cores.reserve(K - 1);
    for (std::size_t k = 2; k <= K - 1; ++k) {
        const ChebSystem coarse(sched.order(k - 1));
        const ChebSystem fine(sched.order(k));
        Core a(2, coarse.size(), fine.size());
        std::vector<double> row(coarse.size());
        for (std::size_t s = 0; s < 2; ++s)
            for (std::size_t b = 0; b < fine.size(); ++b) {
                coarse.cardinal_row((static_cast<double>(s) + fine.node(b)) / 2.0, row);
                for (std::size_t al = 0; al < coarse.size(); ++al)
                    a(s, al, b) = row[al];
            }
        cores.push_back(std::move(a));
    }
    // The cap evaluates at the fine node c = 0, i.e. the left end s/2.
    cores.push_back(build_right_core(ChebSystem(sched.order(K - 1))));
    return cores;
}

// ---------------------------------------------------------- inversion cores

Core build_inverse_core(const ChebSystem& sys)
{
    const std::size_t n = sys.size();
    Core g(2, n, n);
    std::vector<double> row(n);
    for (std::size_t c = 0; c < n; ++c) {
        const double x = sys.node(c);
        const std::size_t s = x <= 0.5 ? 0 : 1;
        sys.cardinal_row(s == 0 ? 2.0 * x : 2.0 * x - 1.0, row);
        for (std::size_t a = 0; a < n; ++a)
            g(s, a, c) = row[a];
    }
    return g;
}

Matrix build_lagrange_tensor(const ChebSystem& sys, std::size_t q)
{
    if (q < 1 || q > 4)
        throw ValidationError("build_lagrange_tensor: q must be in [1, 4]");
    const std::size_t m = std::size_t{1} << q;
    const double h = std::ldexp(1.0, -static_cast<int>(q));
    Matrix l(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(sys.size()));
    for (std::size_t s = 0; s < m; ++s) {
        const double xs = static_cast<double>(s) * h;
        for (std::size_t b = 0; b < sys.size(); ++b) {
            double w = 1.0;
            for (std::size_t t = 0; t < m; ++t) {
                if (t == s)
                    continue;
                const double xt = static_cast<double>(t) * h;
                w *= (sys.node(b) - xt) / (xs - xt);
            }
            l(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(b)) = w;
        }
    }
    return l;
}

// ----------------------------------------------------------- danger tree

double Prefix::left_end() const
{
    return std::ldexp(static_cast<double>(bits), -static_cast<int>(length));
}

DangerTree::DangerTree(std::size_t depth, std::vector<std::vector<std::uint64_t>> levels)
    : depth_(depth), levels_(std::move(levels))
{
    require(depth >= 2 && depth < 63, "DangerTree: depth must be in [2, 62]");
    if (levels_.size() > depth - 1)
        throw ValidationError("DangerTree: more levels than K-1");
    levels_.resize(depth - 1);
    for (std::size_t k = 1; k < depth; ++k) {
        const auto& level = levels_[k - 1];
        std::unordered_set<std::uint64_t> seen;
        for (std::uint64_t p : level) {
            if (p >= (std::uint64_t{1} << k))
                throw ValidationError("DangerTree: prefix has more than k bits at level " +
                                      std::to_string(k));
            if (!seen.insert(p).second)
                throw ValidationError("DangerTree: duplicate prefix at level " + std::to_string(k));
            if (k > 1 && !find(k - 1, p >> 1))
                throw ValidationError("DangerTree: prefix at level " + std::to_string(k) +
                                      " does not extend a dangerous prefix");
        }
    }
}

DangerTree DangerTree::empty(std::size_t depth)
{
    return DangerTree(depth, {});
}

DangerTree DangerTree::left_edge(std::size_t depth)
{
    require(depth >= 2, "DangerTree: depth must be at least 2");
    return DangerTree(depth, std::vector<std::vector<std::uint64_t>>(depth - 1, {0}));
}

std::size_t DangerTree::count(std::size_t k) const
{
    if (k == 0 || k >= depth_)
        return 0;
    return levels_[k - 1].size();
}

std::optional<std::size_t> DangerTree::find(std::size_t k, std::uint64_t prefix) const
{
    if (k == 0 || k >= depth_)
        return std::nullopt;
    const auto& level = levels_[k - 1];
    const auto it = std::find(level.begin(), level.end(), prefix);
    if (it == level.end())
        return std::nullopt;
    return static_cast<std::size_t>(it - level.begin());
}

// ------------------------------------------------------ multiresolution

std::size_t multires_request_count(const ChebSystem& sys, const DangerTree& danger)
{
    const std::size_t n = sys.size();
    const std::size_t K = danger.depth();
    std::size_t safe = 2 - danger.count(1);
    for (std::size_t k = 2; k <= K - 1; ++k)
        for (std::size_t i = 0; i < danger.count(k - 1); ++i)
            for (std::uint64_t s = 0; s < 2; ++s)
                if (!danger.find(k, (danger.prefix(k - 1, i) << 1) | s))
                    ++safe;
    return n * safe + 2 * danger.count(K - 1);
}

std::vector<Core> build_multires_cores(FunctionOracle& f, const ChebSystem& sys,
                                       const DangerTree& danger)
{
    require(f.dimension() == 1, "build_multires_cores: univariate oracle required");
    const std::size_t K = danger.depth();
    const std::size_t n = sys.size();

    // Collect every sample point first so that the oracle sees one batch.
    struct Slot {
        std::size_t core, sigma, alpha, beta;
    };
    std::vector<double> points;
    std::vector<Slot> slots;

    std::vector<Core> cores;
    cores.reserve(K);

    {
        Core a1(2, 1, n + danger.count(1));
        for (std::uint64_t s = 0; s < 2; ++s) {
            if (auto i = danger.find(1, s)) {
                a1(s, 0, n + *i) = 1.0;
            } else {
                for (std::size_t b = 0; b < n; ++b) {
                    points.push_back((static_cast<double>(s) + sys.node(b)) / 2.0);
                    slots.push_back({0, s, 0, b});
                }
            }
        }
        cores.push_back(std::move(a1));
    }

    const Core interior = build_interp_core(sys);
    for (std::size_t k = 2; k <= K - 1; ++k) {
        const std::size_t qprev = danger.count(k - 1);
        Core ak(2, n + qprev, n + danger.count(k));
        const double h = std::ldexp(1.0, -static_cast<int>(k));
        for (std::uint64_t s = 0; s < 2; ++s) {
            ak.slice(s).topLeftCorner(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)) =
                interior.slice(s);
            for (std::size_t i = 0; i < qprev; ++i) {
                const Prefix parent{danger.prefix(k - 1, i), k - 1};
                const std::uint64_t child = (parent.bits << 1) | s;
                if (auto j = danger.find(k, child)) {
                    ak(s, n + i, n + *j) = 1.0;
                } else {
                    const double x0 = parent.left_end() + h * static_cast<double>(s);
                    for (std::size_t b = 0; b < n; ++b) {
                        points.push_back(x0 + h * sys.node(b));
                        slots.push_back({k - 1, s, n + i, b});
                    }
                }
            }
        }
        cores.push_back(std::move(ak));
    }

    {
        const Core ar = build_right_core(sys);
        const std::size_t qlast = danger.count(K - 1);
        Core aK(2, n + qlast, 1);
        const double h = std::ldexp(1.0, -static_cast<int>(K));
        for (std::size_t s = 0; s < 2; ++s) {
            for (std::size_t a = 0; a < n; ++a)
                aK(s, a, 0) = ar(s, a, 0);
            for (std::size_t i = 0; i < qlast; ++i) {
                const Prefix p{danger.prefix(K - 1, i), K - 1};
                points.push_back(p.left_end() + h * static_cast<double>(s));
                slots.push_back({K - 1, s, n + i, 0});
            }
        }
        cores.push_back(std::move(aK));
    }

    const std::vector<double> values = f.evaluate_batch(points);
    for (std::size_t j = 0; j < slots.size(); ++j) {
        const Slot& sl = slots[j];
        cores[sl.core](sl.sigma, sl.alpha, sl.beta) = values[j];
    }
    return cores;
}

} // namespace qtt

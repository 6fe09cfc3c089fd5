#include "qtt/tensor_train.hpp"

#include "qtt/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace qtt {

using detail::require;

Core::Core(std::size_t ext, std::size_t left, std::size_t right)
    : Core(ext, left, right, std::vector<double>(ext * left * right, 0.0))
{
}

Core::Core(std::size_t ext, std::size_t left, std::size_t right, std::vector<double> data)
    : ext_(ext), left_(left), right_(right), data_(std::move(data))
{
    require(ext > 0 && left > 0 && right > 0, "Core: dimensions must be positive");
    require(data_.size() == ext * left * right, "Core: data size does not match shape");
}

ConstMatrixMap Core::slice(std::size_t sigma) const
{
    return {data_.data() + sigma * left_ * right_, static_cast<Eigen::Index>(left_),
            static_cast<Eigen::Index>(right_)};
}

MatrixMap Core::slice(std::size_t sigma)
{
    return {data_.data() + sigma * left_ * right_, static_cast<Eigen::Index>(left_),
            static_cast<Eigen::Index>(right_)};
}

ConstMatrixMap Core::left_unfolding() const
{
    return {data_.data(), static_cast<Eigen::Index>(ext_ * left_),
            static_cast<Eigen::Index>(right_)};
}

Core core_from_left_unfolding(const Matrix& m, std::size_t ext)
{
    require(ext > 0 && static_cast<std::size_t>(m.rows()) % ext == 0,
            "core_from_left_unfolding: row count not divisible by ext");
    const auto left = static_cast<std::size_t>(m.rows()) / ext;
    const auto right = static_cast<std::size_t>(m.cols());
    std::vector<double> data(m.data(), m.data() + m.size());
    return Core(ext, left, right, std::move(data));
}

TensorTrain::TensorTrain(std::vector<Core> cores) : cores_(std::move(cores))
{
    require(!cores_.empty(), "TensorTrain: at least one core required");
    require(cores_.front().left() == 1, "TensorTrain: r_0 must be 1");
    require(cores_.back().right() == 1, "TensorTrain: r_K must be 1");
    for (std::size_t k = 0; k + 1 < cores_.size(); ++k) {
        if (cores_[k].right() != cores_[k + 1].left())
            throw ValidationError("TensorTrain: rank mismatch between cores " +
                                  std::to_string(k + 1) + " and " + std::to_string(k + 2));
    }
    for (const auto& c : cores_) {
        for (double v : c.data()) {
            if (!std::isfinite(v))
                throw ValidationError("TensorTrain: non-finite core entry");
        }
    }
}

std::vector<std::size_t> TensorTrain::ranks() const
{
    std::vector<std::size_t> r;
    r.reserve(cores_.size() + 1);
    r.push_back(1);
    for (const auto& c : cores_)
        r.push_back(c.right());
    return r;
}

std::vector<std::size_t> TensorTrain::external_dims() const
{
    std::vector<std::size_t> e;
    e.reserve(cores_.size());
    for (const auto& c : cores_)
        e.push_back(c.ext());
    return e;
}

std::size_t TensorTrain::max_rank() const
{
    std::size_t r = 1;
    for (const auto& c : cores_)
        r = std::max(r, c.right());
    return r;
}

std::size_t TensorTrain::dense_size() const
{
    std::size_t n = 1;
    for (const auto& c : cores_) {
        if (n > std::numeric_limits<std::size_t>::max() / c.ext())
            return std::numeric_limits<std::size_t>::max();
        n *= c.ext();
    }
    return n;
}

double tt_eval(const TensorTrain& tt, std::span<const std::size_t> index)
{
    if (index.size() != tt.depth())
        throw ContractViolation("tt_eval: index length " + std::to_string(index.size()) +
                                " does not match depth " + std::to_string(tt.depth()));
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Ones(1);
    for (std::size_t k = 0; k < tt.depth(); ++k) {
        const Core& c = tt.core(k);
        if (index[k] >= c.ext())
            throw ContractViolation("tt_eval: index entry out of range at position " +
                                    std::to_string(k + 1));
        row = row * c.slice(index[k]);
    }
    return row(0);
}

DenseTensor tt_to_dense(const TensorTrain& tt, std::size_t cap)
{
    const std::size_t n = tt.dense_size();
    if (n > cap)
        throw SizeError("tt_to_dense: " + std::to_string(n) + " entries exceed cap " +
                        std::to_string(cap));

    // Sweep left to right over all prefixes; row p of `env` is the
    // contraction of the first k cores at prefix p.
    Matrix env = Matrix::Ones(1, 1);
    for (const auto& c : tt.cores()) {
        Matrix next(env.rows() * static_cast<Eigen::Index>(c.ext()),
                    static_cast<Eigen::Index>(c.right()));
        for (std::size_t s = 0; s < c.ext(); ++s) {
            const Matrix part = env * c.slice(s);
            for (Eigen::Index p = 0; p < env.rows(); ++p)
                next.row(p * static_cast<Eigen::Index>(c.ext()) + static_cast<Eigen::Index>(s)) =
                    part.row(p);
        }
        env = std::move(next);
    }
    DenseTensor out;
    out.dims = tt.external_dims();
    out.values.assign(env.data(), env.data() + env.size());
    return out;
}

DenseTensor quantize(const std::function<double(double)>& f, std::size_t depth, std::size_t cap)
{
    require(depth >= 1 && depth < 63, "quantize: depth out of range");
    const std::size_t n = std::size_t{1} << depth;
    if (n > cap)
        throw SizeError("quantize: 2^" + std::to_string(depth) + " entries exceed cap");
    DenseTensor out;
    out.dims.assign(depth, 2);
    out.values.resize(n);
    const double h = std::ldexp(1.0, -static_cast<int>(depth));
    for (std::size_t j = 0; j < n; ++j)
        out.values[j] = f(static_cast<double>(j) * h);
    return out;
}

double tensor_norm(std::span<const double> values, Norm p)
{
    switch (p) {
    case Norm::inf: {
        double m = 0.0;
        for (double v : values)
            m = std::max(m, std::abs(v));
        return m;
    }
    case Norm::two:
    case Norm::frob: {
        double s = 0.0;
        for (double v : values)
            s += v * v;
        if (p == Norm::two)
            return values.empty() ? 0.0 : std::sqrt(s / static_cast<double>(values.size()));
        return std::sqrt(s);
    }
    }
    return 0.0;
}

double tensor_norm(const DenseTensor& x, Norm p)
{
    return tensor_norm(std::span<const double>(x.values), p);
}

TensorTrain tt_round(const TensorTrain& tt, double tol)
{
    require(tol >= 0.0, "tt_round: tol must be nonnegative");
    std::vector<Core> cores = tt.cores();
    const std::size_t K = cores.size();
    if (K == 1)
        return TensorTrain(std::move(cores));

    // Left-orthogonalize cores 1..K-1, pushing the R factors to the right.
    for (std::size_t k = 0; k + 1 < K; ++k) {
        const Matrix m = cores[k].left_unfolding();
        Eigen::HouseholderQR<Matrix> qr(m);
        const auto rank = std::min(m.rows(), m.cols());
        Matrix q = qr.householderQ() * Matrix::Identity(m.rows(), rank);
        Matrix r = qr.matrixQR().topRows(rank).triangularView<Eigen::Upper>();
        cores[k] = core_from_left_unfolding(q, cores[k].ext());
        Core& nxt = cores[k + 1];
        Core updated(nxt.ext(), static_cast<std::size_t>(rank), nxt.right());
        for (std::size_t s = 0; s < nxt.ext(); ++s)
            updated.slice(s) = r * nxt.slice(s);
        nxt = std::move(updated);
    }

    double norm = 0.0;
    for (double v : cores.back().data())
        norm += v * v;
    norm = std::sqrt(norm);
    const double budget = tol * norm / std::sqrt(static_cast<double>(K - 1));

    // Right-to-left truncation; each core becomes right-orthogonal.
    for (std::size_t k = K - 1; k >= 1; --k) {
        Core& c = cores[k];
        const auto left = static_cast<Eigen::Index>(c.left());
        const auto right = static_cast<Eigen::Index>(c.right());
        Matrix m(left, static_cast<Eigen::Index>(c.ext()) * right);
        for (std::size_t s = 0; s < c.ext(); ++s)
            m.middleCols(static_cast<Eigen::Index>(s) * right, right) = c.slice(s);
        const TruncatedSvd svd = truncated_svd(m, budget);
        const auto r = static_cast<std::size_t>(svd.s.size());

        Core trimmed(c.ext(), r, c.right());
        const Matrix vt = svd.v.transpose();
        for (std::size_t s = 0; s < c.ext(); ++s)
            trimmed.slice(s) = vt.middleCols(static_cast<Eigen::Index>(s) * right, right);
        c = std::move(trimmed);

        const Matrix us = svd.u * svd.s.asDiagonal();
        Core& prev = cores[k - 1];
        Core updated(prev.ext(), prev.left(), r);
        for (std::size_t s = 0; s < prev.ext(); ++s)
            updated.slice(s) = prev.slice(s) * us;
        prev = std::move(updated);
    }
    return TensorTrain(std::move(cores));
}

std::size_t unfolding_eps_rank(const DenseTensor& x, std::size_t m, double eps)
{
    const std::size_t K = x.depth();
    if (m < 1 || m + 1 > K)
        throw ValidationError("unfolding_eps_rank: level m=" + std::to_string(m) +
                              " outside [1, K-1]");
    require(eps >= 0.0, "unfolding_eps_rank: eps must be nonnegative");
    std::size_t rows = 1;
    for (std::size_t k = 0; k < m; ++k)
        rows *= x.dims[k];
    const std::size_t cols = x.size() / rows;
    const ConstMatrixMap unfolding(x.values.data(), static_cast<Eigen::Index>(rows),
                                   static_cast<Eigen::Index>(cols));
    const Vector s = singular_values(unfolding);
    const double budget = eps * std::sqrt(static_cast<double>(x.size()));
    return truncation_rank(s, budget);
}

std::vector<std::size_t> bits_of(std::uint64_t j, std::size_t depth)
{
    std::vector<std::size_t> bits(depth);
    for (std::size_t k = 0; k < depth; ++k)
        bits[depth - 1 - k] = static_cast<std::size_t>((j >> k) & 1u);
    return bits;
}

std::uint64_t flat_of(std::span<const std::size_t> bits)
{
    std::uint64_t j = 0;
    for (std::size_t b : bits)
        j = (j << 1) | static_cast<std::uint64_t>(b & 1u);
    return j;
}

TTEvaluator::TTEvaluator(const TensorTrain& tt) : dims_(tt.external_dims())
{
    const std::size_t K = tt.depth();
    const auto ranks = tt.ranks();
    // Balance prefix and suffix counts (log-scale), weighted by the bond size.
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s <= K; ++s) {
        double logp = 0.0, logq = 0.0;
        for (std::size_t k = 0; k < s; ++k)
            logp += std::log2(static_cast<double>(dims_[k]));
        for (std::size_t k = s; k < K; ++k)
            logq += std::log2(static_cast<double>(dims_[k]));
        const double cost = std::max(logp, logq) + std::log2(static_cast<double>(ranks[s]));
        if (cost < best) {
            best = cost;
            split_ = s;
        }
    }

    prefix_ = Matrix::Ones(1, 1);
    for (std::size_t k = 0; k < split_; ++k) {
        const Core& c = tt.core(k);
        const auto e = static_cast<Eigen::Index>(c.ext());
        Matrix next(prefix_.rows() * e, static_cast<Eigen::Index>(c.right()));
        for (Eigen::Index s = 0; s < e; ++s) {
            const Matrix part = prefix_ * c.slice(static_cast<std::size_t>(s));
            for (Eigen::Index p = 0; p < prefix_.rows(); ++p)
                next.row(p * e + s) = part.row(p);
        }
        prefix_ = std::move(next);
    }

    suffix_ = Matrix::Ones(1, 1);
    for (std::size_t k = K; k-- > split_;) {
        const Core& c = tt.core(k);
        const auto e = static_cast<Eigen::Index>(c.ext());
        const Eigen::Index q = suffix_.rows();
        Matrix next(q * e, static_cast<Eigen::Index>(c.left()));
        for (Eigen::Index s = 0; s < e; ++s)
            next.middleRows(s * q, q) = suffix_ * c.slice(static_cast<std::size_t>(s)).transpose();
        suffix_ = std::move(next);
    }
    suffix_count_ = static_cast<std::uint64_t>(suffix_.rows());
}

double TTEvaluator::operator()(std::span<const std::size_t> index) const
{
    if (index.size() != dims_.size())
        throw ContractViolation("TTEvaluator: index length does not match depth");
    std::uint64_t p = 0, q = 0;
    for (std::size_t k = 0; k < split_; ++k)
        p = p * dims_[k] + index[k];
    for (std::size_t k = split_; k < dims_.size(); ++k)
        q = q * dims_[k] + index[k];
    return prefix_.row(static_cast<Eigen::Index>(p)).dot(suffix_.row(static_cast<Eigen::Index>(q)));
}

double TTEvaluator::at(std::uint64_t flat) const
{
    const std::uint64_t p = flat / suffix_count_;
    const std::uint64_t q = flat % suffix_count_;
    return prefix_.row(static_cast<Eigen::Index>(p)).dot(suffix_.row(static_cast<Eigen::Index>(q)));
}

} // namespace qtt

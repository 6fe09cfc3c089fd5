#include "qtt/multivariate.hpp"

#include "qtt/error.hpp"

#include <algorithm>

namespace qtt {

using detail::require;

namespace {

std::size_t ipow(std::size_t base, std::size_t e)
{
    std::size_t r = 1;
    while (e-- > 0)
        r *= base;
    return r;
}

void check_shape(std::size_t dims, std::size_t depth)
{
    require(dims >= 1 && dims <= 3, "multivariate: dimension must be 1, 2 or 3");
    require(depth >= 2, "multivariate: depth must be at least 2");
}

} // namespace

std::size_t bit_position(std::size_t variable, std::size_t k, std::size_t dims, std::size_t depth,
                         Ordering ordering)
{
    require(variable < dims && k >= 1 && k <= depth, "bit_position: out of range");
    return ordering == Ordering::interleaved ? (k - 1) * dims + variable
                                             : variable * depth + (k - 1);
}

std::vector<SlotStep> step_schedule(std::size_t dims, std::size_t depth, Ordering ordering)
{
    check_shape(dims, depth);
    std::vector<SlotStep> steps;
    steps.reserve(dims * depth - 1);
    for (std::size_t p = 1; p < dims * depth; ++p) {
        const std::size_t v = ordering == Ordering::interleaved ? p % dims : p / depth;
        const std::size_t k = ordering == Ordering::interleaved ? p / dims + 1 : p % depth + 1;
        steps.push_back({k < depth ? SlotStep::Kind::interp : SlotStep::Kind::cap, v});
    }
    return steps;
}

std::vector<std::size_t> chain_index(std::span<const std::uint64_t> coords, std::size_t depth,
                                     Ordering ordering)
{
    const std::size_t d = coords.size();
    check_shape(d, depth);
    std::vector<std::size_t> index(d * depth);
    for (std::size_t v = 0; v < d; ++v) {
        require(coords[v] < (std::uint64_t{1} << depth), "chain_index: coordinate out of range");
        for (std::size_t k = 1; k <= depth; ++k)
            index[bit_position(v, k, d, depth, ordering)] = (coords[v] >> (depth - k)) & 1u;
    }
    return index;
}

Matrix multivariate_left_samples(FunctionOracle& f, const ChebSystem& sys)
{
    const std::size_t d = f.dimension();
    check_shape(d, 2);
    const std::size_t n = sys.size();
    const std::size_t cols = ipow(n, d);
    std::vector<double> points;
    points.reserve(2 * cols * d);
    std::vector<std::size_t> beta(d);
    for (std::size_t s = 0; s < 2; ++s) {
        for (std::size_t c = 0; c < cols; ++c) {
            std::size_t rest = c;
            for (std::size_t v = d; v-- > 0;) {
                beta[v] = rest % n;
                rest /= n;
            }
            points.push_back((static_cast<double>(s) + sys.node(beta[0])) / 2.0);
            for (std::size_t v = 1; v < d; ++v)
                points.push_back(sys.node(beta[v]));
        }
    }
    const std::vector<double> values = f.evaluate_batch(points);
    Matrix out(2, static_cast<Eigen::Index>(cols));
    std::copy(values.begin(), values.end(), out.data());
    return out;
}

Matrix apply_slot(const Matrix& r, std::size_t pre, std::size_t post, const Core& op,
                  std::size_t sigma)
{
    const std::size_t n = op.left(), nout = op.right();
    require(static_cast<std::size_t>(r.cols()) == pre * n * post, "apply_slot: shape mismatch");
    const std::size_t blocks = static_cast<std::size_t>(r.rows()) * pre;
    Matrix out(r.rows(), static_cast<Eigen::Index>(pre * nout * post));
    const auto a = op.slice(sigma);
    if (post == 1) {
        ConstMatrixMap in(r.data(), static_cast<Eigen::Index>(blocks), static_cast<Eigen::Index>(n));
        MatrixMap dst(out.data(), static_cast<Eigen::Index>(blocks), static_cast<Eigen::Index>(nout));
        dst.noalias() = in * a;
        return out;
    }
    const Matrix at = a.transpose();
    for (std::size_t b = 0; b < blocks; ++b) {
        ConstMatrixMap in(r.data() + b * n * post, static_cast<Eigen::Index>(n),
                          static_cast<Eigen::Index>(post));
        MatrixMap dst(out.data() + b * nout * post, static_cast<Eigen::Index>(nout),
                      static_cast<Eigen::Index>(post));
        dst.noalias() = at * in;
    }
    return out;
}

Matrix apply_slot(const Matrix& r, std::size_t pre, std::size_t post, const SparseCore& op,
                  std::size_t sigma)
{
    const std::size_t n = op.left(), nout = op.right();
    require(static_cast<std::size_t>(r.cols()) == pre * n * post, "apply_slot: shape mismatch");
    const std::size_t blocks = static_cast<std::size_t>(r.rows()) * pre;
    Matrix out = Matrix::Zero(r.rows(), static_cast<Eigen::Index>(pre * nout * post));
    const double* src = r.data();
    double* dst = out.data();
    for (std::size_t b = 0; b < blocks; ++b) {
        const double* in = src + b * n * post;
        double* o = dst + b * nout * post;
        for (std::size_t beta = 0; beta < nout; ++beta) {
            const auto rows = op.column_rows(sigma, beta);
            const auto vals = op.column_values(sigma, beta);
            double* orow = o + beta * post;
            for (std::size_t i = 0; i < rows.size(); ++i) {
                const double* irow = in + rows[i] * post;
                const double w = vals[i];
                for (std::size_t q = 0; q < post; ++q)
                    orow[q] += w * irow[q];
            }
        }
    }
    return out;
}

Core kronecker_core(const Core& op, std::size_t pre, std::size_t post)
{
    const std::size_t n = op.left(), nout = op.right();
    Core out(op.ext(), pre * n * post, pre * nout * post);
    for (std::size_t s = 0; s < op.ext(); ++s)
        for (std::size_t p = 0; p < pre; ++p)
            for (std::size_t a = 0; a < n; ++a)
                for (std::size_t b = 0; b < nout; ++b)
                    for (std::size_t q = 0; q < post; ++q)
                        out(s, (p * n + a) * post + q, (p * nout + b) * post + q) = op(s, a, b);
    return out;
}

std::vector<Core> multivariate_dense_cores(FunctionOracle& f, const ChebSystem& sys,
                                           std::size_t depth, Ordering ordering)
{
    const std::size_t d = f.dimension();
    const std::size_t n = sys.size();
    const auto steps = step_schedule(d, depth, ordering);
    const Core interior = build_interp_core(sys);
    const Core right = build_right_core(sys);

    std::vector<Core> cores;
    cores.reserve(steps.size() + 1);
    const Matrix left = multivariate_left_samples(f, sys);
    cores.emplace_back(2, 1, static_cast<std::size_t>(left.cols()),
                       std::vector<double>(left.data(), left.data() + left.size()));

    std::vector<bool> open(d, true);
    for (const SlotStep& st : steps) {
        std::size_t before = 0, after = 0;
        for (std::size_t v = 0; v < d; ++v) {
            if (!open[v] || v == st.variable)
                continue;
            (v < st.variable ? before : after) += 1;
        }
        const Core& op = st.kind == SlotStep::Kind::interp ? interior : right;
        cores.push_back(kronecker_core(op, ipow(n, before), ipow(n, after)));
        if (st.kind == SlotStep::Kind::cap)
            open[st.variable] = false;
    }
    return cores;
}

} // namespace qtt

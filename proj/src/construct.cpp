#include "qtt/construct.hpp"

#include "qtt/error.hpp"
#include "qtt/linalg.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <memory>
#include <string>

namespace qtt {

using detail::require;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Tracks counter deltas and wall time of one build.
class ReportScope {
public:
    explicit ReportScope(FunctionOracle& f)
        : f_(f), requests0_(f.requests()), evaluations0_(f.evaluations()), t0_(Clock::now())
    {
    }

    BuildResult finish(TensorTrain tt, BuildReport report) const
    {
        report.ranks = tt.ranks();
        report.requests = f_.requests() - requests0_;
        report.evaluations = f_.evaluations() - evaluations0_;
        report.wall_seconds = seconds_since(t0_);
        return {std::move(tt), std::move(report)};
    }

private:
    FunctionOracle& f_;
    std::size_t requests0_, evaluations0_;
    Clock::time_point t0_;
};

// r -> r * Op(sigma) for one bit of the chain.
using SlotApply = std::function<Matrix(const Matrix&, std::size_t)>;

Matrix stack_both(const SlotApply& op, const Matrix& r)
{
    const Matrix b0 = op(r, 0);
    const Matrix b1 = op(r, 1);
    Matrix b(b0.rows() + b1.rows(), b0.cols());
    b.topRows(b0.rows()) = b0;
    b.bottomRows(b1.rows()) = b1;
    return b;
}

// Shared rank-revealing sweep. `left` is the 2 x D_0 first-core unfolding.
std::vector<Core> reveal(const Matrix& left, const std::vector<SlotApply>& ops,
                         const TruncationPolicy& policy, BuildReport& report)
{
    std::vector<Core> cores;
    cores.reserve(ops.size() + 1);
    Matrix b = left;
    for (std::size_t k = 1; k <= ops.size(); ++k) {
        TruncatedSvd svd;
        try {
            svd = truncated_svd(b, policy.budget(k), policy.max_rank);
        } catch (const NumericalError& e) {
            throw NumericalError("level " + std::to_string(k) + ": " + e.what());
        }
        if (!svd.u.allFinite() || !svd.s.allFinite() || !svd.v.allFinite())
            throw NumericalError("level " + std::to_string(k) + ": non-finite SVD factors");
        report.discarded.push_back(svd.discarded);
        cores.push_back(core_from_left_unfolding(svd.u, 2));
        const Matrix r = svd.s.asDiagonal() * svd.v.transpose();
        b = stack_both(ops[k - 1], r);
    }
    require(b.cols() == 1, "reveal: chain does not close");
    cores.push_back(core_from_left_unfolding(b, 2));
    return cores;
}

std::size_t ipow(std::size_t base, std::size_t e)
{
    std::size_t r = 1;
    while (e-- > 0)
        r *= base;
    return r;
}

// One SlotApply per bit after the first, following the step schedule.
std::vector<SlotApply> slot_ops(std::size_t dims, std::size_t depth, Ordering ordering,
                                const ChebSystem& sys, std::shared_ptr<const Core> interior,
                                std::shared_ptr<const SparseCore> sparse,
                                std::shared_ptr<const Core> right)
{
    const std::size_t n = sys.size();
    std::vector<SlotApply> ops;
    std::vector<bool> open(dims, true);
    for (const SlotStep& st : step_schedule(dims, depth, ordering)) {
        std::size_t before = 0, after = 0;
        for (std::size_t v = 0; v < dims; ++v) {
            if (open[v] && v != st.variable)
                (v < st.variable ? before : after) += 1;
        }
        const std::size_t pre = ipow(n, before), post = ipow(n, after);
        if (st.kind == SlotStep::Kind::cap) {
            ops.push_back([=](const Matrix& r, std::size_t s) { return apply_slot(r, pre, post, *right, s); });
            open[st.variable] = false;
        } else if (sparse) {
            ops.push_back([=](const Matrix& r, std::size_t s) { return apply_slot(r, pre, post, *sparse, s); });
        } else {
            ops.push_back([=](const Matrix& r, std::size_t s) { return apply_slot(r, pre, post, *interior, s); });
        }
    }
    return ops;
}

// Cores k = 1..k0 enumerate the prefix exactly: entry (s, a, 2a + s) = 1.
Core prefix_tree_core(std::size_t k)
{
    const std::size_t left = std::size_t{1} << (k - 1);
    Core c(2, left, 2 * left);
    for (std::size_t s = 0; s < 2; ++s)
        for (std::size_t a = 0; a < left; ++a)
            c(s, a, 2 * a + s) = 1.0;
    return c;
}

} // namespace

double TruncationPolicy::budget(std::size_t k) const
{
    if (mode == TruncationMode::rank_cap)
        return 0.0;
    return eps * std::sqrt(std::ldexp(1.0, static_cast<int>(k)));
}

void TruncationPolicy::validate() const
{
    require(std::isfinite(eps) && eps >= 0.0, "TruncationPolicy: eps must be finite and >= 0");
    require(mode != TruncationMode::rank_cap || max_rank >= 1,
            "TruncationPolicy: rank-cap mode needs max_rank >= 1");
}

BuildResult construct_basic(FunctionOracle& f, const ChebSystem& sys, std::size_t depth)
{
    require(depth >= 2, "construct_basic: depth must be at least 2");
    require(f.dimension() == 1, "construct_basic: univariate oracle required");
    ReportScope scope(f);
    std::vector<Core> cores;
    cores.reserve(depth);
    cores.push_back(build_left_core(f, sys));
    const auto t0 = Clock::now();
    const Core a = build_interp_core(sys);
    for (std::size_t k = 2; k < depth; ++k)
        cores.push_back(a);
    cores.push_back(build_right_core(sys));
    BuildReport report;
    report.core_seconds = seconds_since(t0);
    report.discarded.assign(depth - 1, 0.0);
    return scope.finish(TensorTrain(std::move(cores)), std::move(report));
}

BuildResult construct_rank_revealing(FunctionOracle& f, const ChebSystem& sys, std::size_t depth,
                                     const TruncationPolicy& policy,
                                     std::optional<std::size_t> local_order)
{
    require(f.dimension() == 1, "construct_rank_revealing: univariate oracle required");
    return construct_multivariate(f, sys, depth, Ordering::serial, policy, local_order);
}

BuildResult construct_decay(FunctionOracle& f, const DecaySchedule& sched)
{
    require(f.dimension() == 1, "construct_decay: univariate oracle required");
    const std::size_t K = sched.depth();
    ReportScope scope(f);

    // k0: last level where the exact prefix enumeration is narrower than the grid.
    std::size_t k0 = 0;
    while (k0 + 1 < K && (std::size_t{1} << (k0 + 1)) < sched.order(k0 + 1) + 1)
        ++k0;

    std::vector<Core> cores;
    cores.reserve(K);
    for (std::size_t k = 1; k <= k0; ++k)
        cores.push_back(prefix_tree_core(k));

    // Sample core at level k0+1: f(x_{<=k0} + 2^-(k0+1) (s + c^b)).
    const std::size_t ks = k0 + 1;
    const std::size_t prefixes = std::size_t{1} << k0;
    const double h = std::ldexp(1.0, -static_cast<int>(ks));
    std::vector<double> points;
    std::size_t width = 1;
    if (ks < K) {
        const ChebSystem grid(sched.order(ks));
        width = grid.size();
        points.resize(2 * prefixes * width);
        for (std::size_t s = 0; s < 2; ++s)
            for (std::size_t p = 0; p < prefixes; ++p)
                for (std::size_t b = 0; b < width; ++b)
                    points[(s * prefixes + p) * width + b] =
                        h * (2.0 * static_cast<double>(p) + static_cast<double>(s) + grid.node(b));
    } else {
        points.resize(2 * prefixes);
        for (std::size_t s = 0; s < 2; ++s)
            for (std::size_t p = 0; p < prefixes; ++p)
                points[s * prefixes + p] = h * (2.0 * static_cast<double>(p) + static_cast<double>(s));
    }
    cores.emplace_back(2, prefixes, width, f.evaluate_batch(points));

    const auto t0 = Clock::now();
    if (ks < K) {
        std::vector<Core> tail = build_decay_cores(sched);
        // tail[j] is A_{j+2}; the last entry is the cap.
        for (std::size_t j = ks - 1; j < tail.size(); ++j)
            cores.push_back(std::move(tail[j]));
    }
    BuildReport report;
    report.core_seconds = seconds_since(t0);
    report.discarded.assign(K - 1, 0.0);
    return scope.finish(TensorTrain(std::move(cores)), std::move(report));
}

BuildResult construct_multires(FunctionOracle& f, const ChebSystem& sys, const DangerTree& danger)
{
    ReportScope scope(f);
    std::vector<Core> cores = build_multires_cores(f, sys, danger);
    BuildReport report;
    report.discarded.assign(danger.depth() - 1, 0.0);
    return scope.finish(TensorTrain(std::move(cores)), std::move(report));
}

BuildResult construct_multivariate(FunctionOracle& f, const ChebSystem& sys, std::size_t depth,
                                   Ordering ordering, const TruncationPolicy& policy,
                                   std::optional<std::size_t> local_order)
{
    policy.validate();
    const std::size_t d = f.dimension();
    require(d >= 1 && d <= 3, "construct_multivariate: dimension must be 1, 2 or 3");
    require(depth >= 2, "construct_multivariate: depth must be at least 2");
    ReportScope scope(f);

    const Matrix left = multivariate_left_samples(f, sys);
    const auto t0 = Clock::now();
    auto right = std::make_shared<const Core>(build_right_core(sys));
    std::shared_ptr<const Core> interior;
    std::shared_ptr<const SparseCore> sparse;
    if (local_order)
        sparse = std::make_shared<const SparseCore>(build_sparse_core(LocalInterpSystem(sys, *local_order)));
    else
        interior = std::make_shared<const Core>(build_interp_core(sys));

    BuildReport report;
    std::vector<Core> cores =
        reveal(left, slot_ops(d, depth, ordering, sys, interior, sparse, right), policy, report);
    report.core_seconds = seconds_since(t0);
    return scope.finish(TensorTrain(std::move(cores)), std::move(report));
}

} // namespace qtt

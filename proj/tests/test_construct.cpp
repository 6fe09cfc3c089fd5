#include "oracles.hpp"

#include "qtt/bounds.hpp"
#include "qtt/construct.hpp"
#include "qtt/error.hpp"
#include "qtt/experiments.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace qtt;

namespace {

const double kPi = std::numbers::pi;

std::vector<double> diff(const std::vector<double>& a, const std::vector<double>& b)
{
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        d[i] = a[i] - b[i];
    return d;
}

double lebesgue(std::size_t N)
{
    return lebesgue_constant(ChebSystem(N), 20 * (N + 1));
}

// Max |T - S| over random and structured dyadic indices, evaluated by plain
// chain products.
double sampled_error(const TensorTrain& tt, const std::function<double(double)>& f,
                     std::size_t count, std::uint64_t seed)
{
    const std::size_t K = tt.depth();
    std::mt19937_64 g(seed);
    double err = 0.0;
    auto check = [&](std::uint64_t j) {
        err = std::max(err, std::abs(oracle::chain(tt, oracle::bits(j, K)) -
                                     f(std::ldexp(double(j), -int(K)))));
    };
    for (std::size_t i = 0; i < count; ++i)
        check(g() >> (64 - K));
    check(0);
    check((std::uint64_t{1} << K) - 1);
    check(std::uint64_t{1} << (K - 1));
    return err;
}

void check_left_orthogonal(const TensorTrain& tt)
{
    for (std::size_t k = 0; k + 1 < tt.depth(); ++k) {
        const Core& c = tt.core(k);
        const Matrix u = c.left_unfolding();
        const Matrix g = u.transpose() * u;
        CHECK((g - Matrix::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

// Tensor-product interpolant of the bivariate chain: the first variable on
// the half interval picked by its leading bit, the other on [0, 1].
double product_interpolant(const std::function<double(std::span<const double>)>& f, std::size_t N,
                           double x, double y)
{
    const double s = x < 0.5 ? 0.0 : 1.0;
    double v = 0.0;
    for (std::size_t a = 0; a <= N; ++a) {
        const double la = oracle::lagrange(N, a, 2 * x - s);
        for (std::size_t b = 0; b <= N; ++b) {
            const double p[2] = {(s + oracle::node(N, a)) / 2, oracle::node(N, b)};
            v += f(p) * la * oracle::lagrange(N, b, y);
        }
    }
    return v;
}

} // namespace

TEST_CASE("basic construction")
{
    SUBCASE("cubic is exact at N = 3")
    {
        FunctionOracle f([](double x) { return x * x * x; });
        const auto res = construct_basic(f, ChebSystem(3), 12);
        CHECK(res.report.requests == 8);
        const auto ref = oracle::dense_samples([](double x) { return x * x * x; }, 12);
        CHECK(oracle::max_abs_diff(tt_to_dense(res.tt).values, ref) <= 1e-12);
        CHECK(res.report.ranks == std::vector<std::size_t>{1, 4, 4, 4, 4, 4, 4, 4, 4, 4, 4, 4, 1});
    }
    SUBCASE("constant")
    {
        FunctionOracle f([](double) { return -2.5; });
        const auto res = construct_basic(f, ChebSystem(6), 9);
        for (std::uint64_t j : {0, 1, 100, 511})
            CHECK(tt_eval(res.tt, oracle::bits(j, 9)) == doctest::Approx(-2.5).epsilon(1e-14));
    }
    SUBCASE("requests are 2(N+1)")
    {
        for (std::size_t N : {1, 5, 17}) {
            FunctionOracle f([](double x) { return std::sin(x); });
            CHECK(construct_basic(f, ChebSystem(N), 6).report.requests == 2 * (N + 1));
        }
    }
    SUBCASE("polynomials up to degree N")
    {
        for (std::size_t N : {2, 4, 7}) {
            const auto p = [N](double x) { return std::pow(x - 0.3, double(N)) + 2 * x; };
            FunctionOracle f(p);
            const auto res = construct_basic(f, ChebSystem(N), 10);
            CHECK(oracle::max_abs_diff(tt_to_dense(res.tt).values, oracle::dense_samples(p, 10)) <= 1e-12);
        }
    }
    SUBCASE("error against the measured interpolation error")
    {
        for (std::size_t N : {6, 10, 16}) {
            const auto g = [](double x) { return 1.0 / (1.0 + 25.0 * (x - 0.4) * (x - 0.4)); };
            FunctionOracle f(g), probe(g);
            const auto res = construct_basic(f, ChebSystem(N), 12);
            const double e = measure_interp_error(probe, 1, N);
            const auto d = diff(tt_to_dense(res.tt).values, oracle::dense_samples(g, 12));
            CHECK(tensor_norm(d, Norm::inf) <= 2 * e + 1e-13);
        }
    }
    SUBCASE("oscillatory series, J = 25, K = 20")
    {
        const RegisteredFunction fn = make_function("oscil");
        double prev = 1.0;
        for (std::size_t N : {60, 64, 70}) {
            FunctionOracle f = fn.oracle();
            FunctionOracle probe = fn.oracle();
            const auto res = construct_basic(f, ChebSystem(N), 20);
            const double err = sampled_error(res.tt, fn.univariate, 20000, N);
            const double e = measure_interp_error(probe, 1, N);
            CHECK(err <= 2 * e + 1e-12);
            CHECK(err < prev);
            prev = err;
        }
        CHECK(prev <= 1e-9);
    }
    CHECK_THROWS_AS(
        [] {
            FunctionOracle f([](double x) { return x; });
            construct_basic(f, ChebSystem(3), 1);
        }(),
        ValidationError);
}

TEST_CASE("rank-revealing construction")
{
    SUBCASE("eps = 0 matches the basic construction")
    {
        const auto g = [](double x) { return std::exp(std::sin(3 * x)); };
        FunctionOracle f1(g), f2(g);
        const ChebSystem sys(9);
        const auto b = construct_basic(f1, sys, 10);
        const auto r = construct_rank_revealing(f2, sys, 10, TruncationPolicy{});
        CHECK(oracle::max_abs_diff(tt_to_dense(b.tt).values, tt_to_dense(r.tt).values) <= 1e-12);
        CHECK(r.tt.max_rank() <= 10);
        check_left_orthogonal(r.tt);
    }
    SUBCASE("quadratic has rank at most 3")
    {
        FunctionOracle f([](double x) { return x * x; });
        const auto r = construct_rank_revealing(f, ChebSystem(10), 14, TruncationPolicy{1e-12});
        CHECK(r.tt.max_rank() <= 3);
        const auto ref = oracle::dense_samples([](double x) { return x * x; }, 14);
        for (std::size_t m = 1; m < 14; ++m)
            CHECK(oracle::eps_rank(ref, 14, m, 1e-12) <= 3);
        CHECK(oracle::max_abs_diff(tt_to_dense(r.tt).values, ref) <= 1e-10);
    }
    SUBCASE("constant reveals rank 1")
    {
        FunctionOracle f([](double) { return 4.0; });
        const auto r = construct_rank_revealing(f, ChebSystem(12), 8, TruncationPolicy{1e-12});
        CHECK(r.tt.max_rank() == 1);
    }
    SUBCASE("a-posteriori bound at K = 12 by brute force")
    {
        const std::vector<std::pair<std::string, std::size_t>> cases = {
            {"exp", 10}, {"cos", 40}, {"alpha", 30}, {"x4", 6}, {"oscil", 40}};
        for (const auto& [name, N] : cases) {
            FunctionParams fp;
            fp.terms = 10;
            const RegisteredFunction fn = make_function(name, fp);
            const double lam = lebesgue(N);
            FunctionOracle probe = fn.oracle();
            const double e = measure_interp_error(probe, 1, N);
            const auto ref = oracle::dense_samples(fn.univariate, 12);
            double prev = std::numeric_limits<double>::infinity();
            for (double eps : {1e-4, 1e-6, 1e-8, 1e-10}) {
                FunctionOracle f = fn.oracle();
                const auto r = construct_rank_revealing(f, ChebSystem(N), 12, TruncationPolicy{eps});
                check_left_orthogonal(r.tt);
                const double err = tensor_norm(diff(tt_to_dense(r.tt).values, ref), Norm::two);
                CAPTURE(name);
                CAPTURE(eps);
                CHECK(err <= 2 * (e + 10 * lam * eps));
                CHECK(err <= prev + 1e-13);
                prev = err;
            }
        }
    }
    SUBCASE("oscillatory series at N = 60, eps = 1e-10, K = 20")
    {
        const RegisteredFunction fn = make_function("oscil");
        FunctionOracle f = fn.oracle(), probe = fn.oracle();
        const auto r = construct_rank_revealing(f, ChebSystem(60), 20, TruncationPolicy{1e-10});
        const double e = measure_interp_error(probe, 1, 60);
        std::mt19937_64 g(4);
        double sq = 0.0;
        const std::size_t n = 20000;
        const TTEvaluator ev(r.tt);
        for (std::size_t i = 0; i < n; ++i) {
            const std::uint64_t j = g() >> 44;
            const double d = ev.at(j) - fn.univariate(std::ldexp(double(j), -20));
            sq += d * d;
        }
        const double err2 = std::sqrt(sq / double(n));
        CHECK(err2 <= 2 * (e + 18 * lebesgue(60) * 1e-10));
    }
    SUBCASE("rank cap mode")
    {
        FunctionOracle f([](double x) { return std::cos(20 * x); });
        TruncationPolicy p{0.0, 5, TruncationMode::rank_cap};
        const auto r = construct_rank_revealing(f, ChebSystem(20), 10, p);
        CHECK(r.tt.max_rank() == 5);
    }
    SUBCASE("policy validation and numerical failure")
    {
        FunctionOracle f([](double x) { return x; });
        CHECK_THROWS_AS(construct_rank_revealing(f, ChebSystem(4), 6, TruncationPolicy{-1.0}),
                        ValidationError);
        CHECK_THROWS_AS(construct_rank_revealing(f, ChebSystem(4), 6, TruncationPolicy{0.0, 0, TruncationMode::rank_cap}),
                        ValidationError);
        FunctionOracle bad([](double x) { return x > 0.6 ? std::nan("") : x; });
        CHECK_THROWS_AS(construct_rank_revealing(bad, ChebSystem(4), 6, TruncationPolicy{1e-8}), Error);
    }
    SUBCASE("budget")
    {
        const TruncationPolicy p{1e-6};
        CHECK(p.budget(4) == doctest::Approx(4e-6));
        CHECK(p.budget(1) == doctest::Approx(1e-6 * std::sqrt(2.0)));
    }
}

TEST_CASE("sparse rank-revealing construction")
{
    SUBCASE("agrees with dense at N = 128, M = 10")
    {
        const auto g = [](double x) { return std::exp(-x) * std::cos(9 * x); };
        FunctionOracle f1(g), f2(g);
        const ChebSystem sys(128);
        const auto d = construct_rank_revealing(f1, sys, 12, TruncationPolicy{1e-12});
        const auto s = construct_rank_revealing(f2, sys, 12, TruncationPolicy{1e-12}, 10);
        CHECK(oracle::max_abs_diff(tt_to_dense(d.tt).values, tt_to_dense(s.tt).values) <= 1e-7);
        check_left_orthogonal(s.tt);
    }
    SUBCASE("narrow peak")
    {
        FunctionParams fp;
        fp.alpha = 0.01;
        const RegisteredFunction fn = make_function("alpha", fp);
        FunctionOracle f = fn.oracle();
        const auto s = construct_rank_revealing(f, ChebSystem(400), 14, TruncationPolicy{1e-12}, 10);
        const double err = tensor_norm(diff(tt_to_dense(s.tt).values, oracle::dense_samples(fn.univariate, 14)),
                                       Norm::inf);
        CHECK(err <= 1e-6);
    }
}

TEST_CASE("decaying grid construction")
{
    SUBCASE("cosine, Delta = 30, K = 12")
    {
        const double w = 8.0, omega = 2 * kPi * w;
        const auto g = [w](double x) { return std::cos(2 * kPi * w * x); };
        FunctionOracle f(g);
        const DecaySchedule sched(omega, 30.0, 12);
        const auto r = construct_decay(f, sched);
        const double err = tensor_norm(diff(tt_to_dense(r.tt).values, oracle::dense_samples(g, 12)), Norm::inf);
        CHECK(err <= 1e-5);
        const double bound = decay_construction_bound(Bandlimited{omega, 2 * kPi}, 30.0, 12);
        CHECK(err <= bound);
        for (std::size_t k = 1; k < 12; ++k)
            CHECK(r.report.ranks[k] == std::min(std::size_t{1} << k, sched.order(k) + 1));
        CHECK(r.tt.max_rank() <= std::size_t(std::ceil(std::sqrt(omega) + 30.0)) + 1);
    }
    SUBCASE("rank profile for Omega = 64, Delta = 8, K = 6")
    {
        FunctionOracle f([](double x) { return std::sin(64 * x); });
        const auto r = construct_decay(f, DecaySchedule(64.0, 8.0, 6));
        CHECK(r.report.ranks == std::vector<std::size_t>{1, 2, 4, 8, 13, 11, 1});
    }
    SUBCASE("constant is exact")
    {
        for (const auto& sched : {DecaySchedule(100.0, 3.0, 10), DecaySchedule({9, 7, 7, 4, 2, 1})}) {
            FunctionOracle f([](double) { return 0.75; });
            const auto r = construct_decay(f, sched);
            for (double v : tt_to_dense(r.tt).values)
                CHECK(std::abs(v - 0.75) <= 1e-13);
        }
    }
}

TEST_CASE("multiresolution construction")
{
    SUBCASE("empty tree equals basic")
    {
        const auto g = [](double x) { return std::log(1.5 + x); };
        FunctionOracle f1(g), f2(g);
        const ChebSystem sys(7);
        const auto b = construct_basic(f1, sys, 10);
        const auto m = construct_multires(f2, sys, DangerTree::empty(10));
        CHECK(oracle::max_abs_diff(tt_to_dense(b.tt).values, tt_to_dense(m.tt).values) <= 1e-12);
    }
    SUBCASE("square root with the left-edge tree")
    {
        const auto g = [](double x) { return std::sqrt(x); };
        FunctionOracle f(g);
        const ChebSystem sys(20);
        const DangerTree tree = DangerTree::left_edge(25);
        const auto m = construct_multires(f, sys, tree);
        CHECK(m.report.requests == multires_request_count(sys, tree));
        CHECK(m.report.evaluations <= m.report.requests);
        CHECK(tt_eval(m.tt, std::vector<std::size_t>(25, 0)) == 0.0);
        double err = sampled_error(m.tt, g, 20000, 3);
        for (std::uint64_t j = 1; j < 64; ++j)
            err = std::max(err, std::abs(tt_eval(m.tt, oracle::bits(j, 25)) - g(std::ldexp(double(j), -25))));
        for (int i = 1; i < 25; ++i)
            for (std::int64_t o : {-1, 0, 1}) {
                const std::uint64_t j = (std::uint64_t{1} << i) + std::uint64_t(o);
                err = std::max(err, std::abs(tt_eval(m.tt, oracle::bits(j, 25)) - g(std::ldexp(double(j), -25))));
            }
        CHECK(err <= 1e-12);
    }
    SUBCASE("values follow the first safe interval")
    {
        const auto g = [](double x) { return std::exp(3 * x) * std::sqrt(x + 0.01); };
        const std::size_t K = 6, N = 3;
        const DangerTree tree(K, {{0, 1}, {1, 2}, {2, 5}, {4, 10}, {9}});
        FunctionOracle f(g);
        const auto m = construct_multires(f, ChebSystem(N), tree);
        const auto dense = tt_to_dense(m.tt).values;
        for (std::uint64_t j = 0; j < (std::uint64_t{1} << K); ++j) {
            std::size_t k = 1;
            while (k < K && tree.find(k, j >> (K - k)).has_value())
                ++k;
            const double x = std::ldexp(double(j), -int(K));
            double ref;
            if (k == K) {
                ref = g(x);
            } else {
                const double h = std::ldexp(1.0, -int(k));
                const double lo = std::ldexp(double(j >> (K - k)), -int(k));
                ref = oracle::interp_on(g, lo, h, N, x);
            }
            CHECK(std::abs(dense[j] - ref) <= 1e-12);
        }
        CHECK(m.report.requests == multires_request_count(ChebSystem(N), tree));
    }
}

TEST_CASE("multivariate construction")
{
    SUBCASE("tensor-product interpolant, both orderings")
    {
        const RegisteredFunction fn = make_function("bivariate");
        const std::size_t K = 5, N = 8;
        for (auto ord : {Ordering::interleaved, Ordering::serial}) {
            FunctionOracle f = fn.oracle();
            const auto r = construct_multivariate(f, ChebSystem(N), K, ord, TruncationPolicy{});
            CHECK(r.tt.depth() == 2 * K);
            CHECK(f.requests() == 2 * (N + 1) * (N + 1));
            check_left_orthogonal(r.tt);
            for (std::uint64_t i = 0; i < 32; i += 3)
                for (std::uint64_t j = 0; j < 32; j += 5) {
                    const std::uint64_t c[2] = {i, j};
                    const double ref = product_interpolant(fn.multivariate, N, double(i) / 32, double(j) / 32);
                    CHECK(std::abs(oracle::chain(r.tt, chain_index(c, K, ord)) - ref) <= 1e-10);
                }
        }
    }
    SUBCASE("matches the materialized Kronecker chain in three dimensions")
    {
        const auto g = [](std::span<const double> p) { return std::cos(p[0] + 2 * p[1]) * std::exp(p[2]); };
        const ChebSystem sys(4);
        for (auto ord : {Ordering::interleaved, Ordering::serial}) {
            FunctionOracle f1(3, g), f2(3, g);
            const auto r = construct_multivariate(f1, sys, 3, ord, TruncationPolicy{});
            const TensorTrain ref(multivariate_dense_cores(f2, sys, 3, ord));
            CHECK(oracle::max_abs_diff(oracle::chain_dense(r.tt), oracle::chain_dense(ref)) <= 1e-12);
        }
    }
    SUBCASE("sum is exact, interleaved, K = 8")
    {
        const auto g = [](std::span<const double> p) { return p[0] + p[1]; };
        FunctionOracle f(2, g);
        const auto r = construct_multivariate(f, ChebSystem(3), 8, Ordering::interleaved, TruncationPolicy{1e-13});
        const auto dense = tt_to_dense(r.tt).values;
        double err = 0.0;
        for (std::uint64_t i = 0; i < 256; ++i)
            for (std::uint64_t j = 0; j < 256; ++j) {
                const std::uint64_t c[2] = {i, j};
                const double p[2] = {double(i) / 256, double(j) / 256};
                err = std::max(err, std::abs(dense[flat_of(chain_index(c, 8, Ordering::interleaved))] - g(p)));
            }
        CHECK(err <= 1e-11);
        CHECK(r.tt.max_rank() <= 2);
    }
    SUBCASE("separable function, serial ordering")
    {
        const RegisteredFunction fn = make_function("separable");
        FunctionOracle f = fn.oracle();
        const auto r = construct_multivariate(f, ChebSystem(8), 8, Ordering::serial, TruncationPolicy{1e-10});
        CHECK(r.report.ranks[8] <= 4);
        const auto dense = tt_to_dense(r.tt).values;
        CHECK(oracle::eps_rank(dense, 16, 8, 1e-10) == 1);
    }
    SUBCASE("bivariate serial error decreases with N")
    {
        const RegisteredFunction fn = make_function("bivariate");
        SampleOptions opt;
        opt.full = true;
        double prev = 1.0;
        for (std::size_t N : {8, 16, 24}) {
            FunctionOracle f = fn.oracle();
            const auto r = construct_multivariate(f, ChebSystem(N), 10, Ordering::serial, TruncationPolicy{1e-10});
            const double err = sampled_max_error(r.tt, 2, fn.multivariate, Ordering::serial, opt);
            CHECK(err < prev);
            prev = err;
        }
    }
    SUBCASE("sparse interior cores")
    {
        const RegisteredFunction fn = make_function("separable");
        FunctionOracle f1 = fn.oracle(), f2 = fn.oracle();
        const ChebSystem sys(40);
        const auto d = construct_multivariate(f1, sys, 6, Ordering::interleaved, TruncationPolicy{1e-12});
        const auto s = construct_multivariate(f2, sys, 6, Ordering::interleaved, TruncationPolicy{1e-12}, 8);
        CHECK(oracle::max_abs_diff(tt_to_dense(d.tt).values, tt_to_dense(s.tt).values) <= 1e-7);
    }
    SUBCASE("dimension limits")
    {
        FunctionOracle f(4, [](std::span<const double> p) { return p[0]; });
        CHECK_THROWS_AS(construct_multivariate(f, ChebSystem(3), 3, Ordering::serial, TruncationPolicy{}),
                        ValidationError);
    }
}

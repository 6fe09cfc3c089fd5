#include "oracles.hpp"

#include "qtt/cores.hpp"
#include "qtt/error.hpp"
#include "qtt/multivariate.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>

using namespace qtt;

namespace {

using Mat = std::vector<std::vector<double>>;

Mat slice_of(const Core& c, std::size_t s)
{
    Mat m(c.left(), std::vector<double>(c.right()));
    for (std::size_t a = 0; a < c.left(); ++a)
        for (std::size_t b = 0; b < c.right(); ++b)
            m[a][b] = c(s, a, b);
    return m;
}

Mat matmul(const Mat& x, const Mat& y)
{
    Mat z(x.size(), std::vector<double>(y[0].size(), 0.0));
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t k = 0; k < y.size(); ++k)
            for (std::size_t j = 0; j < y[0].size(); ++j)
                z[i][j] += x[i][k] * y[k][j];
    return z;
}

double x_prefix(const std::vector<std::size_t>& s)
{
    double x = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k)
        x += std::ldexp(double(s[k]), -int(k + 1));
    return x;
}

// Angle-domain local cardinal written from the definition.
double local_ref(std::size_t N, std::size_t M, std::size_t alpha, double x)
{
    const double t = double(N) * std::acos(2 * x - 1) / std::numbers::pi;
    const long c = long(std::ceil(t - 0.5));
    if (std::abs(t - double(c)) < 1e-13 * double(N))
        return 0.0;  // caller only asks off-node
    double v = 0.0;
    for (long g = c - long(M); g <= c + long(M); ++g) {
        const long r = g < 0 ? -g : (g > long(N) ? 2 * long(N) - g : g);
        if (std::size_t(r) != alpha)
            continue;
        double l = 1.0;
        for (long b = c - long(M); b <= c + long(M); ++b)
            if (b != g)
                l *= (t - double(b)) / double(g - b);
        v += l;
    }
    return v;
}

} // namespace

TEST_CASE("left core")
{
    SUBCASE("constant")
    {
        FunctionOracle f([](double) { return 1.0; });
        const Core a = build_left_core(f, ChebSystem(5));
        for (double v : a.data())
            CHECK(v == 1.0);
        CHECK(f.requests() == 12);
    }
    SUBCASE("identity, N=2")
    {
        FunctionOracle f([](double x) { return x; });
        const ChebSystem sys(2);
        const Core a = build_left_core(f, sys);
        CHECK(a.left() == 1);
        CHECK(a.right() == 3);
        CHECK(a(1, 0, 2) == 0.5);
        for (std::size_t s = 0; s < 2; ++s)
            for (std::size_t b = 0; b <= 2; ++b)
                CHECK(a(s, 0, b) == doctest::Approx((double(s) + oracle::node(2, b)) / 2));
    }
    SUBCASE("sine at x = 1/2")
    {
        FunctionOracle f([](double x) { return std::sin(2 * std::numbers::pi * x); });
        const Core a = build_left_core(f, ChebSystem(8));
        CHECK(std::abs(a(0, 0, 0)) <= 1e-15);
        CHECK(f.requests() == 18);
    }
}

TEST_CASE("interior and right cores")
{
    SUBCASE("entries and constant reproduction")
    {
        for (std::size_t N : {1, 3, 8, 20}) {
            const Core a = build_interp_core(ChebSystem(N));
            for (std::size_t s = 0; s < 2; ++s)
                for (std::size_t b = 0; b <= N; ++b) {
                    double sum = 0.0;
                    for (std::size_t al = 0; al <= N; ++al) {
                        const double ref = oracle::lagrange(N, al, (double(s) + oracle::node(N, b)) / 2);
                        CHECK(std::abs(a(s, al, b) - ref) <= 1e-12);
                        sum += a(s, al, b);
                    }
                    CHECK(std::abs(sum - 1.0) <= 1e-12);
                }
        }
    }
    SUBCASE("right core")
    {
        for (std::size_t N : {2, 5, 8}) {
            const Core r = build_right_core(ChebSystem(N));
            for (std::size_t a = 0; a <= N; ++a) {
                CHECK(r(0, a, 0) == (a == N ? 1.0 : 0.0));
                if (N % 2 == 0)
                    CHECK(std::abs(r(1, a, 0) - (a == N / 2 ? 1.0 : 0.0)) <= 1e-14);
                else
                    CHECK(std::abs(r(1, a, 0) - oracle::lagrange(N, a, 0.5)) <= 1e-12);
            }
        }
    }
    SUBCASE("two-core identity")
    {
        const std::size_t N = 7;
        const Core a = build_interp_core(ChebSystem(N));
        for (std::size_t s = 0; s < 2; ++s)
            for (std::size_t t = 0; t < 2; ++t) {
                const Mat p = matmul(slice_of(a, s), slice_of(a, t));
                for (std::size_t al = 0; al <= N; ++al)
                    for (std::size_t b = 0; b <= N; ++b) {
                        const double x = double(s) / 2 + double(t) / 4 + oracle::node(N, b) / 4;
                        CHECK(std::abs(p[al][b] - oracle::lagrange(N, al, x)) <= 1e-12);
                    }
            }
    }
    SUBCASE("chain identities, exhaustive over bits")
    {
        for (std::size_t N : {3, 8}) {
            const ChebSystem sys(N);
            const Core a = build_interp_core(sys);
            const Core r = build_right_core(sys);
            for (std::size_t p = 1; p <= 5; ++p) {
                for (std::uint64_t j = 0; j < (std::uint64_t{1} << p); ++j) {
                    const auto s = oracle::bits(j, p);
                    Mat prod = slice_of(a, s[0]);
                    for (std::size_t k = 1; k < p; ++k)
                        prod = matmul(prod, slice_of(a, s[k]));
                    const double xp = x_prefix(s);
                    for (std::size_t al = 0; al <= N; ++al)
                        for (std::size_t b = 0; b <= N; ++b) {
                            const double x = xp + std::ldexp(oracle::node(N, b), -int(p));
                            CHECK(std::abs(prod[al][b] - oracle::lagrange(N, al, x)) <= 1e-11);
                        }
                    for (std::size_t last = 0; last < 2; ++last) {
                        const Mat cap = matmul(prod, slice_of(r, last));
                        auto full = s;
                        full.push_back(last);
                        for (std::size_t al = 0; al <= N; ++al)
                            CHECK(std::abs(cap[al][0] - oracle::lagrange(N, al, x_prefix(full))) <= 1e-11);
                    }
                }
            }
        }
    }
    SUBCASE("core set")
    {
        FunctionOracle f([](double x) { return x * x; });
        const ChebSystem sys(4);
        const CoreSet cs = build_core_set(f, sys);
        CHECK(cs.left.right() == 5);
        CHECK(cs.interior.left() == 5);
        CHECK(cs.right.right() == 1);
        CHECK(cs.interior == build_interp_core(sys));
        CHECK(cs.right == build_right_core(sys));
    }
}

TEST_CASE("sparse core")
{
    SUBCASE("column sparsity at N=256, M=6")
    {
        const SparseCore sc = build_sparse_core(LocalInterpSystem(ChebSystem(256), 6));
        for (std::size_t s = 0; s < 2; ++s)
            for (std::size_t b = 0; b <= 256; ++b) {
                CHECK(sc.column_rows(s, b).size() <= 14);
                double sum = 0.0;
                for (double v : sc.column_values(s, b))
                    sum += v;
                CHECK(std::abs(sum - 1.0) <= 1e-12);
            }
    }
    SUBCASE("entries against the angle-domain definition")
    {
        const std::size_t N = 24, M = 3;
        const LocalInterpSystem lsys(ChebSystem(N), M);
        const SparseCore sc = build_sparse_core(lsys);
        const Core dense = sc.to_dense();
        for (std::size_t s = 0; s < 2; ++s)
            for (std::size_t b = 0; b <= N; ++b) {
                const double x = (double(s) + oracle::node(N, b)) / 2;
                for (std::size_t a = 0; a <= N; ++a) {
                    CHECK(dense(s, a, b) == sc(s, a, b));
                    CHECK(sc(s, a, b) == doctest::Approx(lsys.cardinal(a, x)).epsilon(1e-14));
                    bool on_node = false;
                    for (std::size_t g = 0; g <= N; ++g)
                        on_node = on_node || std::abs(x - oracle::node(N, g)) < 1e-14;
                    if (!on_node)
                        CHECK(std::abs(sc(s, a, b) - local_ref(N, M, a, x)) <= 1e-10);
                }
            }
    }
    SUBCASE("left_multiply agrees with the dense slice")
    {
        const SparseCore sc = build_sparse_core(LocalInterpSystem(ChebSystem(16), 4));
        const Core dense = sc.to_dense();
        Matrix r = Matrix::Random(5, 17);
        for (std::size_t s = 0; s < 2; ++s) {
            const Matrix ref = r * Matrix(dense.slice(s));
            CHECK((sc.left_multiply(r, s) - ref).cwiseAbs().maxCoeff() <= 1e-13);
        }
    }
    SUBCASE("interpolation error of smooth data decreases with M")
    {
        const std::size_t N = 64;
        const ChebSystem sys(N);
        double prev = 1.0;
        for (std::size_t M : {2, 4, 6, 8}) {
            const SparseCore sc = build_sparse_core(LocalInterpSystem(sys, M));
            double err = 0.0;
            for (std::size_t s = 0; s < 2; ++s)
                for (std::size_t b = 0; b <= N; ++b) {
                    double v = 0.0;
                    const auto rows = sc.column_rows(s, b);
                    const auto vals = sc.column_values(s, b);
                    for (std::size_t i = 0; i < rows.size(); ++i)
                        v += std::exp(sys.node(rows[i])) * vals[i];
                    err = std::max(err, std::abs(v - std::exp((double(s) + sys.node(b)) / 2)));
                }
            CHECK(err <= prev);
            prev = err;
        }
        CHECK(prev <= 1e-8);
    }
}

TEST_CASE("decay schedule and cores")
{
    const DecaySchedule sched(64.0, 8.0, 6);
    CHECK(sched.orders() == std::vector<std::size_t>{40, 24, 16, 12, 10, 9});
    CHECK_THROWS_AS(DecaySchedule(0.0, 8.0, 6), ValidationError);
    CHECK_THROWS_AS(DecaySchedule(64.0, 0.0, 6), ValidationError);
    CHECK_THROWS_AS(DecaySchedule(std::vector<std::size_t>{4, 5}), ValidationError);
    CHECK_THROWS_AS(DecaySchedule(std::vector<std::size_t>{4, 0}), ValidationError);

    const auto cores = build_decay_cores(sched);
    REQUIRE(cores.size() == 5);
    for (std::size_t k = 2; k <= 5; ++k) {
        const Core& c = cores[k - 2];
        CHECK(c.left() == sched.order(k - 1) + 1);
        CHECK(c.right() == sched.order(k) + 1);
        const std::size_t Np = sched.order(k - 1), Nk = sched.order(k);
        for (std::size_t s = 0; s < 2; ++s)
            for (std::size_t b = 0; b <= Nk; ++b) {
                double sum = 0.0;
                for (std::size_t a = 0; a <= Np; ++a) {
                    sum += c(s, a, b);
                    if (b % 3 == 0 && a % 5 == 0) {
                        const double x = (double(s) + oracle::node(Nk, b)) / 2;
                        CHECK(std::abs(c(s, a, b) - oracle::lagrange(Np, a, x)) <= 1e-9);
                    }
                }
                CHECK(std::abs(sum - 1.0) <= 1e-12);
            }
    }
    CHECK(cores.back() == build_right_core(ChebSystem(sched.order(5))));

    const DecaySchedule flat(std::vector<std::size_t>(5, 7));
    const auto fc = build_decay_cores(flat);
    for (std::size_t i = 0; i + 1 < fc.size(); ++i)
        CHECK(fc[i] == build_interp_core(ChebSystem(7)));
}

TEST_CASE("inverse core")
{
    for (std::size_t N : {1, 4, 16, 64}) {
        const ChebSystem sys(N);
        const Core a = build_interp_core(sys);
        const Core g = build_inverse_core(sys);
        Matrix sum = Matrix::Zero(N + 1, N + 1);
        for (std::size_t s = 0; s < 2; ++s)
            sum += Matrix(a.slice(s)) * Matrix(g.slice(s));
        CHECK((sum - Matrix::Identity(N + 1, N + 1)).cwiseAbs().maxCoeff() <= 1e-11);
        // Interior cardinals can exceed 1 slightly between nodes (N = 64 at
        // x near 0.243 gives 1.0000184), so compare with a direct evaluation.
        double gmax = 1.0;
        for (std::size_t c = 0; c <= N; ++c) {
            const double t = sys.node(c);
            const double x = t <= 0.5 ? 2 * t : 2 * t - 1;
            for (std::size_t b = 0; b <= N; ++b)
                gmax = std::max(gmax, std::abs(oracle::lagrange(N, b, x)));
        }
        CHECK(gmax <= 1.0001);
        for (double v : g.data())
            CHECK(std::abs(v) <= gmax + 1e-12);
        if (N <= 16)
            CHECK(gmax <= 1.0 + 1e-13);
        // each target column is served by exactly one branch
        for (std::size_t c = 0; c <= N; ++c) {
            const double t = sys.node(c);
            const std::size_t on = t <= 0.5 ? 0 : 1;
            for (std::size_t b = 0; b <= N; ++b)
                CHECK(g(1 - on, b, c) == 0.0);
        }
    }
    SUBCASE("N=1 by hand")
    {
        // nodes c^0 = 1, c^1 = 0; samples at (s + c)/2 are 1/2, 0, 1, 1/2.
        const ChebSystem sys(1);
        const Core g = build_inverse_core(sys);
        const auto f = [](double x) { return 3.0 * x - 1.0; };
        double v[2][2];
        for (std::size_t s = 0; s < 2; ++s)
            for (std::size_t b = 0; b < 2; ++b)
                v[s][b] = f((double(s) + sys.node(b)) / 2);
        for (std::size_t c = 0; c < 2; ++c) {
            double r = 0.0;
            for (std::size_t s = 0; s < 2; ++s)
                for (std::size_t b = 0; b < 2; ++b)
                    r += v[s][b] * g(s, b, c);
            CHECK(r == doctest::Approx(f(sys.node(c))).epsilon(1e-15));
        }
    }
}

TEST_CASE("lagrange tensor")
{
    const ChebSystem sys(9);
    CHECK_THROWS_AS(build_lagrange_tensor(sys, 0), ValidationError);
    CHECK_THROWS_AS(build_lagrange_tensor(sys, 5), ValidationError);

    const Matrix l1 = build_lagrange_tensor(sys, 1);
    for (std::size_t b = 0; b <= 9; ++b) {
        CHECK(l1(0, b) == doctest::Approx(1.0 - 2.0 * sys.node(b)).epsilon(1e-14));
        CHECK(l1(1, b) == doctest::Approx(2.0 * sys.node(b)).epsilon(1e-14));
    }
    for (std::size_t q = 1; q <= 4; ++q) {
        const Matrix l = build_lagrange_tensor(sys, q);
        const std::size_t P = std::size_t{1} << q;
        REQUIRE(std::size_t(l.rows()) == P);
        for (std::size_t b = 0; b <= 9; ++b) {
            const double tol = 1e-14 * l.col(b).cwiseAbs().sum() * double(P);
            CHECK(std::abs(l.col(b).sum() - 1.0) <= tol);
            for (std::size_t t = 0; t < P; ++t) {
                double ref = 1.0;
                const double xt = double(t) / double(P);
                for (std::size_t u = 0; u < P; ++u)
                    if (u != t)
                        ref *= (sys.node(b) - double(u) / double(P)) / (xt - double(u) / double(P));
                CHECK(std::abs(l(t, b) - ref) <= 1e-10);
            }
            // reproduces polynomials of degree < 2^q at the target
            for (std::size_t deg = 0; deg < P; ++deg) {
                double s = 0.0;
                for (std::size_t t = 0; t < P; ++t)
                    s += l(t, b) * std::pow(double(t) / double(P), double(deg));
                CHECK(std::abs(s - std::pow(sys.node(b), double(deg))) <= tol);
            }
        }
    }
}

TEST_CASE("danger tree")
{
    CHECK_THROWS_AS(DangerTree(4, {{0}, {2}, {}}), ValidationError);         // 10 does not extend 0
    CHECK_THROWS_AS(DangerTree(4, {{0, 0}, {}, {}}), ValidationError);       // duplicate
    CHECK_THROWS_AS(DangerTree(4, {{2}, {}, {}}), ValidationError);          // out of range
    CHECK_THROWS_AS(DangerTree(4, {{0}, {}, {}, {}}), ValidationError);      // more than K-1 levels
    CHECK(DangerTree(4, {{0}}).count(3) == 0);                                // missing levels are empty
    const DangerTree t(4, {{0, 1}, {1, 2}, {5}});
    CHECK(t.count(0) == 0);
    CHECK(t.count(2) == 2);
    CHECK(t.count(4) == 0);
    CHECK(t.find(2, 2) == std::optional<std::size_t>(1));
    CHECK_FALSE(t.find(3, 4).has_value());
    const DangerTree le = DangerTree::left_edge(6);
    for (std::size_t k = 1; k <= 5; ++k) {
        CHECK(le.count(k) == 1);
        CHECK(le.prefix(k, 0) == 0);
    }
    CHECK(Prefix{5, 3}.left_end() == 0.625);
}

TEST_CASE("multiresolution cores")
{
    const auto f = [](double x) { return std::exp(-x) + std::sqrt(x); };
    const ChebSystem sys(5);

    SUBCASE("empty tree gives the basic chain")
    {
        FunctionOracle o(f), o2(f);
        const auto cores = build_multires_cores(o, sys, DangerTree::empty(6));
        REQUIRE(cores.size() == 6);
        CHECK(cores[0] == build_left_core(o2, sys));
        for (std::size_t k = 1; k < 5; ++k)
            CHECK(cores[k] == build_interp_core(sys));
        CHECK(cores[5] == build_right_core(sys));
    }
    SUBCASE("left-edge tree")
    {
        const std::size_t K = 7, n = 6;
        FunctionOracle o(f);
        const DangerTree tree = DangerTree::left_edge(K);
        const auto cores = build_multires_cores(o, sys, tree);
        CHECK(o.requests() == multires_request_count(sys, tree));
        CHECK(cores[0].right() == n + 1);
        CHECK(cores[0](0, 0, n) == 1.0);
        CHECK(cores[0](1, 0, n) == 0.0);
        for (std::size_t k = 2; k < K; ++k) {
            const Core& c = cores[k - 1];
            CHECK(c.left() == n + 1);
            CHECK(c.right() == n + 1);
            CHECK(c(0, n, n) == 1.0);
            CHECK(c(1, n, n) == 0.0);
            // safe child s = 1 of prefix 0...0 at level k
            const double h = std::ldexp(1.0, -int(k));
            for (std::size_t b = 0; b < n; ++b) {
                CHECK(c(1, n, b) == f(h + h * sys.node(b)));
                CHECK(c(0, n, b) == 0.0);
            }
        }
        const Core& last = cores[K - 1];
        CHECK(last(0, n, 0) == f(0.0));
        CHECK(last(1, n, 0) == f(std::ldexp(1.0, -int(K))));
    }
    SUBCASE("request count on a branching tree")
    {
        const DangerTree tree(6, {{0, 1}, {1, 2, 3}, {2, 7}, {4}, {9}});
        FunctionOracle o(f);
        build_multires_cores(o, sys, tree);
        CHECK(o.requests() == multires_request_count(sys, tree));
    }
}

TEST_CASE("multivariate schedules")
{
    for (std::size_t d : {1, 2, 3})
        for (auto ord : {Ordering::interleaved, Ordering::serial}) {
            const std::size_t K = 4;
            const auto steps = step_schedule(d, K, ord);
            CHECK(steps.size() == K * d - 1);
            std::size_t caps = 0;
            for (const auto& s : steps)
                caps += s.kind == SlotStep::Kind::cap;
            CHECK(caps == d);
            std::set<std::size_t> pos;
            for (std::size_t v = 0; v < d; ++v)
                for (std::size_t k = 1; k <= K; ++k)
                    pos.insert(bit_position(v, k, d, K, ord));
            CHECK(pos.size() == K * d);
            CHECK(*pos.rbegin() == K * d - 1);
            // bits of one variable appear in increasing depth
            for (std::size_t v = 0; v < d; ++v)
                for (std::size_t k = 1; k < K; ++k)
                    CHECK(bit_position(v, k, d, K, ord) < bit_position(v, k + 1, d, K, ord));
        }
    CHECK(bit_position(1, 1, 2, 3, Ordering::interleaved) == 1);
    CHECK(bit_position(0, 2, 2, 3, Ordering::interleaved) == 2);
    CHECK(bit_position(1, 1, 2, 3, Ordering::serial) == 3);
    const std::uint64_t coords[2] = {5, 2};  // 101, 010
    CHECK(chain_index(coords, 3, Ordering::serial) == std::vector<std::size_t>{1, 0, 1, 0, 1, 0});
    CHECK(chain_index(coords, 3, Ordering::interleaved) == std::vector<std::size_t>{1, 0, 0, 1, 1, 0});
    CHECK_THROWS_AS(step_schedule(4, 3, Ordering::serial), ValidationError);
}

TEST_CASE("multivariate cores")
{
    SUBCASE("left samples")
    {
        const ChebSystem sys(3);
        FunctionOracle f3(3, [](std::span<const double> p) { return p[0] + 10 * p[1] + 100 * p[2]; });
        const Matrix l = multivariate_left_samples(f3, sys);
        CHECK(l.rows() == 2);
        CHECK(l.cols() == 64);
        CHECK(l(0, 0) == doctest::Approx(0.5 + 10 + 100));
        // column (b1, b2, b3) with b1 slowest
        CHECK(l(1, 1 * 16 + 2 * 4 + 3) ==
              doctest::Approx((1 + sys.node(1)) / 2 + 10 * sys.node(2) + 100 * sys.node(3)));
        CHECK(f3.requests() == 128);

        FunctionOracle f1([](double x) { return std::cos(x); }), g1([](double x) { return std::cos(x); });
        const Matrix l1 = multivariate_left_samples(f1, sys);
        const Core a = build_left_core(g1, sys);
        for (std::size_t s = 0; s < 2; ++s)
            for (std::size_t b = 0; b < 4; ++b)
                CHECK(l1(s, b) == a(s, 0, b));
    }
    SUBCASE("slot application equals the dense Kronecker product")
    {
        const ChebSystem sys(4);
        const Core a = build_interp_core(sys);
        const Core r = build_right_core(sys);
        const SparseCore sp = build_sparse_core(LocalInterpSystem(sys, 2));
        for (auto [pre, post] : {std::pair<std::size_t, std::size_t>{1, 1}, {1, 5}, {5, 1}, {5, 5}, {25, 5}}) {
            for (const Core* op : {&a, &r}) {
                const Core kron = kronecker_core(*op, pre, post);
                CHECK(kron.left() == pre * op->left() * post);
                CHECK(kron.right() == pre * op->right() * post);
                const Matrix m = Matrix::Random(3, Eigen::Index(kron.left()));
                for (std::size_t s = 0; s < 2; ++s) {
                    const Matrix ref = m * Matrix(kron.slice(s));
                    CHECK((apply_slot(m, pre, post, *op, s) - ref).cwiseAbs().maxCoeff() <= 1e-12);
                }
            }
            const Core kd = kronecker_core(sp.to_dense(), pre, post);
            const Matrix m = Matrix::Random(2, Eigen::Index(kd.left()));
            for (std::size_t s = 0; s < 2; ++s)
                CHECK((apply_slot(m, pre, post, sp, s) - m * Matrix(kd.slice(s))).cwiseAbs().maxCoeff() <=
                      1e-12);
        }
    }
    SUBCASE("dense cores in one dimension are the basic chain")
    {
        const ChebSystem sys(4);
        const auto f = [](double x) { return std::exp(x); };
        FunctionOracle o(f), o2(f);
        const auto cores = multivariate_dense_cores(o, sys, 5, Ordering::serial);
        REQUIRE(cores.size() == 5);
        CHECK(cores[0] == build_left_core(o2, sys));
        for (std::size_t k = 1; k < 4; ++k)
            CHECK(cores[k] == build_interp_core(sys));
        CHECK(cores[4] == build_right_core(sys));
    }
    SUBCASE("dense cores reproduce a bivariate polynomial")
    {
        // degree <= N in each variable is reproduced exactly on the grid.
        const ChebSystem sys(3);
        const auto f = [](std::span<const double> p) { return p[0] * p[0] * p[1] - p[1] * p[1] * p[1] + 0.5; };
        for (auto ord : {Ordering::interleaved, Ordering::serial}) {
            FunctionOracle o(2, f);
            const TensorTrain tt(multivariate_dense_cores(o, sys, 3, ord));
            for (std::uint64_t i = 0; i < 8; ++i)
                for (std::uint64_t j = 0; j < 8; ++j) {
                    const std::uint64_t c[2] = {i, j};
                    const double p[2] = {double(i) / 8, double(j) / 8};
                    CHECK(std::abs(oracle::chain(tt, chain_index(c, 3, ord)) - f(p)) <= 1e-12);
                }
        }
    }
}

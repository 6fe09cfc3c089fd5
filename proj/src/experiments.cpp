#include "qtt/experiments.hpp"

#include "qtt/construct.hpp"
#include "qtt/cores.hpp"
#include "qtt/error.hpp"
#include "qtt/invert.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

namespace qtt {

using detail::require;

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(double v)
{
    std::ostringstream os;
    os << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
    return os.str();
}

template <class T>
std::string join(const std::vector<T>& xs)
{
    std::ostringstream os;
    os << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (std::size_t i = 0; i < xs.size(); ++i)
        os << (i ? ";" : "") << xs[i];
    return os.str();
}

} // namespace

// ------------------------------------------------------------ functions

double NormalStream::uniform()
{
    // (0, 1]: never zero, so the logarithm below is finite.
    return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
}

double NormalStream::next()
{
    if (spare_) {
        const double v = *spare_;
        spare_.reset();
        return v;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * kPi * u2);
    return r * std::cos(2.0 * kPi * u2);
}

TrigSeries::TrigSeries(std::size_t terms, std::uint64_t seed)
{
    require(terms >= 1, "TrigSeries: need at least one term");
    NormalStream g(seed);
    a.resize(terms);
    b.resize(terms);
    for (std::size_t j = 0; j < terms; ++j) {
        a[j] = g.next();
        b[j] = g.next();
    }
}

double TrigSeries::operator()(double x) const
{
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double t = 2.0 * kPi * static_cast<double>(j + 1) * x;
        s += a[j] * std::cos(t) + b[j] * std::sin(t);
    }
    return s;
}

double TrigSeries::spectral_mass() const
{
    double m = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j)
        m += std::hypot(a[j], b[j]);
    return 2.0 * kPi * m;
}

FunctionOracle RegisteredFunction::oracle(bool cache) const
{
    if (dimension == 1)
        return FunctionOracle(univariate, cache);
    return FunctionOracle(dimension, multivariate, cache);
}

std::vector<std::string> function_names()
{
    return {"const", "x",   "x2",     "x3",    "x4",       "cheb3",     "exp",  "sqrt",
            "cos",   "cossin", "oscil", "alpha", "gaussian", "bivariate", "sum2", "separable"};
}

RegisteredFunction make_function(const std::string& name, const FunctionParams& params)
{
    RegisteredFunction r;
    r.name = name;
    auto uni = [&](std::function<double(double)> f, std::optional<SmoothnessSpec> spec = std::nullopt) {
        r.univariate = std::move(f);
        r.spec = spec;
        return r;
    };
    if (name == "const")
        return uni([](double) { return 1.0; }, Differentiable{1, 0.0});
    if (name == "x")
        return uni([](double x) { return x; }, Differentiable{1, 0.0});
    if (name == "x2")
        return uni([](double x) { return x * x; }, Differentiable{1, 2.0});
    if (name == "x3")
        return uni([](double x) { return x * x * x; }, Differentiable{2, 6.0});
    if (name == "x4")
        return uni([](double x) { return x * x * x * x; }, Differentiable{3, 24.0});
    if (name == "cheb3")
        return uni([](double x) { return 4.0 * x * x * x - 3.0 * x; }, Differentiable{2, 24.0});
    if (name == "exp") {
        // |e^z| on (E_2 + 1)/2 is at most e^{(a_2 + 1)/2}, a_2 = 5/4.
        return uni([](double x) { return std::exp(x); }, Analytic{2.0, std::exp(1.125)});
    }
    if (name == "sqrt")
        return uni([](double x) { return std::sqrt(x); });
    if (name == "cos") {
        const double w = params.frequency;
        return uni([w](double x) { return std::cos(2.0 * kPi * w * x); },
                   Bandlimited{2.0 * kPi * w, 2.0 * kPi});
    }
    if (name == "cossin") {
        const double w = params.frequency;
        return uni([w](double x) { return std::cos(2.0 * kPi * w * x) + std::sin(2.0 * kPi * w * x); },
                   Bandlimited{2.0 * kPi * w, 2.0 * std::numbers::sqrt2 * kPi});
    }
    if (name == "oscil") {
        auto s = std::make_shared<TrigSeries>(params.terms, params.seed);
        return uni([s](double x) { return (*s)(x); },
                   Bandlimited{2.0 * kPi * static_cast<double>(params.terms), s->spectral_mass()});
    }
    if (name == "alpha") {
        const double a = params.alpha;
        require(a > 0.0, "alpha: parameter must be > 0");
        return uni([a](double x) { return a / std::sqrt(a * a + (x - 0.5) * (x - 0.5)); });
    }
    if (name == "gaussian") {
        const double a = params.alpha;
        require(a > 0.0, "gaussian: parameter must be > 0");
        return uni([a](double x) { return std::exp(-0.5 * (x / a) * (x / a)); });
    }
    r.dimension = 2;
    if (name == "bivariate") {
        r.multivariate = [](std::span<const double> p) {
            const double dx = p[0] - 0.5, dy = p[1] - 0.5;
            return 1.0 / (1.0 + 100.0 * (dx * dx + dy * dy));
        };
        return r;
    }
    if (name == "sum2") {
        r.multivariate = [](std::span<const double> p) { return p[0] + p[1]; };
        return r;
    }
    if (name == "separable") {
        r.multivariate = [](std::span<const double> p) { return std::exp(p[0]) * std::cos(3.0 * p[1]); };
        return r;
    }
    throw ValidationError("unknown function: " + name);
}

// ------------------------------------------------------------ error checks

namespace {

std::vector<std::uint64_t> sample_indices(std::size_t bits, const SampleOptions& opt)
{
    require(bits >= 1 && bits < 63, "sample_indices: bit count out of range");
    const std::uint64_t total = std::uint64_t{1} << bits;
    std::vector<std::uint64_t> out;
    if (opt.full) {
        out.resize(total);
        for (std::uint64_t j = 0; j < total; ++j)
            out[j] = j;
        return out;
    }
    std::mt19937_64 eng(opt.seed);
    out.reserve(opt.random_points + (std::size_t{1} << std::min(bits, opt.grid_level)));
    for (std::size_t i = 0; i < opt.random_points; ++i)
        out.push_back(eng() >> (64 - bits));
    const std::size_t level = std::min(bits, opt.grid_level);
    for (std::uint64_t j = 0; j < (std::uint64_t{1} << level); ++j)
        out.push_back(j << (bits - level));
    for (std::uint64_t j = 0; j < std::min<std::uint64_t>(opt.left_edge_points, total); ++j)
        out.push_back(j);
    if (opt.left_edge_points > 0) {
        for (std::size_t i = 0; i < bits; ++i) {
            const std::uint64_t p = std::uint64_t{1} << i;
            for (std::uint64_t c : {p - 1, p, p + 1})
                if (c < total)
                    out.push_back(c);
        }
    }
    return out;
}

} // namespace

double sampled_max_error(const TensorTrain& tt, const std::function<double(double)>& f,
                         const SampleOptions& opt)
{
    const std::size_t K = tt.depth();
    const TTEvaluator ev(tt);
    double worst = 0.0;
    for (std::uint64_t j : sample_indices(K, opt)) {
        const double x = std::ldexp(static_cast<double>(j), -static_cast<int>(K));
        worst = std::max(worst, std::abs(ev.at(j) - f(x)));
    }
    return worst;
}

double sampled_max_error(const TensorTrain& tt, std::size_t dims,
                         const std::function<double(std::span<const double>)>& f,
                         Ordering ordering, const SampleOptions& opt)
{
    require(dims >= 1 && tt.depth() % dims == 0, "sampled_max_error: depth is not a multiple of d");
    const std::size_t K = tt.depth() / dims;
    const TTEvaluator ev(tt);
    std::vector<std::uint64_t> coords(dims);
    std::vector<double> point(dims);
    double worst = 0.0;
    auto check = [&] {
        for (std::size_t v = 0; v < dims; ++v)
            point[v] = std::ldexp(static_cast<double>(coords[v]), -static_cast<int>(K));
        worst = std::max(worst, std::abs(ev(chain_index(coords, K, ordering)) - f(point)));
    };
    const auto enumerate = [&](std::size_t level) {
        const std::uint64_t side = std::uint64_t{1} << level;
        std::uint64_t count = 1;
        for (std::size_t v = 0; v < dims; ++v)
            count *= side;
        for (std::uint64_t c = 0; c < count; ++c) {
            std::uint64_t rest = c;
            for (std::size_t v = dims; v-- > 0;) {
                coords[v] = (rest % side) << (K - level);
                rest /= side;
            }
            check();
        }
    };
    if (opt.full) {
        require(K * dims < 40, "sampled_max_error: full enumeration too large");
        enumerate(K);
        return worst;
    }
    std::mt19937_64 eng(opt.seed);
    for (std::size_t i = 0; i < opt.random_points; ++i) {
        for (std::size_t v = 0; v < dims; ++v)
            coords[v] = eng() >> (64 - K);
        check();
    }
    enumerate(std::min(K, opt.grid_level / dims));
    return worst;
}

double fit_log2_slope(const std::vector<double>& x, const std::vector<double>& err)
{
    require(x.size() == err.size() && x.size() >= 2, "fit_log2_slope: need two or more points");
    double mx = 0.0, my = 0.0;
    std::vector<double> y(err.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        require(err[i] > 0.0, "fit_log2_slope: errors must be positive");
        y[i] = std::log2(err[i]);
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(x.size());
    my /= static_cast<double>(x.size());
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    require(sxx > 0.0, "fit_log2_slope: x values must differ");
    return sxy / sxx;
}

// ------------------------------------------------------------ experiments

namespace {

SampleOptions sample_options(const ExperimentConfig& cfg)
{
    SampleOptions o;
    o.full = cfg.full_grid;
    o.seed = cfg.seed ^ 0x9e3779b97f4a7c15ull;
    return o;
}

std::string mode_of(const ExperimentConfig& cfg, const std::string& fallback)
{
    const std::string m = cfg.mode.value_or(fallback);
    if (m != "basic" && m != "rr")
        throw ValidationError("experiment mode must be basic or rr");
    return m;
}

BuildResult univariate_build(FunctionOracle& f, std::size_t n, std::size_t depth,
                             const std::string& mode, double eps,
                             std::optional<std::size_t> local = std::nullopt)
{
    const ChebSystem sys(n);
    if (mode == "basic")
        return construct_basic(f, sys, depth);
    TruncationPolicy p;
    p.eps = eps;
    return construct_rank_revealing(f, sys, depth, p, local);
}

ExperimentTable oscillatory(const ExperimentConfig& cfg)
{
    const std::size_t K = cfg.depth.value_or(20);
    const std::size_t J = cfg.values.empty() ? 25 : static_cast<std::size_t>(cfg.values.front());
    const std::vector<std::size_t> orders =
        cfg.orders.empty() ? std::vector<std::size_t>{10, 20, 30, 40, 50, 60, 70, 80} : cfg.orders;
    const std::string mode = mode_of(cfg, "basic");
    const double eps = cfg.eps.value_or(1e-12);

    ExperimentTable t{"oscillatory", cfg.seed,
                      {{"K", std::to_string(K)}, {"J", std::to_string(J)}, {"mode", mode},
                       {"eps", fmt(eps)}, {"N", join(orders)}},
                      {"N", "evaluations", "max_rank", "error"}, {}};
    FunctionParams fp;
    fp.terms = J;
    fp.seed = cfg.seed;
    const RegisteredFunction fn = make_function("oscil", fp);
    for (std::size_t n : orders) {
        FunctionOracle f = fn.oracle();
        const BuildResult b = univariate_build(f, n, K, mode, eps);
        t.rows.push_back({double(n), double(b.report.evaluations), double(b.tt.max_rank()),
                          sampled_max_error(b.tt, fn.univariate, sample_options(cfg))});
    }
    return t;
}

ExperimentTable oscillatory_scaling(const ExperimentConfig& cfg)
{
    const std::size_t K = cfg.depth.value_or(20);
    const std::vector<double> js = cfg.values.empty() ? std::vector<double>{25, 50, 100, 200, 400} : cfg.values;
    const std::string mode = mode_of(cfg, "rr");
    const double eps = cfg.eps.value_or(1e-12);

    ExperimentTable t{"oscillatory-scaling", cfg.seed,
                      {{"K", std::to_string(K)}, {"mode", mode}, {"eps", fmt(eps)}, {"J", join(js)}},
                      {"J", "N", "evaluations", "max_rank", "error"}, {}};
    for (double jd : js) {
        FunctionParams fp;
        fp.terms = static_cast<std::size_t>(jd);
        fp.seed = cfg.seed;
        const RegisteredFunction fn = make_function("oscil", fp);
        FunctionOracle f = fn.oracle();
        const std::size_t n = 2 * fp.terms;
        const BuildResult b = univariate_build(f, n, K, mode, eps);
        t.rows.push_back({jd, double(n), double(b.report.evaluations), double(b.tt.max_rank()),
                          sampled_max_error(b.tt, fn.univariate, sample_options(cfg))});
    }
    return t;
}

ExperimentTable peak_sparse(const ExperimentConfig& cfg)
{
    const std::size_t K = cfg.depth.value_or(25);
    const std::size_t M = cfg.local_order.value_or(10);
    const double eps = cfg.eps.value_or(1e-12);
    const std::vector<double> cs = cfg.values.empty() ? std::vector<double>{2, 4, 8} : cfg.values;
    const std::vector<std::size_t> orders =
        cfg.orders.empty() ? std::vector<std::size_t>{250, 500, 1000, 2000, 3000} : cfg.orders;

    ExperimentTable t{"peak-sparse", cfg.seed,
                      {{"K", std::to_string(K)}, {"M", std::to_string(M)}, {"eps", fmt(eps)},
                       {"C", join(cs)}, {"N", join(orders)}},
                      {"C", "N", "alpha", "max_rank", "error"}, {}};
    for (double c : cs) {
        for (std::size_t n : orders) {
            FunctionParams fp;
            fp.alpha = (c / double(n)) * (c / double(n));
            const RegisteredFunction fn = make_function("alpha", fp);
            FunctionOracle f = fn.oracle();
            const BuildResult b = univariate_build(f, n, K, "rr", eps, M);
            t.rows.push_back({c, double(n), fp.alpha, double(b.tt.max_rank()),
                              sampled_max_error(b.tt, fn.univariate, sample_options(cfg))});
        }
    }
    return t;
}

ExperimentTable invert_depth(const ExperimentConfig& cfg)
{
    const double alpha = cfg.alpha.value_or(0.1);
    const std::size_t n = cfg.orders.empty() ? 300 : cfg.orders.front();
    const std::size_t q = cfg.q.value_or(1);
    const std::string mode = mode_of(cfg, "rr");
    const double eps = cfg.eps.value_or(1e-14);
    std::vector<double> ks = cfg.values;
    if (ks.empty())
        for (int k = 8; k <= 16; ++k)
            ks.push_back(k);

    ExperimentTable t{"invert-depth", cfg.seed,
                      {{"alpha", fmt(alpha)}, {"N", std::to_string(n)}, {"q", std::to_string(q)},
                       {"mode", mode}, {"eps", fmt(eps)}, {"K", join(ks)}},
                      {"K", "error"}, {}};
    FunctionParams fp;
    fp.alpha = alpha;
    const RegisteredFunction fn = make_function("alpha", fp);
    const ChebSystem sys(n);
    for (double kd : ks) {
        const auto K = static_cast<std::size_t>(kd);
        FunctionOracle f = fn.oracle();
        const BuildResult b = univariate_build(f, n, K, mode, eps);
        const GridSamples g = recover_grid(b.tt, sys, q, 1);
        const std::vector<double> row = g.row(0);
        double worst = 0.0;
        for (std::size_t a = 0; a < sys.size(); ++a)
            worst = std::max(worst, std::abs(row[a] - fn.univariate(sys.node(a) / 2.0)));
        t.rows.push_back({kd, worst});
    }
    return t;
}

ExperimentTable gaussian_multires(const ExperimentConfig& cfg)
{
    const std::size_t K = cfg.depth.value_or(25);
    const std::vector<double> alphas =
        cfg.values.empty() ? std::vector<double>{1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6} : cfg.values;
    const std::vector<std::size_t> orders =
        cfg.orders.empty() ? std::vector<std::size_t>{6, 10, 14, 18} : cfg.orders;

    ExperimentTable t{"gaussian-multires", cfg.seed,
                      {{"K", std::to_string(K)}, {"alpha", join(alphas)}, {"N", join(orders)}},
                      {"N", "alpha", "evaluations", "max_rank", "error"}, {}};
    SampleOptions so = sample_options(cfg);
    so.left_edge_points = std::size_t{1} << 14;
    const DangerTree danger = DangerTree::left_edge(K);
    for (std::size_t n : orders) {
        for (double a : alphas) {
            FunctionParams fp;
            fp.alpha = a;
            const RegisteredFunction fn = make_function("gaussian", fp);
            FunctionOracle f = fn.oracle();
            const BuildResult b = construct_multires(f, ChebSystem(n), danger);
            t.rows.push_back({double(n), a, double(b.report.evaluations), double(b.tt.max_rank()),
                              sampled_max_error(b.tt, fn.univariate, so)});
        }
    }
    return t;
}

ExperimentTable bivariate_serial(const ExperimentConfig& cfg)
{
    const std::size_t K = cfg.depth.value_or(10);
    const double eps = cfg.eps.value_or(1e-10);
    const std::vector<std::size_t> orders =
        cfg.orders.empty() ? std::vector<std::size_t>{8, 16, 24, 32, 48, 64} : cfg.orders;

    ExperimentTable t{"bivariate-serial", cfg.seed,
                      {{"K", std::to_string(K)}, {"eps", fmt(eps)}, {"N", join(orders)}},
                      {"N", "evaluations", "max_rank", "error"}, {}};
    const RegisteredFunction fn = make_function("bivariate");
    SampleOptions so = sample_options(cfg);
    so.full = so.full || 2 * K <= 20;
    for (std::size_t n : orders) {
        FunctionOracle f = fn.oracle();
        TruncationPolicy p;
        p.eps = eps;
        const BuildResult b = construct_multivariate(f, ChebSystem(n), K, Ordering::serial, p);
        t.rows.push_back({double(n), double(b.report.evaluations), double(b.tt.max_rank()),
                          sampled_max_error(b.tt, 2, fn.multivariate, Ordering::serial, so)});
    }
    return t;
}

using Runner = ExperimentTable (*)(const ExperimentConfig&);

const std::map<std::string, Runner>& registry()
{
    static const std::map<std::string, Runner> r{
        {"oscillatory", oscillatory},       {"oscillatory-scaling", oscillatory_scaling},
        {"peak-sparse", peak_sparse},       {"invert-depth", invert_depth},
        {"gaussian-multires", gaussian_multires}, {"bivariate-serial", bivariate_serial},
    };
    return r;
}

} // namespace

std::vector<std::string> experiment_names()
{
    std::vector<std::string> out;
    for (const auto& [name, run] : registry())
        out.push_back(name);
    return out;
}

ExperimentTable run_experiment(const ExperimentConfig& cfg)
{
    const auto it = registry().find(cfg.name);
    if (it == registry().end())
        throw ValidationError("unknown experiment: " + cfg.name);
    if (cfg.depth)
        require(*cfg.depth >= 2 && *cfg.depth <= 40, "experiment: depth must be in [2, 40]");
    for (std::size_t n : cfg.orders)
        require(n >= 1, "experiment: orders must be >= 1");
    if (cfg.eps)
        require(*cfg.eps >= 0.0, "experiment: eps must be >= 0");
    return it->second(cfg);
}

void write_csv(const ExperimentTable& table, std::ostream& out)
{
    out << "# experiment=" << table.name << " seed=" << table.seed;
    for (const auto& [k, v] : table.params)
        out << ' ' << k << '=' << v;
    out << '\n';
    for (std::size_t i = 0; i < table.columns.size(); ++i)
        out << (i ? "," : "") << table.columns[i];
    out << '\n';
    out << std::setprecision(17);
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out << (i ? "," : "") << row[i];
        out << '\n';
    }
}

} // namespace qtt

#include "cli.hpp"

#include "qtt/bounds.hpp"
#include "qtt/construct.hpp"
#include "qtt/error.hpp"
#include "qtt/experiments.hpp"
#include "qtt/invert.hpp"
#include "qtt/tt_io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>

namespace qtt::cli {

namespace {

struct BuildArgs {
    std::string fn = "x2";
    std::size_t depth = 12;
    std::size_t order = 16;
    double tol = 1e-12;
    std::optional<std::size_t> local_order;
    std::optional<double> omega;
    double delta = 10.0;
    std::string mode = "basic";
    std::string ordering = "serial";
    std::uint64_t seed = 20240101;
    std::size_t terms = 25;
    double alpha = 0.1;
    double frequency = 8.0;
    std::string out;
};

struct InvertArgs {
    std::string in;
    std::size_t order = 16;
    std::size_t q = 1;
    std::size_t level = 1;
    std::string out;
};

struct RanksArgs {
    std::string in;
    double tol = 1e-12;
};

struct BoundsArgs {
    std::string cls = "bandlimited";
    std::size_t p = 1;
    double C = 1.0;
    double rho = 2.0;
    double B = 1.0;
    double omega = 256.0;
    double mu = 2.0 * std::numbers::pi;
    double eps = 1e-8;
    std::size_t order = 20;
    std::size_t levels = 16;
};

struct ExperimentArgs {
    std::string name;
    std::optional<std::size_t> depth;
    std::vector<std::size_t> orders;
    std::vector<double> values;
    std::optional<double> tol;
    std::optional<std::size_t> local_order;
    std::optional<std::size_t> q;
    std::optional<double> alpha;
    std::optional<std::string> mode;
    std::uint64_t seed = 20240101;
    bool full = false;
    std::string out;
};

Ordering parse_ordering(const std::string& s)
{
    if (s == "interleaved")
        return Ordering::interleaved;
    if (s == "serial")
        return Ordering::serial;
    throw ValidationError("unknown ordering: " + s);
}

nlohmann::json report_json(const BuildReport& r)
{
    nlohmann::json j;
    j["ranks"] = r.ranks;
    j["max_rank"] = *std::max_element(r.ranks.begin(), r.ranks.end());
    j["requests"] = r.requests;
    j["evaluations"] = r.evaluations;
    j["discarded"] = r.discarded;
    j["wall_seconds"] = r.wall_seconds;
    j["core_seconds"] = r.core_seconds;
    return j;
}

int cmd_build(const BuildArgs& a, std::ostream& out)
{
    FunctionParams fp;
    fp.terms = a.terms;
    fp.alpha = a.alpha;
    fp.frequency = a.frequency;
    fp.seed = a.seed;
    const RegisteredFunction fn = make_function(a.fn, fp);
    FunctionOracle f = fn.oracle();
    const ChebSystem sys(a.order);

    TruncationPolicy policy;
    policy.eps = a.tol;

    BuildResult b;
    if (fn.dimension > 1) {
        if (a.mode != "basic" && a.mode != "rr" && a.mode != "sparse")
            throw ValidationError("mode " + a.mode + " is univariate only");
        if (a.mode == "basic")
            policy.eps = 0.0;
        std::optional<std::size_t> local;
        if (a.mode == "sparse")
            local = a.local_order.value_or(std::min<std::size_t>(10, a.order));
        b = construct_multivariate(f, sys, a.depth, parse_ordering(a.ordering), policy, local);
    } else if (a.mode == "basic") {
        b = construct_basic(f, sys, a.depth);
    } else if (a.mode == "rr") {
        b = construct_rank_revealing(f, sys, a.depth, policy);
    } else if (a.mode == "sparse") {
        b = construct_rank_revealing(f, sys, a.depth, policy,
                                     a.local_order.value_or(std::min<std::size_t>(10, a.order)));
    } else if (a.mode == "decay") {
        double omega = 0.0;
        if (a.omega)
            omega = *a.omega;
        else if (fn.spec && std::holds_alternative<Bandlimited>(*fn.spec))
            omega = std::get<Bandlimited>(*fn.spec).omega;
        else
            throw ValidationError("decay mode needs --omega for function " + a.fn);
        b = construct_decay(f, DecaySchedule(omega, a.delta, a.depth));
    } else if (a.mode == "multires") {
        b = construct_multires(f, sys, DangerTree::left_edge(a.depth));
    } else {
        throw ValidationError("unknown mode: " + a.mode);
    }

    tt_save(b.tt, a.out);
    nlohmann::json j = report_json(b.report);
    j["fn"] = a.fn;
    j["mode"] = a.mode;
    j["out"] = a.out;
    out << j.dump(2) << '\n';
    return kOk;
}

int cmd_invert(const InvertArgs& a, std::ostream& out)
{
    const TensorTrain tt = tt_load(a.in);
    const ChebSystem sys(a.order);
    const GridSamples g = recover_grid(tt, sys, a.q, a.level);
    if (a.out.empty()) {
        write_grid_csv(g, sys, out);
        return kOk;
    }
    std::ofstream os(a.out);
    if (!os)
        throw IoError("cannot open " + a.out + " for writing");
    write_grid_csv(g, sys, os);
    if (!os)
        throw IoError("write failed: " + a.out);
    return kOk;
}

int cmd_ranks(const RanksArgs& a, std::ostream& out)
{
    const TensorTrain tt = tt_load(a.in);
    const DenseTensor dense = tt_to_dense(tt);
    const auto ranks = tt.ranks();
    out << "m,tt_rank,eps_rank\n";
    for (std::size_t m = 1; m < tt.depth(); ++m)
        out << m << ',' << ranks[m] << ',' << unfolding_eps_rank(dense, m, a.tol) << '\n';
    return kOk;
}

int cmd_bounds(const BoundsArgs& a, std::ostream& out)
{
    SmoothnessSpec spec;
    if (a.cls == "differentiable")
        spec = Differentiable{a.p, a.C};
    else if (a.cls == "analytic")
        spec = Analytic{a.rho, a.B};
    else if (a.cls == "bandlimited")
        spec = Bandlimited{a.omega, a.mu};
    else
        throw ValidationError("unknown class: " + a.cls);
    validate(spec);

    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    out << "m,error_bound,rank_bound\n";
    for (std::size_t m = 0; m <= a.levels; ++m)
        out << m << ',' << interp_error_bound(spec, m, a.order) << ',' << rank_bound(spec, m, a.eps) << '\n';
    if (const auto* b = std::get_if<Bandlimited>(&spec))
        out << "# uniform_rank_bound=" << uniform_rank_bound(*b, a.eps) << '\n';
    return kOk;
}

int cmd_experiment(const ExperimentArgs& a, std::ostream& out)
{
    ExperimentConfig cfg;
    cfg.name = a.name;
    cfg.depth = a.depth;
    cfg.orders = a.orders;
    cfg.values = a.values;
    cfg.eps = a.tol;
    cfg.local_order = a.local_order;
    cfg.q = a.q;
    cfg.alpha = a.alpha;
    cfg.mode = a.mode;
    cfg.seed = a.seed;
    cfg.full_grid = a.full;
    const ExperimentTable t = run_experiment(cfg);
    if (a.out.empty()) {
        write_csv(t, out);
        return kOk;
    }
    std::ofstream os(a.out);
    if (!os)
        throw IoError("cannot open " + a.out + " for writing");
    write_csv(t, os);
    if (!os)
        throw IoError("write failed: " + a.out);
    return kOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Quantized tensor train construction from black-box functions", "qtt_cli"};
    app.require_subcommand(1);

    BuildArgs ba;
    auto* build = app.add_subcommand("build", "Build a QTT and write it to a file");
    build->add_option("--fn", ba.fn, "Function name")->check(CLI::IsMember(function_names()));
    build->add_option("-K,--depth,--K", ba.depth, "Bits per variable")->check(CLI::Range(2, 62));
    build->add_option("-N,--order,--N", ba.order, "Chebyshev order")->check(CLI::PositiveNumber);
    build->add_option("--tol", ba.tol, "Truncation eps")->check(CLI::NonNegativeNumber);
    build->add_option("-M,--local-order,--M", ba.local_order, "Local interpolation half-width");
    build->add_option("--omega", ba.omega, "Bandlimit for decay mode");
    build->add_option("--delta", ba.delta, "Margin for decay mode")->check(CLI::PositiveNumber);
    build->add_option("--mode", ba.mode, "basic|rr|sparse|decay|multires")
        ->check(CLI::IsMember({"basic", "rr", "sparse", "decay", "multires"}));
    build->add_option("--ordering", ba.ordering, "interleaved|serial")
        ->check(CLI::IsMember({"interleaved", "serial"}));
    build->add_option("--seed", ba.seed, "Seed for random functions");
    build->add_option("--terms", ba.terms, "Terms of the trigonometric series")->check(CLI::PositiveNumber);
    build->add_option("--alpha", ba.alpha, "Width parameter")->check(CLI::PositiveNumber);
    build->add_option("--freq", ba.frequency, "Frequency for cos and cossin");
    build->add_option("--out", ba.out, "Output QTT file")->required();

    InvertArgs ia;
    auto* invert = app.add_subcommand("invert", "Recover Chebyshev grid samples from a QTT file");
    invert->add_option("--in", ia.in, "Input QTT file")->required();
    invert->add_option("-N,--order,--N", ia.order, "Chebyshev order")->check(CLI::PositiveNumber);
    invert->add_option("--q", ia.q, "Lagrange depth")->check(CLI::Range(1, 4));
    invert->add_option("--level", ia.level, "Target level m")->check(CLI::PositiveNumber);
    invert->add_option("--out", ia.out, "Output CSV (default stdout)");

    RanksArgs ra;
    auto* ranks = app.add_subcommand("ranks", "Unfolding eps-ranks of a QTT file by brute force");
    ranks->add_option("--in", ra.in, "Input QTT file")->required();
    ranks->add_option("--tol", ra.tol, "eps in the tensor 2-norm")->check(CLI::NonNegativeNumber);

    BoundsArgs bo;
    auto* bounds = app.add_subcommand("bounds", "Interpolation error and rank bounds per level");
    bounds->add_option("--class", bo.cls, "differentiable|analytic|bandlimited")
        ->check(CLI::IsMember({"differentiable", "analytic", "bandlimited"}));
    bounds->add_option("--p", bo.p, "Differentiability order")->check(CLI::PositiveNumber);
    bounds->add_option("--C", bo.C, "Derivative bound");
    bounds->add_option("--rho", bo.rho, "Ellipse parameter");
    bounds->add_option("--B", bo.B, "Bound on the ellipse");
    bounds->add_option("--omega", bo.omega, "Bandlimit");
    bounds->add_option("--mu", bo.mu, "Total variation of the spectral measure");
    bounds->add_option("--eps", bo.eps, "Rank tolerance")->check(CLI::PositiveNumber);
    bounds->add_option("-N,--order,--N", bo.order, "Chebyshev order")->check(CLI::PositiveNumber);
    bounds->add_option("--levels", bo.levels, "Largest level m")->check(CLI::Range(0, 60));

    ExperimentArgs ea;
    auto* experiment = app.add_subcommand("experiment", "Run a registered experiment, CSV output");
    experiment->add_option("name", ea.name, "Experiment name")->required()->check(CLI::IsMember(experiment_names()));
    experiment->add_option("-K,--depth,--K", ea.depth, "Depth");
    experiment->add_option("-N,--order,--N", ea.orders, "Order sweep");
    experiment->add_option("--values", ea.values, "J, C, alpha or K sweep, per experiment");
    experiment->add_option("--tol", ea.tol, "Truncation eps");
    experiment->add_option("-M,--local-order,--M", ea.local_order, "Local interpolation half-width");
    experiment->add_option("--q", ea.q, "Lagrange depth");
    experiment->add_option("--alpha", ea.alpha, "Width parameter");
    experiment->add_option("--mode", ea.mode, "basic|rr")->check(CLI::IsMember({"basic", "rr"}));
    experiment->add_option("--seed", ea.seed, "Seed");
    experiment->add_flag("--full", ea.full, "Enumerate the whole dyadic grid");
    experiment->add_option("--out", ea.out, "Output CSV (default stdout)");

    std::vector<const char*> argv;
    for (const auto& s : args)
        argv.push_back(s.c_str());
    if (argv.empty())
        argv.push_back("qtt_cli");

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kValidation;
    }

    try {
        if (*build)
            return cmd_build(ba, out);
        if (*invert)
            return cmd_invert(ia, out);
        if (*ranks)
            return cmd_ranks(ra, out);
        if (*bounds)
            return cmd_bounds(bo, out);
        if (*experiment)
            return cmd_experiment(ea, out);
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kValidation;
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << '\n';
        return kNumerical;
    } catch (const IoError& e) {
        err << "i/o error: " << e.what() << '\n';
        return kIo;
    } catch (const FormatError& e) {
        err << "i/o error: " << e.what() << '\n';
        return kIo;
    }
    return kValidation;
}

} // namespace qtt::cli

#include "meanslab/cli.hpp"

#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"

#include "meanslab/characterization.hpp"
#include "meanslab/convexity_lab.hpp"
#include "meanslab/crossval.hpp"
#include "meanslab/errors.hpp"
#include "meanslab/means.hpp"
#include "meanslab/quasideviation.hpp"
#include "meanslab/report.hpp"

namespace meanslab::cli {
namespace {

constexpr const char* kToolVersion = "1.0.0";

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::string::size_type start = 0;
    while (true) {
        auto pos = text.find(sep, start);
        if (pos == std::string::npos) {
            parts.push_back(text.substr(start));
            return parts;
        }
        parts.push_back(text.substr(start, pos - start));
        start = pos + 1;
    }
}

double parse_real(const std::string& text, const char* what) {
    errno = 0;
    const char* begin = text.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0' || errno == ERANGE)
        throw UsageError(std::string(what) + ": cannot parse '" + text +
                         "' as a real number");
    return v;
}

long parse_int(const std::string& text, const char* what) {
    errno = 0;
    const char* begin = text.c_str();
    char* end = nullptr;
    long v = std::strtol(begin, &end, 10);
    if (end == begin || *end != '\0' || errno == ERANGE)
        throw UsageError(std::string(what) + ": cannot parse '" + text +
                         "' as an integer");
    return v;
}

/// Seed from the environment when no --seed flag was given; absent or empty
/// MEANS_LAB_SEED means 0.
std::uint64_t env_seed_default() {
    const char* env = std::getenv("MEANS_LAB_SEED");
    if (env == nullptr || *env == '\0') return 0;
    if (*env == '-')
        throw UsageError("MEANS_LAB_SEED must be a non-negative integer");
    errno = 0;
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (errno != 0 || end == env || *end != '\0')
        throw UsageError("MEANS_LAB_SEED must be a decimal unsigned integer");
    return static_cast<std::uint64_t>(v);
}

std::uint64_t resolve_seed(const CLI::App* sub, std::uint64_t flag_value) {
    return sub->count("--seed") > 0 ? flag_value : env_seed_default();
}

/// Canonical command echo: rebuilt from the resolved values so that running
/// the echoed string reproduces the report (floats keep 17 significant
/// digits specifically so they round-trip bit for bit).
class CommandEcho {
public:
    explicit CommandEcho(std::string head) : text_(std::move(head)) {}

    CommandEcho& raw(const std::string& name, const std::string& value) {
        text_ += " --" + name + " " + value;
        return *this;
    }
    CommandEcho& real(const std::string& name, double v) {
        return raw(name, Json::format_double(v));
    }
    CommandEcho& integer(const std::string& name, long v) {
        text_ += " --" + name + " " + std::to_string(v);
        return *this;
    }
    CommandEcho& unsigned_integer(const std::string& name, std::uint64_t v) {
        text_ += " --" + name + " " + std::to_string(v);
        return *this;
    }
    CommandEcho& flag_if(const std::string& name, bool set) {
        if (set) text_ += " --" + name;
        return *this;
    }

    const std::string& str() const { return text_; }

private:
    std::string text_;
};

std::string canonical_interval(const Interval& iv) {
    return Json::format_double(iv.lo) + ":" + Json::format_double(iv.hi);
}

std::string canonical_grid(const std::string& raw_grid) {
    auto parts = split(raw_grid, ':');
    if (parts.size() != 3) throw UsageError("grid must be lo:hi:step");
    return Json::format_double(parse_real(parts[0], "grid lo")) + ":" +
           Json::format_double(parse_real(parts[1], "grid hi")) + ":" +
           Json::format_double(parse_real(parts[2], "grid step"));
}

std::string canonical_points(const std::vector<double>& pts) {
    std::string s;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (i > 0) s += ',';
        s += Json::format_double(pts[i]);
    }
    return s;
}

std::string canonical_arities(const std::vector<int>& ns) {
    std::string s;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        if (i > 0) s += ',';
        s += std::to_string(ns[i]);
    }
    return s;
}

Json base_report(const std::string& command) {
    Json j = Json::object();
    j.set("schema_version", Json::integer(1));
    j.set("tool_version", Json::text(kToolVersion));
    j.set("command", Json::text(command));
    return j;
}

Json witness_json(const ConvexityWitness& w) {
    Json jx = Json::array();
    for (double v : w.x) jx.push(Json::number(v));
    Json jy = Json::array();
    for (double v : w.y) jy.push(Json::number(v));
    Json j = Json::object();
    j.set("x", std::move(jx));
    j.set("y", std::move(jy));
    j.set("margin", Json::number(w.margin));
    if (w.t) j.set("t", Json::number(*w.t));
    return j;
}

void emit(const Json& report, const std::string& out_file, std::ostream& out) {
    std::string payload = report.dump();
    payload += '\n';
    if (out_file.empty()) {
        out << payload;
        out.flush();
        return;
    }
    std::ofstream f(out_file, std::ios::binary | std::ios::trunc);
    if (!f) throw UsageError("cannot open --out file '" + out_file + "'");
    f << payload;
}

double elapsed_ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - t0)
        .count();
}

void require_flag(const CLI::App* sub, const char* flag, const char* context) {
    if (sub->count(flag) == 0)
        throw UsageError(std::string(context) + " requires " + flag);
}

} // namespace

FunctionExpr parse_function_expr(const std::string& text) {
    auto colon = text.find(':');
    std::string head =
        colon == std::string::npos ? text : text.substr(0, colon);
    std::vector<double> params;
    if (colon != std::string::npos) {
        for (const auto& piece : split(text.substr(colon + 1), ','))
            params.push_back(parse_real(piece, "function parameter"));
    }
    auto arity = [&](std::size_t n) {
        if (params.size() != n)
            throw UsageError("'" + head + "' takes " + std::to_string(n) +
                             " parameter(s), got " +
                             std::to_string(params.size()));
    };
    if (head == "identity") {
        arity(0);
        return {FunctionFamily::identity, {}};
    }
    if (head == "power") {
        arity(1);
        return {FunctionFamily::power, params};
    }
    if (head == "log") {
        arity(0);
        return {FunctionFamily::log_fn, {}};
    }
    if (head == "exp") {
        if (params.empty())
            params.push_back(1.0);
        else
            arity(1);
        return {FunctionFamily::exp_fn, params};
    }
    if (head == "affine") {
        arity(2);
        return {FunctionFamily::affine, params};
    }
    if (head == "const") {
        arity(1);
        return {FunctionFamily::constant, params};
    }
    throw UsageError("unknown function family '" + head +
                     "' (expected identity|power:p|log|exp[:c]|affine:a,b|const:c)");
}

GeneratorSpec generator_from_expr(const FunctionExpr& e,
                                  const std::optional<Interval>& domain_hint) {
    switch (e.family) {
    case FunctionFamily::identity:
        return identity_generator(domain_hint.value_or(Interval::reals()));
    case FunctionFamily::power:
        return power_generator(e.params[0],
                               domain_hint.value_or(Interval::positive_reals()));
    case FunctionFamily::log_fn:
        return log_generator(domain_hint.value_or(Interval::positive_reals()));
    case FunctionFamily::exp_fn:
        return exp_generator(e.params[0], domain_hint.value_or(Interval::reals()));
    case FunctionFamily::affine:
        return affine_generator(e.params[0], e.params[1],
                                domain_hint.value_or(Interval::reals()));
    case FunctionFamily::constant:
        throw UsageError("const is only valid as a weight, not a generator");
    }
    throw UsageError("unhandled function family");
}

WeightSpec weight_from_expr(const FunctionExpr& e,
                            const std::optional<Interval>& domain_hint) {
    switch (e.family) {
    case FunctionFamily::constant:
        return const_weight(e.params[0], domain_hint.value_or(Interval::reals()));
    case FunctionFamily::power:
        return power_weight(e.params[0],
                            domain_hint.value_or(Interval::positive_reals()));
    case FunctionFamily::identity:
        // the weight x, positive on (0, inf)
        return power_weight(1.0,
                            domain_hint.value_or(Interval::positive_reals()));
    case FunctionFamily::exp_fn:
        return exp_weight(e.params[0], domain_hint.value_or(Interval::reals()));
    case FunctionFamily::affine:
        if (!domain_hint)
            throw UsageError(
                "an affine weight needs --interval to verify positivity");
        return affine_weight(e.params[0], e.params[1], *domain_hint);
    case FunctionFamily::log_fn:
        throw UsageError("log is not positive, so it cannot be a weight");
    }
    throw UsageError("unhandled function family");
}

Interval parse_interval(const std::string& text) {
    auto parts = split(text, ':');
    if (parts.size() != 2) throw UsageError("interval must be a:b");
    return Interval(parse_real(parts[0], "interval endpoint"),
                    parse_real(parts[1], "interval endpoint"));
}

std::vector<double> parse_grid(const std::string& text) {
    auto parts = split(text, ':');
    if (parts.size() != 3) throw UsageError("grid must be lo:hi:step");
    double lo = parse_real(parts[0], "grid lo");
    double hi = parse_real(parts[1], "grid hi");
    double step = parse_real(parts[2], "grid step");
    if (!std::isfinite(lo) || !std::isfinite(hi))
        throw UsageError("grid endpoints must be finite");
    if (!std::isfinite(step) || step <= 0.0)
        throw UsageError("grid step must be positive and finite");
    std::vector<double> grid;
    if (lo > hi) return grid;
    double tol = 1e-12 * std::max({1.0, std::fabs(lo), std::fabs(hi)});
    for (long k = 0;; ++k) {
        double v = lo + static_cast<double>(k) * step;
        if (v > hi + tol) break;
        // snap the last node onto hi so both endpoints are exactly included
        grid.push_back(std::fabs(v - hi) <= tol ? hi : v);
        if (grid.size() > 1000000) throw UsageError("grid has over 10^6 nodes");
    }
    return grid;
}

std::vector<double> parse_points(const std::string& text) {
    std::vector<double> pts;
    for (const auto& piece : split(text, ','))
        pts.push_back(parse_real(piece, "point"));
    if (pts.empty()) throw UsageError("--points needs at least one value");
    return pts;
}

std::vector<int> parse_arities(const std::string& text) {
    std::vector<int> ns;
    for (const auto& piece : split(text, ',')) {
        long n = parse_int(piece, "arity");
        if (n < 1 || n > 4096) throw UsageError("arity must be in [1, 4096]");
        ns.push_back(static_cast<int>(n));
    }
    if (ns.empty()) throw UsageError("--nvars needs at least one arity");
    return ns;
}

std::string canonical_expr(const FunctionExpr& e) {
    switch (e.family) {
    case FunctionFamily::identity:
        return "identity";
    case FunctionFamily::log_fn:
        return "log";
    case FunctionFamily::power:
        return "power:" + Json::format_double(e.params[0]);
    case FunctionFamily::exp_fn:
        return "exp:" + Json::format_double(e.params[0]);
    case FunctionFamily::affine:
        return "affine:" + Json::format_double(e.params[0]) + "," +
               Json::format_double(e.params[1]);
    case FunctionFamily::constant:
        return "const:" + Json::format_double(e.params[0]);
    }
    return "";
}

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
    CLI::App app{
        "mean families: evaluation, convexity decisions, falsification, "
        "cross-validation"};
    app.name("meanslab");
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string("meanslab ") + kToolVersion);

    // ----- eval ------------------------------------------------------------
    struct {
        std::string mean, points, interval, generator, out;
        std::string weight = "const:1";
        double p = 0, q = 0, r = 0, alpha = 1, beta = 1;
    } ev;
    CLI::App* eval = app.add_subcommand(
        "eval", "evaluate one mean at a point list (irrelevant family flags "
                "are ignored)");
    eval->add_option("--mean", ev.mean, "holder|gini|qa|bajraktarevic|deviation")
        ->required();
    eval->add_option("--p", ev.p, "power-mean exponent");
    eval->add_option("--q", ev.q, "first Gini parameter");
    eval->add_option("--r", ev.r, "second Gini parameter");
    eval->add_option("--generator", ev.generator,
                     "generator expression, e.g. power:2 or log");
    eval->add_option("--weight", ev.weight, "weight expression (default const:1)");
    eval->add_option("--alpha", ev.alpha, "deviation scale for x <= u");
    eval->add_option("--beta", ev.beta, "deviation scale for x > u");
    eval->add_option("--points", ev.points, "comma-separated inputs")->required();
    eval->add_option("--interval", ev.interval,
                     "domain a:b restricting generator and weight");
    eval->add_option("--out", ev.out, "write the report to FILE instead of stdout");

    // ----- decide ----------------------------------------------------------
    CLI::App* decide =
        app.add_subcommand("decide", "closed-form convexity decision rules");
    decide->require_subcommand(1);

    struct {
        double q = 0, r = 0;
        std::string interval, out;
    } dg;
    CLI::App* dgini = decide->add_subcommand(
        "gini", "Gini mean, all arities, on (0,inf) or a subinterval");
    dgini->add_option("--q", dg.q, "first parameter")->required();
    dgini->add_option("--r", dg.r, "second parameter")->required();
    dgini->add_option("--interval", dg.interval,
                      "subinterval a:b with 0 < a < b (omit for all of (0,inf))");
    dgini->add_option("--out", dg.out, "report file");

    struct {
        double q = 0, r = 0;
        std::string out;
    } dg2;
    CLI::App* dgini2 = decide->add_subcommand(
        "gini-2var", "two-variable Gini mean on (0,inf)^2");
    dgini2->add_option("--q", dg2.q, "first parameter")->required();
    dgini2->add_option("--r", dg2.r, "second parameter")->required();
    dgini2->add_option("--out", dg2.out, "report file");

    struct {
        double p = 0;
        std::string out;
    } dh;
    CLI::App* dholder =
        decide->add_subcommand("holder", "power mean, any arity");
    dholder->add_option("--p", dh.p, "exponent")->required();
    dholder->add_option("--out", dh.out, "report file");

    struct {
        std::string generator, interval, out;
        long budget = 100000;
        std::uint64_t seed = 0;
        int refine = 3;
        bool serial = false;
    } dq;
    CLI::App* dqa = decide->add_subcommand(
        "qa", "quasiarithmetic mean via the generator-ratio rule");
    dqa->add_option("--generator", dq.generator, "generator expression")->required();
    dqa->add_option("--interval", dq.interval, "finite interval a:b")->required();
    dqa->add_option("--budget", dq.budget, "chord-sampling budget");
    dqa->add_option("--seed", dq.seed, "sampling seed (default MEANS_LAB_SEED or 0)");
    dqa->add_option("--refine", dq.refine, "golden-section refinement rounds");
    dqa->add_flag("--serial", dq.serial, "single-threaded sampling");
    dqa->add_option("--out", dq.out, "report file");

    struct {
        std::string generator, interval, out;
        std::string weight = "const:1";
        long budget = 100000;
        std::uint64_t seed = 0;
        int refine = 3;
        bool serial = false;
    } db;
    CLI::App* dbaj = decide->add_subcommand(
        "bajraktarevic",
        "weighted mean: closed rule when the pair is recognized, plus a "
        "sampling cross-check");
    dbaj->add_option("--generator", db.generator, "generator expression")->required();
    dbaj->add_option("--weight", db.weight, "weight expression (default const:1)");
    dbaj->add_option("--interval", db.interval, "finite interval a:b")->required();
    dbaj->add_option("--budget", db.budget, "chord-sampling budget");
    dbaj->add_option("--seed", db.seed, "sampling seed");
    dbaj->add_option("--refine", db.refine, "refinement rounds");
    dbaj->add_flag("--serial", db.serial, "single-threaded sampling");
    dbaj->add_option("--out", db.out, "report file");

    struct {
        std::string generator, interval, out;
        double alpha = 0, beta = 0;
        long budget = 100000;
        std::uint64_t seed = 0;
        int refine = 3;
        bool serial = false;
    } ds;
    CLI::App* dsplit = decide->add_subcommand(
        "scale-split", "piecewise-scaled generator deviation "
                       "alpha*(f(x)-f(u)) / beta*(f(x)-f(u))");
    dsplit->add_option("--generator", ds.generator, "generator expression")->required();
    dsplit->add_option("--alpha", ds.alpha, "scale for x <= u")->required();
    dsplit->add_option("--beta", ds.beta, "scale for x > u")->required();
    dsplit->add_option("--interval", ds.interval, "finite interval a:b")->required();
    dsplit->add_option("--budget", ds.budget, "sampling budget for the base rule");
    dsplit->add_option("--seed", ds.seed, "sampling seed");
    dsplit->add_option("--refine", ds.refine, "refinement rounds");
    dsplit->add_flag("--serial", ds.serial, "single-threaded sampling");
    dsplit->add_option("--out", ds.out, "report file");

    // ----- falsify ---------------------------------------------------------
    struct {
        std::string mean, interval, generator, out;
        std::string weight = "const:1";
        double p = 0, q = 0, r = 0, alpha = 1, beta = 1;
        int nvars = 2;
        long budget = 100000;
        std::uint64_t seed = 0;
        int refine = 3;
        bool serial = false;
    } fa;
    CLI::App* falsify = app.add_subcommand(
        "falsify", "sampling search for a midpoint-convexity violation");
    falsify->add_option("--mean", fa.mean,
                        "holder|gini|qa|bajraktarevic|deviation")->required();
    falsify->add_option("--p", fa.p, "power-mean exponent");
    falsify->add_option("--q", fa.q, "first Gini parameter");
    falsify->add_option("--r", fa.r, "second Gini parameter");
    falsify->add_option("--generator", fa.generator, "generator expression");
    falsify->add_option("--weight", fa.weight, "weight expression (default const:1)");
    falsify->add_option("--alpha", fa.alpha, "deviation scale for x <= u");
    falsify->add_option("--beta", fa.beta, "deviation scale for x > u");
    falsify->add_option("--interval", fa.interval, "finite interval a:b")->required();
    falsify->add_option("--nvars", fa.nvars, "arity of the tested mean (default 2)");
    falsify->add_option("--budget", fa.budget, "total sample budget");
    falsify->add_option("--seed", fa.seed, "seed (default MEANS_LAB_SEED or 0)");
    falsify->add_option("--refine", fa.refine, "golden-section refinement rounds");
    falsify->add_flag("--serial", fa.serial, "single-threaded sampling");
    falsify->add_option("--out", fa.out, "report file");

    // ----- crossval ----------------------------------------------------------
    CLI::App* crossval = app.add_subcommand(
        "crossval", "closed decision rules vs the sampling oracle over a "
                    "parameter grid");
    crossval->require_subcommand(1);

    struct {
        std::string qgrid, rgrid, interval, out;
        std::string nvars = "2";
        long budget = 20000;
        double dead_zone = 0.03;
        std::uint64_t seed = 0;
        int refine = 3;
        bool serial = false;
    } cg;
    CLI::App* cgini = crossval->add_subcommand("gini", "Gini parameter grid");
    cgini->add_option("--q-grid", cg.qgrid, "lo:hi:step")->required();
    cgini->add_option("--r-grid", cg.rgrid, "lo:hi:step")->required();
    cgini->add_option("--interval", cg.interval, "finite interval a:b")->required();
    cgini->add_option("--budget", cg.budget, "sample budget per (cell, arity)");
    cgini->add_option("--nvars", cg.nvars, "comma-separated arities (default 2)");
    cgini->add_option("--dead-zone", cg.dead_zone,
                      "relative width of the skipped boundary band");
    cgini->add_option("--refine", cg.refine, "refinement rounds");
    cgini->add_option("--seed", cg.seed, "seed (default MEANS_LAB_SEED or 0)");
    cgini->add_flag("--serial", cg.serial, "single-threaded sampling");
    cgini->add_option("--out", cg.out, "report file");

    struct {
        std::string pgrid, interval, out;
        std::string nvars = "2";
        long budget = 20000;
        double dead_zone = 0.03;
        std::uint64_t seed = 0;
        int refine = 3;
        bool serial = false;
    } ch;
    CLI::App* cholder =
        crossval->add_subcommand("holder", "power-mean exponent grid");
    cholder->add_option("--p-grid", ch.pgrid, "lo:hi:step")->required();
    cholder->add_option("--interval", ch.interval, "finite interval a:b")->required();
    cholder->add_option("--budget", ch.budget, "sample budget per (cell, arity)");
    cholder->add_option("--nvars", ch.nvars, "comma-separated arities (default 2)");
    cholder->add_option("--dead-zone", ch.dead_zone,
                        "relative width of the skipped boundary band");
    cholder->add_option("--refine", ch.refine, "refinement rounds");
    cholder->add_option("--seed", ch.seed, "seed (default MEANS_LAB_SEED or 0)");
    cholder->add_flag("--serial", ch.serial, "single-threaded sampling");
    cholder->add_option("--out", ch.out, "report file");

    // ----- parse -------------------------------------------------------------
    std::vector<std::string> argv_store;
    argv_store.reserve(args.size() + 1);
    argv_store.emplace_back("meanslab");
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    argv.reserve(argv_store.size());
    for (const auto& s : argv_store) argv.push_back(s.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 2;
    }

    try {
        // ----- eval ----------------------------------------------------------
        if (eval->parsed()) {
            std::optional<Interval> hint;
            if (eval->count("--interval")) hint = parse_interval(ev.interval);
            auto pts = parse_points(ev.points);
            CommandEcho echo("eval");
            echo.raw("mean", ev.mean);
            auto t0 = std::chrono::steady_clock::now();
            double value = 0;
            if (ev.mean == "holder") {
                require_flag(eval, "--p", "eval --mean holder");
                value = holder_mean(ev.p, pts).value;
                echo.real("p", ev.p);
            } else if (ev.mean == "gini") {
                require_flag(eval, "--q", "eval --mean gini");
                require_flag(eval, "--r", "eval --mean gini");
                value = gini_mean({ev.q, ev.r}, pts).value;
                echo.real("q", ev.q).real("r", ev.r);
            } else if (ev.mean == "qa" || ev.mean == "quasiarithmetic") {
                require_flag(eval, "--generator", "eval --mean qa");
                auto fe = parse_function_expr(ev.generator);
                value = quasiarithmetic_mean(generator_from_expr(fe, hint), pts)
                            .value;
                echo.raw("generator", canonical_expr(fe));
            } else if (ev.mean == "bajraktarevic") {
                require_flag(eval, "--generator", "eval --mean bajraktarevic");
                auto fe = parse_function_expr(ev.generator);
                auto we = parse_function_expr(ev.weight);
                value = bajraktarevic_mean(generator_from_expr(fe, hint),
                                           weight_from_expr(we, hint), pts)
                            .value;
                echo.raw("generator", canonical_expr(fe));
                echo.raw("weight", canonical_expr(we));
            } else if (ev.mean == "deviation" || ev.mean == "scale-split") {
                require_flag(eval, "--generator", "eval --mean deviation");
                auto fe = parse_function_expr(ev.generator);
                auto we = parse_function_expr(ev.weight);
                Quasideviation E = from_bajraktarevic(
                    generator_from_expr(fe, hint), weight_from_expr(we, hint));
                if (ev.alpha != 1.0 || ev.beta != 1.0)
                    E = scale_split(E, ev.alpha, ev.beta);
                value = deviation_mean(E, pts).value;
                echo.raw("generator", canonical_expr(fe));
                echo.raw("weight", canonical_expr(we));
                echo.real("alpha", ev.alpha).real("beta", ev.beta);
            } else {
                throw UsageError("unknown --mean '" + ev.mean +
                                 "' (holder|gini|qa|bajraktarevic|deviation)");
            }
            echo.raw("points", canonical_points(pts));
            if (hint) echo.raw("interval", canonical_interval(*hint));
            Json j = base_report(echo.str());
            j.set("value", Json::number(value));
            j.set("elapsed_ms", Json::number(elapsed_ms_since(t0)));
            emit(j, ev.out, out);
            return 0;
        }

        // ----- decide --------------------------------------------------------
        if (decide->parsed()) {
            ConvexityVerdict verdict;
            std::optional<std::string> case_label;
            std::optional<double> beta_value;
            std::optional<double> gamma_dd_min;
            std::optional<std::uint64_t> seed_used;
            std::string echo_str, out_file;
            auto t0 = std::chrono::steady_clock::now();

            if (dgini->parsed()) {
                out_file = dg.out;
                if (dgini->count("--interval")) {
                    Interval iv = parse_interval(dg.interval);
                    GiniDecision dec =
                        decide_gini_subinterval(dg.q, dg.r, iv.lo, iv.hi);
                    verdict = dec.verdict;
                    case_label = dec.case_label;
                    beta_value = dec.beta_value;
                    gamma_dd_min = dec.gamma_second_derivative_min;
                    echo_str = CommandEcho("decide gini")
                                   .real("q", dg.q)
                                   .real("r", dg.r)
                                   .raw("interval", canonical_interval(iv))
                                   .str();
                } else {
                    verdict = decide_gini_global(dg.q, dg.r);
                    beta_value = beta_qr(dg.q, dg.r);
                    echo_str = CommandEcho("decide gini")
                                   .real("q", dg.q)
                                   .real("r", dg.r)
                                   .str();
                }
            } else if (dgini2->parsed()) {
                out_file = dg2.out;
                verdict = decide_gini_two_variable(dg2.q, dg2.r);
                beta_value = beta_qr(dg2.q, dg2.r);
                echo_str = CommandEcho("decide gini-2var")
                               .real("q", dg2.q)
                               .real("r", dg2.r)
                               .str();
            } else if (dholder->parsed()) {
                out_file = dh.out;
                verdict = decide_holder(dh.p);
                echo_str = CommandEcho("decide holder").real("p", dh.p).str();
            } else if (dqa->parsed()) {
                out_file = dq.out;
                Interval iv = parse_interval(dq.interval);
                auto fe = parse_function_expr(dq.generator);
                GeneratorSpec f = generator_from_expr(fe, iv);
                std::uint64_t seed = resolve_seed(dqa, dq.seed);
                seed_used = seed;
                SearchBudget budget{dq.budget, 2, seed, dq.refine};
                verdict = decide_quasiarithmetic(
                    f, iv, budget,
                    dq.serial ? ExecPolicy::serial : ExecPolicy::parallel);
                echo_str = CommandEcho("decide qa")
                               .raw("generator", canonical_expr(fe))
                               .raw("interval", canonical_interval(iv))
                               .integer("budget", dq.budget)
                               .integer("refine", dq.refine)
                               .unsigned_integer("seed", seed)
                               .flag_if("serial", dq.serial)
                               .str();
            } else if (dbaj->parsed()) {
                out_file = db.out;
                Interval iv = parse_interval(db.interval);
                auto fe = parse_function_expr(db.generator);
                auto we = parse_function_expr(db.weight);
                GeneratorSpec f = generator_from_expr(fe, iv);
                WeightSpec p = weight_from_expr(we, iv);
                std::uint64_t seed = resolve_seed(dbaj, db.seed);
                seed_used = seed;
                SearchBudget budget{db.budget, 2, seed, db.refine};
                verdict = decide_bajraktarevic(
                    f, p, iv, budget,
                    db.serial ? ExecPolicy::serial : ExecPolicy::parallel);
                echo_str = CommandEcho("decide bajraktarevic")
                               .raw("generator", canonical_expr(fe))
                               .raw("weight", canonical_expr(we))
                               .raw("interval", canonical_interval(iv))
                               .integer("budget", db.budget)
                               .integer("refine", db.refine)
                               .unsigned_integer("seed", seed)
                               .flag_if("serial", db.serial)
                               .str();
            } else if (dsplit->parsed()) {
                out_file = ds.out;
                Interval iv = parse_interval(ds.interval);
                auto fe = parse_function_expr(ds.generator);
                GeneratorSpec f = generator_from_expr(fe, iv);
                std::uint64_t seed = resolve_seed(dsplit, ds.seed);
                seed_used = seed;
                SearchBudget budget{ds.budget, 2, seed, ds.refine};
                verdict = decide_corollary_generator(
                    f, ds.alpha, ds.beta, iv, budget,
                    ds.serial ? ExecPolicy::serial : ExecPolicy::parallel);
                echo_str = CommandEcho("decide scale-split")
                               .raw("generator", canonical_expr(fe))
                               .real("alpha", ds.alpha)
                               .real("beta", ds.beta)
                               .raw("interval", canonical_interval(iv))
                               .integer("budget", ds.budget)
                               .integer("refine", ds.refine)
                               .unsigned_integer("seed", seed)
                               .flag_if("serial", ds.serial)
                               .str();
            }

            Json j = base_report(echo_str);
            j.set("verdict", Json::text(to_string(verdict.status)));
            j.set("method", Json::text(verdict.method));
            if (case_label) j.set("case_label", Json::text(*case_label));
            if (beta_value) j.set("beta", Json::number(*beta_value));
            if (gamma_dd_min)
                j.set("gamma_second_derivative_min", Json::number(*gamma_dd_min));
            if (verdict.witness) j.set("witness", witness_json(*verdict.witness));
            j.set("samples_used", Json::integer(verdict.samples_used));
            j.set("seed", Json::uinteger(seed_used.value_or(0)));
            j.set("elapsed_ms", Json::number(elapsed_ms_since(t0)));
            emit(j, out_file, out);
            return 0;
        }

        // ----- falsify -------------------------------------------------------
        if (falsify->parsed()) {
            Interval iv = parse_interval(fa.interval);
            if (fa.nvars < 1 || fa.nvars > 4096)
                throw UsageError("--nvars must be in [1, 4096]");
            std::uint64_t seed = resolve_seed(falsify, fa.seed);
            CommandEcho echo("falsify");
            echo.raw("mean", fa.mean);
            MeanFn M;
            if (fa.mean == "holder") {
                require_flag(falsify, "--p", "falsify --mean holder");
                double p = fa.p;
                M = [p](std::span<const double> x) {
                    return holder_mean(p, x).value;
                };
                echo.real("p", p);
            } else if (fa.mean == "gini") {
                require_flag(falsify, "--q", "falsify --mean gini");
                require_flag(falsify, "--r", "falsify --mean gini");
                GiniParams qr{fa.q, fa.r};
                M = [qr](std::span<const double> x) {
                    return gini_mean(qr, x).value;
                };
                echo.real("q", qr.q).real("r", qr.r);
            } else if (fa.mean == "qa" || fa.mean == "quasiarithmetic") {
                require_flag(falsify, "--generator", "falsify --mean qa");
                auto fe = parse_function_expr(fa.generator);
                GeneratorSpec f = generator_from_expr(fe, iv);
                M = [f](std::span<const double> x) {
                    return quasiarithmetic_mean(f, x).value;
                };
                echo.raw("generator", canonical_expr(fe));
            } else if (fa.mean == "bajraktarevic") {
                require_flag(falsify, "--generator",
                             "falsify --mean bajraktarevic");
                auto fe = parse_function_expr(fa.generator);
                auto we = parse_function_expr(fa.weight);
                GeneratorSpec f = generator_from_expr(fe, iv);
                WeightSpec p = weight_from_expr(we, iv);
                M = [f, p](std::span<const double> x) {
                    return bajraktarevic_mean(f, p, x).value;
                };
                echo.raw("generator", canonical_expr(fe));
                echo.raw("weight", canonical_expr(we));
            } else if (fa.mean == "deviation" || fa.mean == "scale-split") {
                require_flag(falsify, "--generator", "falsify --mean deviation");
                auto fe = parse_function_expr(fa.generator);
                auto we = parse_function_expr(fa.weight);
                Quasideviation E = from_bajraktarevic(
                    generator_from_expr(fe, iv), weight_from_expr(we, iv));
                if (fa.alpha != 1.0 || fa.beta != 1.0)
                    E = scale_split(E, fa.alpha, fa.beta);
                M = [E](std::span<const double> x) {
                    return deviation_mean(E, x).value;
                };
                echo.raw("generator", canonical_expr(fe));
                echo.raw("weight", canonical_expr(we));
                echo.real("alpha", fa.alpha).real("beta", fa.beta);
            } else {
                throw UsageError("unknown --mean '" + fa.mean +
                                 "' (holder|gini|qa|bajraktarevic|deviation)");
            }
            echo.raw("interval", canonical_interval(iv))
                .integer("nvars", fa.nvars)
                .integer("budget", fa.budget)
                .integer("refine", fa.refine)
                .unsigned_integer("seed", seed)
                .flag_if("serial", fa.serial);

            auto t0 = std::chrono::steady_clock::now();
            SearchBudget budget{fa.budget, fa.nvars, seed, fa.refine};
            ConvexityVerdict v = jensen_falsify(
                M, iv, budget,
                fa.serial ? ExecPolicy::serial : ExecPolicy::parallel);

            Json j = base_report(echo.str());
            j.set("verdict", Json::text(to_string(v.status)));
            j.set("method", Json::text(v.method));
            if (v.witness) j.set("witness", witness_json(*v.witness));
            j.set("samples_used", Json::integer(v.samples_used));
            j.set("seed", Json::uinteger(seed));
            j.set("elapsed_ms", Json::number(elapsed_ms_since(t0)));
            emit(j, fa.out, out);
            return 0;
        }

        // ----- crossval ------------------------------------------------------
        if (crossval->parsed()) {
            if (cgini->parsed()) {
                auto qs = parse_grid(cg.qgrid);
                auto rs = parse_grid(cg.rgrid);
                Interval iv = parse_interval(cg.interval);
                auto arities = parse_arities(cg.nvars);
                std::uint64_t seed = resolve_seed(cgini, cg.seed);
                std::string echo_str =
                    CommandEcho("crossval gini")
                        .raw("q-grid", canonical_grid(cg.qgrid))
                        .raw("r-grid", canonical_grid(cg.rgrid))
                        .raw("interval", canonical_interval(iv))
                        .integer("budget", cg.budget)
                        .raw("nvars", canonical_arities(arities))
                        .real("dead-zone", cg.dead_zone)
                        .integer("refine", cg.refine)
                        .unsigned_integer("seed", seed)
                        .flag_if("serial", cg.serial)
                        .str();
                GiniCrossvalResult res = crossval_gini(
                    qs, rs, iv, cg.budget, arities, seed, cg.dead_zone,
                    cg.serial ? ExecPolicy::serial : ExecPolicy::parallel,
                    cg.refine);
                Json cells = Json::array();
                for (const auto& c : res.cells) {
                    Json jc = Json::object();
                    jc.set("q", Json::number(c.q));
                    jc.set("r", Json::number(c.r));
                    jc.set("skipped", Json::boolean(c.skipped));
                    jc.set("verdict",
                           Json::text(to_string(c.decision.verdict.status)));
                    jc.set("case_label", Json::text(c.decision.case_label));
                    if (c.decision.beta_value)
                        jc.set("beta", Json::number(*c.decision.beta_value));
                    Json ja = Json::array();
                    for (int n : c.arities) ja.push(Json::integer(n));
                    jc.set("arities", std::move(ja));
                    Json jw = Json::array();
                    for (const auto& fv : c.falsified)
                        jw.push(Json::boolean(fv.witness.has_value()));
                    jc.set("witness_found", std::move(jw));
                    jc.set("bmap_witness_found",
                           Json::boolean(c.bmap.witness.has_value()));
                    jc.set("agree", Json::boolean(c.agree));
                    cells.push(std::move(jc));
                }
                Json j = base_report(echo_str);
                j.set("family", Json::text("gini"));
                j.set("verdict", Json::text(res.disagreements == 0 ? "agree"
                                                                   : "disagree"));
                j.set("n_cells",
                      Json::integer(static_cast<long long>(res.cells.size())));
                j.set("disagreements", Json::integer(res.disagreements));
                j.set("samples_used", Json::integer(res.samples_used));
                j.set("seed", Json::uinteger(seed));
                j.set("cells", std::move(cells));
                emit(j, cg.out, out);
                return res.disagreements > 0 ? 1 : 0;
            }
            if (cholder->parsed()) {
                auto ps = parse_grid(ch.pgrid);
                Interval iv = parse_interval(ch.interval);
                auto arities = parse_arities(ch.nvars);
                std::uint64_t seed = resolve_seed(cholder, ch.seed);
                std::string echo_str =
                    CommandEcho("crossval holder")
                        .raw("p-grid", canonical_grid(ch.pgrid))
                        .raw("interval", canonical_interval(iv))
                        .integer("budget", ch.budget)
                        .raw("nvars", canonical_arities(arities))
                        .real("dead-zone", ch.dead_zone)
                        .integer("refine", ch.refine)
                        .unsigned_integer("seed", seed)
                        .flag_if("serial", ch.serial)
                        .str();
                HolderCrossvalResult res = crossval_holder(
                    ps, iv, ch.budget, arities, seed, ch.dead_zone,
                    ch.serial ? ExecPolicy::serial : ExecPolicy::parallel,
                    ch.refine);
                Json cells = Json::array();
                for (const auto& c : res.cells) {
                    Json jc = Json::object();
                    jc.set("p", Json::number(c.p));
                    jc.set("skipped", Json::boolean(c.skipped));
                    jc.set("verdict", Json::text(to_string(c.decision.status)));
                    Json ja = Json::array();
                    for (int n : c.arities) ja.push(Json::integer(n));
                    jc.set("arities", std::move(ja));
                    Json jw = Json::array();
                    for (const auto& fv : c.falsified)
                        jw.push(Json::boolean(fv.witness.has_value()));
                    jc.set("witness_found", std::move(jw));
                    jc.set("agree", Json::boolean(c.agree));
                    cells.push(std::move(jc));
                }
                Json j = base_report(echo_str);
                j.set("family", Json::text("holder"));
                j.set("verdict", Json::text(res.disagreements == 0 ? "agree"
                                                                   : "disagree"));
                j.set("n_cells",
                      Json::integer(static_cast<long long>(res.cells.size())));
                j.set("disagreements", Json::integer(res.disagreements));
                j.set("samples_used", Json::integer(res.samples_used));
                j.set("seed", Json::uinteger(seed));
                j.set("cells", std::move(cells));
                emit(j, ch.out, out);
                return res.disagreements > 0 ? 1 : 0;
            }
        }

        throw UsageError("no subcommand selected");
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    } catch (const SolveError& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    }
}

} // namespace meanslab::cli

// Acceptance checks: one line per criterion, exit code = number of failures.
//
// Each criterion exercises a documented end-to-end property of the library
// (decision rules vs sampling oracles, mean axioms, normalization laws,
// determinism).  Budgets and tolerances are pinned here on purpose: a
// regression that slows convergence or loosens agreement should show up as a
// red line, not drift silently.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "meanslab/characterization.hpp"
#include "meanslab/cli.hpp"
#include "meanslab/convexity_lab.hpp"
#include "meanslab/crossval.hpp"
#include "meanslab/means.hpp"
#include "meanslab/quasideviation.hpp"
#include "meanslab/rng.hpp"

using namespace meanslab;

namespace {

int g_failures = 0;

void report(int number, const std::string& name, bool ok, const std::string& detail) {
    std::printf("[%s] %2d. %s (%s)\n", ok ? "PASS" : "FAIL", number, name.c_str(),
                detail.c_str());
    if (!ok)
        ++g_failures;
}

double elapsed_s(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

std::vector<double> draw_points(SplitMix64& g, const Interval& box, size_t n) {
    std::vector<double> x(n);
    for (double& v : x)
        v = g.uniform(box.lo + 1e-3, box.hi - 1e-3);
    return x;
}

/// Random generator/weight pair from the fixed expression catalog, with both
/// domains pinned to `box` so every probe and mean evaluation stays inside.
struct CatalogPair {
    GeneratorSpec f;
    WeightSpec p;
};

CatalogPair draw_pair(SplitMix64& g, const Interval& box) {
    CatalogPair c{identity_generator(box), const_weight(1.0, box)};
    switch (g.next_u64() % 5) {
    case 0: c.f = identity_generator(box); break;
    case 1: {
        double p = 0.0;
        while (std::fabs(p) < 0.15)
            p = g.uniform(-2.0, 3.0);
        c.f = power_generator(p, box);
        break;
    }
    case 2: c.f = log_generator(box); break;
    case 3: c.f = exp_generator(g.uniform(0.3, 1.5) * (g.flip() ? 1.0 : -1.0), box); break;
    default:
        c.f = affine_generator(g.uniform(0.5, 2.0) * (g.flip() ? 1.0 : -1.0),
                               g.uniform(-1.0, 1.0), box);
    }
    switch (g.next_u64() % 4) {
    case 0: c.p = const_weight(g.uniform(0.5, 3.0), box); break;
    case 1: c.p = power_weight(g.uniform(-2.0, 2.0), box); break;
    case 2: c.p = exp_weight(g.uniform(-1.0, 1.0), box); break;
    default: c.p = affine_weight(g.uniform(0.1, 1.0), g.uniform(0.1, 2.0), box);
    }
    return c;
}

MeanFn holder_fn(double p) {
    return [p](std::span<const double> x) { return holder_mean(p, x).value; };
}

const double kQGrid[] = {-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0, 3.0};
const Interval kIntervals[] = {Interval(1.0, 1.5), Interval(1.0, 2.0),
                               Interval(1.0, 5.0), Interval(0.5, 4.0)};

/// Mirror of the crossval boundary dead zone: thin decision margins are not
/// falsifiable at a fixed budget, so both comparison criteria skip them.
bool in_dead_zone(double q, double r, const Interval& iv, double dz) {
    auto beta = beta_qr(q, r);
    if (!beta)
        return false;
    double lo = iv.lo, hi = iv.hi;
    return std::fabs(*beta - lo / hi) < dz * (lo / hi) ||
           std::fabs(*beta - hi / lo) < dz * (hi / lo);
}

// --- criteria -------------------------------------------------------------

void criterion_1() {
    auto t0 = std::chrono::steady_clock::now();
    const int arities[] = {2, 3};
    long disagreements = 0, cells = 0, skipped = 0;
    for (const Interval& iv : kIntervals) {
        GiniCrossvalResult r =
            crossval_gini(kQGrid, kQGrid, iv, 20000, arities, 424242, 0.03);
        disagreements += r.disagreements;
        for (const GiniCrossvalCell& c : r.cells) {
            ++cells;
            skipped += c.skipped ? 1 : 0;
        }
    }
    double dt = elapsed_s(t0);
    std::ostringstream d;
    d << cells << " cells, " << skipped << " in dead zone, " << disagreements
      << " disagreements, " << std::fixed << dt << " s";
    report(1, "gini decision grid agrees with sampling oracles under 120 s",
           disagreements == 0 && dt < 120.0, d.str());
}

void criterion_2() {
    auto beta = beta_qr(2.0, 3.0);
    bool exact = beta.has_value() && *beta == 3.0;
    bool below = decide_gini_subinterval(2.0, 3.0, 1.0, 2.9).verdict.status ==
                 ConvexityStatus::convex;
    bool above = decide_gini_subinterval(2.0, 3.0, 1.0, 3.1).verdict.status ==
                 ConvexityStatus::not_convex;
    // the failure only shows up at high arity, so hunt it on the
    // two-variable reduction map instead of fixed-arity midpoint draws
    ConvexityVerdict v = bivariate_convexity_test(
        gini_bmap(2.0, 3.0), Interval(1.0, 3.1), SearchBudget{95000, 2, 3, 3});
    bool witness = v.status == ConvexityStatus::not_convex &&
                   v.witness.has_value() && v.samples_used <= 100000;
    std::ostringstream d;
    d << "beta=3 exact: " << (exact ? "yes" : "no") << ", verdict flip at b=3: "
      << (below && above ? "yes" : "no") << ", reduction-map witness in "
      << v.samples_used << " samples";
    report(2, "gini threshold ratio at (2,3) sits exactly at 3",
           exact && below && above && witness, d.str());
}

void criterion_3() {
    const Interval box(0.5, 4.0);
    SplitMix64 g(mix_seed(2026, 3));
    double worst = 0.0;
    int checked = 0;
    for (int i = 0; i < 1000; ++i) {
        CatalogPair c = draw_pair(g, box);
        std::vector<double> x = draw_points(g, box, 2 + g.next_u64() % 4);
        double direct = bajraktarevic_mean(c.f, c.p, x).value;
        double via = deviation_mean(from_bajraktarevic(c.f, c.p), x).value;
        worst = std::max(worst, std::fabs(via - direct) / (1.0 + std::fabs(direct)));
        ++checked;
    }
    std::ostringstream d;
    d << checked << " random (f,p,x), worst relative gap " << worst;
    report(3, "weighted means match their deviation form", worst <= 1e-10, d.str());
}

void criterion_4() {
    const Interval iv(0.5, 5.0);
    const double ps[] = {-2.0, -1.0, -0.5, 0.0, 0.5, 0.99, 1.0, 1.01, 2.0, 3.0};
    bool ok = true;
    long max_samples = 0;
    std::ostringstream bad;
    for (double p : ps) {
        GeneratorSpec f = p == 0.0 ? log_generator() : power_generator(p);
        ConvexityStatus analytic = decide_holder(p).status;
        ConvexityStatus via_generator =
            decide_quasiarithmetic(f, iv, SearchBudget{20000, 1, 44, 3}).status;
        long budget = p == 0.99 ? 499000 : 20000;
        ConvexityVerdict v =
            jensen_falsify(holder_fn(p), iv, SearchBudget{budget, 2, 1404, 3});
        max_samples = std::max(max_samples, v.samples_used);
        bool want_witness = p < 1.0;
        if (analytic != via_generator || v.witness.has_value() != want_witness ||
            v.samples_used > 500000) {
            ok = false;
            bad << " p=" << p;
        }
    }
    std::ostringstream d;
    d << "10 exponents, witnesses exactly below 1, max " << max_samples
      << " samples";
    if (!bad.str().empty())
        d << ", failing:" << bad.str();
    report(4, "power-mean convexity flips at exponent 1", ok, d.str());
}

void criterion_5() {
    Quasideviation base = from_bajraktarevic(identity_generator(), const_weight(1.0));
    Quasideviation widen = scale_split(base, 1.0, 2.0);
    Quasideviation tilt = scale_split(base, 2.0, 1.0);
    const Interval iv(1.0, 4.0);
    auto mean_of = [](const Quasideviation& E) {
        return MeanFn(
            [&E](std::span<const double> x) { return deviation_mean(E, x).value; });
    };
    ConvexityVerdict survive =
        jensen_falsify(mean_of(widen), iv, SearchBudget{199000, 2, 5, 3});
    ConvexityVerdict refute =
        jensen_falsify(mean_of(tilt), iv, SearchBudget{199000, 2, 5, 3});
    bool ok = survive.status == ConvexityStatus::inconclusive &&
              !survive.witness.has_value() && survive.samples_used <= 200000 &&
              refute.status == ConvexityStatus::not_convex &&
              refute.witness.has_value() && refute.samples_used <= 200000;
    std::ostringstream d;
    d << "scales (1,2): " << to_string(survive.status) << ", scales (2,1): "
      << to_string(refute.status) << " in " << refute.samples_used << " samples";
    report(5, "piecewise scaling keeps or breaks convexity by scale order", ok,
           d.str());
}

void criterion_6() {
    const Interval box(1.0, 2.0);
    struct Config {
        std::string label;
        Quasideviation E;
    };
    std::vector<Config> configs;
    bool gates = true;

    // Gini pairs that the decision rule certifies as convex on (1,2); the
    // deviation form is p(x)(f(x) - f(u)) with f = x^{q-r}, p = x^r.
    const std::pair<double, double> gini_pairs[] = {
        {1.0, 0.0},   {2.0, 1.0}, {3.0, 1.0},   {2.0, 0.0}, {3.0, 0.0},
        {1.5, 1.0},   {1.0, 0.5}, {1.5, 0.5},   {2.0, 3.0}, {2.0, 2.0}};
    for (auto [q, r] : gini_pairs) {
        gates = gates && decide_gini_subinterval(q, r, box.lo, box.hi).verdict.status ==
                             ConvexityStatus::convex;
        GeneratorSpec f = q == r ? log_generator() : power_generator(q - r);
        configs.push_back({"gini", from_bajraktarevic(f, power_weight(r))});
    }
    // convex quasiarithmetic generators
    for (double p : {1.01, 2.0, 3.0, 4.0}) {
        gates = gates && decide_holder(p).status == ConvexityStatus::convex;
        configs.push_back(
            {"power", from_bajraktarevic(power_generator(p), const_weight(1.0))});
    }
    for (double c : {0.5, 1.0, 2.0}) {
        gates = gates &&
                decide_quasiarithmetic(exp_generator(c), box,
                                       SearchBudget{5000, 1, 6, 3})
                        .status == ConvexityStatus::convex;
        configs.push_back(
            {"exp", from_bajraktarevic(exp_generator(c), const_weight(1.0))});
    }
    // order-respecting piecewise scalings of the arithmetic deviation
    Quasideviation linear = from_bajraktarevic(identity_generator(), const_weight(1.0));
    linear.convex_mean_hint = decide_holder(1.0).status == ConvexityStatus::convex;
    for (auto [a, b] : {std::pair{1.0, 2.0}, {1.0, 3.0}, {0.5, 1.0}}) {
        gates = gates && decide_scale_split(linear, a, b).status ==
                             ConvexityStatus::convex;
        configs.push_back({"scaled", scale_split(linear, a, b)});
    }

    SplitMix64 g(mix_seed(2026, 6));
    double worst = 1.0; // most negative D - A margin seen
    for (const Config& c : configs)
        for (int i = 0; i < 500; ++i) {
            std::vector<double> x = draw_points(g, box, 2 + g.next_u64() % 4);
            double a = holder_mean(1.0, x).value;
            double dev = deviation_mean(c.E, x).value;
            worst = std::min(worst, dev - a);
        }
    std::ostringstream d;
    d << configs.size() << " configurations x 500 inputs, min(D - A) = " << worst;
    report(6, "convex deviation means dominate the arithmetic mean",
           gates && configs.size() == 20 && worst >= -1e-10, d.str());
}

void criterion_7() {
    const Interval box(0.5, 4.0);
    SplitMix64 g(mix_seed(2026, 7));
    double worst_fix = 0.0, worst_mean = 0.0;
    for (int i = 0; i < 40; ++i) {
        CatalogPair c = draw_pair(g, box);
        Quasideviation e = from_bajraktarevic(c.f, c.p);
        Quasideviation n = normalize(e);
        Quasideviation nn = normalize(n);
        for (int k = 0; k < 25; ++k) {
            double x = g.uniform(box.lo + 1e-3, box.hi - 1e-3);
            double u = g.uniform(box.lo + 1e-3, box.hi - 1e-3);
            double a = n.eval(x, u), b = nn.eval(x, u);
            worst_fix = std::max(worst_fix, std::fabs(b - a) / (1.0 + std::fabs(a)));
        }
        for (int k = 0; k < 5; ++k) {
            std::vector<double> x = draw_points(g, box, 2 + g.next_u64() % 4);
            double me = deviation_mean(e, x).value;
            double mn = deviation_mean(n, x).value;
            worst_mean =
                std::max(worst_mean, std::fabs(mn - me) / (1.0 + std::fabs(me)));
        }
    }
    std::ostringstream d;
    d << "40 catalog pairs: idempotence gap " << worst_fix << ", mean gap "
      << worst_mean;
    report(7, "normalization is idempotent and mean-preserving",
           worst_fix <= 1e-10 && worst_mean <= 1e-10, d.str());
}

void criterion_8() {
    const Interval box(0.5, 4.0);
    SplitMix64 g(mix_seed(2026, 8));
    long strict_bad = 0, fixed_bad = 0, checked = 0;

    auto check = [&](const std::function<double(std::span<const double>)>& M) {
        std::vector<double> x;
        double mn = 0.0, mx = 0.0;
        do {
            x = draw_points(g, box, 2 + g.next_u64() % 5);
            mn = *std::min_element(x.begin(), x.end());
            mx = *std::max_element(x.begin(), x.end());
        } while (mn == mx);
        double v = M(x);
        if (!(mn < v && v < mx))
            ++strict_bad;
        std::vector<double> c(x.size(), x[0]);
        if (M(c) != x[0])
            ++fixed_bad;
        ++checked;
    };

    for (int i = 0; i < 2000; ++i) {
        double p = g.uniform(-3.0, 3.0);
        check([&](std::span<const double> x) { return holder_mean(p, x).value; });
    }
    for (int i = 0; i < 2000; ++i) {
        GiniParams qr{g.uniform(-2.0, 3.0), g.uniform(-2.0, 3.0)};
        check([&](std::span<const double> x) { return gini_mean(qr, x).value; });
    }
    for (int i = 0; i < 2000; ++i) {
        CatalogPair c = draw_pair(g, box);
        check([&](std::span<const double> x) {
            return quasiarithmetic_mean(c.f, x).value;
        });
    }
    for (int i = 0; i < 2000; ++i) {
        CatalogPair c = draw_pair(g, box);
        check([&](std::span<const double> x) {
            return bajraktarevic_mean(c.f, c.p, x).value;
        });
    }
    for (int i = 0; i < 2000; ++i) {
        CatalogPair c = draw_pair(g, box);
        Quasideviation e = from_bajraktarevic(c.f, c.p);
        if (i % 4 == 0)
            e = scale_split(e, g.uniform(0.5, 2.0), g.uniform(0.5, 2.0));
        check([&](std::span<const double> x) { return deviation_mean(e, x).value; });
    }

    std::ostringstream d;
    d << checked << " draws across 5 families, " << strict_bad
      << " strictness misses, " << fixed_bad << " fixed-point misses";
    report(8, "means stay strictly inside the range and fix constants",
           strict_bad == 0 && fixed_bad == 0, d.str());
}

void criterion_9() {
    long cells = 0, split = 0;
    std::ostringstream bad;
    for (size_t ii = 0; ii < 4; ++ii) {
        const Interval& iv = kIntervals[ii];
        int index = 0;
        for (double q : kQGrid)
            for (double r : kQGrid) {
                ++index;
                if (in_dead_zone(q, r, iv, 0.03))
                    continue;
                GeneratorSpec f = q == r ? log_generator() : power_generator(q - r);
                WeightSpec p = power_weight(r);
                SearchBudget budget{30000, 2, mix_seed(9000 + ii, index), 3};
                ConvexityVerdict sub = subgradient_inequality_test(f, p, iv, budget);
                ConvexityVerdict grad = gradient_monotonicity_test(f, p, iv, budget);
                ++cells;
                if (sub.witness.has_value() != grad.witness.has_value()) {
                    ++split;
                    bad << " (" << q << "," << r << ")x(" << iv.lo << "," << iv.hi
                        << ")";
                }
            }
    }
    std::ostringstream d;
    d << cells << " cells, " << split << " where the two oracles split";
    if (!bad.str().empty())
        d << ", failing:" << bad.str();
    report(9, "subgradient and gradient oracles refute the same cells", split == 0,
           d.str());
}

void criterion_10() {
    std::vector<std::string> args{"crossval", "gini",       "--q-grid", "-1:2:1",
                                  "--r-grid", "1:3:1",      "--interval", "1:2",
                                  "--budget", "6000",       "--seed",     "77"};
    std::ostringstream out1, err1, out2, err2;
    int c1 = cli::run_cli(args, out1, err1);
    int c2 = cli::run_cli(args, out2, err2);
    bool ok = c1 == 0 && c2 == 0 && out1.str() == out2.str() && !out1.str().empty();
    std::ostringstream d;
    d << "exit " << c1 << "/" << c2 << ", " << out1.str().size()
      << " bytes, reruns " << (out1.str() == out2.str() ? "identical" : "differ");
    report(10, "repeated cross-validation reports are byte-identical", ok, d.str());
}

} // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    if (g_failures == 0)
        std::printf("acceptance: all 10 criteria pass\n");
    else
        std::printf("acceptance: %d criteria failing\n", g_failures);
    return g_failures;
}

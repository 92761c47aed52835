#include "meanslab/characterization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "meanslab/errors.hpp"

namespace meanslab {

namespace {

constexpr double kParamTie = 1e-12; ///< |q-r| below this takes the q==r branch

ConvexityVerdict verdict_of(ConvexityStatus status, std::string method) {
    ConvexityVerdict v;
    v.status = status;
    v.method = std::move(method);
    return v;
}

/// Second derivative of gamma_qr.  For q != r it equals
/// (q(q-1)t^{q-2} - r(r-1)t^{r-2})/(q-r); for q == r the limit form
/// t^{q-2}(q(q-1)log t + 2q - 1).
double gamma_qr_dd(double q, double r, double t) {
    if (std::fabs(q - r) < kParamTie) {
        return std::pow(t, q - 2.0) * (q * (q - 1.0) * std::log(t) + 2.0 * q - 1.0);
    }
    return (q * (q - 1.0) * std::pow(t, q - 2.0) -
            r * (r - 1.0) * std::pow(t, r - 2.0)) /
           (q - r);
}

} // namespace

double gamma_qr(double q, double r, double t) {
    if (!(t > 0.0))
        throw DomainError("gamma_qr: t must be positive");
    double lt = std::log(t);
    if (std::fabs(q - r) < kParamTie)
        return std::pow(t, q) * lt;
    double d = 0.5 * (q - r);
    double m = 0.5 * (q + r);
    // (t^q - t^r)/(q-r) = t^m * sinh(d log t)/d, exact for every d != 0 and
    // continuous into the t^q log t limit as d -> 0.
    return std::exp(m * lt) * (std::sinh(d * lt) / d);
}

std::optional<double> beta_qr(double q, double r) {
    if (std::fabs(q - r) < kParamTie) {
        if (q * (q - 1.0) == 0.0)
            return std::nullopt;
        return std::exp(1.0 / q + 1.0 / (q - 1.0));
    }
    if (q < r)
        std::swap(q, r); // symmetric; q > r keeps the exponent positive
    double prod = q * r * (q - 1.0) * (r - 1.0);
    if (!(prod > 0.0))
        return std::nullopt;
    return std::pow(q * (q - 1.0) / (r * (r - 1.0)), 1.0 / (q - r));
}

std::function<double(double, double)> gini_bmap(double q, double r) {
    return [q, r](double x, double u) { return u * gamma_qr(q, r, x / u); };
}

GiniDecision decide_gini_subinterval(double q, double r, double a, double b) {
    if (!(a > 0.0) || !(a < b) || !std::isfinite(a) || !std::isfinite(b))
        throw DomainError("decide_gini_subinterval: need 0 < a < b < inf");

    const double lo = std::min(q, r), hi = std::max(q, r);
    const double ratio_lo = a / b, ratio_hi = b / a;
    std::optional<double> beta = beta_qr(q, r);

    GiniDecision dec;
    dec.beta_value = beta;

    // Condition (1) first: it covers the parameter boundaries where the
    // threshold ratio is undefined.
    if (0.0 <= lo && lo <= 1.0 && 1.0 <= hi) {
        dec.case_label = "global-(1)";
        dec.verdict = verdict_of(ConvexityStatus::convex, "rule:gini-subinterval");
    } else if (hi < 1.0 && 1.0 <= q + r && beta && *beta <= ratio_lo) {
        dec.case_label = "case-(2)";
        dec.verdict = verdict_of(ConvexityStatus::convex, "rule:gini-subinterval");
    } else if (lo <= 0.0 && 1.0 <= q + r && beta && *beta >= ratio_hi) {
        dec.case_label = "case-(3)";
        dec.verdict = verdict_of(ConvexityStatus::convex, "rule:gini-subinterval");
    } else if (1.0 <= lo && beta && *beta >= ratio_hi) {
        dec.case_label = "case-(4)";
        dec.verdict = verdict_of(ConvexityStatus::convex, "rule:gini-subinterval");
    } else {
        dec.case_label = "not-convex";
        dec.verdict = verdict_of(ConvexityStatus::not_convex, "rule:gini-subinterval");
    }

    // Cross-check diagnostic: the rule is equivalent to gamma_qr'' >= 0 on
    // the closed ratio interval.
    constexpr int kGrid = 1024;
    double mn = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= kGrid; ++i) {
        double t = ratio_lo + (ratio_hi - ratio_lo) * static_cast<double>(i) /
                                  static_cast<double>(kGrid);
        mn = std::min(mn, gamma_qr_dd(q, r, t));
    }
    dec.gamma_second_derivative_min = mn;
    return dec;
}

ConvexityVerdict decide_gini_global(double q, double r) {
    double lo = std::min(q, r), hi = std::max(q, r);
    bool convex = 0.0 <= lo && lo <= 1.0 && 1.0 <= hi;
    return verdict_of(convex ? ConvexityStatus::convex : ConvexityStatus::not_convex,
                      "rule:gini-global");
}

ConvexityVerdict decide_gini_two_variable(double q, double r) {
    double lo = std::min(q, r);
    bool convex = 0.0 <= lo && lo <= 1.0 && 1.0 <= q + r;
    return verdict_of(convex ? ConvexityStatus::convex : ConvexityStatus::not_convex,
                      "rule:gini-two-variable");
}

ConvexityVerdict decide_holder(double p) {
    return verdict_of(p >= 1.0 ? ConvexityStatus::convex : ConvexityStatus::not_convex,
                      "rule:holder-threshold");
}

ConvexityVerdict decide_quasiarithmetic(const GeneratorSpec& f, const Interval& domain,
                                        const SearchBudget& budget, ExecPolicy exec) {
    if (!f.has_d1() || !f.has_d2())
        throw DomainError("decide_quasiarithmetic: generator needs f' and f''");
    if (!domain.is_finite())
        throw DomainError("decide_quasiarithmetic: needs a bounded interval");
    if (domain.lo < f.domain.lo || domain.hi > f.domain.hi)
        throw DomainError("decide_quasiarithmetic: domain exceeds generator domain");

    // Classify f'' on a grid: identically zero / nowhere zero / sign change.
    constexpr int kGrid = 512;
    double pad = 1e-9 * domain.width();
    double lo = domain.lo + pad, hi = domain.hi - pad;
    long below = 0, pos = 0, neg = 0;
    std::vector<double> ts(kGrid + 1);
    for (int i = 0; i <= kGrid; ++i) {
        double t = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(kGrid);
        ts[static_cast<size_t>(i)] = t;
        double f1 = f.d1(t);
        if (!(std::fabs(f1) > 1e-12 * (1.0 + std::fabs(f.eval(t)))))
            throw DomainError("decide_quasiarithmetic: f' vanishes on the domain");
        double f2 = f.d2(t);
        double tol = 1e-10 * (1.0 + std::fabs(f1));
        if (std::fabs(f2) < tol)
            ++below;
        else if (f2 > 0.0)
            ++pos;
        else
            ++neg;
    }

    if (below == kGrid + 1)
        return verdict_of(ConvexityStatus::convex, "rule:generator-affine");
    if (pos > 0 && neg > 0)
        return verdict_of(ConvexityStatus::not_convex, "rule:generator-inflection");
    if (below > 0) // mixed sub-tolerance values: the trichotomy is unresolved
        return verdict_of(ConvexityStatus::inconclusive, "rule:generator-dead-zone");

    // f'' nowhere zero with a single sign: the mean is convex iff the ratio
    // f'/f'' is positive and convex.
    auto ratio = [&f](double t) { return f.d1(t) / f.d2(t); };
    for (double t : ts)
        if (!(ratio(t) > 0.0))
            return verdict_of(ConvexityStatus::not_convex, "rule:generator-ratio-sign");

    ConvexityVerdict chord = line_convexity_test(ratio, domain, budget, exec);
    if (chord.status == ConvexityStatus::not_convex) {
        chord.method = "rule:generator-ratio+" + chord.method;
        return chord;
    }
    ConvexityVerdict v = verdict_of(ConvexityStatus::convex, "rule:generator-ratio");
    v.samples_used = chord.samples_used;
    v.seed = budget.seed;
    return v;
}

ConvexityVerdict decide_scale_split(const Quasideviation& base, double alpha,
                                    double beta) {
    if (!(alpha > 0.0) || !(beta > 0.0))
        throw DomainError("decide_scale_split: scales must be positive");
    const std::optional<bool>& hint = base.convex_mean_hint;

    if (alpha == beta) {
        // Uniform scaling leaves the mean untouched.
        if (hint.has_value())
            return verdict_of(*hint ? ConvexityStatus::convex
                                    : ConvexityStatus::not_convex,
                              "rule:uniform-scaling");
        return verdict_of(ConvexityStatus::inconclusive, "rule:uniform-scaling");
    }
    if (hint.has_value() && *hint && alpha <= beta)
        return verdict_of(ConvexityStatus::convex, "rule:scale-split");
    if (base.gateaux_on_diagonal &&
        ((hint.has_value() && !*hint) || alpha > beta))
        return verdict_of(ConvexityStatus::not_convex, "rule:scale-split");
    return verdict_of(ConvexityStatus::inconclusive, "rule:scale-split");
}

ConvexityVerdict decide_corollary_generator(const GeneratorSpec& f, double alpha,
                                            double beta, const Interval& domain,
                                            const SearchBudget& budget,
                                            ExecPolicy exec) {
    if (!(alpha > 0.0) || !(beta > 0.0))
        throw DomainError("decide_corollary_generator: scales must be positive");
    if (alpha > beta)
        return verdict_of(ConvexityStatus::not_convex, "rule:generator-scale-split");
    ConvexityVerdict qa = decide_quasiarithmetic(f, domain, budget, exec);
    qa.method = "rule:generator-scale-split+" + qa.method;
    return qa;
}

namespace {

/// Recognize (f, p) pairs that realize a Gini mean:
///   f = x^s, p = x^w  ->  (q, r) = (s + w, w)   (identity is s = 1)
///   f = log, p = x^w  ->  (q, r) = (w, w)
/// Constant weights count as w = 0.
std::optional<GiniParams> recognize_gini(const GeneratorSpec& f, const WeightSpec& p) {
    if (!f.form || !p.form)
        return std::nullopt;
    double w;
    switch (p.form->family) {
    case FunctionFamily::power:
        w = p.form->a;
        break;
    case FunctionFamily::constant:
        w = 0.0;
        break;
    default:
        return std::nullopt;
    }
    switch (f.form->family) {
    case FunctionFamily::identity:
        return GiniParams{1.0 + w, w};
    case FunctionFamily::power:
        return GiniParams{f.form->a + w, w};
    case FunctionFamily::log_fn:
        return GiniParams{w, w};
    default:
        return std::nullopt;
    }
}

} // namespace

ConvexityVerdict decide_bajraktarevic(const GeneratorSpec& f, const WeightSpec& p,
                                      const Interval& domain,
                                      const SearchBudget& budget, ExecPolicy exec) {
    if (!f.has_d1())
        throw DomainError("decide_bajraktarevic: generator needs f'");
    Interval common = f.domain.intersect(p.domain);
    if (domain.lo < common.lo || domain.hi > common.hi)
        throw DomainError("decide_bajraktarevic: domain exceeds the f/p domain");

    // Closed-form rules first.
    std::optional<ConvexityVerdict> rule;
    bool const_weight = p.form && p.form->family == FunctionFamily::constant;
    if (const_weight && f.has_d2() && domain.is_finite()) {
        ConvexityVerdict qa = decide_quasiarithmetic(f, domain, budget, exec);
        qa.method = "rule:qa-reduction+" + qa.method;
        rule = qa;
    } else if (auto qr = recognize_gini(f, p)) {
        if (domain.lo == 0.0 && !std::isfinite(domain.hi)) {
            rule = decide_gini_global(qr->q, qr->r);
        } else if (domain.is_finite() && domain.lo > 0.0) {
            GiniDecision dec = decide_gini_subinterval(qr->q, qr->r, domain.lo, domain.hi);
            rule = dec.verdict;
        }
    }

    // Independent numerical cross-examination of B by chord sampling.
    std::optional<ConvexityVerdict> sampled;
    if (domain.is_finite()) {
        double pad = 1e-9 * domain.width();
        for (int i = 0; i <= 64; ++i) {
            double t = domain.lo + pad + (domain.width() - 2 * pad) * i / 64.0;
            if (!(std::fabs(p.eval(t) * f.d1(t)) > 1e-12 * (1.0 + std::fabs(p.eval(t)))))
                throw DomainError("decide_bajraktarevic: p*f' vanishes on the domain");
        }
        auto fe = f.eval;
        auto fd = f.d1;
        auto pe = p.eval;
        auto B = [fe, fd, pe](double x, double u) {
            return pe(x) * (fe(x) - fe(u)) / (pe(u) * fd(u));
        };
        sampled = bivariate_convexity_test(B, domain, budget, exec);
    }

    bool witness_found =
        sampled && sampled->status == ConvexityStatus::not_convex;
    if (rule) {
        if (rule->status == ConvexityStatus::convex && witness_found) {
            // A verified witness outranks any rule; report the conflict.
            ConvexityVerdict v = *sampled;
            v.method += "(conflicts-with-closed-rule)";
            return v;
        }
        if (rule->status == ConvexityStatus::not_convex && witness_found)
            rule->witness = sampled->witness;
        if (sampled) {
            rule->samples_used += sampled->samples_used;
            rule->seed = budget.seed;
        }
        return *rule;
    }
    if (witness_found)
        return *sampled;
    ConvexityVerdict v =
        verdict_of(ConvexityStatus::inconclusive, "chord-sampling");
    if (sampled) {
        v.samples_used = sampled->samples_used;
        v.seed = sampled->seed;
    }
    return v;
}

} // namespace meanslab

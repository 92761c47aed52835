#pragma once

#include <optional>
#include <string>

#include "meanslab/convexity_lab.hpp"
#include "meanslab/function_spec.hpp"
#include "meanslab/quasideviation.hpp"

namespace meanslab {

/// Auxiliary function governing Gini convexity on a subinterval:
///   gamma_qr(q,r,t) = (t^q - t^r)/(q - r)   for q != r,
///                     t^q log t             for q == r
/// (|q-r| < 1e-12 selects the limit branch).  The q != r branch is evaluated
/// as t^{(q+r)/2} sinh(d log t)/d with d = (q-r)/2, which is exact and stays
/// stable arbitrarily close to the branch threshold.
double gamma_qr(double q, double r, double t);

/// Threshold ratio:
///   (q(q-1)/(r(r-1)))^{1/(q-r)}  when q != r and q r (q-1)(r-1) > 0,
///   exp(1/q + 1/(q-1))           when q == r and q(q-1) != 0,
///   absent otherwise (absence is a value, never NaN).
/// Symmetric in (q,r); computed with q >= r so the exponent is positive.
std::optional<double> beta_qr(double q, double r);

/// The two-variable reduction map of the Gini mean,
///   (x, u) -> u * gamma_qr(q, r, x/u),
/// whose convexity on (a,b)^2 is equivalent to Jensen convexity of the mean
/// at every arity.  Small-arity midpoint tests can miss a non-convex mean
/// (some parameter cells are convex as 2- and 3-variable functions yet fail
/// at higher arity); a chord violation of this map refutes them all at once.
std::function<double(double, double)> gini_bmap(double q, double r);

/// Outcome of the subinterval decision, with the diagnostics the convexity
/// rule is based on.
struct GiniDecision {
    ConvexityVerdict verdict;
    /// one of "global-(1)", "case-(2)", "case-(3)", "case-(4)", "not-convex"
    std::string case_label;
    std::optional<double> beta_value;
    /// min of gamma_qr'' over a 1025-point grid on [a/b, b/a]; negative
    /// exactly when the verdict is NotConvex (cross-check of the rule).
    std::optional<double> gamma_second_derivative_min;
};

/// Decide Jensen convexity of the two-parameter Gini mean on (a, b):
/// convex iff gamma_qr is convex on [a/b, b/a], which reduces to one of
/// four closed-form parameter conditions (checked in order, condition (1)
/// first since it needs no threshold ratio):
///   (1) 0 <= min(q,r) <= 1 <= max(q,r)
///   (2) max(q,r) < 1 <= q+r  and  beta_qr <= a/b
///   (3) min(q,r) <= 0, 1 <= q+r  and  beta_qr >= b/a
///   (4) 1 <= min(q,r)  and  beta_qr >= b/a
GiniDecision decide_gini_subinterval(double q, double r, double a, double b);

/// All-arity convexity on all of (0, inf): convex iff
/// 0 <= min(q,r) <= 1 <= max(q,r).
ConvexityVerdict decide_gini_global(double q, double r);

/// Two-variable mean on (0, inf)^2: convex iff 0 <= min(q,r) <= 1 <= q+r.
/// Strictly weaker than the all-arity condition — e.g. (0.5, 0.6) passes
/// here but fails the global test.
ConvexityVerdict decide_gini_two_variable(double q, double r);

/// Power mean: convex iff p >= 1.
ConvexityVerdict decide_holder(double p);

/// Quasiarithmetic mean via the generator-ratio criterion: convex iff
/// f'' == 0 on the interval, or f'' is nowhere zero and f'/f'' is positive
/// and convex.  The trichotomy of f'' is classified on a grid with a
/// numerical dead zone (Inconclusive when the grid cannot separate the
/// cases); convexity of f'/f'' is screened by chord sampling on the line.
ConvexityVerdict decide_quasiarithmetic(const GeneratorSpec& f, const Interval& domain,
                                        const SearchBudget& budget,
                                        ExecPolicy exec = ExecPolicy::parallel);

/// Piecewise-scaled deviation E_{alpha,beta}: generated mean convex iff the
/// base mean is convex and alpha <= beta, provided the base is smooth across
/// the diagonal.  Consumes base.convex_mean_hint (set by another decider)
/// and base.gateaux_on_diagonal; returns Inconclusive when the inputs don't
/// determine either direction.
ConvexityVerdict decide_scale_split(const Quasideviation& base, double alpha,
                                    double beta);

/// Scale-split of a generator-induced deviation E(x,u) = f(x) - f(u):
/// convex iff alpha <= beta and the quasiarithmetic decision for f is Convex.
ConvexityVerdict decide_corollary_generator(const GeneratorSpec& f, double alpha,
                                            double beta, const Interval& domain,
                                            const SearchBudget& budget = SearchBudget{},
                                            ExecPolicy exec = ExecPolicy::parallel);

/// Weighted two-parameter mean: applies a registered closed-form rule when
/// the (f, p) pair reduces to a Gini or quasiarithmetic family, and
/// cross-examines B(x,u) = p(x)(f(x)-f(u))/(p(u)f'(u)) by chord sampling.
/// Sampling alone never upgrades to Convex; a sampled witness is decisive
/// for NotConvex.
ConvexityVerdict decide_bajraktarevic(const GeneratorSpec& f, const WeightSpec& p,
                                      const Interval& domain,
                                      const SearchBudget& budget,
                                      ExecPolicy exec = ExecPolicy::parallel);

} // namespace meanslab

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "meanslab/function_spec.hpp"
#include "meanslab/means.hpp"

namespace meanslab {

/// Two-variable function E(x,u) on I x I subject to the three deviation-style
/// axioms (checked by sampling, never proved):
///   (a1) sign E(x,u) = sign(x-u),
///   (a2) u -> E(x,u) is continuous,
///   (a3) for x < y, u -> E(x,u)/E(y,u) is strictly decreasing on (x,y).
/// Analytic partials and diagonal one-sided derivatives are optional; numeric
/// fallbacks (one_sided_partial, central differences in normalize) fill in.
struct Quasideviation {
    std::function<double(double, double)> eval;
    Interval domain = Interval::reals();
    std::function<double(double, double)> d1;       ///< dE/dx, optional
    std::function<double(double, double)> d2;       ///< dE/du, optional
    std::function<double(double)> diag_d1_left;     ///< x->E(x,u) left derivative at x=u
    std::function<double(double)> diag_d1_right;    ///< x->E(x,u) right derivative at x=u
    bool gateaux_on_diagonal = false; ///< user-asserted diagonal smoothness
    std::string name;

    /// Piecewise scaling factors recorded by scale_split; consumed by the
    /// scale-split decision rule.
    std::optional<double> left_scale;
    std::optional<double> right_scale;
    /// Convexity of the generated mean when some decider has established it.
    std::optional<bool> convex_mean_hint;

    bool has_d1() const { return static_cast<bool>(d1); }
    bool has_d2() const { return static_cast<bool>(d2); }
    bool has_diag_one_sided() const {
        return static_cast<bool>(diag_d1_left) && static_cast<bool>(diag_d1_right);
    }

    double operator()(double x, double u) const { return eval(x, u); }
};

/// Extrapolated one-sided difference quotient with an error estimate.
struct DiffQuotient {
    double value;
    double error;
};

enum class Side { left, right };

/// Both one-sided derivatives of x -> E(x,u) at x = u.
struct OneSidedDerivatives {
    double left;
    double right;
    double at;
    double left_error;
    double right_error;

    /// True when the gap is attributable to a genuine kink rather than to
    /// stencil noise (gap > 10x the combined error estimates).
    bool distinct() const {
        double gap = right > left ? right - left : left - right;
        return gap > 10.0 * (left_error + right_error);
    }
};

/// Result of the sampling-based axiom screen.  A `true` flag means "no
/// violation found under the budget", not a proof.
struct AxiomReport {
    struct Witness {
        std::string axiom;         ///< "sign", "continuity", "ratio-monotone"
        std::vector<double> point; ///< the offending coordinates
        std::string detail;
    };

    bool d1_pass = true;
    bool d2_pass = true;
    bool d3_pass = true;
    std::vector<Witness> counterexamples;
    long samples_used = 0;
    std::uint64_t seed = 0;
    long d3_ties = 0; ///< adjacent ratio values equal within float noise

    bool all_pass() const { return d1_pass && d2_pass && d3_pass; }
};

/// Screen the three axioms on `budget` function evaluations, deterministically
/// in `seed`.  Report-only: never throws on a violation.
AxiomReport check_axioms(const Quasideviation& E, long budget, std::uint64_t seed);

/// The unique root u of E(x_1,u) + ... + E(x_n,u) = 0.  The sign axiom forces
/// the sum positive at min(x) and negative at max(x), and uniqueness of the
/// root makes the sign test monotone, so bisection is safe; it runs to width
/// 1e-13*(1+|u|) and is polished by at most 5 secant steps.
MeanValue deviation_mean(const Quasideviation& E, std::span<const double> x);

/// E(x,u) = p(x)(f(x) - f(u)), sign-flipped internally when f decreases so
/// the sign axiom holds.  Carries analytic dE/du = -p(x)f'(u) when f.d1 is
/// available, and diagonal derivative p(u)f'(u).
Quasideviation from_bajraktarevic(const GeneratorSpec& f, const WeightSpec& p);

/// Normalization E*(x,u) = -E(x,u)/d2E(u,u).  Requires d2E(u,u) (analytic or
/// central-difference) strictly negative at probe points; the generated mean
/// is unchanged and d2E*(u,u) = -1.
Quasideviation normalize(const Quasideviation& E);

/// E(x,u) divided by the one-sided diagonal derivative of its first argument.
/// Returns nullopt when that derivative fails to be strictly positive at some
/// probe point (the convexity precondition fails; this is a signal, not an
/// error).
std::optional<Quasideviation> normalized_plus(const Quasideviation& E, Side side);

/// Piecewise scaling: alpha*E(x,u) for x <= u, beta*E(x,u) for x > u.
/// The result is again a quasideviation; records left/right scales.
Quasideviation scale_split(const Quasideviation& E, double alpha, double beta);

/// One-sided derivative of x -> E(x,u) at x = u by forward/backward
/// differences over steps h, h/2, h/4 with Richardson extrapolation.
/// Throws SolveError when the quotient sequence diverges (non-differentiable).
DiffQuotient one_sided_partial(const Quasideviation& E, double u, Side side);

/// Convenience: both sides at once.
OneSidedDerivatives one_sided_pair(const Quasideviation& E, double u);

} // namespace meanslab

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "meanslab/function_spec.hpp"
#include "meanslab/interval.hpp"

namespace meanslab {

enum class ConvexityStatus { convex, not_convex, inconclusive };

const char* to_string(ConvexityStatus s);

/// A refuting configuration.  For midpoint tests, x and y are the two input
/// vectors and margin is the recomputed violation of the midpoint inequality.
/// For segment tests, x and y are the segment endpoints and t is the chord
/// parameter of the violating interior point.
struct ConvexityWitness {
    std::vector<double> x;
    std::vector<double> y;
    double margin;
    std::optional<double> t;
};

/// Verdict of a decision or falsification.  Sampling methods never return
/// `convex`: a clean sweep is only ever `inconclusive`, and `convex` is
/// reserved for analytic rules.  `not_convex` always carries a witness whose
/// recomputed violation exceeds the reporting tolerance.
struct ConvexityVerdict {
    ConvexityStatus status;
    std::optional<ConvexityWitness> witness;
    std::string method; ///< analytic rule id or sampling tag
    long samples_used = 0;
    std::uint64_t seed = 0;
};

struct SearchBudget {
    long max_samples = 100000;
    int n_vars = 2;
    std::uint64_t seed = 0;
    int refinement_rounds = 3;
};

/// Serial runs the sampling blocks on the calling thread; parallel spreads
/// them across OpenMP threads.  Both produce identical results: the budget is
/// partitioned into fixed-size blocks, block k draws from an engine seeded
/// with mix_seed(seed, k), and the merge is a deterministic reduction, so the
/// outcome depends only on (seed, budget), never on the thread count.
enum class ExecPolicy { serial, parallel };

using MeanFn = std::function<double(std::span<const double>)>;

/// Hunt for a violation of the midpoint inequality
///   M((x+y)/2) <= (M(x) + M(y))/2,   x, y in domain^n.
/// Draws are stratified (50% uniform, 25% near-diagonal, 25% near-boundary),
/// the best candidate gets rounds of per-coordinate golden-section polish,
/// and a violation counts only beyond the threshold 1e-9*(1+|M(x)|+|M(y)|).
ConvexityVerdict jensen_falsify(const MeanFn& M, const Interval& domain,
                                const SearchBudget& budget,
                                ExecPolicy exec = ExecPolicy::parallel);

/// Chord-above-graph falsifier for a bivariate map F on domain x domain:
/// samples segment endpoints P, Q and an interior parameter t, and tests
///   F((1-t)P + tQ) <= (1-t)F(P) + tF(Q).
ConvexityVerdict bivariate_convexity_test(
    const std::function<double(double, double)>& F, const Interval& domain,
    const SearchBudget& budget, ExecPolicy exec = ExecPolicy::parallel);

/// Same machinery restricted to a scalar function on a line segment.
ConvexityVerdict line_convexity_test(const std::function<double(double)>& phi,
                                     const Interval& domain,
                                     const SearchBudget& budget,
                                     ExecPolicy exec = ExecPolicy::parallel);

/// Four-point subgradient inequality for the weighted-difference map
/// B(x,u) = p(x)(f(x)-f(u)) / (p(u)f'(u)):
///   B(y,v) >= B(x,u) + d1B(x,u)(y-x) + d2B(x,u)(v-u)
/// on sampled quadruples; a violation refutes convexity of B.
/// Requires f', f'', p'; f' must not vanish on the domain.
ConvexityVerdict subgradient_inequality_test(const GeneratorSpec& f,
                                             const WeightSpec& p,
                                             const Interval& domain,
                                             const SearchBudget& budget,
                                             ExecPolicy exec = ExecPolicy::parallel);

/// Monotone-gradient form of the same criterion:
///   (d1B(x,u)-d1B(y,v))(x-y) + (d2B(x,u)-d2B(y,v))(u-v) >= 0
/// on sampled quadruples.
ConvexityVerdict gradient_monotonicity_test(const GeneratorSpec& f,
                                            const WeightSpec& p,
                                            const Interval& domain,
                                            const SearchBudget& budget,
                                            ExecPolicy exec = ExecPolicy::parallel);

} // namespace meanslab

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "meanslab/characterization.hpp"
#include "meanslab/convexity_lab.hpp"

namespace meanslab {

/// One grid cell of a decision-vs-falsifier comparison.  `agree` means the
/// analytic verdict and the sampling oracles are consistent: a NotConvex
/// decision must be confirmed by a witness from at least one oracle, and a
/// Convex decision must survive every oracle without a witness.  The oracles
/// are the midpoint falsifier at each tested arity plus a chord test of the
/// two-variable reduction map (see gini_bmap) — the latter is decisive for
/// parameter cells whose non-convexity only appears at high arity, where
/// fixed-arity midpoint sampling provably finds nothing.
/// Cells inside the boundary dead zone are `skipped` and count as agreeing.
struct GiniCrossvalCell {
    double q;
    double r;
    GiniDecision decision;
    bool skipped = false;
    std::vector<int> arities;                ///< tested n values
    std::vector<ConvexityVerdict> falsified; ///< one verdict per arity
    ConvexityVerdict bmap;                   ///< chord test of the reduction map
    bool agree = true;
};

struct GiniCrossvalResult {
    std::vector<GiniCrossvalCell> cells; ///< row-major over (q, r), sorted
    long disagreements = 0;
    long samples_used = 0;
};

/// Compare decide_gini_subinterval against jensen_falsify over a parameter
/// grid on a fixed interval.  Cells whose threshold ratio beta_qr lies within
/// `dead_zone` (relative) of a/b or b/a are skipped: there the decision
/// margin is too thin for a fixed sampling budget to be meaningful.
/// Deterministic in `seed`; each (cell, arity) falsification draws from its
/// own derived seed.
GiniCrossvalResult crossval_gini(std::span<const double> qs,
                                 std::span<const double> rs,
                                 const Interval& interval, long budget_per_cell,
                                 std::span<const int> arities, std::uint64_t seed,
                                 double dead_zone = 0.03,
                                 ExecPolicy exec = ExecPolicy::parallel,
                                 int refinement_rounds = 3);

struct HolderCrossvalCell {
    double p;
    ConvexityVerdict decision;
    bool skipped = false;
    std::vector<int> arities;
    std::vector<ConvexityVerdict> falsified;
    bool agree = true;
};

struct HolderCrossvalResult {
    std::vector<HolderCrossvalCell> cells;
    long disagreements = 0;
    long samples_used = 0;
};

/// Compare decide_holder against jensen_falsify over an exponent grid.
/// The dead zone skips NotConvex cells with 0 < 1-p < dead_zone, where the
/// violation shrinks towards the p = 1 boundary.
HolderCrossvalResult crossval_holder(std::span<const double> ps,
                                     const Interval& interval,
                                     long budget_per_cell,
                                     std::span<const int> arities,
                                     std::uint64_t seed, double dead_zone = 0.03,
                                     ExecPolicy exec = ExecPolicy::parallel,
                                     int refinement_rounds = 3);

} // namespace meanslab

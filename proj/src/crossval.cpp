#include "meanslab/crossval.hpp"

#include <cmath>

#include "meanslab/errors.hpp"
#include "meanslab/means.hpp"
#include "meanslab/rng.hpp"

namespace meanslab {

namespace {

/// Witness from any oracle refutes; agreement demands the refutation pattern
/// matches the analytic verdict.
template <typename Cell>
void judge(Cell& cell, ConvexityStatus decided, bool extra_witness = false) {
    bool witness = extra_witness;
    for (const auto& v : cell.falsified)
        if (v.status == ConvexityStatus::not_convex)
            witness = true;
    cell.agree = decided == ConvexityStatus::convex ? !witness : witness;
}

} // namespace

GiniCrossvalResult crossval_gini(std::span<const double> qs,
                                 std::span<const double> rs,
                                 const Interval& interval, long budget_per_cell,
                                 std::span<const int> arities, std::uint64_t seed,
                                 double dead_zone, ExecPolicy exec,
                                 int refinement_rounds) {
    if (!interval.is_finite() || !(interval.lo > 0.0))
        throw DomainError("crossval_gini: interval must satisfy 0 < a < b < inf");
    const double a = interval.lo, b = interval.hi;

    GiniCrossvalResult out;
    std::uint64_t cell_index = 0;
    for (double q : qs) {
        for (double r : rs) {
            GiniCrossvalCell cell;
            cell.q = q;
            cell.r = r;
            cell.decision = decide_gini_subinterval(q, r, a, b);
            if (cell.decision.beta_value) {
                double beta = *cell.decision.beta_value;
                cell.skipped = std::fabs(beta - a / b) < dead_zone * (a / b) ||
                               std::fabs(beta - b / a) < dead_zone * (b / a);
            }
            if (!cell.skipped) {
                GiniParams qr{q, r};
                MeanFn mean = [qr](std::span<const double> x) {
                    return gini_mean(qr, x).value;
                };
                std::uint64_t cell_seed = mix_seed(seed, cell_index);
                std::uint64_t k = 0;
                for (int n : arities) {
                    SearchBudget budget{budget_per_cell, n, mix_seed(cell_seed, k++),
                                        refinement_rounds};
                    cell.arities.push_back(n);
                    cell.falsified.push_back(jensen_falsify(mean, interval, budget, exec));
                    out.samples_used += cell.falsified.back().samples_used;
                }
                // Arity-free oracle: a chord violation of the reduction map
                // refutes convexity at every arity simultaneously.
                SearchBudget bmap_budget{budget_per_cell, 2, mix_seed(cell_seed, k),
                                         refinement_rounds};
                cell.bmap = bivariate_convexity_test(gini_bmap(q, r), interval,
                                                     bmap_budget, exec);
                out.samples_used += cell.bmap.samples_used;
                judge(cell, cell.decision.verdict.status,
                      cell.bmap.status == ConvexityStatus::not_convex);
            }
            if (!cell.agree)
                ++out.disagreements;
            out.cells.push_back(std::move(cell));
            ++cell_index;
        }
    }
    return out;
}

HolderCrossvalResult crossval_holder(std::span<const double> ps,
                                     const Interval& interval,
                                     long budget_per_cell,
                                     std::span<const int> arities,
                                     std::uint64_t seed, double dead_zone,
                                     ExecPolicy exec, int refinement_rounds) {
    if (!interval.is_finite() || !(interval.lo > 0.0))
        throw DomainError("crossval_holder: interval must satisfy 0 < a < b < inf");

    HolderCrossvalResult out;
    std::uint64_t cell_index = 0;
    for (double p : ps) {
        HolderCrossvalCell cell;
        cell.p = p;
        cell.decision = decide_holder(p);
        cell.skipped = p < 1.0 && 1.0 - p < dead_zone;
        if (!cell.skipped) {
            MeanFn mean = [p](std::span<const double> x) {
                return holder_mean(p, x).value;
            };
            std::uint64_t cell_seed = mix_seed(seed, cell_index);
            std::uint64_t k = 0;
            for (int n : arities) {
                SearchBudget budget{budget_per_cell, n, mix_seed(cell_seed, k++),
                                    refinement_rounds};
                cell.arities.push_back(n);
                cell.falsified.push_back(jensen_falsify(mean, interval, budget, exec));
                out.samples_used += cell.falsified.back().samples_used;
            }
            judge(cell, cell.decision.status);
        }
        if (!cell.agree)
            ++out.disagreements;
        out.cells.push_back(std::move(cell));
        ++cell_index;
    }
    return out;
}

} // namespace meanslab

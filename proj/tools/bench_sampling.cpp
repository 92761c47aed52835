// Benchmark: the block-parallel falsifier kernels against the serial
// reference path.  Both are required to produce bit-identical outcomes (the
// budget is split into fixed blocks with per-block seeds, so thread count
// must not matter); this tool times them side by side and fails loudly if
// the outcomes ever diverge.
//
// Usage: bench_sampling [budget]   (default 400000 samples per case)

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "meanslab/convexity_lab.hpp"
#include "meanslab/function_spec.hpp"
#include "meanslab/means.hpp"

namespace {

using meanslab::ConvexityVerdict;
using meanslab::ExecPolicy;
using meanslab::GiniParams;
using meanslab::Interval;
using meanslab::SearchBudget;

double now_ms() {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

bool same_outcome(const ConvexityVerdict& a, const ConvexityVerdict& b) {
    if (a.status != b.status || a.samples_used != b.samples_used) return false;
    if (a.witness.has_value() != b.witness.has_value()) return false;
    if (a.witness) {
        if (a.witness->x != b.witness->x || a.witness->y != b.witness->y)
            return false;
        if (a.witness->margin != b.witness->margin) return false;
        if (a.witness->t != b.witness->t) return false;
    }
    return true;
}

struct BenchCase {
    std::string name;
    std::function<ConvexityVerdict(ExecPolicy)> run;
};

} // namespace

int main(int argc, char** argv) {
    long budget = 400000;
    if (argc > 1) budget = std::strtol(argv[1], nullptr, 10);
    if (budget < 1) budget = 1;

#ifdef _OPENMP
    std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
    std::printf("OpenMP: not enabled (serial build)\n");
#endif
    std::printf("budget per case: %ld\n\n", budget);
    std::printf("%-42s %12s %12s %9s %6s\n", "case", "serial ms", "parallel ms",
                "speedup", "match");

    Interval box(1.0, 4.0);
    auto gini_falsify = [&](GiniParams qr, int nvars,
                            std::uint64_t seed) -> BenchCase {
        char label[64];
        std::snprintf(label, sizeof label, "gini(%g,%g) midpoint n=%d", qr.q,
                      qr.r, nvars);
        std::string name = label;
        return {name, [=](ExecPolicy exec) {
                    auto M = [qr](std::span<const double> x) {
                        return meanslab::gini_mean(qr, x).value;
                    };
                    return meanslab::jensen_falsify(
                        M, box, SearchBudget{budget, nvars, seed, 3}, exec);
                }};
    };

    Interval half(0.5, 4.0);
    auto f = meanslab::log_generator(half);
    auto p = meanslab::power_weight(1.0, half);

    std::vector<BenchCase> cases;
    cases.push_back(gini_falsify({3.0, -1.0}, 2, 42));
    cases.push_back(gini_falsify({3.0, -1.0}, 3, 42));
    cases.push_back(gini_falsify({2.0, 0.5}, 2, 7));
    cases.push_back({"holder(0.5) midpoint n=2", [&](ExecPolicy exec) {
                         auto M = [](std::span<const double> x) {
                             return meanslab::holder_mean(0.5, x).value;
                         };
                         return meanslab::jensen_falsify(
                             M, box, SearchBudget{budget, 2, 11, 3}, exec);
                     }});
    cases.push_back({"subgradient log/x on (0.5,4)", [&](ExecPolicy exec) {
                         return meanslab::subgradient_inequality_test(
                             f, p, half, SearchBudget{budget, 2, 5, 3}, exec);
                     }});
    cases.push_back({"gradient-monotonicity log/x on (0.5,4)",
                     [&](ExecPolicy exec) {
                         return meanslab::gradient_monotonicity_test(
                             f, p, half, SearchBudget{budget, 2, 5, 3}, exec);
                     }});

    int mismatches = 0;
    for (const auto& c : cases) {
        double t0 = now_ms();
        ConvexityVerdict serial = c.run(ExecPolicy::serial);
        double t1 = now_ms();
        ConvexityVerdict parallel = c.run(ExecPolicy::parallel);
        double t2 = now_ms();
        bool ok = same_outcome(serial, parallel);
        if (!ok) ++mismatches;
        double ms_serial = t1 - t0;
        double ms_parallel = t2 - t1;
        double speedup = ms_parallel > 0 ? ms_serial / ms_parallel : 0.0;
        std::printf("%-42s %12.1f %12.1f %8.2fx %6s\n", c.name.c_str(),
                    ms_serial, ms_parallel, speedup, ok ? "yes" : "NO");
    }

    if (mismatches > 0) {
        std::printf("\n%d case(s) diverged between serial and parallel runs\n",
                    mismatches);
        return 1;
    }
    std::printf("\nall outcomes identical across execution policies\n");
    return 0;
}

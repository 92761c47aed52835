#include "meanslab/quasideviation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "meanslab/errors.hpp"
#include "meanslab/rng.hpp"

namespace meanslab {

namespace {

/// Finite box used for probe grids and axiom sampling when the domain has an
/// infinite endpoint.  Heuristic by necessity: sampled preconditions can only
/// ever inspect a finite window.
Interval finite_window(const Interval& d) {
    if (d.is_finite())
        return d;
    double lo = d.lo, hi = d.hi;
    if (std::isfinite(lo) && !std::isfinite(hi))
        return {lo, lo + 100.0 * (1.0 + std::fabs(lo))};
    if (!std::isfinite(lo) && std::isfinite(hi))
        return {hi - 100.0 * (1.0 + std::fabs(hi)), hi};
    return {-100.0, 100.0};
}

/// Interior grid of n points, endpoints excluded by a small pad.
std::vector<double> probe_grid(const Interval& d, int n) {
    Interval w = finite_window(d);
    double pad = 1e-4 * w.width();
    double lo = w.lo + pad, hi = w.hi - pad;
    std::vector<double> out(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        out[static_cast<size_t>(i)] =
            lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return out;
}

/// Shrink h until [u-h, u+h] (or the one-sided variant) fits in the domain.
double fit_step(const Interval& d, double u, double h, bool left, bool right) {
    for (int k = 0; k < 60; ++k) {
        bool ok = (!left || d.contains(u - h)) && (!right || d.contains(u + h));
        if (ok)
            return h;
        h *= 0.5;
    }
    throw DomainError("difference stencil does not fit inside the domain");
}

/// d2E(u,u) by analytic partial when available, else central differences with
/// one Richardson level (O(h^2) -> O(h^4)).
double diag_d2(const Quasideviation& E, double u) {
    if (E.has_d2())
        return E.d2(u, u);
    double h = fit_step(E.domain, u, 1e-4 * (1.0 + std::fabs(u)), true, true);
    auto central = [&](double s) {
        return (E.eval(u, u + s) - E.eval(u, u - s)) / (2.0 * s);
    };
    double a0 = central(h), a1 = central(0.5 * h);
    return (4.0 * a1 - a0) / 3.0;
}

std::shared_ptr<const Quasideviation> share(const Quasideviation& E) {
    return std::make_shared<const Quasideviation>(E);
}

} // namespace

DiffQuotient one_sided_partial(const Quasideviation& E, double u, Side side) {
    if (!E.domain.contains(u))
        throw DomainError("one_sided_partial: point outside domain");
    if (side == Side::left && E.diag_d1_left)
        return DiffQuotient{E.diag_d1_left(u), 0.0};
    if (side == Side::right && E.diag_d1_right)
        return DiffQuotient{E.diag_d1_right(u), 0.0};

    bool right = side == Side::right;
    double h = fit_step(E.domain, u, 1e-4 * (1.0 + std::fabs(u)), !right, right);
    double e0 = E.eval(u, u); // 0 for a true quasideviation, kept for generality
    auto quot = [&](double s) {
        return right ? (E.eval(u + s, u) - e0) / s : (e0 - E.eval(u - s, u)) / s;
    };
    double a0 = quot(h), a1 = quot(0.5 * h), a2 = quot(0.25 * h);

    double r1 = std::fabs(a1 - a0), r2 = std::fabs(a2 - a1);
    if (r2 > 1.5 * r1 + 1e-7 * (1.0 + std::fabs(a2)))
        throw SolveError("one_sided_partial: difference quotients diverge "
                         "(function appears non-differentiable at the diagonal)");

    // One-sided differences have O(h) error: two extrapolation levels.
    double b1 = 2.0 * a1 - a0;
    double b2 = 2.0 * a2 - a1;
    double value = (4.0 * b2 - b1) / 3.0;
    double error = std::fabs(value - b2) + 1e-12 * (1.0 + std::fabs(value));
    return DiffQuotient{value, error};
}

OneSidedDerivatives one_sided_pair(const Quasideviation& E, double u) {
    DiffQuotient l = one_sided_partial(E, u, Side::left);
    DiffQuotient r = one_sided_partial(E, u, Side::right);
    return OneSidedDerivatives{l.value, r.value, u, l.error, r.error};
}

MeanValue deviation_mean(const Quasideviation& E, std::span<const double> x) {
    if (x.empty())
        throw DomainError("deviation_mean: input vector is empty");
    for (double v : x)
        if (!E.domain.contains(v))
            throw DomainError("deviation_mean: input outside domain");

    auto [mn_it, mx_it] = std::minmax_element(x.begin(), x.end());
    double mn = *mn_it, mx = *mx_it;
    if (mn == mx)
        return MeanValue{mn, MeanFamily::deviation,
                         std::vector<double>(x.begin(), x.end())};

    auto sum = [&](double u) {
        double s = 0.0;
        for (double v : x)
            s += E.eval(v, u);
        return s;
    };

    double lo = mn, hi = mx;
    double slo = sum(lo), shi = sum(hi);
    // The sign axiom forces sum > 0 at min(x) and < 0 at max(x) for
    // non-constant input; anything else is not a quasideviation.
    if (!(slo > 0.0) || !(shi < 0.0))
        throw SolveError("deviation_mean: sum of deviations fails to change sign "
                         "across [min x, max x] (axiom violation)");

    constexpr int kMaxIter = 200;
    bool converged = false;
    for (int it = 0; it < kMaxIter; ++it) {
        double mid = 0.5 * (lo + hi);
        if (hi - lo <= 1e-13 * (1.0 + std::fabs(mid))) {
            converged = true;
            break;
        }
        double sm = sum(mid);
        if (sm == 0.0) {
            lo = hi = mid;
            slo = shi = 0.0;
            converged = true;
            break;
        }
        if (sm > 0.0) {
            lo = mid;
            slo = sm;
        } else {
            hi = mid;
            shi = sm;
        }
    }
    if (!converged)
        throw SolveError("deviation_mean: bisection did not converge within 200 steps");

    // Secant polish inside the final bracket; bisection already guarantees
    // the answer, this only sharpens the last digits.
    double a = lo, b = hi, fa = slo, fb = shi;
    for (int k = 0; k < 5 && a < b && fa > 0.0 && fb < 0.0; ++k) {
        double denom = fb - fa;
        if (denom == 0.0)
            break;
        double c = b - fb * (b - a) / denom;
        if (!(c > a && c < b))
            break;
        double fc = sum(c);
        if (fc == 0.0) {
            a = b = c;
            fa = fb = 0.0;
            break;
        }
        if (fc > 0.0) {
            a = c;
            fa = fc;
        } else {
            b = c;
            fb = fc;
        }
    }
    double u = std::fabs(fa) <= std::fabs(fb) ? a : b;
    u = std::clamp(u, mn, mx);
    return MeanValue{u, MeanFamily::deviation,
                     std::vector<double>(x.begin(), x.end())};
}

Quasideviation from_bajraktarevic(const GeneratorSpec& f, const WeightSpec& p) {
    double s = f.monotonicity == Monotonicity::increasing ? 1.0 : -1.0;
    auto fe = f.eval;
    auto pe = p.eval;

    Quasideviation E;
    E.domain = f.domain.intersect(p.domain);
    E.eval = [s, fe, pe](double x, double u) {
        return s * pe(x) * (fe(x) - fe(u));
    };
    if (f.has_d1()) {
        auto fd = f.d1;
        E.d2 = [s, pe, fd](double x, double u) { return -s * pe(x) * fd(u); };
        // On the diagonal the p'(x)(f(x)-f(u)) term vanishes, so the first
        // partial is p(u)f'(u) regardless of whether p is differentiable.
        auto diag = [s, pe, fd](double u) { return s * pe(u) * fd(u); };
        E.diag_d1_left = diag;
        E.diag_d1_right = diag;
        E.gateaux_on_diagonal = true;
        if (p.has_d1()) {
            auto pd = p.d1;
            E.d1 = [s, fe, pe, fd, pd](double x, double u) {
                return s * (pd(x) * (fe(x) - fe(u)) + pe(x) * fd(x));
            };
        }
    }
    E.name = "weighted-difference(" + f.name + "," + p.name + ")";
    return E;
}

Quasideviation normalize(const Quasideviation& E) {
    auto base = share(E);
    // The divisor must exist and be strictly negative along the diagonal;
    // certify at probe points before committing.
    for (double u : probe_grid(E.domain, 33)) {
        double d = diag_d2(*base, u);
        if (!(d < 0.0) || !std::isfinite(d))
            throw DomainError("normalize: d2E(u,u) is not strictly negative at u=" +
                              std::to_string(u) + " (not normalizable)");
    }

    Quasideviation N;
    N.domain = E.domain;
    N.eval = [base](double x, double u) {
        return -base->eval(x, u) / diag_d2(*base, u);
    };
    if (E.has_d1()) {
        auto bd1 = E.d1;
        N.d1 = [base, bd1](double x, double u) {
            return -bd1(x, u) / diag_d2(*base, u);
        };
    }
    if (E.has_diag_one_sided()) {
        auto dl = E.diag_d1_left, dr = E.diag_d1_right;
        N.diag_d1_left = [base, dl](double u) { return -dl(u) / diag_d2(*base, u); };
        N.diag_d1_right = [base, dr](double u) { return -dr(u) / diag_d2(*base, u); };
    }
    N.gateaux_on_diagonal = E.gateaux_on_diagonal;
    N.left_scale = E.left_scale;
    N.right_scale = E.right_scale;
    N.convex_mean_hint = E.convex_mean_hint;
    N.name = "normalize(" + E.name + ")";
    return N;
}

std::optional<Quasideviation> normalized_plus(const Quasideviation& E, Side side) {
    auto base = share(E);
    auto divisor = [base, side](double u) {
        return one_sided_partial(*base, u, side).value;
    };
    for (double u : probe_grid(E.domain, 33)) {
        double d;
        try {
            d = divisor(u);
        } catch (const SolveError&) {
            return std::nullopt;
        }
        if (!(d > 0.0) || !std::isfinite(d))
            return std::nullopt; // convexity precondition fails: signal it
    }

    Quasideviation N;
    N.domain = E.domain;
    N.eval = [base, divisor](double x, double u) {
        return base->eval(x, u) / divisor(u);
    };
    N.gateaux_on_diagonal = E.gateaux_on_diagonal;
    N.name = std::string(side == Side::right ? "right" : "left") +
             "-normalized(" + E.name + ")";
    return N;
}

Quasideviation scale_split(const Quasideviation& E, double alpha, double beta) {
    if (!(alpha > 0.0) || !(beta > 0.0))
        throw DomainError("scale_split: scales must be positive");
    auto base = share(E);

    Quasideviation S;
    S.domain = E.domain;
    S.eval = [base, alpha, beta](double x, double u) {
        return (x <= u ? alpha : beta) * base->eval(x, u);
    };
    if (E.has_d1()) {
        // Off the diagonal each branch scales smoothly; the diagonal keeps
        // only one-sided derivatives when alpha != beta.
        auto bd1 = E.d1;
        if (alpha == beta)
            S.d1 = [base, alpha, bd1](double x, double u) {
                return alpha * bd1(x, u);
            };
    }
    if (E.has_d2() && alpha == beta) {
        auto bd2 = E.d2;
        S.d2 = [alpha, bd2](double x, double u) { return alpha * bd2(x, u); };
    }
    {
        // x -> E_{a,b}(x,u) approaches the diagonal through x < u on the left
        // and x > u on the right.
        auto mk = [base](double scale, Side side) {
            return std::function<double(double)>([base, scale, side](double u) {
                return scale * one_sided_partial(*base, u, side).value;
            });
        };
        if (E.has_diag_one_sided()) {
            auto dl = E.diag_d1_left, dr = E.diag_d1_right;
            S.diag_d1_left = [alpha, dl](double u) { return alpha * dl(u); };
            S.diag_d1_right = [beta, dr](double u) { return beta * dr(u); };
        } else {
            S.diag_d1_left = mk(alpha, Side::left);
            S.diag_d1_right = mk(beta, Side::right);
        }
    }
    S.gateaux_on_diagonal = (alpha == beta) && E.gateaux_on_diagonal;
    S.left_scale = alpha * E.left_scale.value_or(1.0);
    S.right_scale = beta * E.right_scale.value_or(1.0);
    S.name = "scale-split(" + E.name + "," + std::to_string(alpha) + "," +
             std::to_string(beta) + ")";
    return S;
}

AxiomReport check_axioms(const Quasideviation& E, long budget, std::uint64_t seed) {
    if (budget < 1)
        throw DomainError("check_axioms: budget must be >= 1");
    AxiomReport rep;
    rep.seed = seed;
    SplitMix64 g(seed);
    Interval box = finite_window(E.domain);
    double pad = 1e-6 * box.width();
    double lo = box.lo + pad, hi = box.hi - pad;
    auto draw = [&] { return g.uniform(lo, hi); };
    constexpr size_t kMaxWitnesses = 8;

    auto add_witness = [&](const char* axiom, std::vector<double> pt,
                           std::string detail) {
        if (rep.counterexamples.size() < kMaxWitnesses)
            rep.counterexamples.push_back(
                AxiomReport::Witness{axiom, std::move(pt), std::move(detail)});
    };

    // --- sign axiom: sign E(x,u) == sign(x-u), diagonal included -----------
    long n_sign = std::max<long>(1, budget * 2 / 5);
    for (long i = 0; i < n_sign; ++i) {
        double x = draw();
        double u = (i % 8 == 0) ? x : draw();
        double v = E.eval(x, u);
        ++rep.samples_used;
        bool ok = (x > u && v > 0.0) || (x < u && v < 0.0) || (x == u && v == 0.0);
        if (!ok) {
            rep.d1_pass = false;
            add_witness("sign", {x, u, v},
                        "sign E(x,u) differs from sign(x-u)");
            if (rep.counterexamples.size() >= kMaxWitnesses)
                break;
        }
    }

    // --- continuity of u -> E(x,u): shrinking offsets must shrink the gap --
    long n_cont = std::max<long>(1, budget * 3 / 10 / 14);
    for (long i = 0; i < n_cont; ++i) {
        double x = draw();
        double u = (i % 4 == 0) ? x : draw();
        double at = E.eval(x, u);
        ++rep.samples_used;
        double h0 = 1e-3 * (1.0 + std::fabs(u));
        double prev_gap = std::numeric_limits<double>::infinity();
        bool violated = false;
        double gap = 0.0, h = h0;
        for (int k = 0; k < 6; ++k) {
            h = h0 * std::pow(0.25, k);
            gap = 0.0;
            if (u + h < box.hi) {
                gap = std::max(gap, std::fabs(E.eval(x, u + h) - at));
                ++rep.samples_used;
            }
            if (u - h > box.lo) {
                gap = std::max(gap, std::fabs(E.eval(x, u - h) - at));
                ++rep.samples_used;
            }
            // A jump shows as a gap that stops shrinking at small h.
            violated = k == 5 && gap > 1e-6 * (1.0 + std::fabs(at)) &&
                       gap > 0.5 * prev_gap;
            prev_gap = gap;
        }
        if (violated) {
            rep.d2_pass = false;
            add_witness("continuity", {x, u, gap},
                        "u -> E(x,u) jumps near this point");
            if (rep.counterexamples.size() >= kMaxWitnesses)
                break;
        }
    }

    // --- ratio monotonicity: u -> E(x,u)/E(y,u) strictly decreasing --------
    long n_ratio = std::max<long>(1, budget * 3 / 10 / 68);
    constexpr int kGrid = 33;
    for (long i = 0; i < n_ratio; ++i) {
        double x = draw(), y = draw();
        if (x == y)
            continue;
        if (x > y)
            std::swap(x, y);
        double prev = std::numeric_limits<double>::infinity();
        double prev_u = x;
        for (int k = 1; k <= kGrid; ++k) {
            double u = x + (y - x) * static_cast<double>(k) /
                               static_cast<double>(kGrid + 1);
            double den = E.eval(y, u);
            double num = E.eval(x, u);
            rep.samples_used += 2;
            if (den == 0.0)
                continue; // sign axiom handles this; avoid dividing by zero
            double ratio = num / den;
            double tie_tol = 1e-12 * (1.0 + std::fabs(ratio));
            if (k > 1) {
                if (ratio > prev + tie_tol) {
                    rep.d3_pass = false;
                    add_witness("ratio-monotone", {x, y, prev_u, u, prev, ratio},
                                "ratio increased between consecutive grid points");
                    break;
                }
                if (ratio > prev - tie_tol)
                    ++rep.d3_ties; // tie within noise: inconclusive, not a failure
            }
            prev = ratio;
            prev_u = u;
        }
        if (!rep.d3_pass && rep.counterexamples.size() >= kMaxWitnesses)
            break;
    }

    return rep;
}

} // namespace meanslab

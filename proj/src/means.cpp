#include "meanslab/means.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "meanslab/errors.hpp"

namespace meanslab {

namespace {

// Exponent magnitude beyond which x^p is evaluated through logs.  exp(600) is
// still finite in double precision, so this leaves headroom before overflow.
constexpr double kLogSpaceThreshold = 600.0;

void require_nonempty(std::span<const double> x, const char* who) {
    if (x.empty())
        throw DomainError(std::string(who) + ": input vector is empty");
}

void require_positive(std::span<const double> x, const char* who) {
    for (double v : x)
        if (!(v > 0.0) || !std::isfinite(v))
            throw DomainError(std::string(who) + ": inputs must be positive and finite");
}

bool all_equal(std::span<const double> x) {
    for (double v : x)
        if (v != x[0])
            return false;
    return true;
}

/// Clamp a computed mean into [min x, max x]; rounding in the power/log
/// pipeline may push it a few ulps outside, which would break internality.
MeanValue finalize(double value, MeanFamily family, std::span<const double> x) {
    auto [mn_it, mx_it] = std::minmax_element(x.begin(), x.end());
    double mn = *mn_it, mx = *mx_it;
    if (!std::isfinite(value))
        throw SolveError("mean evaluation produced a non-finite value");
    value = std::clamp(value, mn, mx);
    return MeanValue{value, family, std::vector<double>(x.begin(), x.end())};
}

/// log( sum exp(l_i) ) without overflow.
double log_sum_exp(const std::vector<double>& l) {
    double m = *std::max_element(l.begin(), l.end());
    double s = 0.0;
    for (double v : l)
        s += std::exp(v - m);
    return m + std::log(s);
}

/// Invert a strictly monotone generator on the bracket [lo, hi].  Prefers the
/// registered closed form; otherwise bisects to relative width 1e-13.  A
/// bracket whose endpoint values do not straddle the target means the
/// generator is not monotone in the promised direction.
double invert_generator(const GeneratorSpec& f, double target, double lo, double hi) {
    if (f.has_inverse()) {
        double u = f.inverse(target);
        if (!std::isfinite(u))
            throw SolveError("generator inverse produced a non-finite value");
        return std::clamp(u, lo, hi);
    }
    bool inc = f.monotonicity == Monotonicity::increasing;
    double flo = f.eval(lo), fhi = f.eval(hi);
    if (inc ? !(flo <= target && target <= fhi)
            : !(fhi <= target && target <= flo))
        throw SolveError("generator not monotone on bracket (mean value escapes endpoint range)");
    constexpr int kMaxIter = 200;
    for (int it = 0; it < kMaxIter; ++it) {
        double mid = 0.5 * (lo + hi);
        if (hi - lo <= 1e-13 * (1.0 + std::fabs(mid)))
            return mid;
        double fm = f.eval(mid);
        bool go_right = inc ? (fm < target) : (fm > target);
        if (fm == target)
            return mid;
        (go_right ? lo : hi) = mid;
    }
    throw SolveError("generator inversion did not converge within 200 bisection steps");
}

} // namespace

MeanValue holder_mean(double p, std::span<const double> x) {
    require_nonempty(x, "holder_mean");
    require_positive(x, "holder_mean");
    if (all_equal(x))
        return MeanValue{x[0], MeanFamily::holder,
                         std::vector<double>(x.begin(), x.end())};

    const double n = static_cast<double>(x.size());
    double value;
    if (p == 0.0) {
        double s = 0.0;
        for (double v : x)
            s += std::log(v);
        value = std::exp(s / n);
    } else {
        double worst = 0.0;
        for (double v : x)
            worst = std::max(worst, std::fabs(p * std::log(v)));
        if (worst > kLogSpaceThreshold) {
            std::vector<double> l(x.size());
            for (size_t i = 0; i < x.size(); ++i)
                l[i] = p * std::log(x[i]);
            value = std::exp((log_sum_exp(l) - std::log(n)) / p);
        } else {
            double s = 0.0;
            for (double v : x)
                s += std::pow(v, p);
            value = std::pow(s / n, 1.0 / p);
        }
    }
    return finalize(value, MeanFamily::holder, x);
}

MeanValue quasiarithmetic_mean(const GeneratorSpec& f, std::span<const double> x) {
    require_nonempty(x, "quasiarithmetic_mean");
    for (double v : x)
        if (!f.domain.contains(v))
            throw DomainError("quasiarithmetic_mean: input outside generator domain");
    if (all_equal(x))
        return MeanValue{x[0], MeanFamily::quasiarithmetic,
                         std::vector<double>(x.begin(), x.end())};

    double t = 0.0;
    for (double v : x)
        t += f.eval(v);
    t /= static_cast<double>(x.size());
    auto [mn_it, mx_it] = std::minmax_element(x.begin(), x.end());
    double u = invert_generator(f, t, *mn_it, *mx_it);
    return finalize(u, MeanFamily::quasiarithmetic, x);
}

MeanValue gini_mean(GiniParams qr, std::span<const double> x) {
    require_nonempty(x, "gini_mean");
    require_positive(x, "gini_mean");
    if (all_equal(x))
        return MeanValue{x[0], MeanFamily::gini,
                         std::vector<double>(x.begin(), x.end())};

    const double q = qr.q, r = qr.r;
    double value;
    if (std::fabs(q - r) < 1e-12) {
        // Weighted-log form exp( sum w_i log x_i / sum w_i ), w_i = x_i^q,
        // with the largest exponent factored out so weights never overflow.
        double shift = -std::numeric_limits<double>::infinity();
        for (double v : x)
            shift = std::max(shift, q * std::log(v));
        double num = 0.0, den = 0.0;
        for (double v : x) {
            double w = std::exp(q * std::log(v) - shift);
            num += w * std::log(v);
            den += w;
        }
        value = std::exp(num / den);
    } else {
        double worst = 0.0;
        for (double v : x) {
            double lv = std::fabs(std::log(v));
            worst = std::max(worst, std::max(std::fabs(q), std::fabs(r)) * lv);
        }
        if (worst > kLogSpaceThreshold) {
            std::vector<double> lq(x.size()), lr(x.size());
            for (size_t i = 0; i < x.size(); ++i) {
                lq[i] = q * std::log(x[i]);
                lr[i] = r * std::log(x[i]);
            }
            value = std::exp((log_sum_exp(lq) - log_sum_exp(lr)) / (q - r));
        } else {
            double sq = 0.0, sr = 0.0;
            for (double v : x) {
                sq += std::pow(v, q);
                sr += std::pow(v, r);
            }
            value = std::pow(sq / sr, 1.0 / (q - r));
        }
    }
    return finalize(value, MeanFamily::gini, x);
}

MeanValue bajraktarevic_mean(const GeneratorSpec& f, const WeightSpec& p,
                             std::span<const double> x) {
    require_nonempty(x, "bajraktarevic_mean");
    for (double v : x) {
        if (!f.domain.contains(v) || !p.domain.contains(v))
            throw DomainError("bajraktarevic_mean: input outside domain");
        if (!(p.eval(v) > 0.0))
            throw DomainError("bajraktarevic_mean: weight must be positive at every input");
    }
    if (all_equal(x))
        return MeanValue{x[0], MeanFamily::bajraktarevic,
                         std::vector<double>(x.begin(), x.end())};

    double num = 0.0, den = 0.0;
    for (double v : x) {
        double w = p.eval(v);
        num += w * f.eval(v);
        den += w;
    }
    auto [mn_it, mx_it] = std::minmax_element(x.begin(), x.end());
    double u = invert_generator(f, num / den, *mn_it, *mx_it);
    return finalize(u, MeanFamily::bajraktarevic, x);
}

} // namespace meanslab

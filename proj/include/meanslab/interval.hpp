#pragma once

#include <cmath>
#include <limits>

#include "meanslab/errors.hpp"

namespace meanslab {

/// Open interval (lo, hi); either endpoint may be infinite.  All mean
/// families here operate on open intervals, so membership is strict.
struct Interval {
    double lo;
    double hi;

    Interval(double lo_, double hi_) : lo(lo_), hi(hi_) {
        if (std::isnan(lo) || std::isnan(hi) || !(lo < hi))
            throw DomainError("Interval: endpoints must satisfy lo < hi");
    }

    static Interval reals() {
        return {-std::numeric_limits<double>::infinity(),
                std::numeric_limits<double>::infinity()};
    }
    static Interval positive_reals() {
        return {0.0, std::numeric_limits<double>::infinity()};
    }

    bool contains(double x) const { return x > lo && x < hi; }

    bool is_finite() const { return std::isfinite(lo) && std::isfinite(hi); }

    double width() const { return hi - lo; }

    /// Largest open interval contained in both operands.
    Interval intersect(const Interval& other) const {
        double l = lo > other.lo ? lo : other.lo;
        double h = hi < other.hi ? hi : other.hi;
        if (!(l < h))
            throw DomainError("Interval: empty intersection");
        return {l, h};
    }
};

} // namespace meanslab

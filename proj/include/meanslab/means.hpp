#pragma once

#include <span>
#include <vector>

#include "meanslab/function_spec.hpp"

namespace meanslab {

enum class MeanFamily { holder, quasiarithmetic, gini, bajraktarevic, deviation };

/// Result of a mean evaluation.  Invariant: min(inputs) <= value <= max(inputs),
/// with equality only when all inputs coincide (internality).
struct MeanValue {
    double value;
    MeanFamily family;
    std::vector<double> inputs;
};

/// Power mean ((x_1^p + ... + x_n^p)/n)^{1/p} on positive inputs; p = 0 is the
/// geometric mean, computed through the sum of logarithms.  Large |p| routes
/// through log-space so intermediate powers cannot overflow.
MeanValue holder_mean(double p, std::span<const double> x);

/// f^{-1}( (f(x_1) + ... + f(x_n))/n ) for a strictly monotone generator.
/// Inversion uses the registered closed form when available, otherwise
/// bisection on [min x, max x] to relative width 1e-13 (at most 200 steps).
MeanValue quasiarithmetic_mean(const GeneratorSpec& f, std::span<const double> x);

struct GiniParams {
    double q;
    double r;
};

/// Two-parameter Gini mean on positive inputs:
///   (sum x_i^q / sum x_i^r)^{1/(q-r)}        for q != r,
///   exp( sum x_i^q log x_i / sum x_i^q )      for q == r
/// (parameters closer than 1e-12 take the q == r branch).  Both branches are
/// evaluated shift-stably in log-space when powers would overflow.
MeanValue gini_mean(GiniParams qr, std::span<const double> x);

/// Weighted quasiarithmetic mean f^{-1}( sum p(x_i) f(x_i) / sum p(x_i) )
/// with a strictly positive weight p.
MeanValue bajraktarevic_mean(const GeneratorSpec& f, const WeightSpec& p,
                             std::span<const double> x);

} // namespace meanslab

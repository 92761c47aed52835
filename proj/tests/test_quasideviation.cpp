#include <cmath>
#include <vector>

#include "doctest.h"

#include "meanslab/means.hpp"
#include "meanslab/quasideviation.hpp"

using namespace meanslab;

namespace {

/// E(x,u) = x - u on a finite window, the simplest deviation (mean = arithmetic).
Quasideviation linear_deviation(Interval domain = Interval(0.0, 10.0)) {
    Quasideviation E;
    E.domain = domain;
    E.eval = [](double x, double u) { return x - u; };
    E.d1 = [](double, double) { return 1.0; };
    E.d2 = [](double, double) { return -1.0; };
    E.diag_d1_left = [](double) { return 1.0; };
    E.diag_d1_right = [](double) { return 1.0; };
    E.gateaux_on_diagonal = true;
    E.name = "linear";
    return E;
}

Quasideviation cubic_gap_deviation() {
    Quasideviation E;
    E.domain = Interval(0.5, 10.0);
    E.eval = [](double x, double u) { return x * x * x - u * u * u; };
    E.name = "cubic-gap";
    return E;
}

} // namespace

TEST_CASE("weighted-difference deviation evaluates p(x)(f(x)-f(u))") {
    Quasideviation E = from_bajraktarevic(power_generator(2.0), power_weight(1.0));
    CHECK(E(2.0, 1.0) == 6.0);
    CHECK(E(1.0, 2.0) == -3.0);
    CHECK(E(3.0, 3.0) == 0.0);
    CHECK(E.has_d1());
    CHECK(E.has_d2());
    CHECK(E.gateaux_on_diagonal);
    CHECK(E.d2(2.0, 3.0) == doctest::Approx(-2.0 * 2.0 * 3.0)); // -p(x) f'(u)
}

TEST_CASE("decreasing generators keep the sign axiom") {
    Quasideviation E = from_bajraktarevic(power_generator(-1.0), const_weight(1.0));
    CHECK(E(2.0, 1.0) > 0.0);
    CHECK(E(1.0, 2.0) < 0.0);
}

TEST_CASE("deviation mean of a weighted difference matches the weighted mean") {
    Quasideviation E = from_bajraktarevic(log_generator(), power_weight(2.0));
    const std::vector<double> x{1.0, 2.0};
    double via_root = deviation_mean(E, x).value;
    double direct = bajraktarevic_mean(log_generator(), power_weight(2.0), x).value;
    CHECK(via_root == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("deviation mean solves the root equation: frozen cube case") {
    // sum (x_i^3 - u^3) = 0 on {1,2}  =>  u = (9/2)^{1/3}
    CHECK(deviation_mean(cubic_gap_deviation(), std::vector<double>{1.0, 2.0}).value ==
          doctest::Approx(1.6509636244473134).epsilon(1e-12));
}

TEST_CASE("deviation mean: constant input, internality, axiom breakage") {
    Quasideviation E = linear_deviation();
    CHECK(deviation_mean(E, std::vector<double>{3.3, 3.3}).value == 3.3);
    double m = deviation_mean(E, std::vector<double>{1.0, 2.0, 6.0}).value;
    CHECK(m == doctest::Approx(3.0).epsilon(1e-12));

    Quasideviation bad;
    bad.domain = Interval(0.0, 10.0);
    bad.eval = [](double x, double u) { return u - x; }; // sign axiom inverted
    CHECK_THROWS_AS(deviation_mean(bad, std::vector<double>{1.0, 2.0}), SolveError);
    CHECK_THROWS_AS(deviation_mean(E, std::vector<double>{}), DomainError);
    CHECK_THROWS_AS(deviation_mean(E, std::vector<double>{1.0, 20.0}), DomainError);
}

TEST_CASE("piecewise scaling multiplies each side of the diagonal") {
    Quasideviation S = scale_split(linear_deviation(), 1.0, 2.0);
    CHECK(S(3.0, 5.0) == -2.0); // x <= u keeps the left scale
    CHECK(S(5.0, 3.0) == 4.0);  // x > u gets the right scale
    CHECK(S.left_scale == 1.0);
    CHECK(S.right_scale == 2.0);
    CHECK(!S.gateaux_on_diagonal); // unequal scales kink the diagonal

    // mean of the scaled deviation: root of 1*(1-u) + 3*(3-u) on {1,3}
    Quasideviation T = scale_split(linear_deviation(), 1.0, 3.0);
    CHECK(deviation_mean(T, std::vector<double>{1.0, 3.0}).value ==
          doctest::Approx(2.5).epsilon(1e-12));

    // scales compose multiplicatively
    Quasideviation TT = scale_split(T, 2.0, 1.0);
    CHECK(TT.left_scale == 2.0);
    CHECK(TT.right_scale == 3.0);

    CHECK_THROWS_AS(scale_split(linear_deviation(), 0.0, 1.0), DomainError);
    CHECK_THROWS_AS(scale_split(linear_deviation(), 1.0, -2.0), DomainError);
}

TEST_CASE("one-sided diagonal derivatives detect kinks") {
    Quasideviation S = scale_split(linear_deviation(), 1.0, 2.0);
    OneSidedDerivatives d = one_sided_pair(S, 5.0);
    CHECK(d.left == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(d.right == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(d.distinct());

    // smooth case: x -> x^3 - u^3 has slope 3u^2 from both sides
    OneSidedDerivatives s = one_sided_pair(cubic_gap_deviation(), 1.0);
    CHECK(s.left == doctest::Approx(3.0).epsilon(1e-8));
    CHECK(s.right == doctest::Approx(3.0).epsilon(1e-8));
    CHECK(!s.distinct());
}

TEST_CASE("normalization fixes the diagonal slope and keeps the mean") {
    Quasideviation E = cubic_gap_deviation();
    Quasideviation N = normalize(E);
    // d2 N(u,u) = -1: recover it numerically through one_sided machinery
    const std::vector<double> x{1.0, 2.0, 4.0};
    CHECK(deviation_mean(N, x).value ==
          doctest::Approx(deviation_mean(E, x).value).epsilon(1e-11));

    // idempotence: normalizing twice changes nothing (up to stencil noise)
    Quasideviation NN = normalize(N);
    for (double u : {1.0, 2.0, 5.0})
        for (double xx : {0.7, 3.0, 8.0})
            CHECK(NN(xx, u) == doctest::Approx(N(xx, u)).epsilon(1e-10));
}

TEST_CASE("normalize rejects a flat diagonal") {
    Quasideviation flat;
    flat.domain = Interval(0.0, 10.0);
    flat.eval = [](double x, double u) {
        double d = x - u;
        return d * d * d; // d2 E(u,u) = 0 everywhere
    };
    CHECK_THROWS_AS(normalize(flat), DomainError);
}

TEST_CASE("one-sided normalization divides by the diagonal slope") {
    Quasideviation S = scale_split(linear_deviation(), 1.0, 2.0);
    auto R = normalized_plus(S, Side::right);
    REQUIRE(R.has_value());
    CHECK((*R)(7.0, 3.0) == doctest::Approx(4.0).epsilon(1e-9));  // 2*(7-3)/2
    CHECK((*R)(3.0, 7.0) == doctest::Approx(-2.0).epsilon(1e-9)); // 1*(3-7)/2
    auto L = normalized_plus(S, Side::left);
    REQUIRE(L.has_value());
    CHECK((*L)(7.0, 3.0) == doctest::Approx(8.0).epsilon(1e-9)); // 2*(7-3)/1

    // flat diagonal slope: the precondition fails and the signal is nullopt
    Quasideviation flat;
    flat.domain = Interval(0.0, 10.0);
    flat.eval = [](double x, double u) {
        double d = x - u;
        return d * d * d;
    };
    CHECK(!normalized_plus(flat, Side::right).has_value());
}

TEST_CASE("axiom screen passes true deviations and flags broken ones") {
    AxiomReport ok = check_axioms(linear_deviation(Interval(1.0, 4.0)), 4000, 99);
    CHECK(ok.all_pass());
    CHECK(ok.samples_used > 0);

    AxiomReport wd =
        check_axioms(from_bajraktarevic(log_generator(Interval(0.5, 5.0)),
                                        power_weight(1.0, Interval(0.5, 5.0))),
                     4000, 99);
    CHECK(wd.all_pass());

    // sign(x-u) jumps on the diagonal: continuity must fail
    Quasideviation sgn;
    sgn.domain = Interval(1.0, 4.0);
    sgn.eval = [](double x, double u) { return x > u ? 1.0 : (x < u ? -1.0 : 0.0); };
    AxiomReport bad = check_axioms(sgn, 4000, 99);
    CHECK(!bad.d2_pass);
    CHECK(!bad.counterexamples.empty());

    // oscillating factor breaks the ratio-monotonicity axiom
    Quasideviation osc;
    osc.domain = Interval(1.0, 4.0);
    osc.eval = [](double x, double u) {
        return (x - u) * (1.0 + 0.9 * std::sin(3.0 * (x + u)));
    };
    AxiomReport rat = check_axioms(osc, 4000, 99);
    CHECK(!rat.d3_pass);
}

TEST_CASE("axiom screen is deterministic in the seed") {
    Quasideviation E = from_bajraktarevic(power_generator(2.0), const_weight(1.0));
    AxiomReport a = check_axioms(E, 2000, 7);
    AxiomReport b = check_axioms(E, 2000, 7);
    CHECK(a.all_pass() == b.all_pass());
    CHECK(a.samples_used == b.samples_used);
    CHECK(a.d3_ties == b.d3_ties);
}

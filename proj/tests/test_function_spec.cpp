#include <cmath>

#include "doctest.h"

#include "meanslab/function_spec.hpp"

using namespace meanslab;

TEST_CASE("power generator: value, derivatives, inverse") {
    GeneratorSpec f = power_generator(3.0);
    CHECK(f(2.0) == 8.0);
    CHECK(f.d1(2.0) == 12.0);
    CHECK(f.d2(2.0) == 12.0);
    CHECK(f.inverse(8.0) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(f.monotonicity == Monotonicity::increasing);
    CHECK(f.form->family == FunctionFamily::power);
    CHECK(f.form->a == 3.0);
}

TEST_CASE("negative power decreases") {
    GeneratorSpec f = power_generator(-1.0);
    CHECK(f.monotonicity == Monotonicity::decreasing);
    CHECK(f(2.0) == 0.5);
    CHECK(f.d1(2.0) == doctest::Approx(-0.25));
}

TEST_CASE("log and exp generators") {
    GeneratorSpec lg = log_generator();
    CHECK(lg(std::exp(1.0)) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(lg.d1(2.0) == 0.5);
    CHECK(lg.d2(2.0) == -0.25);
    CHECK(lg.inverse(0.0) == 1.0);

    GeneratorSpec ex = exp_generator(2.0);
    CHECK(ex(1.0) == doctest::Approx(std::exp(2.0)));
    CHECK(ex.d1(1.0) == doctest::Approx(2.0 * std::exp(2.0)));
    CHECK(ex.inverse(1.0) == doctest::Approx(0.0));

    GeneratorSpec exn = exp_generator(-1.0);
    CHECK(exn.monotonicity == Monotonicity::decreasing);
}

TEST_CASE("affine generator and its orientation") {
    GeneratorSpec f = affine_generator(2.0, -1.0);
    CHECK(f(3.0) == 5.0);
    CHECK(f.d1(10.0) == 2.0);
    CHECK(f.d2(10.0) == 0.0);
    CHECK(f.inverse(5.0) == 3.0);

    GeneratorSpec g = affine_generator(-1.0, 0.0);
    CHECK(g.monotonicity == Monotonicity::decreasing);
}

TEST_CASE("identity generator spans the reals") {
    GeneratorSpec f = identity_generator();
    CHECK(f(-7.5) == -7.5);
    CHECK(f.inverse(-7.5) == -7.5);
    CHECK(!f.domain.is_finite());
}

TEST_CASE("inverse round-trips across the catalog") {
    const double xs[] = {0.3, 0.9, 1.0, 2.5, 7.0};
    GeneratorSpec gens[] = {power_generator(2.0), power_generator(-0.5),
                            log_generator(), exp_generator(0.7),
                            affine_generator(3.0, -2.0), identity_generator()};
    for (const auto& f : gens)
        for (double x : xs) {
            if (!f.domain.contains(x))
                continue;
            CHECK(f.inverse(f(x)) == doctest::Approx(x).epsilon(1e-13));
        }
}

TEST_CASE("generator parameter validation") {
    CHECK_THROWS_AS(power_generator(0.0), DomainError);
    CHECK_THROWS_AS(power_generator(2.0, Interval(-1.0, 1.0)), DomainError);
    CHECK_THROWS_AS(log_generator(Interval(-1.0, 1.0)), DomainError);
    CHECK_THROWS_AS(exp_generator(0.0), DomainError);
    CHECK_THROWS_AS(affine_generator(0.0, 1.0), DomainError);
}

TEST_CASE("weights are positive on their domain") {
    WeightSpec c = const_weight(2.0);
    CHECK(c(123.0) == 2.0);
    CHECK_THROWS_AS(const_weight(0.0), DomainError);
    CHECK_THROWS_AS(const_weight(-1.0), DomainError);

    WeightSpec pw = power_weight(2.0);
    CHECK(pw(3.0) == 9.0);
    CHECK(pw.d1(3.0) == 6.0);

    WeightSpec ew = exp_weight(-1.0);
    CHECK(ew(2.0) == doctest::Approx(std::exp(-2.0)));
    CHECK(ew(100.0) > 0.0);
}

TEST_CASE("zero-exponent power weight degrades to the constant weight") {
    WeightSpec w = power_weight(0.0);
    CHECK(w(0.5) == 1.0);
    CHECK(w(9.0) == 1.0);
    CHECK(w.form->family == FunctionFamily::constant);
}

TEST_CASE("affine weight certifies positivity on the given domain") {
    WeightSpec w = affine_weight(1.0, -2.0, Interval(3.0, 5.0));
    CHECK(w(4.0) == 2.0);
    CHECK_THROWS_AS(affine_weight(1.0, -2.0, Interval(1.0, 5.0)), DomainError);
    CHECK_THROWS_AS(affine_weight(1.0, 0.0, Interval::positive_reals()), DomainError);
}

TEST_CASE("interval arithmetic") {
    Interval a(0.0, 2.0);
    CHECK(a.contains(1.0));
    CHECK(!a.contains(0.0)); // open endpoints
    CHECK(!a.contains(2.0));
    CHECK(a.width() == 2.0);
    Interval b = a.intersect(Interval(1.0, 3.0));
    CHECK(b.lo == 1.0);
    CHECK(b.hi == 2.0);
    CHECK_THROWS_AS(Interval(2.0, 2.0), DomainError);
    CHECK_THROWS_AS(a.intersect(Interval(5.0, 6.0)), DomainError);
}

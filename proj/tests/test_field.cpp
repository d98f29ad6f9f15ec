#include "doctest.h"

#include "olp/field.hpp"

using namespace olp;

namespace {

ExternalField test_field() {
    return ExternalField::from_decimal({{-2, "1"}, {2, "1"}});
}

}  // namespace

TEST_CASE("field evaluation at simple points") {
    set_precision_bits(256);
    auto f = test_field();
    CHECK(abs(f.eval(Real(1)) - 2) < eps() * 8);
    Cplx vi = f.eval(iu());
    CHECK(abs(vi.re + 2) < eps() * 8);
    CHECK(abs(vi.im) < eps() * 8);
    CHECK(abs(f.eval(Real(2)) - Real("4.25")) < eps() * 8);
}

TEST_CASE("field derivative") {
    set_precision_bits(256);
    auto f = test_field();
    CHECK(abs(f.derivative(Real(1))) < eps() * 8);
    CHECK(abs(f.derivative(Real(2)) - Real("3.75")) < eps() * 16);
    // odd symmetry of the derivative of an even field
    Real x("1.37");
    CHECK(abs(f.derivative(-x) + f.derivative(x)) < eps() * 16);
}

TEST_CASE("derivative matches a centered finite difference at 256 bits") {
    set_precision_bits(256);
    auto f = test_field();
    Real hstep = pow(Real(10), -30);
    for (Real x : {Real("0.5"), Real(1), Real(2), Real("-1.25"), Real("-3")}) {
        Real fd = (f.eval(x + hstep) - f.eval(x - hstep)) / (2 * hstep);
        Real an = f.derivative(x);
        CHECK(abs(fd - an) <= Real("1e-20") * (1 + abs(an)));
    }
}

TEST_CASE("field evaluation on the real axis has no imaginary part") {
    set_precision_bits(256);
    auto f = test_field();
    for (Real x : {Real("0.3"), Real("-0.7"), Real(4)}) {
        Cplx v = f.eval(Cplx(x));
        CHECK(abs(v.im) < eps() * 32 * (1 + abs(v.re)));
    }
}

TEST_CASE("admissibility checks") {
    set_precision_bits(128);
    CHECK(test_field().validate().admissible);
    auto bad1 = ExternalField::from_decimal({{-2, "1"}, {2, "-1"}});
    CHECK_FALSE(bad1.validate().admissible);
    auto bad2 = ExternalField::from_decimal({{-2, "0"}, {2, "1"}});
    CHECK_FALSE(bad2.validate().admissible);
    // extreme exponent missing entirely
    CHECK_THROWS(ExternalField::from_decimal({{1, "1"}}));
    auto scaled = ExternalField::from_decimal({{-2, "1"}, {2, "1"}}, "2");
    CHECK(abs(scaled.eval(Real(1)) - 4) < eps() * 8);
}

TEST_CASE("evaluation at the origin is a domain error") {
    set_precision_bits(128);
    auto f = test_field();
    CHECK_THROWS_AS(f.eval(Real(0)), FieldError);
    CHECK_THROWS_AS(f.derivative(Cplx(Real(0))), FieldError);
}

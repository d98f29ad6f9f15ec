#include "doctest.h"

#include "olp/oracle.hpp"

using namespace olp;

namespace {

ExternalField test_field() {
    return ExternalField::from_decimal({{-2, "1"}, {2, "1"}});
}

}  // namespace

TEST_CASE("moment c_0 for n=1 matches the closed form sqrt(pi) e^{-2}") {
    set_precision_bits(256);
    auto f = test_field();
    MomentTable table(f, 1, 256);
    table.ensure_range(0, 0);
    Real expected = sqrt(pi()) * exp(Real(-2));
    CHECK(abs(table.moment(0) - expected) < Real("1e-70") * expected);
    CHECK(abs(table.moment(0) / expected - 1) < Real("1e-9"));  // quoted value 0.2398927362
}

TEST_CASE("odd moments vanish and c_k = c_{-k-2} for the symmetric field") {
    set_precision_bits(256);
    auto f = test_field();
    MomentTable table(f, 2, 256);
    table.ensure_range(-6, 4);
    for (int k : {-5, -3, -1, 1, 3}) CHECK(abs(table.moment(k)) < Real("1e-60"));
    for (int k : {0, 1, 2, 3, 4}) {
        CHECK(abs(table.moment(k) - table.moment(-k - 2)) <
              Real("1e-60") * (1 + abs(table.moment(k))));
    }
}

TEST_CASE("moment values are stable under precision doubling") {
    auto f = test_field();
    set_precision_bits(256);
    MomentTable t1(f, 3, 256);
    t1.ensure_range(2, 2);
    Real v1 = t1.moment(2);
    Real e1 = t1.error_estimate(2);
    set_precision_bits(512);
    MomentTable t2(f, 3, 512);
    t2.ensure_range(2, 2);
    Real v2 = t2.moment(2);
    set_precision_bits(256);
    CHECK(abs(v1 - v2) <= e1 + abs(v1) * Real("1e-70"));
}

TEST_CASE("hankel determinant base cases") {
    set_precision_bits(256);
    auto f = test_field();
    MomentTable table(f, 1, 256);
    table.ensure_range(-4, 4);
    CHECK(hankel_det(table, 3, 0) == 1);
    CHECK(hankel_det(table, 2, 1) == table.moment(2));
    Real h2 = hankel_det(table, 0, 2);
    Real expected = table.moment(0) * table.moment(2) - table.moment(1) * table.moment(1);
    CHECK(abs(h2 - expected) < Real("1e-60") * (1 + abs(expected)));
}

TEST_CASE("monic OLPs for the symmetric field") {
    set_precision_bits(320);
    auto f = test_field();
    MomentTable table(f, 1, 320);

    auto p0 = monic_olp_even(table, 0);
    CHECK(p0.lowest() == 0);
    CHECK(p0.coefficient(0) == 1);

    // pi_2(z) = z - 1/z for this field: nu_0 = 0 by parity and
    // nu_{-1} = H^{(-1)}_2 / H^{(-2)}_2 = -c_0/c_{-2} = -1 by the moment
    // symmetry c_k = c_{-k-2}.
    auto p2 = monic_olp_even(table, 1);
    CHECK(p2.coefficient(1) == 1);
    CHECK(abs(p2.coefficient(0)) < Real("1e-60"));
    table.ensure_range(-2, 2);
    Real nu_ratio = (table.moment(-1) * table.moment(1) - table.moment(0) * table.moment(0)) /
                    (table.moment(-2) * table.moment(0) - table.moment(-1) * table.moment(-1));
    CHECK(abs(p2.coefficient(-1) - nu_ratio) < Real("1e-60"));
    CHECK(abs(p2.coefficient(-1) + 1) < Real("1e-60"));
    CHECK(abs(p2.eval(Real(2)) - Real("1.5")) < Real("1e-60"));

    // parity: only exponents with the parity of n appear in pi_{2n}
    for (int n = 2; n <= 6; ++n) {
        auto p = monic_olp_even(table, n);
        for (int k = -n; k <= n; ++k)
            if ((k - n) % 2 != 0) CHECK(abs(p.coefficient(k)) < Real("1e-50"));
    }

    auto p1 = monic_olp_odd(table, 0);
    CHECK(p1.coefficient(-1) == 1);
    CHECK(abs(p1.coefficient(0)) < Real("1e-60"));
}

TEST_CASE("orthogonality residuals by fresh quadrature") {
    set_precision_bits(320);
    auto f = test_field();
    MomentTable table(f, 1, 320);
    auto p2 = monic_olp_even(table, 1);
    auto res = orthogonality_residuals(p2, f, 1, -1, 0);
    Real norm = weighted_inner_product(p2, p2, f, 1);
    for (const Real& r : res) CHECK(abs(r) < Real("1e-40") * sqrt(norm));

    auto p3 = monic_olp_odd(table, 1);
    auto res3 = orthogonality_residuals(p3, f, 1, -1, 1);
    for (const Real& r : res3) CHECK(abs(r) < Real("1e-40"));
}

TEST_CASE("norming constants") {
    set_precision_bits(320);
    auto f = test_field();
    MomentTable table(f, 2, 320);
    table.ensure_range(0, 1);
    Real xi0 = norming_constant_even(table, 0);
    CHECK(abs(xi0 - 1 / sqrt(table.moment(0))) < Real("1e-60"));
    for (int n = 1; n <= 4; ++n) {
        Real xi = norming_constant_even(table, n);
        CHECK(xi > 0);
        auto p = monic_olp_even(table, n);
        Real ip = weighted_inner_product(p, p, f, 2);
        CHECK(abs(xi * xi * ip - 1) < Real("1e-20"));
    }
}

TEST_CASE("laurent evaluation") {
    set_precision_bits(128);
    LaurentPoly p(-1, {Real(1), Real(0), Real(1)});  // z^{-1} + z
    Cplx v = p.eval(iu());
    CHECK(abs(v) < eps() * 16);
    CHECK_THROWS(p.eval(Cplx(Real(0))));
}

TEST_CASE("hankel determinant against the multi-fold integral") {
    set_precision_bits(192);
    auto f = test_field();
    MomentTable table(f, 1, 192);
    table.ensure_range(-2, 2);

    Real m1 = hankel_multi_integral_check(f, 1, 2, 1);
    CHECK(abs(m1 - table.moment(2)) < Real("1e-25") * (1 + abs(table.moment(2))));

    Real m2 = hankel_multi_integral_check(f, 1, 0, 2);
    Real h2 = hankel_det(table, 0, 2);
    CHECK(abs(m2 - h2) <= Real("1e-10") * (1 + abs(h2)));

    // positivity of the squared-Vandermonde representation for m = -2n
    Real hm = hankel_multi_integral_check(f, 1, -2, 2);
    CHECK(hm > 0);
    Real hd = hankel_det(table, -2, 2);
    CHECK(abs(hm - hd) <= Real("1e-10") * (1 + abs(hd)));
}

TEST_CASE("moment table persistence round trip") {
    set_precision_bits(192);
    auto f = test_field();
    MomentTable table(f, 1, 192);
    table.ensure_range(-2, 2);
    std::string text = table.serialize();
    auto back = MomentTable::deserialize(f, text);
    REQUIRE(back.has_value());
    for (int k = -2; k <= 2; ++k)
        CHECK(abs(back->moment(k) - table.moment(k)) <= abs(table.moment(k)) * Real("1e-45"));
}

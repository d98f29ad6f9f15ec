#include "doctest.h"

#include "olp/equilibrium.hpp"

using namespace olp;

namespace {

ExternalField test_field() {
    return ExternalField::from_decimal({{-2, "1"}, {2, "1"}});
}

// solved symmetric endpoints for the reference field, cached per process
const EquilibriumData& solved() {
    static EquilibriumData eq = [] {
        set_precision_bits(256);
        auto f = test_field();
        auto e = solve_endpoints(f, 1, symmetric_two_band_guess(f));
        return build_equilibrium(f, e);
    }();
    return eq;
}

}  // namespace

TEST_CASE("sqrt_R branch structure") {
    set_precision_bits(256);
    SqrtR sq({Real(-2), Real(-1), Real(1), Real(2)});
    // real and positive to the right of everything
    CHECK(sq.value(Cplx(Real(3))).re > 0);
    CHECK(abs(sq.value(Cplx(Real(3))).im) < eps() * 100);
    // normalization at infinity, off the real axis
    Cplx zbig(Real(1000000), Real(700000));
    Cplx ratio = sq.value(zbig) / (pow(zbig, 2));
    CHECK(abs(ratio - Cplx(Real(1))) < Real("1e-11"));
    // jump across a band: limits from above and below are opposite
    Real x("1.5");
    Cplx up = sq.value(Cplx(x, Real("1e-40")));
    Cplx dn = sq.value(Cplx(x, Real("-1e-40")));
    CHECK(abs(up + dn) < Real("1e-30") * abs(up));
    // boundary value from above matches the closed form
    CHECK(abs(sq.plus(x) - up) < Real("1e-30") * abs(up));
    // sign pattern: plus() is i*sigma*|R|^{1/2} with sigma=+1 on the last band
    CHECK(sq.plus(x).im > 0);
    CHECK(abs(sq.plus(x).im - sq.abs_sqrt(x)) < Real("1e-60"));
    // on the band left of zero, sigma flips
    CHECK(sq.plus(Real("-1.5")).im < 0);
    // continuous across the central gap, value real with sign (-1)^{bands right}
    CHECK(sq.real_sign(Real(0)) == -1);
    CHECK(sq.real_sign(Real("2.5")) == 1);
    CHECK(sq.real_sign(Real("-2.5")) == 1);
}

TEST_CASE("h from the contour agrees with the closed form and is real") {
    set_precision_bits(256);
    auto f = test_field();
    SqrtR sq({Real(-2), Real(-1), Real(1), Real(2)});
    HContour h(f, sq);
    auto closed = h_closed_form(f, sq);
    for (Real x : {Real("0.8"), Real("1.2"), Real("1.9"), Real("2.4"), Real("-0.6"),
                   Real("-1.5")}) {
        Cplx hv = h.eval_c(Cplx(x));
        CHECK(abs(hv.im) < Real("1e-40") * (1 + abs(hv.re)));
        CHECK(abs(hv.re - closed.eval(x)) < Real("1e-30") * (1 + abs(closed.eval(x))));
    }
    // h is odd for this even field
    CHECK(abs(h.eval(Real("1.3")) + h.eval(Real("-1.3"))) < Real("1e-30"));
    // derivative under the contour matches a finite difference
    Real x0("1.4"), dh("1e-20");
    Real fd = (h.eval(x0 + dh) - h.eval(x0 - dh)) / (2 * dh);
    CHECK(abs(h.eval(x0, 1) - fd) < Real("1e-25") * (1 + abs(fd)));
}

TEST_CASE("h degree matches the closed-form Laurent range") {
    set_precision_bits(256);
    auto f = test_field();
    SqrtR sq({Real(-2), Real(-1), Real(1), Real(2)});
    auto closed = h_closed_form(f, sq);
    // exponent window [-2 m1 - 1, 2 m2 - N - 2] = [-3, -1] for this field:
    // every即 coefficient outside is absent by construction; check the range
    CHECK(closed.lo == -3);
    CHECK(closed.lo + static_cast<int>(closed.c.size()) - 1 == -1);
}

TEST_CASE("symmetric endpoints solve and land symmetric") {
    const auto& eq = solved();
    REQUIRE(eq.N == 1);
    CHECK(eq.residual_norm < Real("1e-10"));
    // b0 = -a2, a1 = -b1 even though the solver treats 4 unknowns
    CHECK(abs(eq.endpoints[0] + eq.endpoints[3]) < Real("1e-10"));
    CHECK(abs(eq.endpoints[1] + eq.endpoints[2]) < Real("1e-10"));
    CHECK(eq.endpoints[1] < 0);
    CHECK(eq.endpoints[2] > 0);
}

TEST_CASE("grid-search oracle confirms the Newton endpoints") {
    set_precision_bits(192);
    auto f = test_field();
    const auto& eq = solved();
    // independent coarse search over the symmetric two-parameter family
    // (b, a) minimizing the residual norm, refined by bisection on scale
    Real best_a(0), best_b(0), best_r("1e30");
    for (int ia = 0; ia <= 16; ++ia)
        for (int ib = 0; ib < 14; ++ib) {
            Real a = Real("1.2") + Real(ia) / 20;
            Real b = Real("0.35") + Real(ib) / 20;
            if (b >= a) continue;
            auto r = moment_conditions_residual(f, {-a, -b, b, a}, 48);
            Real m(0);
            for (const Real& v : r) m = std::max(m, abs(v));
            if (m < best_r) {
                best_r = m;
                best_a = a;
                best_b = b;
            }
        }
    CHECK(abs(best_a - eq.endpoints[3]) < Real("0.08"));
    CHECK(abs(best_b - eq.endpoints[2]) < Real("0.08"));
}

TEST_CASE("moment-condition residual symmetry for the even field") {
    set_precision_bits(192);
    auto f = test_field();
    std::vector<Real> e = {Real("-1.6"), Real("-0.7"), Real("0.7"), Real("1.6")};
    auto r = moment_conditions_residual(f, e, 64);
    REQUIRE(r.size() == 4);
    // T_1 and N_1 vanish identically by parity
    CHECK(abs(r[1]) < Real("1e-35"));
    CHECK(abs(r[3]) < Real("1e-25"));
}

TEST_CASE("analytic Jacobian agrees with finite differences off the solution") {
    set_precision_bits(192);
    auto f = test_field();
    std::vector<Real> e = {Real("-1.55"), Real("-0.72"), Real("0.68"), Real("1.62")};
    // build both Jacobians through one Newton step of each flavor: compare
    // the first step direction
    SolveOptions oa, of;
    oa.max_iter = 1;
    of.max_iter = 1;
    of.analytic_jacobian = false;
    std::vector<Real> sa, sf;
    try {
        solve_endpoints(f, 1, e, oa);
    } catch (const EquilibriumError&) {
    }
    // direct comparison of matrices instead: use internal helpers via residuals
    const int dim = 4;
    auto F0 = moment_conditions_residual(f, e, 64);
    SqrtR sq(e);
    HContour h(f, sq);
    Real step("1e-12");
    for (int col = 0; col < dim; ++col) {
        auto up = e, dn = e;
        up[col] += step;
        dn[col] -= step;
        auto Fu = moment_conditions_residual(f, up, 64);
        auto Fd = moment_conditions_residual(f, dn, 64);
        // analytic entries
        Real he = h.eval(e[col]);
        std::vector<Real> T = {F0[0], F0[1], F0[2] - 4};
        for (int row = 0; row < 3; ++row) {
            Real fd = (Fu[row] - Fd[row]) / (2 * step);
            Real epow(1);
            std::vector<Real> ep(3);
            for (int j = 0; j <= 2; ++j) {
                ep[j] = epow;
                epow *= e[col];
            }
            Real an = ep[row] * (-he);
            for (int i = 0; i < row; ++i) an += ep[row - 1 - i] * T[i] / 2;
            CHECK(abs(fd - an) < Real("1e-8") * (1 + abs(an)));
        }
    }
}

TEST_CASE("density: positivity, unit mass, square-root vanishing") {
    const auto& eq = solved();
    auto f = test_field();
    CHECK(abs(eq.total_mass() - 1) < Real("1e-10"));
    for (int band = 1; band <= 2; ++band) {
        auto rule = chebyshev_rule(eq.sq.band_lo(band), eq.sq.band_hi(band), 200);
        for (const Real& s : rule.s) CHECK(eq.density(s) > -Real("1e-12"));
    }
    // symmetric density
    CHECK(abs(eq.density(Real("1.1")) - eq.density(Real("-1.1"))) < Real("1e-12"));
    // band-edge exponent fit in [0.45, 0.55]: psi(b0 + t) ~ C t^p
    Real b0 = eq.endpoints[0];
    Real t1("1e-6"), t2("1e-8");
    Real p = log(eq.density(b0 + t1) / eq.density(b0 + t2)) / log(t1 / t2);
    CHECK(p > Real("0.45"));
    CHECK(p < Real("0.55"));
}

TEST_CASE("variational equality on bands, strict inequality off") {
    const auto& eq = solved();
    auto f = test_field();
    // equality at several interior band points
    for (Real frac : {Real("0.2"), Real("0.5"), Real("0.8")}) {
        Real x = eq.sq.band_lo(2) + frac * (eq.sq.band_hi(2) - eq.sq.band_lo(2));
        CHECK(abs(eq.variational_value(f, x)) < Real("1e-8"));
        Real xm = eq.sq.band_lo(1) + frac * (eq.sq.band_hi(1) - eq.sq.band_lo(1));
        CHECK(abs(eq.variational_value(f, xm)) < Real("1e-8"));
    }
    // independence of the evaluation point for ell
    Real x0 = (eq.sq.band_lo(2) + 3 * eq.sq.band_hi(2)) / 4;
    CHECK(abs(variational_constant(f, eq, x0) - eq.ell) < Real("1e-8"));
    // strict negativity off the support
    for (Real x : {Real("0.1"), Real("0.3"), Real("-0.25"), Real("2.2"), Real("-2.5"),
                   Real("3.5"), Real("0.55"), Real("-0.5"), Real("4.5"), Real("-6")}) {
        if (eq.sq.band_of(x) != 0) continue;
        CHECK(eq.variational_value(f, x) < 0);
    }
}

TEST_CASE("Q_e components for the symmetric field") {
    const auto& eq = solved();
    // half the mass sits left of zero
    CHECK(abs(eq.Q_im - pi() / 2) < Real("1e-10"));
}

TEST_CASE("g-function asymptotics and band identities") {
    const auto& eq = solved();
    auto f = test_field();
    // g(z) - ln z + Q_e -> 0 at large |z|
    Cplx zbig(Real(10000), Real(3000));
    Cplx v = eq.g(f, zbig) - log(zbig) + Cplx(eq.Q_re, eq.Q_im);
    CHECK(abs(v) < Real("1e-3"));

    // on a band: g_+ + g_- - V~ - ell + 2Q_e = 0
    Real x = (eq.sq.band_lo(2) + eq.sq.band_hi(2)) / 2;
    Cplx comb = eq.g_plus(f, x) + eq.g_minus(f, x) - Cplx(f.eval(x)) - Cplx(eq.ell) +
                Cplx(2 * eq.Q_re, 2 * eq.Q_im);
    CHECK(abs(comb) < Real("1e-8"));

    // jump identity: g_+ - g_- = 4 pi i int_x^{a2} psi (x > 0)
    Cplx jump = eq.g_plus(f, x) - eq.g_minus(f, x);
    CHECK(abs(jump - Cplx(Real(0), 4 * pi() * eq.mass_right_of(x))) < Real("1e-10"));
    // and the -2 pi i shift left of the origin
    Real xm = (eq.sq.band_lo(1) + eq.sq.band_hi(1)) / 2;
    Cplx jump_m = eq.g_plus(f, xm) - eq.g_minus(f, xm);
    CHECK(abs(jump_m - Cplx(Real(0), 4 * pi() * eq.mass_right_of(xm) - 2 * pi())) <
          Real("1e-10"));

    // boundary values are limits of the interior values
    Cplx gp = eq.g(f, Cplx(x, Real("1e-12")));
    CHECK(abs(gp - eq.g_plus(f, x)) < Real("1e-8"));

    // off the ray, interior g matches the plus formula continuation
    Cplx zq(Real("0.4"), Real("1.1"));
    Cplx gq = eq.g(f, zq);
    CHECK(abs(gq.im) < 2 * pi());
}

TEST_CASE("equilibrium moments: closed forms match direct quadrature") {
    const auto& eq = solved();
    auto f = test_field();
    for (int k : {1, 2, 3, -1, -2, -3}) {
        Real closed = equilibrium_moment_closed(f, eq, k);
        Real direct = equilibrium_moment_direct(eq, k);
        CHECK(abs(closed - direct) < Real("1e-8") * (1 + abs(direct)));
    }
    // odd moments vanish by symmetry through both routes
    CHECK(abs(equilibrium_moment_closed(f, eq, 1)) < Real("1e-8"));
    CHECK(abs(equilibrium_moment_direct(eq, 1)) < Real("1e-10"));
}

TEST_CASE("re-solving from a perturbed solution returns to the same endpoints") {
    set_precision_bits(256);
    auto f = test_field();
    const auto& eq = solved();
    auto guess = eq.endpoints;
    guess[0] += Real("1e-3");
    guess[2] -= Real("1e-3");
    auto e2 = solve_endpoints(f, 1, guess);
    for (int i = 0; i < 4; ++i) CHECK(abs(e2[i] - eq.endpoints[i]) < Real("1e-9"));
}

TEST_CASE("detect_N picks the two-band configuration for the reference field") {
    set_precision_bits(256);
    auto f = test_field();
    auto eq = detect_N(f, 2);
    CHECK(eq.N == 1);
}

TEST_CASE("detect_N picks a single band for a one-well field") {
    set_precision_bits(192);
    // (s-3)^2 + 0.3/s^2: one well, support on the positive axis
    auto f = ExternalField::from_decimal(
        {{-2, "0.3"}, {0, "9"}, {1, "-6"}, {2, "1"}});
    auto eq = detect_N(f, 2);
    CHECK(eq.N == 0);
    CHECK(eq.endpoints[0] > 0);
}

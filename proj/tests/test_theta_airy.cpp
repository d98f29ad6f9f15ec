#include "doctest.h"

#include "olp/airy.hpp"
#include "olp/quad.hpp"
#include "olp/theta.hpp"

using namespace olp;

namespace {

// deterministic pseudo-random reals in [-1, 1]
struct Lcg {
    unsigned long long state = 0x2545F4914F6CDD1DULL;
    Real next() {
        state = state * 6364136223846793005ULL + 1442695040888963407ULL;
        return Real(static_cast<long long>(state >> 11)) / Real("4503599627370496") - 1;
    }
};

ThetaContext ctx_i(unsigned digits = 40) {
    std::vector<std::vector<Cplx>> tau = {{Cplx(Real(0), Real(1))}};
    return ThetaContext(std::move(tau), digits);
}

// Ai by the contour integral over the two rays arg t = +-pi/3 (independent
// oracle for the series/asymptotic evaluator)
Cplx airy_integral_rep(const Cplx& z) {
    Cplx w1 = polar(Real(1), pi() / 3);
    Cplx total;
    for (int sgn : {+1, -1}) {
        Cplx dir = sgn > 0 ? w1 : conj(w1);
        auto f = [&](const Real& u) -> Cplx {
            Cplx t = dir * Cplx(u);
            return exp(t * t * t / Cplx(Real(3)) - z * t) * dir * Cplx(Real(sgn));
        };
        total += gl_integrate(f, Real(0), Real(16), 260, 8);
    }
    return total / (Cplx(Real(0), 2 * pi()));
}

}  // namespace

TEST_CASE("theta reference value at tau = i") {
    set_precision_bits(256);
    auto ctx = ctx_i();
    Cplx t0 = ctx.theta({Cplx()});
    // independent direct summation with a doubled radius
    Real direct(0);
    for (int m = -2 * ctx.trunc_radius(); m <= 2 * ctx.trunc_radius(); ++m)
        direct += exp(-pi() * m * m);
    CHECK(abs(t0.re - direct) < Real("1e-35"));
    CHECK(abs(t0.im) < Real("1e-35"));
    CHECK(abs(t0.re - Real("1.0864348112")) < Real("1e-9"));
}

TEST_CASE("theta evenness and periodicity") {
    set_precision_bits(256);
    auto ctx = ctx_i();
    Lcg rng;
    for (int trial = 0; trial < 8; ++trial) {
        Cplx z(rng.next(), rng.next() / 2);
        Cplx a = ctx.theta({z});
        Cplx b = ctx.theta({-z});
        CHECK(abs(a - b) < Real("1e-35") * (1 + abs(a)));
        Cplx c = ctx.theta({z + Cplx(Real(1))});
        CHECK(abs(a - c) < Real("1e-33") * (1 + abs(a)));
    }
}

TEST_CASE("theta quasi-periodicity residuals") {
    set_precision_bits(256);
    auto ctx = ctx_i();
    Lcg rng;
    for (int trial = 0; trial < 20; ++trial) {
        Cplx z(rng.next(), rng.next() / 4);
        CHECK(ctx.quasi_period_residual({z}, 0) < Real("1e-25"));
    }
    // specialization at z = 0: theta(tau_j) = exp(-i pi tau_jj) theta(0)
    CHECK(ctx.quasi_period_residual({Cplx()}, 0) < Real("1e-25"));
}

TEST_CASE("theta for N = 0 is the empty-sum unit") {
    set_precision_bits(128);
    ThetaContext ctx({}, 30);
    CHECK(abs(ctx.theta({}) - Cplx(Real(1))) == 0);
    CHECK(ctx.quasi_period_residual({}, 0) == 0);
}

TEST_CASE("directional sums match finite differences of theta") {
    set_precision_bits(256);
    auto ctx = ctx_i();
    std::vector<Cplx> w = {Cplx(Real("0.7"), Real("0.2"))};
    Cplx z0(Real("0.31"), Real("0.12"));
    // first order: sum (m,w) e^{...} = (1/2 pi i) d/dt theta(z + t w)|_0
    Cplx s1 = ctx.directional_sum(1, w, Cplx(Real(1)), {z0});
    Real h("1e-12");
    Cplx fd = (ctx.theta({z0 + Cplx(h) * w[0]}) - ctx.theta({z0 - Cplx(h) * w[0]})) /
              Cplx(2 * h);
    fd = fd / Cplx(Real(0), 2 * pi());
    CHECK(abs(s1 - fd) < Real("1e-8") * (1 + abs(s1)));
    // zero weight vector collapses to theta / zero
    Cplx s0 = ctx.directional_sum(0, w, Cplx(Real(1)), {z0});
    CHECK(abs(s0 - ctx.theta({z0})) == 0);
    Cplx s1z = ctx.directional_sum(1, {Cplx()}, Cplx(Real(1)), {z0});
    CHECK(abs(s1z) < Real("1e-40"));
    // second order against a second central difference
    Cplx s2 = ctx.directional_sum(2, w, Cplx(Real(1)), {z0});
    Cplx fd2 = (ctx.theta({z0 + Cplx(h) * w[0]}) - Cplx(Real(2)) * ctx.theta({z0}) +
                ctx.theta({z0 - Cplx(h) * w[0]})) /
               Cplx(h * h);
    fd2 = fd2 / (Cplx(Real(0), 2 * pi()) * Cplx(Real(0), 2 * pi()));
    CHECK(abs(s2 - fd2) < Real("1e-6") * (1 + abs(s2)));
}

TEST_CASE("doubling the truncation radius moves theta less than the tail bound") {
    set_precision_bits(256);
    auto c1 = ctx_i(30);
    auto c2 = ctx_i(120);
    Cplx z(Real("0.4"), Real("0.1"));
    CHECK(abs(c1.theta({z}) - c2.theta({z})) <=
          c1.tail_bound(c1.trunc_radius(), Real("0.1")) * 4);
}

TEST_CASE("airy values against the integral representation") {
    set_precision_bits(256);
    Cplx v0 = airy_ai(Cplx());
    Real expected = pow(Real(3), Real(-2) / 3) / tgamma(Real(2) / 3);
    CHECK(abs(v0.re - expected) < Real("1e-40"));
    CHECK(abs(v0.re - Real("0.355028053887817")) < Real("1e-15"));
    for (Cplx z : {Cplx(Real(1)), Cplx(Real("2.5")), Cplx(Real("-1.7")),
                   Cplx(Real("0.3"), Real("1.1")), Cplx(Real("-2.1"), Real("0.7"))}) {
        Cplx ref = airy_integral_rep(z);
        CHECK(abs(airy_ai(z) - ref) < Real("1e-30") * (1 + abs(ref)));
    }
}

TEST_CASE("airy derivative consistency and the ODE") {
    set_precision_bits(256);
    Real h("1e-25");
    for (Cplx z : {Cplx(Real("0.8")), Cplx(Real("-1.3"), Real("0.4"))}) {
        Cplx fd = (airy_ai(z + Cplx(h)) - airy_ai(z - Cplx(h))) / Cplx(2 * h);
        CHECK(abs(fd - airy_ai_prime(z)) < Real("1e-22"));
        // Ai'' = z Ai via a second difference
        Cplx snd = (airy_ai(z + Cplx(h)) - Cplx(Real(2)) * airy_ai(z) + airy_ai(z - Cplx(h))) /
                   Cplx(h * h);
        CHECK(abs(snd - z * airy_ai(z)) < Real("1e-18"));
    }
}

TEST_CASE("airy wronskian and linear dependence identities") {
    set_precision_bits(256);
    Cplx om = polar(Real(1), 2 * pi() / 3);
    Cplx om2 = conj(om);
    Cplx expected = polar(Real(1) / (2 * pi()), pi() / 6);
    Lcg rng;
    for (int trial = 0; trial < 20; ++trial) {
        Cplx lam(rng.next() * 5, rng.next() * 5);
        // W(Ai(l), Ai(w^2 l)) = Ai(l) w^2 Ai'(w^2 l) - Ai'(l) Ai(w^2 l)
        Cplx w = airy_ai(lam) * om2 * airy_ai_prime(om2 * lam) -
                 airy_ai_prime(lam) * airy_ai(om2 * lam);
        CHECK(abs(w - expected) < Real("1e-12"));
        // W(Ai(l), Ai(w l)) = +(2 pi)^{-1} exp(-i pi/6); the sign follows
        // from the value at l = 0, where W = Ai(0) Ai'(0) (w - 1)
        Cplx w2 = airy_ai(lam) * om * airy_ai_prime(om * lam) -
                  airy_ai_prime(lam) * airy_ai(om * lam);
        CHECK(abs(w2 - conj(expected)) < Real("1e-12"));
        Cplx dep = airy_ai(lam) + om * airy_ai(om * lam) + om2 * airy_ai(om2 * lam);
        CHECK(abs(dep) < Real("1e-12"));
    }
}

TEST_CASE("airy asymptotic branch agrees with the integral representation") {
    set_precision_bits(320);
    // |z| just above the series/asymptotic switch, covering the plain
    // asymptotic sector and the rotated sector near the negative axis
    for (Real phi : {Real("0.3"), Real("1.8"), Real("2.9"), Real("-2.4")}) {
        Cplx z = polar(Real("12.3"), phi);
        Cplx ref = airy_integral_rep(z);
        Cplx v = airy_ai(z);
        CHECK(abs(v - ref) < Real("1e-18") * abs(ref));
    }
}

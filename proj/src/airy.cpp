#include "olp/airy.hpp"

#include "olp/real.hpp"

namespace olp {

namespace {

struct AiPair {
    Cplx ai, aip;
};

// Maclaurin solution of w'' = z w with the two standard seeds
AiPair airy_series(const Cplx& z) {
    Real ai0 = pow(Real(3), Real(-2) / 3) / tgamma(Real(2) / 3);
    Real aip0 = -pow(Real(3), Real(-1) / 3) / tgamma(Real(1) / 3);
    Cplx z3 = z * z * z;
    Real cutoff = eps() / 4;
    // f = sum t_k, t_0 = 1, t_k = t_{k-1} z^3 / ((3k)(3k-1))
    Cplx f(Real(1)), fp;
    Cplx t(Real(1));
    for (int k = 1; k < 4000; ++k) {
        t = t * z3 / Cplx(Real((3 * k) * (3 * k - 1)));
        f += t;
        // f' = sum t_k * 3k / z
        fp += t * Cplx(Real(3 * k));
        if (abs(t) < cutoff * (abs(f) + 1)) break;
    }
    if (!(z.re == 0 && z.im == 0)) fp = fp / z;
    // g = sum u_k, u_0 = z, u_k = u_{k-1} z^3 / ((3k+1)(3k)); g' = 1 + ...
    Cplx g = z, gp_tail;
    Cplx u = z;
    for (int k = 1; k < 4000; ++k) {
        u = u * z3 / Cplx(Real((3 * k + 1) * (3 * k)));
        g += u;
        gp_tail += u * Cplx(Real(3 * k + 1));
        if (abs(u) < cutoff * (abs(g) + 1)) break;
    }
    Cplx gp(Real(1));
    if (!(z.re == 0 && z.im == 0)) gp += gp_tail / z;
    return {Cplx(ai0) * f + Cplx(aip0) * g, Cplx(ai0) * fp + Cplx(aip0) * gp};
}

// asymptotic series, |arg z| < pi, best away from the negative axis
AiPair airy_asymptotic(const Cplx& z) {
    Cplx zeta = Cplx(Real(2) / 3) * pow(z, Real("1.5"));
    Cplx inv_zeta = Cplx(Real(1)) / zeta;
    Cplx sum_s(Real(1)), sum_t(Real(1));
    Real sk(1);
    Cplx zpow(Real(1));
    Real best("1e300");
    for (int k = 1; k < 400; ++k) {
        sk = sk * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / (216 * k * (2 * k - 1));
        Real tk = -sk * (6 * k + 1) / (6 * k - 1);
        zpow *= -inv_zeta;
        Real mag = sk * abs(zpow);
        if (mag > best) break;  // divergent tail reached
        best = mag;
        sum_s += Cplx(sk) * zpow;
        sum_t += Cplx(tk) * zpow;
        if (mag < eps() * 4) break;
    }
    Cplx pref = exp(-zeta) / Cplx(2 * sqrt(pi()));
    Cplx ai = pref * pow(z, Real("-0.25")) * sum_s;
    Cplx aip = -pref * pow(z, Real("0.25")) * sum_t;
    return {ai, aip};
}

AiPair airy_eval(const Cplx& z) {
    Real az = abs(z);
    if (az <= 12) return airy_series(z);
    Real ph = abs(arg(z));
    if (ph <= 2 * pi() / 3) return airy_asymptotic(z);
    // rotate into the well-conditioned sector
    Cplx w = polar(Real(1), 2 * pi() / 3);
    Cplx w2 = conj(w);
    AiPair a1 = airy_asymptotic(w * z);
    AiPair a2 = airy_asymptotic(w2 * z);
    AiPair out;
    out.ai = -(w * a1.ai) - (w2 * a2.ai);
    out.aip = -(w2 * a1.aip) - (w * a2.aip);
    return out;
}

}  // namespace

Cplx airy_ai(const Cplx& z) { return airy_eval(z).ai; }
Cplx airy_ai_prime(const Cplx& z) { return airy_eval(z).aip; }

}  // namespace olp

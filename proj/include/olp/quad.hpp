#pragma once

#include "olp/cplx.hpp"
#include "olp/real.hpp"

#include <functional>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

namespace olp {

// Gauss-Legendre rule on [-1,1]. Nodes are computed by Newton iteration at
// the current working precision and cached per (order, precision).
struct GaussLegendre {
    std::vector<Real> x;
    std::vector<Real> w;
};

const GaussLegendre& gauss_legendre(int order);

// Integrate f over [a,b] with composite Gauss-Legendre (pieces panels).
template <typename F>
auto gl_integrate(F&& f, const Real& a, const Real& b, int order = 60, int panels = 1)
    -> decltype(f(std::declval<Real>())) {
    const GaussLegendre& rule = gauss_legendre(order);
    using R = decltype(f(std::declval<Real>()));
    R total{};
    Real width = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        Real lo = a + p * width;
        Real mid = lo + width / 2;
        Real half = width / 2;
        for (size_t i = 0; i < rule.x.size(); ++i) {
            total += f(mid + half * rule.x[i]) * (rule.w[i] * half);
        }
    }
    return total;
}

// Integrate f along the straight segment [za, zb] in the plane.
template <typename F>
Cplx gl_integrate_segment(F&& f, const Cplx& za, const Cplx& zb, int order = 60, int panels = 1) {
    Cplx d = zb - za;
    auto g = [&](const Real& t) { return f(za + d * Cplx(t)) * d; };
    return gl_integrate(g, Real(0), Real(1), order, panels);
}

// Gauss-Chebyshev (first kind) rule for integrals
//   int_a^b g(s) / sqrt((s-a)(b-s)) ds = (pi/n) sum g(s_k),
// with s_k the mapped Chebyshev nodes. Returns the nodes and the common
// weight; the 1/sqrt factor is absorbed exactly.
struct ChebyshevRule {
    std::vector<Real> s;  // nodes in (a,b)
    Real weight;          // pi/n * (b-a)/2 ... already folded, see builder
};

ChebyshevRule chebyshev_rule(const Real& a, const Real& b, int npts);

// Gauss-Chebyshev rule of the second kind:
//   int_a^b sqrt((s-a)(b-s)) g(s) ds = sum w_i g(s_i).
struct Chebyshev2Rule {
    std::vector<Real> s;
    std::vector<Real> w;
    std::vector<Real> theta;  // node angles, s = mid + half*cos(theta)
};
Chebyshev2Rule chebyshev2_rule(const Real& a, const Real& b, int npts);

// Trapezoid sum over j*h of a term function that decays to zero in both
// directions; summation stops when terms fall below cutoff relative to the
// running peak. Used for double-exponential integrands. peak_out (if given)
// receives h * max|term|, an absolute scale for cancellation-aware error
// control.
template <typename F>
auto trapezoid_bilateral(F&& term, const Real& h, const Real& cutoff, Real* peak_out = nullptr,
                         int max_steps = 200000) -> decltype(term(std::declval<Real>())) {
    using R = decltype(term(std::declval<Real>()));
    R total = term(Real(0));
    Real peak = abs(total);
    for (int dir : {+1, -1}) {
        int consecutive_small = 0;
        for (int j = 1; j <= max_steps; ++j) {
            R t = term(dir * j * h);
            total += t;
            Real a = abs(t);
            if (a > peak) peak = a;
            if (a < cutoff * (peak + Real(1))) {
                if (++consecutive_small > 4) break;
            } else {
                consecutive_small = 0;
            }
            if (j == max_steps) throw std::runtime_error("trapezoid_bilateral: no decay detected");
        }
    }
    if (peak_out) *peak_out = peak * h;
    return total * h;
}

// Chebyshev series on [a,b]: fit from values at Chebyshev points of the
// first kind, evaluate by Clenshaw, integrate termwise.
class ChebSeries {
  public:
    ChebSeries() = default;
    // f sampled at the npts Chebyshev nodes of [a,b]
    ChebSeries(std::function<Real(const Real&)> f, Real a, Real b, int npts);

    Real eval(const Real& x) const;
    // antiderivative value: int_a^x
    Real integral_from_a(const Real& x) const;
    Real full_integral() const { return integral_from_a(b_); }
    const Real& a() const { return a_; }
    const Real& b() const { return b_; }
    // magnitude of the trailing coefficients, as a convergence check
    Real tail_estimate() const;

  private:
    Real a_{0}, b_{1};
    std::vector<Real> coef_;       // series coefficients
    std::vector<Real> int_coef_;   // coefficients of the antiderivative
    void build_integral();
};

}  // namespace olp

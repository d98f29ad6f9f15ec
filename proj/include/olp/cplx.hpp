#pragma once

#include "olp/real.hpp"

namespace olp {

// Complex scalar over Real. std::complex is only specified for the builtin
// floating types and boost's complex adaptor does not track the runtime
// precision of mpfr_float, so we carry our own minimal type. Branch cuts of
// log/sqrt/pow are principal (cut along the negative real axis, continuous
// from above).
struct Cplx {
    Real re{0};
    Real im{0};

    Cplx() = default;
    Cplx(Real r) : re(std::move(r)) {}
    Cplx(Real r, Real i) : re(std::move(r)), im(std::move(i)) {}
    Cplx(int n) : re(n) {}
    Cplx(double d) : re(d) {}

    Cplx& operator+=(const Cplx& o) { re += o.re; im += o.im; return *this; }
    Cplx& operator-=(const Cplx& o) { re -= o.re; im -= o.im; return *this; }
    Cplx& operator*=(const Cplx& o) {
        Real r = re * o.re - im * o.im;
        im = re * o.im + im * o.re;
        re = r;
        return *this;
    }
    Cplx& operator/=(const Cplx& o) {
        Real d = o.re * o.re + o.im * o.im;
        Real r = (re * o.re + im * o.im) / d;
        im = (im * o.re - re * o.im) / d;
        re = r;
        return *this;
    }
};

inline Cplx operator+(Cplx a, const Cplx& b) { return a += b; }
inline Cplx operator-(Cplx a, const Cplx& b) { return a -= b; }
inline Cplx operator*(Cplx a, const Cplx& b) { return a *= b; }
inline Cplx operator/(Cplx a, const Cplx& b) { return a /= b; }
inline Cplx operator-(const Cplx& a) { return {-a.re, -a.im}; }
inline Cplx operator+(const Cplx& a) { return a; }
inline bool operator==(const Cplx& a, const Cplx& b) { return a.re == b.re && a.im == b.im; }

inline Cplx conj(const Cplx& z) { return {z.re, -z.im}; }
inline Real abs(const Cplx& z) { return hypot(z.re, z.im); }
inline Real norm2(const Cplx& z) { return z.re * z.re + z.im * z.im; }
inline Real arg(const Cplx& z) { return atan2(z.im, z.re); }

inline Cplx iu() { return {Real(0), Real(1)}; }

inline Cplx polar(const Real& r, const Real& th) { return {r * cos(th), r * sin(th)}; }

inline Cplx exp(const Cplx& z) {
    Real m = exp(z.re);
    return {m * cos(z.im), m * sin(z.im)};
}

inline Cplx log(const Cplx& z) { return {log(abs(z)), arg(z)}; }

inline Cplx sqrt(const Cplx& z) {
    if (z.im == 0) {
        if (z.re >= 0) return {sqrt(z.re), Real(0)};
        return {Real(0), sqrt(-z.re)};
    }
    // principal branch via the half-angle identities (no trig calls)
    Real w = sqrt((abs(z) + abs(z.re)) / 2);
    if (z.re >= 0) return {w, z.im / (2 * w)};
    Real v = abs(z.im) / (2 * w);
    return {v, z.im >= 0 ? w : -w};
}

// z^a with the principal branch.
inline Cplx pow(const Cplx& z, const Real& a) {
    Real m = pow(abs(z), a);
    Real th = arg(z) * a;
    return polar(m, th);
}

inline Cplx pow(const Cplx& z, int n) {
    if (n == 0) return Cplx(Real(1));
    Cplx b = n > 0 ? z : Cplx(Real(1)) / z;
    unsigned long k = n > 0 ? n : -static_cast<long>(n);
    Cplx acc(Real(1));
    while (k) {
        if (k & 1) acc *= b;
        b *= b;
        k >>= 1;
    }
    return acc;
}

inline Cplx sin(const Cplx& z) {
    return {sin(z.re) * cosh(z.im), cos(z.re) * sinh(z.im)};
}
inline Cplx cos(const Cplx& z) {
    return {cos(z.re) * cosh(z.im), -sin(z.re) * sinh(z.im)};
}

}  // namespace olp

#include "olp/surface.hpp"

#include "olp/oracle.hpp"

#include <algorithm>

namespace olp {

namespace {

Real power_int(const Real& s, int e) {
    Real base = e >= 0 ? s : 1 / s;
    int k = e >= 0 ? e : -e;
    Real p(1);
    while (k) {
        if (k & 1) p *= base;
        base *= base;
        k >>= 1;
    }
    return p;
}

}  // namespace

SurfaceData::SurfaceData(const EquilibriumData& eq, int quad_pts)
    : eq_(&eq), N_(eq.N), quad_pts_(quad_pts) {
    const SqrtR& sq = eq.sq;
    if (N_ > 0) {
        // alpha periods: A[k][l] = 2 int_{gap k+1} s^{N-1-l} / sqrtR ds
        alpha_.assign(N_, std::vector<Real>(N_));
        for (int k = 0; k < N_; ++k) {
            Real lo = sq.gap_lo(k + 1), hi = sq.gap_hi(k + 1);
            for (int l = 0; l < N_; ++l) {
                Cplx v = basis_integral_piece(l, lo, hi, true);
                if (abs(v.im) > Real("1e-20") * (1 + abs(v.re)))
                    throw SurfaceError("alpha period unexpectedly complex");
                alpha_[k][l] = 2 * v.re;
            }
        }
        // normalization coefficients: sum_l A[k][l] c[j][l] = delta_{kj}
        c_.assign(N_, std::vector<Real>(N_));
        for (int j = 0; j < N_; ++j) {
            std::vector<std::vector<Real>> a = alpha_;
            std::vector<Real> rhs(N_, Real(0));
            rhs[j] = 1;
            c_[j] = lu_solve(lu_factor(std::move(a)), std::move(rhs));
        }
        // beta periods: tau[j][k] = sum_{i<=k+1} 2 int_{band i} w_j^{plus}
        tau_.assign(N_, std::vector<Cplx>(N_));
        std::vector<std::vector<Cplx>> band_int(N_ + 1, std::vector<Cplx>(N_));
        for (int band = 1; band <= N_ + 1; ++band)
            for (int l = 0; l < N_; ++l)
                band_int[band - 1][l] =
                    basis_integral_piece(l, sq.band_lo(band), sq.band_hi(band), true);
        for (int j = 0; j < N_; ++j)
            for (int k = 0; k < N_; ++k) {
                Cplx total;
                for (int band = 1; band <= k + 1; ++band)
                    for (int l = 0; l < N_; ++l)
                        total += Cplx(c_[j][l]) * band_int[band - 1][l] * Cplx(Real(2));
                tau_[j][k] = total;
            }
        // fix the overall beta orientation so that -i tau is positive
        // definite (diagonal entries have positive imaginary part)
        if (tau_[0][0].im < 0)
            for (auto& row : tau_)
                for (auto& v : row) v = -v;
        // gap zeros by bisection on the sign change of q_poly
        gap_zeros_.resize(N_);
        for (int gap = 1; gap <= N_; ++gap) {
            Real lo = sq.gap_lo(gap), hi = sq.gap_hi(gap);
            Real flo = q_poly(lo), fhi = q_poly(hi);
            if (flo * fhi >= 0) throw SurfaceError("gap-zero sign change missing");
            for (int it = 0; it < static_cast<int>(current_precision_digits() * 3.4) + 8; ++it) {
                Real mid = (lo + hi) / 2;
                Real fm = q_poly(mid);
                if (fm == 0) {
                    lo = hi = mid;
                    break;
                }
                if (flo * fm < 0) {
                    hi = mid;
                    fhi = fm;
                } else {
                    lo = mid;
                    flo = fm;
                }
            }
            gap_zeros_[gap - 1] = (lo + hi) / 2;
        }
    }
    // Omega_j = 4 pi (mass of the bands right of gap j)
    omega_.resize(N_);
    for (int j = 1; j <= N_; ++j) {
        Real m(0);
        for (int band = j + 1; band <= N_ + 1; ++band) m += eq.band_masses[band - 1];
        omega_[j - 1] = 4 * pi() * m;
    }
    // u_+(infinity): real tail integral to the right of a_{N+1}
    u_inf_.assign(N_, Real(0));
    if (N_ > 0) {
        Real a = sq.endpoints().back();
        for (int l = 0; l < N_; ++l) {
            // [a, a+1] with the square-root singularity absorbed at a
            auto f1 = [&](const Real& w) {
                Real s = a + w * w;
                return power_int(s, N_ - 1 - l) / sq.plus(s).re * 2 * w;
            };
            Real tail = gl_integrate(f1, Real(0), Real(1), quad_pts_, 2);
            // [a+1, infinity) via t = 1/s
            auto f2 = [&](const Real& t) {
                Real s = 1 / t;
                return power_int(s, N_ - 1 - l) / sq.plus(s).re / (t * t);
            };
            tail += gl_integrate(f2, Real(0), 1 / (a + 1), quad_pts_, 4);
            for (int j = 0; j < N_; ++j) u_inf_[j] += c_[j][l] * tail;
        }
    }
    // d vector: sum_j (u_+(z_j) - u_+(a_j))
    d_.assign(N_, Cplx());
    for (int gap = 1; gap <= N_; ++gap) {
        auto uz = u_plus(gap_zeros_[gap - 1]);
        auto ua = u_plus(eq.sq.gap_lo(gap));
        for (int j = 0; j < N_; ++j) d_[j] += uz[j] - ua[j];
    }
}

Cplx SurfaceData::basis_integral_piece(int l, const Real& x1, const Real& x2,
                                       bool from_above) const {
    const SqrtR& sq = eq_->sq;
    Real m = (x1 + x2) / 2, c = (x2 - x1) / 2;
    bool sing_lo = false, sing_hi = false;
    for (const Real& r : sq.endpoints()) {
        if (r == x1) sing_lo = true;
        if (r == x2) sing_hi = true;
    }
    auto value = [&](const Real& s) -> Cplx {
        Cplx p = from_above ? sq.plus(s) : conj(sq.plus(s));
        return Cplx(power_int(s, N_ - 1 - l)) / p;
    };
    if (sing_lo && sing_hi) {
        auto f = [&](const Real& th) -> Cplx { return value(m + c * cos(th)) * Cplx(c * sin(th)); };
        return gl_integrate(f, Real(0), pi(), quad_pts_, 2);
    }
    if (sing_hi) {
        auto f = [&](const Real& w) -> Cplx { return value(x2 - w * w) * Cplx(2 * w); };
        return gl_integrate(f, Real(0), sqrt(x2 - x1), quad_pts_, 2);
    }
    if (sing_lo) {
        auto f = [&](const Real& w) -> Cplx { return value(x1 + w * w) * Cplx(2 * w); };
        return gl_integrate(f, Real(0), sqrt(x2 - x1), quad_pts_, 2);
    }
    auto f = [&](const Real& s) -> Cplx { return value(s); };
    return gl_integrate(f, x1, x2, quad_pts_, 2);
}

std::vector<Cplx> SurfaceData::u_between(const Real& x_lo, const Real& x_hi) const {
    // int_{x_lo}^{x_hi} of each basis power, split at the configuration
    // endpoints, then mapped through the normalization matrix
    const SqrtR& sq = eq_->sq;
    std::vector<Real> cuts = {x_lo};
    for (const Real& r : sq.endpoints())
        if (r > x_lo && r < x_hi) cuts.push_back(r);
    cuts.push_back(x_hi);
    std::vector<Cplx> basis(N_);
    for (int l = 0; l < N_; ++l) {
        Cplx total;
        for (size_t i = 0; i + 1 < cuts.size(); ++i)
            total += basis_integral_piece(l, cuts[i], cuts[i + 1], true);
        basis[l] = total;
    }
    std::vector<Cplx> out(N_);
    for (int j = 0; j < N_; ++j) {
        Cplx acc;
        for (int l = 0; l < N_; ++l) acc += Cplx(c_[j][l]) * basis[l];
        out[j] = acc;
    }
    return out;
}

std::vector<Cplx> SurfaceData::u_plus(const Real& x) const {
    Real a = eq_->sq.endpoints().back();
    if (x == a) return std::vector<Cplx>(N_, Cplx());
    if (x > a) return u_between(a, x);
    auto v = u_between(x, a);
    for (auto& t : v) t = -t;
    return v;
}

std::vector<Cplx> SurfaceData::u(const Cplx& z) const {
    if (z.im == 0) return u_plus(z.re);
    if (z.im < 0) {
        // upper-sheet value from below: the conjugate path runs on the same
        // sheet with the branch negated
        auto v = u(conj(z));
        for (auto& t : v) t = -conj(t);
        return v;
    }
    const SqrtR& sq = eq_->sq;
    Real a = sq.endpoints().back();
    // vertical lift with the square-root singularity at a absorbed, then a
    // straight segment
    Real lift = std::min(Real(1), abs(z - Cplx(a)) / 2);
    std::vector<Cplx> basis(N_);
    for (int l = 0; l < N_; ++l) {
        auto f1 = [&](const Real& w) -> Cplx {
            Cplx s = Cplx(a) + iu() * Cplx(w * w);
            return pow(s, N_ - 1 - l) / sq.value(s) * Cplx(2 * w) * iu();
        };
        Cplx leg1 = gl_integrate(f1, Real(0), sqrt(lift), quad_pts_, 2);
        Cplx start(a, lift);
        auto f2 = [&](const Cplx& s) -> Cplx { return pow(s, N_ - 1 - l) / sq.value(s); };
        Cplx leg2 = gl_integrate_segment(f2, start, z, quad_pts_, 3);
        basis[l] = leg1 + leg2;
    }
    std::vector<Cplx> out(N_);
    for (int j = 0; j < N_; ++j) {
        Cplx acc;
        for (int l = 0; l < N_; ++l) acc += Cplx(c_[j][l]) * basis[l];
        out[j] = acc;
    }
    return out;
}

Cplx SurfaceData::gamma(const Cplx& z, int side) const {
    const SqrtR& sq = eq_->sq;
    const int n1 = N_ + 1;
    if (z.im != 0) {
        Cplx acc(Real(1));
        acc *= pow((z - Cplx(sq.b(0))) / (z - Cplx(sq.a(n1))), Real(1) / 4);
        for (int k = 1; k <= N_; ++k)
            acc *= pow((z - Cplx(sq.b(k))) / (z - Cplx(sq.a(k))), Real(1) / 4);
        if (z.im < 0) acc *= Cplx(Real(0), Real(-1));
        return acc;
    }
    // boundary value at real x. A negative ratio (x-b)/(x-a) is approached
    // from Im > 0 when b > a (the gap factors) and from Im < 0 when b < a
    // (the outer b_0/a_{N+1} factor), so the quarter-root phases differ.
    Real x = z.re;
    Real mag(1);
    int phase_quarters = 0;
    auto factor = [&](const Real& bb, const Real& aa) {
        Real r = (x - bb) / (x - aa);
        if (r < 0) phase_quarters += bb > aa ? +1 : -1;
        mag *= pow(abs(r), Real("0.25"));
    };
    factor(sq.b(0), sq.a(n1));
    for (int k = 1; k <= N_; ++k) factor(sq.b(k), sq.a(k));
    Real phase = side * pi() / 4 * phase_quarters;
    Cplx v = polar(mag, phase);
    if (side < 0) v *= Cplx(Real(0), Real(-1));
    return v;
}

Real SurfaceData::q_poly(const Real& x) const {
    const SqrtR& sq = eq_->sq;
    Real pb(1), pa(1);
    for (int k = 0; k <= N_; ++k) pb *= x - sq.b(k);
    for (int j = 1; j <= N_ + 1; ++j) pa *= x - sq.a(j);
    return pb - pa;
}

Real SurfaceData::gerschgorin_bound() const {
    const SqrtR& sq = eq_->sq;
    auto mul_linear = [](std::vector<Real> p, const Real& root) {
        std::vector<Real> q(p.size() + 1, Real(0));
        for (size_t i = 0; i < p.size(); ++i) {
            q[i + 1] += p[i];
            q[i] -= root * p[i];
        }
        return q;
    };
    std::vector<Real> pb = {Real(1)}, pa = {Real(1)};
    for (int k = 0; k <= N_; ++k) pb = mul_linear(pb, sq.b(k));
    for (int j = 1; j <= N_ + 1; ++j) pa = mul_linear(pa, sq.a(j));
    Real total(0), lead(0);
    for (int i = 0; i <= N_; ++i) {
        Real q = pb[i] - pa[i];
        total += abs(q);
        if (i == N_) lead = abs(q);
    }
    return total / lead;
}

Cplx SurfaceData::beta_period_rectangle(int j, int k) const {
    const SqrtR& sq = eq_->sq;
    // counter-clockwise rectangle enclosing bands 1..k+1, crossing the real
    // axis in the outer region left of b_0 and inside gap k+1
    Real span = sq.endpoints().back() - sq.endpoints().front();
    Real xl = sq.endpoints().front() - span / 3;
    Real xr = (sq.gap_lo(k + 1) + sq.gap_hi(k + 1)) / 2;
    Real ht = span / 2;
    auto wj = [&](const Cplx& s) -> Cplx {
        Cplx acc;
        for (int l = 0; l < N_; ++l) acc += Cplx(c_[j][l]) * pow(s, N_ - 1 - l);
        return acc / sq.value(s);
    };
    Cplx c1(xl, -ht), c2(xr, -ht), c3(xr, ht), c4(xl, ht);
    Cplx total = gl_integrate_segment(wj, c1, c2, quad_pts_, 6) +
                 gl_integrate_segment(wj, c2, c3, quad_pts_, 6) +
                 gl_integrate_segment(wj, c3, c4, quad_pts_, 6) +
                 gl_integrate_segment(wj, c4, c1, quad_pts_, 6);
    return -total;  // the traversal runs on the second sheet in C_+
}

Real SurfaceData::lattice_residual(const std::vector<Cplx>& v) const {
    if (N_ == 0) return Real(0);
    std::vector<std::vector<Real>> im(N_, std::vector<Real>(N_));
    std::vector<Real> rhs(N_);
    for (int i = 0; i < N_; ++i) {
        rhs[i] = v[i].im;
        for (int j2 = 0; j2 < N_; ++j2) im[i][j2] = tau_[i][j2].im;
    }
    auto mvec = lu_solve(lu_factor(std::move(im)), std::move(rhs));
    Real worst(0);
    for (int i = 0; i < N_; ++i) {
        Real n = v[i].re;
        for (int j2 = 0; j2 < N_; ++j2) n -= tau_[i][j2].re * mvec[j2];
        worst = std::max(worst, abs(n - round(n)));
        worst = std::max(worst, abs(mvec[i] - round(mvec[i])));
    }
    return worst;
}

}  // namespace olp

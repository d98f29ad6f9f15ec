#include "olp/equilibrium.hpp"

#include <algorithm>
#include <cmath>

#include "olp/oracle.hpp"

namespace olp {

// ---------------------------------------------------------------- SqrtR ----

SqrtR::SqrtR(std::vector<Real> endpoints) : e_(std::move(endpoints)) {
    if (e_.size() < 2 || e_.size() % 2 != 0)
        throw EquilibriumError("endpoints: need an even count 2(N+1) >= 2");
    N_ = static_cast<int>(e_.size()) / 2 - 1;
    for (size_t i = 0; i + 1 < e_.size(); ++i)
        if (!(e_[i] < e_[i + 1])) throw EquilibriumError("endpoints must be strictly increasing");
    for (int j = 1; j <= N_ + 1; ++j)
        if (band_lo(j) <= 0 && band_hi(j) >= 0)
            throw EquilibriumError("a band contains the origin");
}

Cplx SqrtR::value(const Cplx& z) const {
    Cplx acc(Real(1));
    for (const Real& r : e_) acc *= sqrt(z - Cplx(r));
    return acc;
}

Cplx SqrtR::plus(const Real& x) const {
    // principal sqrt of (x - r): |x-r|^{1/2} for x >= r, i|x-r|^{1/2} for
    // x < r (limit from the upper half-plane)
    Real mag(1);
    int quarter = 0;  // powers of i
    for (const Real& r : e_) {
        mag *= sqrt(abs(x - r));
        if (x < r) ++quarter;
    }
    switch (quarter % 4) {
        case 0: return {mag, Real(0)};
        case 1: return {Real(0), mag};
        case 2: return {-mag, Real(0)};
        default: return {Real(0), -mag};
    }
}

Real SqrtR::abs_sqrt(const Real& x) const {
    Real mag(1);
    for (const Real& r : e_) mag *= sqrt(abs(x - r));
    return mag;
}

int SqrtR::real_sign(const Real& x) const {
    int cnt = 0;
    for (const Real& r : e_)
        if (x < r) ++cnt;
    if (cnt % 2 != 0) throw EquilibriumError("real_sign: x lies inside a band");
    return (cnt % 4 == 0) ? 1 : -1;
}

int SqrtR::band_of(const Real& x) const {
    for (int j = 1; j <= N_ + 1; ++j)
        if (x > band_lo(j) && x < band_hi(j)) return j;
    return 0;
}

int SqrtR::gap_of(const Real& x) const {
    for (int j = 1; j <= N_; ++j)
        if (x > gap_lo(j) && x < gap_hi(j)) return j;
    return 0;
}

// ------------------------------------------------------------- HContour ----

HContour::HContour(const ExternalField& field, SqrtR sq) : field_(&field), sq_(std::move(sq)) {
    Real lo = std::min(abs(sq_.endpoints().front()), abs(sq_.endpoints().back()));
    for (const Real& r : sq_.endpoints()) lo = std::min(lo, abs(r));
    Real hi = std::max(abs(sq_.endpoints().front()), abs(sq_.endpoints().back()));
    r_in_ = lo / 2;
    r_out_ = 2 * hi;
    cached_pts_ = 64;
}

const HContour::CircleCache& HContour::circle_cache(bool outer, int npts) const {
    auto& store = outer ? outer_ : inner_;
    for (const auto& c : store)
        if (c.npts == npts) return c;
    CircleCache cache;
    cache.npts = npts;
    cache.s.reserve(npts);
    cache.k.reserve(npts);
    Real rho = outer ? r_out_ : r_in_;
    Real dth = 2 * pi() / npts;
    for (int k = 0; k < npts; ++k) {
        Cplx s = polar(rho, k * dth);
        Cplx g = Cplx(Real(0), 1 / pi()) / s +
                 Cplx(Real(0), Real(1) / (2 * pi())) * field_->derivative(s);
        cache.s.push_back(s);
        cache.k.push_back(g / sq_.value(s) * iu() * s * Cplx(dth));
    }
    store.push_back(std::move(cache));
    return store.back();
}

Cplx HContour::circle_integral(bool outer, const Cplx& z, int deriv, int npts) const {
    const CircleCache& cache = circle_cache(outer, npts);
    Cplx total;
    for (int k = 0; k < npts; ++k) {
        Cplx d = cache.s[k] - z;
        Cplx dpow = d;
        for (int i = 0; i < deriv; ++i) dpow *= d;
        total += cache.k[k] / dpow;
    }
    Real fact(1);
    for (int i = 2; i <= deriv; ++i) fact *= i;
    return total * Cplx(fact);
}

Cplx HContour::eval_c(const Cplx& z, int deriv) const {
    Real az = abs(z);
    if (az <= r_in_ || az >= r_out_)
        throw EquilibriumError("h evaluation outside the contour annulus");
    Real tol = pow(Real(10), -static_cast<int>(current_precision_digits() * 2) / 3);
    int npts = cached_pts_;
    Cplx prev;
    bool have_prev = false;
    for (; npts <= 1 << 14; npts *= 2) {
        Cplx outer = circle_integral(true, z, deriv, npts);
        Cplx inner = circle_integral(false, z, deriv, npts);
        Cplx v = (inner - outer) * Cplx(Real(1) / 2);  // outer traversed clockwise
        if (have_prev && abs(v - prev) <= tol * (abs(v) + 1)) {
            cached_pts_ = std::max(64, npts / 2);
            return v;
        }
        prev = v;
        have_prev = true;
    }
    throw EquilibriumError("h contour quadrature did not converge");
}

Real HContour::eval(const Real& x, int deriv) const {
    Cplx v = eval_c(Cplx(x), deriv);
    return v.re;
}

// -------------------------------------------------------- h closed form ----

Real LaurentCoeffs::eval(const Real& x) const {
    Real acc(0);
    Real xinv = 1 / x;
    for (size_t i = 0; i < c.size(); ++i) {
        int k = lo + static_cast<int>(i);
        Real p(1);
        Real base = k >= 0 ? x : xinv;
        for (int q = 0; q < (k >= 0 ? k : -k); ++q) p *= base;
        acc += c[i] * p;
    }
    return acc;
}

Cplx LaurentCoeffs::eval(const Cplx& z) const {
    Cplx acc;
    for (size_t i = 0; i < c.size(); ++i)
        acc += Cplx(c[i]) * pow(z, lo + static_cast<int>(i));
    return acc;
}

namespace {

// series of prod_i (1 - e_i x)^{-1/2} up to length L (x stands for 1/s at
// infinity or s/e_i-style ratios at the origin; the caller feeds factors)
std::vector<Real> binomial_product_series(const std::vector<Real>& factors, int L) {
    std::vector<Real> acc(L, Real(0));
    acc[0] = 1;
    std::vector<Real> one(L, Real(0));
    for (const Real& f : factors) {
        // (1 - f x)^{-1/2} = sum_j binom(-1/2, j) (-f)^j x^j ; recurrence
        // t_{j} = t_{j-1} * f * (2j-1) / (2j)
        std::vector<Real> fac(L, Real(0));
        fac[0] = 1;
        for (int j = 1; j < L; ++j) fac[j] = fac[j - 1] * f * (2 * j - 1) / (2 * j);
        std::vector<Real> next(L, Real(0));
        for (int i = 0; i < L; ++i) {
            if (acc[i] == 0) continue;
            for (int j = 0; j + i < L; ++j) next[i + j] += acc[i] * fac[j];
        }
        acc = std::move(next);
    }
    return acc;
}

}  // namespace

LaurentCoeffs h_closed_form(const ExternalField& field, const SqrtR& sq) {
    const int N = sq.N();
    const int m1 = field.m1(), m2 = field.m2();
    // G(s) = i/(pi s) + i V~'(s)/(2 pi) = i * sum_k gr_k s^k
    std::map<int, Real> gr;
    gr[-1] = 1 / pi();
    for (const auto& [k, rho] : field.coefficients()) {
        if (k == 0) continue;
        gr[k - 1] += field.z_o() * k * rho / (2 * pi());
    }
    // 1/sqrtR at infinity: s^{-(N+1)} sum_j u_j s^{-j}
    int Lu = std::max(2 * m2 - N, 2) + 2;
    std::vector<Real> u = binomial_product_series(sq.endpoints(), Lu);
    // 1/sqrtR at the origin: sign * prod |e|^{-1/2} * sum_j v_j s^j with
    // factors 1/e_i
    int Lv = 2 * m1 + 3;
    std::vector<Real> inv_e;
    Real p0(1);
    for (const Real& r : sq.endpoints()) {
        inv_e.push_back(1 / r);
        p0 *= sqrt(abs(r));
    }
    std::vector<Real> v = binomial_product_series(inv_e, Lv);
    int sign0 = sq.real_sign(Real(0));
    Real v0 = Real(sign0) / p0;

    int lo = -2 * m1 - 1;
    int hi = std::max(2 * m2 - N - 2, -1);
    LaurentCoeffs h;
    h.lo = lo;
    h.c.assign(hi - lo + 1, Real(0));
    // nonnegative exponents: coefficient of s^m in G/sqrtR at infinity
    for (int m = 0; m <= hi; ++m) {
        Real f(0);
        for (const auto& [k, g] : gr) {
            int j = k - (N + 1) - m;
            if (j >= 0 && j < Lu) f += g * u[j];
        }
        h.c[m - lo] = pi() * f;
    }
    // negative exponents: coefficient of s^{-1-m} in G/sqrtR at the origin
    for (int m = 0; m <= 2 * m1; ++m) {
        Real f(0);
        for (const auto& [k, g] : gr) {
            int j = -1 - m - k;
            if (j >= 0 && j < Lv) f += g * v[j] * v0;
        }
        h.c[-1 - m - lo] = pi() * f;
    }
    return h;
}

// ------------------------------------------------------------ BandTable ----

namespace {

Real cheb_t(int k, const Real& t) {
    if (k == 0) return Real(1);
    Real t0(1), t1 = t;
    for (int i = 2; i <= k; ++i) {
        Real t2 = 2 * t * t1 - t0;
        t0 = t1;
        t1 = t2;
    }
    return t1;
}

// F_k(x) = int_{-1}^{1} ln|x-t| U_k(t) sqrt(1-t^2) dt for |x| <= 1
Real log_kernel_inside(int k, const Real& x) {
    if (k == 0) return pi() * x * x / 2 - pi() / 4 - pi() * log(Real(2)) / 2;
    return pi() / 2 * (cheb_t(k + 2, x) / (k + 2) - cheb_t(k, x) / k);
}

Cplx cheb_t_c(int k, const Cplx& t) {
    if (k == 0) return Cplx(Real(1));
    Cplx t0(Real(1)), t1 = t;
    for (int i = 2; i <= k; ++i) {
        Cplx t2 = Cplx(Real(2)) * t * t1 - t0;
        t0 = t1;
        t1 = t2;
    }
    return t1;
}

Cplx cheb_u_c(int k, const Cplx& t) {
    if (k < 0) return Cplx();
    Cplx u0(Real(1)), u1 = Cplx(Real(2)) * t;
    if (k == 0) return u0;
    for (int i = 2; i <= k; ++i) {
        Cplx u2 = Cplx(Real(2)) * t * u1 - u0;
        u0 = u1;
        u1 = u2;
    }
    return u1;
}

// sqrt(1 - t^2) with the cut on |t| >= 1 real (positive on (-1,1))
Cplx root_one_minus_sq(const Cplx& t) { return sqrt(Cplx(Real(1)) - t * t); }

// arccos with the same branch (real on (-1,1), continued both ways)
Cplx arccos_c(const Cplx& t) {
    Cplx w = t + iu() * root_one_minus_sq(t);
    return Cplx(Real(0), Real(-1)) * log(w);
}

// G_k(t) = int_t^1 U_k(s) sqrt(1-s^2) ds, analytic across (-1,1)
Cplx mass_kernel_c(int k, const Cplx& t) {
    Cplx root = root_one_minus_sq(t);
    if (k == 0) return arccos_c(t) * Cplx(Real(1) / 2) - t * root * Cplx(Real(1) / 2);
    return (root * cheb_u_c(k - 1, t) / Cplx(Real(k)) -
            root * cheb_u_c(k + 1, t) / Cplx(Real(k + 2))) * Cplx(Real(1) / 2);
}

// W_k(t) = int ln(t - s) U_k(s) sqrt(1-s^2) ds for Im t >= 0 (continuation of
// F_k + i pi G_k from the upper side of the band)
Cplx log_kernel_c_upper(int k, const Cplx& t) {
    Cplx f;
    if (k == 0) {
        f = Cplx(pi() / 2) * t * t - Cplx(pi() / 4 + pi() * log(Real(2)) / 2);
    } else {
        f = Cplx(pi() / 2) * (cheb_t_c(k + 2, t) / Cplx(Real(k + 2)) -
                              cheb_t_c(k, t) / Cplx(Real(k)));
    }
    return f + iu() * Cplx(pi()) * mass_kernel_c(k, t);
}

}  // namespace

Real BandTable::psi_at(const Real& x) const {
    Real t = (x - m) / c;
    if (abs(t) > 1) return Real(0);
    // Q via Clenshaw in the U basis: S = b_0 since U_1 = 2t U_0
    Real b1(0), b2(0);
    for (size_t k = ucoef.size(); k-- > 0;) {
        Real b = ucoef[k] + 2 * t * b1 - b2;
        b2 = b1;
        b1 = b;
    }
    Real q = b1;
    Real s2 = 1 - t * t;
    return c * sqrt(s2 < 0 ? Real(0) : s2) * q;
}

Real BandTable::mass_right_of(const Real& x) const {
    Real t = (x - m) / c;
    if (t >= 1) return Real(0);
    if (t <= -1) return mass;
    Real th = acos(t);
    Real total(0);
    for (size_t k = 0; k < ucoef.size(); ++k) {
        Real g;
        if (k == 0) g = th / 2 - sin(2 * th) / 4;
        else g = (sin(k * th) / static_cast<int>(k) - sin((k + 2) * th) / static_cast<int>(k + 2)) / 2;
        total += ucoef[k] * g;
    }
    return c * c * total;
}

Real BandTable::log_potential(const Real& x) const {
    Real t = (x - m) / c;
    if (abs(t) <= 1) {
        Real total(0);
        for (size_t k = 0; k < ucoef.size(); ++k)
            total += ucoef[k] * log_kernel_inside(static_cast<int>(k), t);
        total += pi() / 2 * ucoef[0] * log(c);
        return c * c * total;
    }
    Real total(0);
    for (size_t i = 0; i < nodes.size(); ++i) total += wts[i] * log(abs(x - nodes[i]));
    return total;
}

Cplx BandTable::log_potential_c(const Cplx& z) const {
    Cplx t = (z - Cplx(m)) / Cplx(c);
    // the continued Chebyshev form is accurate near the band; node sums win
    // far away where the series coefficients no longer dominate T_k growth
    if (abs(t.im) < 2 && abs(t.re) < 3) {
        bool lower = t.im < 0 || (t.im == 0 && false);
        Cplx tc = lower ? conj(t) : t;
        Cplx total;
        for (size_t k = 0; k < ucoef.size(); ++k)
            total += Cplx(ucoef[k]) * log_kernel_c_upper(static_cast<int>(k), tc);
        if (lower) total = conj(total);
        total += Cplx(pi() / 2 * ucoef[0] * log(c));
        return total * Cplx(c * c);
    }
    Cplx total;
    for (size_t i = 0; i < nodes.size(); ++i) total += Cplx(wts[i]) * log(z - Cplx(nodes[i]));
    return total;
}

Cplx BandTable::mass_right_c(const Cplx& z) const {
    Cplx t = (z - Cplx(m)) / Cplx(c);
    Cplx total;
    for (size_t k = 0; k < ucoef.size(); ++k)
        total += Cplx(ucoef[k]) * mass_kernel_c(static_cast<int>(k), t);
    return total * Cplx(c * c);
}

// ------------------------------------------------------ moment residual ----

std::vector<BandTable> make_band_tables(const ExternalField& field, const SqrtR& sq,
                                        const HContour& h, int band_pts) {
    (void)field;
    std::vector<BandTable> out;
    const int M = band_pts;
    for (int band = 1; band <= sq.N() + 1; ++band) {
        BandTable tab;
        Real lo = sq.band_lo(band), hi = sq.band_hi(band);
        tab.m = (lo + hi) / 2;
        tab.c = (hi - lo) / 2;
        int sigma = sq.band_sigma(band);
        std::vector<Real> qv(M), theta(M);
        tab.nodes.resize(M);
        tab.psi.resize(M);
        tab.wts.resize(M);
        for (int i = 1; i <= M; ++i) {
            Real th = pi() * i / (M + 1);
            theta[i - 1] = th;
            Real s = tab.m + tab.c * cos(th);
            tab.nodes[i - 1] = s;
            Real rest(1);
            for (const Real& r : sq.endpoints())
                if (r != lo && r != hi) rest *= sqrt(abs(s - r));
            Real q = sigma * rest * h.eval(s) / (2 * pi());
            qv[i - 1] = q;
            tab.psi[i - 1] = tab.c * sin(th) * q;
            tab.wts[i - 1] = tab.c * tab.c * pi() / (M + 1) * sin(th) * sin(th) * q;
        }
        tab.ucoef.assign(M, Real(0));
        for (int k = 0; k < M; ++k) {
            Real acc(0);
            for (int i = 0; i < M; ++i) acc += sin(theta[i]) * sin((k + 1) * theta[i]) * qv[i];
            tab.ucoef[k] = acc * 2 / (M + 1);
        }
        tab.mass = 0;
        for (const Real& w : tab.wts) tab.mass += w;
        out.push_back(std::move(tab));
    }
    return out;
}

std::vector<Real> moment_conditions_residual(const ExternalField& field,
                                             const std::vector<Real>& endpoints, int quad_pts) {
    SqrtR sq(endpoints);
    const int N = sq.N();
    std::vector<Real> T(N + 2, Real(0));
    for (int band = 1; band <= N + 1; ++band) {
        auto rule = chebyshev_rule(sq.band_lo(band), sq.band_hi(band), quad_pts);
        int sigma = sq.band_sigma(band);
        for (const Real& s : rule.s) {
            // |R|^{1/2} with the band's own sqrt((s-lo)(hi-s)) removed
            Real rest(1);
            for (const Real& r : sq.endpoints())
                if (r != sq.band_lo(band) && r != sq.band_hi(band)) rest *= sqrt(abs(s - r));
            Real f = (2 / s + field.derivative(s)) / rest;
            Real sp(1);
            for (int j = 0; j <= N + 1; ++j) {
                T[j] += -sigma * f * sp / quad_pts;
                sp *= s;
            }
        }
    }
    std::vector<Real> out(T.begin(), T.end());
    out[N + 1] += 4;
    if (N > 0) {
        HContour h(field, sq);
        auto tabs = make_band_tables(field, sq, h, quad_pts / 2);
        auto effective = [&](const Real& x) {
            Real lp(0);
            for (const auto& t : tabs) lp += t.log_potential(x);
            return 4 * lp - 2 * log(abs(x)) - field.eval(x);
        };
        for (int gap = 1; gap <= N; ++gap)
            out.push_back((effective(sq.gap_hi(gap)) - effective(sq.gap_lo(gap))) / (4 * pi()));
    }
    return out;
}

namespace {

// int_gap_j sqrtR(s)/(s - e) ds with e an endpoint (index-aware so the
// removable singularity at the gap's own ends cancels exactly)
Real gap_interval_integral(const SqrtR& sq, const ExternalField&, int gap, size_t e_index) {
    const std::vector<Real>& e = sq.endpoints();
    Real lo = sq.gap_lo(gap), hi = sq.gap_hi(gap);
    Real mid = (lo + hi) / 2, half = (hi - lo) / 2;
    int sign = ((sq.N() + 1 - gap) % 2 == 0) ? 1 : -1;
    size_t lo_idx = 2 * gap - 1, hi_idx = 2 * gap;
    auto f = [&](const Real& th) {
        Real s = mid + half * cos(th);
        Real rest(1);
        for (size_t i = 0; i < e.size(); ++i)
            if (i != lo_idx && i != hi_idx) rest *= sqrt(abs(s - e[i]));
        Real sn = sin(th);
        Real base = sign * half * rest;
        if (e_index == lo_idx) return base * (1 - cos(th));
        if (e_index == hi_idx) return base * (-(1 + cos(th)));
        return base * half * sn * sn / (s - e[e_index]);
    };
    return gl_integrate(f, Real(0), pi(), 64);
}

bool endpoints_valid(const std::vector<Real>& e) {
    for (size_t i = 0; i + 1 < e.size(); ++i)
        if (!(e[i] < e[i + 1])) return false;
    for (size_t i = 0; i + 1 < e.size(); i += 2)
        if (e[i] <= 0 && e[i + 1] >= 0) return false;  // 0 inside a band
    for (const Real& x : e)
        if (x == 0) return false;
    return true;
}

Real max_norm(const std::vector<Real>& v) {
    Real m(0);
    for (const Real& x : v) m = std::max(m, abs(x));
    return m;
}

}  // namespace

std::vector<Real> solve_endpoints(const ExternalField& field, int N, std::vector<Real> guess,
                                  const SolveOptions& opt) {
    if (static_cast<int>(guess.size()) != 2 * (N + 1))
        throw EquilibriumError("solve_endpoints: guess has wrong length");
    if (!endpoints_valid(guess))
        throw EquilibriumError("solve_endpoints: guess violates ordering constraints");
    const int dim = 2 * (N + 1);
    std::vector<Real> F = moment_conditions_residual(field, guess, opt.quad_pts);
    Real fnorm = max_norm(F);
    for (int iter = 0; iter < opt.max_iter; ++iter) {
        if (fnorm <= opt.tol) return guess;
        // Jacobian
        std::vector<std::vector<Real>> J(dim, std::vector<Real>(dim));
        if (opt.analytic_jacobian) {
            SqrtR sq(guess);
            HContour h(field, sq);
            // T_j at the current point (without the +4 shift)
            std::vector<Real> T(N + 2);
            for (int j = 0; j <= N + 1; ++j) T[j] = F[j];
            T[N + 1] -= 4;
            for (int col = 0; col < dim; ++col) {
                Real he = h.eval(guess[col]);
                Real dT0 = -he;
                // dT_j = e^j dT0 + (1/2) sum_{i=0}^{j-1} e^{j-1-i} T_i
                Real ep(1);
                std::vector<Real> epow(N + 2);
                for (int j = 0; j <= N + 1; ++j) {
                    epow[j] = ep;
                    ep *= guess[col];
                }
                for (int j = 0; j <= N + 1; ++j) {
                    Real v = epow[j] * dT0;
                    for (int i = 0; i < j; ++i) v += epow[j - 1 - i] * T[i] / 2;
                    J[j][col] = v;
                }
                for (int gap = 1; gap <= N; ++gap) {
                    Real I = gap_interval_integral(sq, field, gap, static_cast<size_t>(col));
                    J[N + 1 + gap][col] = he * I / (4 * pi());
                }
            }
        } else {
            for (int col = 0; col < dim; ++col) {
                Real step = opt.fd_step * (1 + abs(guess[col]));
                std::vector<Real> up = guess, dn = guess;
                up[col] += step;
                dn[col] -= step;
                auto Fu = moment_conditions_residual(field, up, opt.quad_pts);
                auto Fd = moment_conditions_residual(field, dn, opt.quad_pts);
                for (int r = 0; r < dim; ++r) J[r][col] = (Fu[r] - Fd[r]) / (2 * step);
            }
        }
        std::vector<Real> rhs(dim);
        for (int r = 0; r < dim; ++r) rhs[r] = -F[r];
        std::vector<Real> step;
        try {
            step = lu_solve(lu_factor(J), rhs);
        } catch (const std::exception&) {
            throw EquilibriumError("newton: singular Jacobian; try another N or guess");
        }
        // backtracking: keep ordering and decrease the residual norm
        Real lambda(1);
        bool accepted = false;
        for (int bt = 0; bt < 40; ++bt) {
            std::vector<Real> trial = guess;
            for (int i = 0; i < dim; ++i) trial[i] += lambda * step[i];
            if (endpoints_valid(trial)) {
                std::vector<Real> Ft;
                try {
                    Ft = moment_conditions_residual(field, trial, opt.quad_pts);
                } catch (const std::exception&) {
                    lambda /= 2;
                    continue;
                }
                Real fn = max_norm(Ft);
                if (fn < fnorm * (1 - lambda / 4) || fn <= opt.tol) {
                    guess = std::move(trial);
                    F = std::move(Ft);
                    fnorm = fn;
                    accepted = true;
                    break;
                }
            }
            lambda /= 2;
        }
        if (!accepted)
            throw EquilibriumError("newton: no acceptable damped step; try another N or guess");
    }
    throw EquilibriumError("newton: no convergence in max_iter iterations (residual " +
                           decimal_from_real(fnorm) + ")");
}

// ------------------------------------------------------------- assembly ----

EquilibriumData build_equilibrium(const ExternalField& field, std::vector<Real> endpoints,
                                  int band_pts) {
    EquilibriumData eq;
    eq.sq = SqrtR(endpoints);
    eq.N = eq.sq.N();
    eq.endpoints = std::move(endpoints);
    eq.h = std::make_shared<HContour>(field, eq.sq);
    auto res = moment_conditions_residual(field, eq.endpoints);
    eq.residual_norm = max_norm(res);

    eq.bands = make_band_tables(field, eq.sq, *eq.h, band_pts);
    for (const auto& tab : eq.bands) eq.band_masses.push_back(tab.mass);
    // Q_e = int ln|s| dmu + i pi (mass on the negative axis)
    Real qre(0), mneg(0);
    for (const auto& tab : eq.bands) {
        qre += tab.log_potential(Real(0));
        if (tab.m < 0) mneg += tab.mass;
    }
    eq.Q_re = qre;
    eq.Q_im = pi() * mneg;
    // variational constant from the equality at the midpoint of the last band
    Real x0 = eq.bands.back().m;
    Real logpot(0);
    for (const auto& tab : eq.bands) logpot += tab.log_potential(x0);
    eq.ell = 4 * logpot - 2 * log(abs(x0)) - field.eval(x0);
    return eq;
}

Real EquilibriumData::total_mass() const {
    Real m(0);
    for (const auto& t : bands) m += t.mass;
    return m;
}

Real EquilibriumData::density(const Real& x) const {
    int b = sq.band_of(x);
    if (b == 0) return Real(0);
    return bands[b - 1].psi_at(x);
}

Real EquilibriumData::mass_right_of(const Real& x) const {
    Real m(0);
    for (const auto& t : bands) {
        if (x <= t.m - t.c) m += t.mass;
        else m += t.mass_right_of(x);
    }
    return m;
}

Real EquilibriumData::log_potential(const Real& x) const {
    Real v(0);
    for (const auto& t : bands) v += t.log_potential(x);
    return v;
}

Real EquilibriumData::variational_value(const ExternalField& field, const Real& x) const {
    return 4 * log_potential(x) - 2 * log(abs(x)) - field.eval(x) - ell;
}

Cplx EquilibriumData::g(const ExternalField& field, const Cplx& z) const {
    (void)field;
    Cplx total;
    for (const auto& t : bands) total += t.log_potential_c(z) * Cplx(Real(2));
    total -= log(z);
    total -= Cplx(Q_re, Q_im);
    return total;
}

Cplx EquilibriumData::g_plus(const ExternalField& field, const Real& x) const {
    (void)field;
    Cplx v(2 * log_potential(x), 2 * pi() * mass_right_of(x));
    v -= Cplx(Q_re, Q_im);
    v -= Cplx(log(abs(x)), x < 0 ? pi() : Real(0));
    return v;
}

Cplx EquilibriumData::g_minus(const ExternalField& field, const Real& x) const {
    (void)field;
    Cplx v(2 * log_potential(x), -2 * pi() * mass_right_of(x));
    v -= Cplx(Q_re, Q_im);
    v -= Cplx(log(abs(x)), x < 0 ? -pi() : Real(0));
    return v;
}

// --------------------------------------------------------------- detect ----

namespace {

Real field_min_location(const ExternalField& field, int side) {
    // coarse log-grid scan followed by golden-section refinement
    Real best_x = Real(side), best_v = field.eval(Real(side));
    for (int i = -60; i <= 60; ++i) {
        Real x = side * exp(Real(i) / 10);
        Real v = field.eval(x);
        if (v < best_v) {
            best_v = v;
            best_x = x;
        }
    }
    Real lo = best_x / Real("1.3"), hi = best_x * Real("1.3");
    if (side < 0) std::swap(lo, hi);
    Real gr = (sqrt(Real(5)) - 1) / 2;
    for (int it = 0; it < 80; ++it) {
        Real c1 = hi - gr * (hi - lo), c2 = lo + gr * (hi - lo);
        if (field.eval(c1) < field.eval(c2)) hi = c2;
        else lo = c1;
    }
    return (lo + hi) / 2;
}

}  // namespace

std::vector<Real> symmetric_two_band_guess(const ExternalField& field) {
    Real x = field_min_location(field, +1);
    Real lo = x / Real("1.8"), hi = x * Real("1.8");
    return {-hi, -lo, lo, hi};
}

std::vector<Real> single_band_guess(const ExternalField& field, int side) {
    Real x = field_min_location(field, side);
    // local quadratic ansatz: half-width 2/sqrt(V~'') at the well bottom,
    // clamped to keep the band on one side of the origin
    Real dd("1e-8");
    Real vpp = (field.derivative(x + dd) - field.derivative(x - dd)) / (2 * dd);
    Real halfwidth = vpp > 0 ? 2 / sqrt(vpp) : abs(x) / 2;
    halfwidth = std::min(halfwidth, abs(x) * Real("0.8"));
    Real lo = x - halfwidth, hi = x + halfwidth;
    if (side < 0) std::swap(lo, hi);
    return {lo, hi};
}

EquilibriumData detect_N(const ExternalField& field, int N_max, const SolveOptions& opt) {
    std::vector<std::pair<int, std::vector<Real>>> candidates;
    candidates.emplace_back(0, single_band_guess(field, +1));
    candidates.emplace_back(0, single_band_guess(field, -1));
    if (field.is_even() && N_max >= 1) candidates.emplace_back(1, symmetric_two_band_guess(field));
    std::string log;
    for (auto& [N, guess] : candidates) {
        if (N > N_max) continue;
        try {
            auto e = solve_endpoints(field, N, guess, opt);
            auto eq = build_equilibrium(field, e);
            // admissibility: nonnegative density, h nonzero at endpoints,
            // strict variational inequality off the bands
            bool ok = true;
            for (int band = 1; band <= N + 1 && ok; ++band) {
                auto rule = chebyshev_rule(eq.sq.band_lo(band), eq.sq.band_hi(band), 200);
                for (const Real& s : rule.s)
                    if (eq.density(s) < -Real("1e-12")) {
                        ok = false;
                        break;
                    }
            }
            for (const Real& e1 : eq.endpoints)
                if (ok && abs(eq.h->eval(e1)) < Real("1e-8")) ok = false;
            if (ok) {
                // sample off-band points on both sides, including the other
                // potential well if the support missed it
                Real lo = eq.endpoints.front(), hi = eq.endpoints.back();
                std::vector<Real> pts = {lo - (hi - lo) / 4, hi + (hi - lo) / 4,
                                         field_min_location(field, +1),
                                         field_min_location(field, -1)};
                for (int gap = 1; gap <= N; ++gap) {
                    Real glo = eq.sq.gap_lo(gap), ghi = eq.sq.gap_hi(gap);
                    for (int q = 1; q <= 3; ++q) {
                        Real x = glo + (ghi - glo) * q / 4;
                        if (x != 0) pts.push_back(x);
                    }
                }
                for (const Real& x : pts) {
                    if (x == 0 || eq.sq.band_of(x) != 0) continue;
                    bool is_endpoint = false;
                    for (const Real& ep : eq.endpoints)
                        if (ep == x) is_endpoint = true;
                    if (is_endpoint) continue;
                    if (eq.variational_value(field, x) >= 0) ok = false;
                }
            }
            if (ok) return eq;
            log += " N=" + std::to_string(N) + ": solution rejected by the regularity filter;";
        } catch (const std::exception& ex) {
            log += " N=" + std::to_string(N) + ": " + ex.what() + ";";
        }
    }
    throw EquilibriumError("detect_N: no admissible configuration up to N_max:" + log);
}

// ---------------------------------------------------------- moments ----

namespace {

// M_j = int_J (2i/(pi s) + i V~'(s)/pi) s^j / (R_+)^{1/2} ds  (= -T_j)
Real capital_m(const ExternalField& field, const SqrtR& sq, int j, int quad_pts = 120) {
    Real total(0);
    for (int band = 1; band <= sq.N() + 1; ++band) {
        auto rule = chebyshev_rule(sq.band_lo(band), sq.band_hi(band), quad_pts);
        int sigma = sq.band_sigma(band);
        for (const Real& s : rule.s) {
            Real rest(1);
            for (const Real& r : sq.endpoints())
                if (r != sq.band_lo(band) && r != sq.band_hi(band)) rest *= sqrt(abs(s - r));
            Real sp(1);
            Real base = s;
            if (j >= 0)
                for (int q = 0; q < j; ++q) sp *= base;
            else
                for (int q = 0; q < -j; ++q) sp /= base;
            total += sigma * (2 / s + field.derivative(s)) * sp / rest / quad_pts;
        }
    }
    return total;
}

}  // namespace

Real equilibrium_moment_closed(const ExternalField& field, const EquilibriumData& eq, int k) {
    const SqrtR& sq = eq.sq;
    const int N = sq.N();
    Real alpha(0), S2(0), S3(0), Pinv(0), Pinv2(0);
    for (int j = 1; j <= N + 1; ++j) {
        Real b = sq.band_lo(j), a = sq.band_hi(j);
        alpha += b + a;
        S2 += b * b + a * a;
        S3 += b * b * b + a * a * a;
        Pinv += 1 / b + 1 / a;
        Pinv2 += 1 / (b * b) + 1 / (a * a);
    }
    auto M = [&](int j) { return capital_m(field, sq, j); };
    if (k == 1) return M(N + 2) / 4 - alpha / 2;
    if (k == 2)
        return M(N + 3) / 4 - alpha / 8 * M(N + 2) + (alpha * alpha / 2 - S2) / 4;
    if (k == 3)
        return M(N + 4) / 4 - alpha / 8 * M(N + 3) +
               (alpha * alpha / 2 - S2) / 16 * M(N + 2) -
               (alpha * alpha * alpha / 6 + 4 * S3 / 3 - alpha * S2) / 8;
    // negative moments
    Real gamma(sq.real_sign(Real(0)));
    for (const Real& r : sq.endpoints()) gamma *= sqrt(abs(r));
    Real P0 = Pinv / 2;
    Real P1 = P0 * P0 / 2 - Pinv2 / 4;
    if (k == -1) return gamma / 4 * M(-1);
    if (k == -2) return gamma / 4 * (M(-2) - P0 * M(-1));
    if (k == -3) return gamma / 4 * (M(-3) - P0 * M(-2) + P1 * M(-1));
    throw EquilibriumError("equilibrium_moment_closed: k must be in {+-1,+-2,+-3}");
}

Real equilibrium_moment_direct(const EquilibriumData& eq, int k) {
    Real total(0);
    for (const auto& t : eq.bands)
        for (size_t i = 0; i < t.nodes.size(); ++i) {
            Real sp(1);
            for (int q = 0; q < (k >= 0 ? k : -k); ++q) sp = k >= 0 ? sp * t.nodes[i] : sp / t.nodes[i];
            total += t.wts[i] * sp;
        }
    return total;
}

Real variational_constant(const ExternalField& field, const EquilibriumData& eq, const Real& x0) {
    Real logpot(0);
    for (const auto& t : eq.bands) logpot += t.log_potential(x0);
    return 4 * logpot - 2 * log(abs(x0)) - field.eval(x0);
}

}  // namespace olp

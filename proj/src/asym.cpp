#include "olp/asym.hpp"

#include "olp/airy.hpp"

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

// ----------------------------------------------------------------- Mat2 ----

Mat2 operator*(const Mat2& x, const Mat2& y) {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r(i, j) = x(i, 0) * y(0, j) + x(i, 1) * y(1, j);
    return r;
}
Mat2 operator+(const Mat2& x, const Mat2& y) {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r(i, j) = x(i, j) + y(i, j);
    return r;
}
Mat2 operator-(const Mat2& x, const Mat2& y) {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r(i, j) = x(i, j) - y(i, j);
    return r;
}
Mat2 operator*(const Cplx& s, const Mat2& x) {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r(i, j) = s * x(i, j);
    return r;
}
Mat2 Mat2::inverse() const {
    Mat2 r;
    Cplx d = det();
    r(0, 0) = a[1][1] / d;
    r(1, 1) = a[0][0] / d;
    r(0, 1) = -a[0][1] / d;
    r(1, 0) = -a[1][0] / d;
    return r;
}
Real Mat2::norm() const {
    Real m(0);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) m = std::max(m, abs(a[i][j]));
    return m;
}

std::string RegionTag::label() const {
    switch (kind) {
        case RegionKind::Upper: return "Y1";
        case RegionKind::Lower: return "Y2";
        case RegionKind::BandUpper: return "Y3(band " + std::to_string(band) + ")";
        case RegionKind::BandLower: return "Y4(band " + std::to_string(band) + ")";
        case RegionKind::DiscLeft:
            return "Db(" + std::to_string(endpoint) + "," + std::to_string(sector) + ")";
        case RegionKind::DiscRight:
            return "Da(" + std::to_string(endpoint) + "," + std::to_string(sector) + ")";
    }
    return "?";
}

// ---------------------------------------------------------- constructor ----

AsymptoticEvaluator::AsymptoticEvaluator(const ExternalField& field, const EquilibriumData& eq,
                                         const SurfaceData& surf, int n, unsigned theta_digits)
    : field_(&field), eq_(&eq), surf_(&surf), n_(n) {
    std::vector<std::vector<Cplx>> tau = surf.tau();
    theta_ = ThetaContext(std::move(tau), theta_digits);
    const auto& e = eq.endpoints;
    int m = static_cast<int>(e.size());
    // frequency shift (n/2pi) Omega, reduced mod 1 component-wise (integer
    // parts drop out of every theta argument)
    n_shift_.resize(surf.N());
    for (int j = 0; j < surf.N(); ++j) {
        Real v = n * surf.omega()[j] / (2 * pi());
        n_shift_[j] = v - floor(v);
    }
    u_inf_c_.resize(surf.N());
    for (int j = 0; j < surf.N(); ++j) u_inf_c_[j] = Cplx(surf.u_inf_plus()[j]);
    d_c_ = surf.d_vector();

    // disc radii: a fraction of the separation, shrunk until xi behaves like
    // its leading (z-x)^{3/2} coefficient on the boundary
    delta_.resize(m);
    for (int i = 0; i < m; ++i) {
        Real dmin = abs(e[i]);
        if (i > 0) dmin = std::min(dmin, e[i] - e[i - 1]);
        if (i + 1 < m) dmin = std::min(dmin, e[i + 1] - e[i]);
        delta_[i] = Real("0.15") * dmin;
    }
    for (int i = 0; i < m; ++i) {
        for (int shrink = 0; shrink < 3; ++shrink) {
            // |xi| on the disc boundary against the leading coefficient
            bool ok = true;
            for (int q = 0; q < 8 && ok; ++q) {
                Cplx z = Cplx(e[i]) + polar(delta_[i], Real(2 * q + 1) * pi() / 8);
                Cplx xi = conformal(i, z).xi;
                // alpha0 is built later; compare against xi at half radius
                Cplx xih = conformal(i, Cplx(e[i]) + polar(delta_[i] / 2, Real(2 * q + 1) * pi() / 8)).xi;
                Real ratio = abs(xi) / (abs(xih) * 2 * sqrt(Real(2)));
                if (ratio < Real("0.5") || ratio > Real("1.5")) ok = false;
            }
            if (ok) break;
            delta_[i] /= 2;
        }
    }
    strip_.resize(surf.N() + 1);
    for (int band = 1; band <= surf.N() + 1; ++band)
        strip_[band - 1] =
            std::min(delta_[2 * band - 2], delta_[2 * band - 1]) / sqrt(Real(2));
}

// -------------------------------------------------------- theta helpers ----

Cplx AsymptoticEvaluator::theta_at(const std::vector<Cplx>& u, int su, int somega,
                                   int sd) const {
    int N = surf_->N();
    if (N == 0) return Cplx(Real(1));
    std::vector<Cplx> arg(N);
    for (int i = 0; i < N; ++i) {
        arg[i] = Cplx(Real(su)) * u[i] - Cplx(Real(somega) * n_shift_[i]) +
                 Cplx(Real(sd)) * d_c_[i];
    }
    return theta_.theta(arg);
}

Cplx AsymptoticEvaluator::mho_phase(int index) const {
    if (index <= 0 || index > surf_->N()) return Cplx(Real(1));
    Real arg = n_ * surf_->omega()[index - 1];
    arg -= floor(arg / (2 * pi())) * 2 * pi();
    return polar(Real(1), arg);
}

// --------------------------------------------------------- model matrix ----

Mat2 AsymptoticEvaluator::model_matrix(const Cplx& z, int side) const {
    bool lower = z.im < 0 || (z.im == 0 && side < 0);
    std::vector<Cplx> u;
    if (z.im == 0) {
        u = surf_->u_plus(z.re);
        if (lower)
            for (auto& t : u) t = -conj(t);
    } else {
        u = surf_->u(z);
    }
    Cplx gam = surf_->gamma(z, lower ? -1 : +1);
    Cplx gp = (gam + Cplx(Real(1)) / gam) * Cplx(Real(1) / 2);
    Cplx gm = (gam - Cplx(Real(1)) / gam) / Cplx(Real(0), 2);
    // diagonal normalization
    Cplx th_inf_pd = theta_at(u_inf_c_, +1, 0, +1);
    Cplx d1 = th_inf_pd / theta_at(u_inf_c_, +1, +1, +1);
    Cplx d2 = th_inf_pd / theta_at(u_inf_c_, -1, +1, -1);
    Mat2 tm;
    tm(0, 0) = gp * d1 * theta_at(u, +1, +1, +1) / theta_at(u, +1, 0, +1);
    tm(0, 1) = -gm * d1 * theta_at(u, -1, +1, +1) / theta_at(u, -1, 0, +1);
    tm(1, 0) = gm * d2 * theta_at(u, +1, +1, -1) / theta_at(u, +1, 0, -1);
    tm(1, 1) = gp * d2 * theta_at(u, -1, +1, -1) / theta_at(u, +1, 0, +1);
    if (!lower) return tm;
    // m = -i M sigma2 = [[M12, -M11], [M22, -M21]]
    Mat2 r;
    r(0, 0) = tm(0, 1);
    r(0, 1) = -tm(0, 0);
    r(1, 0) = tm(1, 1);
    r(1, 1) = -tm(1, 0);
    return r;
}

// ------------------------------------------------------- conformal maps ----

AsymptoticEvaluator::ConformalPoint AsymptoticEvaluator::conformal(int ep, const Cplx& z,
                                                                   int side) const {
    const Real& x = eq_->endpoints[ep];
    // xi = 2 int_x^z sqrtR h, t^2-substitution absorbing the square root at x
    Cplx span = z - Cplx(x);
    auto f = [&](const Real& t) -> Cplx {
        Cplx s = Cplx(x) + Cplx(t * t) * span;
        if (s.im == 0 && side < 0) {
            return conj(eq_->sq.plus(s.re)) * eq_->h->eval_c(Cplx(s.re, Real(0)), 0) *
                   Cplx(2 * t) * span;
        }
        Cplx pv = (s.im == 0) ? eq_->sq.plus(s.re) : eq_->sq.value(s);
        return pv * eq_->h->eval_c(s) * Cplx(2 * t) * span;
    };
    Cplx xi = gl_integrate(f, Real(0), Real(1), 48, 2) * Cplx(Real(2));
    ConformalPoint cp;
    cp.xi = xi;
    Real phi = arg(xi);
    bool upper = z.im > 0 || (z.im == 0 && side >= 0);
    bool a_rule = !ep_left(ep) || left_branch_ == LeftBranch::Mirrored;
    Real wrap("0.4");
    Real phi_adj = phi;
    if (a_rule) {
        if (upper && phi < -wrap) phi_adj = phi + 2 * pi();
        if (!upper && phi > wrap) phi_adj = phi - 2 * pi();
    } else {
        if (upper && phi > wrap) phi_adj = phi - 2 * pi();
        if (!upper && phi < -wrap) phi_adj = phi + 2 * pi();
    }
    cp.p_mag = pow(Real(3) * n_ / 4 * abs(xi), Real(2) / 3);
    cp.p_angle = phi_adj * 2 / 3;
    return cp;
}

// ------------------------------------------------------- classification ----

RegionTag AsymptoticEvaluator::classify(const Cplx& z) const {
    const auto& e = eq_->endpoints;
    RegionTag tag;
    for (int i = 0; i < static_cast<int>(e.size()); ++i) {
        if (abs(z - Cplx(e[i])) <= delta_[i]) {
            tag.kind = ep_left(i) ? RegionKind::DiscLeft : RegionKind::DiscRight;
            tag.endpoint = ep_band(i);
            ConformalPoint cp = conformal(i, z);
            bool upper = z.im > 0 || z.im == 0;
            Real ang = cp.p_angle;
            bool a_rule = !ep_left(i) || left_branch_ == LeftBranch::Mirrored;
            if (a_rule) {
                if (upper) tag.sector = ang < 2 * pi() / 3 ? 1 : 2;
                else tag.sector = ang > -2 * pi() / 3 ? 4 : 3;
            } else {
                if (upper) tag.sector = ang > -2 * pi() / 3 ? 1 : 2;
                else tag.sector = ang < 2 * pi() / 3 ? 4 : 3;
            }
            return tag;
        }
    }
    for (int band = 1; band <= eq_->N + 1; ++band) {
        if (z.re > eq_->sq.band_lo(band) && z.re < eq_->sq.band_hi(band) &&
            abs(z.im) < strip_[band - 1]) {
            tag.kind = z.im >= 0 ? RegionKind::BandUpper : RegionKind::BandLower;
            tag.band = band;
            return tag;
        }
    }
    tag.kind = z.im >= 0 ? RegionKind::Upper : RegionKind::Lower;
    return tag;
}

// ------------------------------------------------------------ osc phase ----

Cplx AsymptoticEvaluator::osc_phase(int band, const Cplx& z) const {
    Cplx total = eq_->bands[band - 1].mass_right_c(z);
    for (int k = band + 1; k <= eq_->N + 1; ++k) total += Cplx(eq_->band_masses[k - 1]);
    return total;
}

// ------------------------------------------------------------ parametrix ----

Mat2 AsymptoticEvaluator::parametrix(const RegionTag& tag, const Cplx& z, int side) const {
    bool left = tag.kind == RegionKind::DiscLeft;
    int j = tag.endpoint;
    int ep = left ? 2 * (j - 1) : 2 * j - 1;
    int mho_index = left ? j - 1 : j;
    ConformalPoint cp = conformal(ep, z, side);
    Mat2 M = model_matrix(z, side);
    Cplx E = mho_phase(mho_index);
    Cplx Ebar = conj(E);
    Cplx p = cp.p();
    Cplx p4 = cp.p_pow(Real(1) / 4);
    Cplx pm4 = cp.p_pow(Real(-1) / 4);
    Cplx om = polar(Real(1), 2 * pi() / 3);
    Cplx om2 = conj(om);
    Cplx Xp, Yp, Xo, Yo, Xo2, Yo2;
    Xp = airy_ai(p) * p4;
    Yp = airy_ai_prime(p) * pm4;
    Xo = airy_ai(om * p) * p4;
    Yo = airy_ai_prime(om * p) * pm4;
    Xo2 = airy_ai(om2 * p) * p4;
    Yo2 = airy_ai_prime(om2 * p) * pm4;
    Cplx eplus = exp(Cplx(Real(n_) / 2) * cp.xi);
    Cplx eminus = Cplx(Real(1)) / eplus;
    Cplx pre1 = Cplx(Real(0), -1) * Cplx(sqrt(pi())) * eplus;
    Cplx pre2 = Cplx(sqrt(pi())) * polar(Real(1), -pi() / 6) * eminus;
    Mat2 out;
    int l = tag.sector;
    for (int row = 0; row < 2; ++row) {
        Cplx M1 = M(row, 0), M2 = M(row, 1);
        Cplx c1, c2;
        if (left) {
            if (l == 1)
                c1 = pre1 * (iu() * (Xp - Yp) * M1 - (Xp + Yp) * Ebar * M2);
            else if (l == 2)
                c1 = pre1 * (iu() * (-om * Xo + om2 * Yo) * M1 + (om * Xo + om2 * Yo) * Ebar * M2);
            else if (l == 3)
                c1 = pre1 * (iu() * (-om2 * Xo2 + om * Yo2) * M1 + (om2 * Xo2 + om * Yo2) * E * M2);
            else
                c1 = pre1 * (iu() * (Xp - Yp) * M1 - (Xp + Yp) * E * M2);
            if (l == 1 || l == 2)
                c2 = pre2 * (iu() * (-Xo2 + om2 * Yo2) * M1 * E + (Xo2 + om2 * Yo2) * M2);
            else
                c2 = pre2 * (iu() * (om2 * Xo - Yo) * M1 * Ebar - (om2 * Xo + Yo) * M2);
        } else {
            if (l == 1)
                c1 = pre1 * (iu() * (Xp - Yp) * M1 + (Xp + Yp) * Ebar * M2);
            else if (l == 2)
                c1 = pre1 * (iu() * (-om * Xo + om2 * Yo) * M1 - (om * Xo + om2 * Yo) * Ebar * M2);
            else if (l == 3)
                c1 = pre1 * (iu() * (-om2 * Xo2 + om * Yo2) * M1 - (om2 * Xo2 + om * Yo2) * E * M2);
            else
                c1 = pre1 * (iu() * (Xp - Yp) * M1 + (Xp + Yp) * E * M2);
            if (l == 1 || l == 2)
                c2 = pre2 * (iu() * (Xo2 - om2 * Yo2) * M1 * E + (Xo2 + om2 * Yo2) * M2);
            else
                c2 = pre2 * (iu() * (-om2 * Xo + Yo) * M1 * Ebar - (om2 * Xo + Yo) * M2);
        }
        out(row, 0) = c1;
        out(row, 1) = c2;
    }
    return out;
}

// ----------------------------------------------------------- predictions ----

Cplx AsymptoticEvaluator::g_value(const Cplx& z, int side) const {
    if (z.im == 0) return side >= 0 ? eq_->g_plus(*field_, z.re) : eq_->g_minus(*field_, z.re);
    return eq_->g(*field_, z);
}

AsymptoticEvaluator::Prediction AsymptoticEvaluator::predict(const Cplx& z, int side) const {
    return predict_in(classify(z), z, side);
}

AsymptoticEvaluator::Prediction AsymptoticEvaluator::predict_in(const RegionTag& tag,
                                                                const Cplx& z, int side) const {
    Prediction out;
    out.region = tag;
    bool in_disc = tag.kind == RegionKind::DiscLeft || tag.kind == RegionKind::DiscRight;
    Mat2 M = in_disc ? parametrix(tag, z, side) : model_matrix(z, side);
    // oscillatory combination for the band-strip regions and the band-side
    // disc sectors
    Cplx c1 = M(0, 0), c2 = M(1, 0);
    int osc_dir = 0;  // -1: exp(-4 pi i n .), +1: exp(+4 pi i n .)
    int band = 0;
    if (tag.kind == RegionKind::BandUpper) {
        osc_dir = -1;
        band = tag.band;
    } else if (tag.kind == RegionKind::BandLower) {
        osc_dir = +1;
        band = tag.band;
    } else if (in_disc && (tag.sector == 2 || tag.sector == 3)) {
        osc_dir = tag.sector == 2 ? -1 : +1;
        band = tag.endpoint;
    }
    if (osc_dir != 0) {
        Cplx phase = osc_phase(band, z);
        Cplx osc = exp(Cplx(Real(0), Real(osc_dir) * 4 * pi() * n_) * phase);
        Cplx sign = osc_dir < 0 ? Cplx(Real(1)) : Cplx(Real(-1));
        c1 = M(0, 0) + sign * M(0, 1) * osc;
        c2 = M(1, 0) + sign * M(1, 1) * osc;
    }
    Cplx g = g_value(z, side);
    Cplx Qe(eq_->Q_re, eq_->Q_im);
    Cplx Epi = exp(Cplx(Real(n_)) * (g + Qe));
    Cplx Eca = exp(Cplx(Real(-n_)) * (g - Cplx(eq_->ell) + Qe));
    out.pi2n = Epi * c1;
    out.cauchy = Eca * M(0, 1);
    Mat2 R = r_infinity(z);
    if (in_disc) R = R - r_local(tag, z, side);
    Cplx invn(Real(1) / n_);
    out.pi2n_corrected =
        Epi * (c1 * (Cplx(Real(1)) + invn * R(0, 0)) + c2 * invn * R(0, 1));
    out.cauchy_corrected =
        Eca * (M(0, 1) * (Cplx(Real(1)) + invn * R(0, 0)) + M(1, 1) * invn * R(0, 1));
    return out;
}

// ----------------------------------------------------------- corrections ----

const std::vector<AsymptoticEvaluator::EndpointData>& AsymptoticEvaluator::endpoint_data()
    const {
    if (epdata_) return *epdata_;
    auto data = std::make_shared<std::vector<EndpointData>>();
    const auto& e = eq_->endpoints;
    int N = surf_->N();
    for (int ep = 0; ep < static_cast<int>(e.size()); ++ep) {
        EndpointData d;
        d.x = e[ep];
        d.left = ep_left(ep);
        d.j = ep_band(ep);
        int mho_index = d.left ? d.j - 1 : d.j;
        d.mho_phase = mho_phase(mho_index);
        // eta: positive square root of the product of distances to the other
        // endpoints
        Real eta(1);
        for (int q = 0; q < static_cast<int>(e.size()); ++q)
            if (q != ep) eta *= sqrt(abs(d.x - e[q]));
        d.eta = eta;
        // lambda: boundary coefficient of sqrtR at the endpoint, from above
        int count_right = static_cast<int>(e.size()) - 1 - ep;  // endpoints right of x
        // phase i^{count_right}
        switch (count_right % 4) {
            case 0: d.lambda = Cplx(eta); break;
            case 1: d.lambda = Cplx(Real(0), eta); break;
            case 2: d.lambda = Cplx(-eta); break;
            default: d.lambda = Cplx(Real(0), -eta); break;
        }
        d.h = Cplx(eq_->h->eval(d.x, 0));
        d.h_prime = Cplx(eq_->h->eval(d.x, 1));
        Cplx lam_h = d.lambda * d.h;
        Real inv_sum(0);
        for (int q = 0; q < static_cast<int>(e.size()); ++q)
            if (q != ep) inv_sum += 1 / (d.x - e[q]);
        d.alpha0 = Cplx(Real(4) / 3) * lam_h;
        d.alpha1 = Cplx(Real(2) / 5) * lam_h * Cplx(inv_sum) +
                   Cplx(Real(4) / 5) * d.lambda * d.h_prime;
        // Q0, Q1 by the explicit case formulas
        const SqrtR& sq = eq_->sq;
        auto ratio_prod_b = [&](const Real& x, int skip_j) {
            // prod over k=1..N of (x-b_k)/(x-a_k) with k = skip_j removed
            Real p(1);
            for (int k = 1; k <= N; ++k) {
                if (k == skip_j) continue;
                p *= abs((x - sq.b(k)) / (x - sq.a(k)));
            }
            return p;
        };
        if (d.left && d.j == 1) {  // b_0
            Real val = sqrt(1 / (sq.a(N + 1) - d.x) * ratio_prod_b(d.x, 0));
            d.q0 = Cplx(Real(0), -val);
            Real sum(0);
            for (int k = 1; k <= N; ++k)
                sum += 1 / (d.x - sq.b(k)) - 1 / (d.x - sq.a(k));
            sum -= 1 / (d.x - sq.a(N + 1));
            d.q1 = d.q0 * Cplx(sum / 2);
        } else if (!d.left && d.j == N + 1) {  // a_{N+1}
            Real val = sqrt((d.x - sq.b(0)) * ratio_prod_b(d.x, 0));
            d.q0 = Cplx(val);
            Real sum(0);
            for (int k = 1; k <= N; ++k)
                sum += 1 / (d.x - sq.b(k)) - 1 / (d.x - sq.a(k));
            sum += 1 / (d.x - sq.b(0));
            d.q1 = d.q0 * Cplx(sum / 2);
        } else if (d.left) {  // b_j, j = 1..N (vector index band j = j+1)
            int j = d.j - 1;
            Real num = (d.x - sq.b(0));
            Real den = (sq.a(N + 1) - d.x) * (d.x - sq.a(j));
            Real p1(1), p2(1);
            for (int k = 1; k <= j - 1; ++k) p1 *= (d.x - sq.b(k)) / (d.x - sq.a(k));
            for (int l = j + 1; l <= N; ++l) p2 *= (sq.b(l) - d.x) / (sq.a(l) - d.x);
            d.q0 = Cplx(Real(0), -sqrt(num / den * p1 * p2));
            Real sum(0);
            for (int k = 1; k <= N; ++k) {
                if (k == j) continue;
                sum += 1 / (d.x - sq.b(k)) - 1 / (d.x - sq.a(k));
            }
            sum += 1 / (d.x - sq.b(0)) - 1 / (d.x - sq.a(N + 1)) - 1 / (d.x - sq.a(j));
            d.q1 = d.q0 * Cplx(sum / 2);
        } else {  // a_j, j = 1..N
            int j = d.j;
            Real num = (d.x - sq.b(0)) * (sq.b(j) - d.x);
            Real den = (sq.a(N + 1) - d.x);
            Real p1(1), p2(1);
            for (int k = 1; k <= j - 1; ++k) p1 *= (d.x - sq.b(k)) / (d.x - sq.a(k));
            for (int l = j + 1; l <= N; ++l) p2 *= (sq.b(l) - d.x) / (sq.a(l) - d.x);
            d.q0 = Cplx(sqrt(num / den * p1 * p2));
            Real sum(0);
            for (int k = 1; k <= N; ++k) {
                if (k == j) continue;
                sum += 1 / (d.x - sq.b(k)) - 1 / (d.x - sq.a(k));
            }
            sum += 1 / (d.x - sq.b(0)) - 1 / (d.x - sq.a(N + 1)) + 1 / (d.x - sq.b(j));
            d.q1 = d.q0 * Cplx(sum / 2);
        }
        // theta ratios and the lattice-direction sums at u_+(x)
        auto ux = surf_->u_plus(d.x);
        Cplx th_inf_pd = theta_at(u_inf_c_, +1, 0, +1);
        d.kappa1 = th_inf_pd * theta_at(ux, +1, +1, +1) /
                   (theta_at(u_inf_c_, +1, +1, +1) * theta_at(ux, +1, 0, +1));
        Cplx th_minf_md = theta_at(u_inf_c_, -1, 0, -1);
        d.kappa2 = th_minf_md * theta_at(ux, +1, +1, -1) /
                   (theta_at(u_inf_c_, -1, +1, -1) * theta_at(ux, +1, 0, -1));
        if (N > 0) {
            std::vector<Cplx> w(N);
            for (int j2 = 0; j2 < N; ++j2) {
                Real poly(0);
                for (int k = 0; k < N; ++k)
                    poly += surf_->c_matrix()[j2][k] * power_int(d.x, N - 1 - k);
                w[j2] = Cplx(poly);
            }
            Cplx scale = Cplx(Real(2)) / d.lambda;
            auto sum_pair = [&](int eps1, int eps2, int somega, int order) {
                std::vector<Cplx> zarg(N);
                for (int i = 0; i < N; ++i)
                    zarg[i] = Cplx(Real(eps1)) * ux[i] - Cplx(Real(somega) * n_shift_[i]) +
                              Cplx(Real(eps2)) * d_c_[i];
                return theta_.directional_sum(order, w, scale, zarg);
            };
            auto aleph = [&](int eps1, int eps2) {
                Cplx th0 = theta_at(ux, eps1, 0, eps2);
                Cplx tho = theta_at(ux, eps1, +1, eps2);
                Cplx u0 = Cplx(2 * pi()) * sum_pair(eps1, eps2, 0, 1);
                Cplx uo = Cplx(2 * pi()) * sum_pair(eps1, eps2, +1, 1);
                return -u0 / th0 + uo / tho;
            };
            auto daleth = [&](int eps1, int eps2) {
                Cplx th0 = theta_at(ux, eps1, 0, eps2);
                Cplx tho = theta_at(ux, eps1, +1, eps2);
                Cplx u0 = Cplx(2 * pi()) * sum_pair(eps1, eps2, 0, 1);
                Cplx uo = Cplx(2 * pi()) * sum_pair(eps1, eps2, +1, 1);
                Cplx v0 = Cplx(-2 * pi() * pi()) * sum_pair(eps1, eps2, 0, 2);
                Cplx vo = Cplx(-2 * pi() * pi()) * sum_pair(eps1, eps2, +1, 2);
                return -v0 / th0 + vo / tho - (u0 / th0) * (u0 / th0) + u0 * uo / (th0 * tho);
            };
            d.aleph_p = aleph(+1, +1);
            d.aleph_m = aleph(+1, -1);
            d.daleth_p = daleth(+1, +1);
            d.daleth_m = daleth(+1, -1);
        }
        // A and B matrices
        Real S1 = s1(), T1 = t1();
        Cplx k1 = d.kappa1, k2 = d.kappa2;
        if (d.left) {
            Cplx pref = Cplx(-S1) / d.q0 * d.mho_phase;
            d.A(0, 0) = pref * k1 * k2;
            d.A(0, 1) = pref * iu() * k1 * k1;
            d.A(1, 0) = pref * iu() * k2 * k2;
            d.A(1, 1) = -pref * k1 * k2;
            Cplx q0 = d.q0, q1 = d.q1;
            Cplx br11 = Cplx(-S1) / q0 * (d.daleth_p + d.daleth_m - q1 / q0) -
                        Cplx(T1) * (q0 + d.aleph_p * d.aleph_m / q0) +
                        iu() * Cplx(S1 + T1) * (d.aleph_m - d.aleph_p);
            Cplx br12 = Cplx(Real(0), -1) * Cplx(S1) / q0 *
                            (Cplx(Real(2)) * d.daleth_p - q1 / q0) +
                        iu() * Cplx(T1) * (q0 - d.aleph_p * d.aleph_p / q0) +
                        Cplx(2 * (S1 - T1)) * d.aleph_p;
            Cplx br21 = Cplx(Real(0), -1) * Cplx(S1) / q0 *
                            (Cplx(Real(2)) * d.daleth_m - q1 / q0) +
                        iu() * Cplx(T1) * (q0 - d.aleph_m * d.aleph_m / q0) -
                        Cplx(2 * (S1 - T1)) * d.aleph_m;
            Cplx br22 = Cplx(S1) / q0 * (d.daleth_p + d.daleth_m - q1 / q0) +
                        Cplx(T1) * (q0 + d.aleph_p * d.aleph_m / q0) +
                        iu() * Cplx(S1 + T1) * (d.aleph_p - d.aleph_m);
            d.B(0, 0) = d.mho_phase * k1 * k2 * br11;
            d.B(0, 1) = d.mho_phase * k1 * k1 * br12;
            d.B(1, 0) = d.mho_phase * k2 * k2 * br21;
            d.B(1, 1) = d.mho_phase * k1 * k2 * br22;
        } else {
            Cplx pref = Cplx(S1) * d.q0 * d.mho_phase;
            d.A(0, 0) = -pref * k1 * k2;
            d.A(0, 1) = pref * iu() * k1 * k1;
            d.A(1, 0) = pref * iu() * k2 * k2;
            d.A(1, 1) = pref * k1 * k2;
            Cplx q0 = d.q0, q1 = d.q1;
            Cplx br11 = Cplx(-S1) * (q1 + q0 * (d.daleth_p + d.daleth_m)) -
                        Cplx(T1) * (Cplx(Real(1)) / q0 + q0 * d.aleph_p * d.aleph_m) +
                        iu() * Cplx(S1 + T1) * (d.aleph_m - d.aleph_p);
            Cplx br12 = iu() * Cplx(S1) * (q1 + Cplx(Real(2)) * q0 * d.daleth_p) +
                        iu() * Cplx(T1) * (q0 * d.aleph_p * d.aleph_p - Cplx(Real(1)) / q0) -
                        Cplx(2 * (S1 - T1)) * d.aleph_p;
            Cplx br21 = iu() * Cplx(S1) * (q1 + Cplx(Real(2)) * q0 * d.daleth_m) +
                        iu() * Cplx(T1) * (q0 * d.aleph_m * d.aleph_m - Cplx(Real(1)) / q0) +
                        Cplx(2 * (S1 - T1)) * d.aleph_m;
            Cplx br22 = Cplx(S1) * (q1 + q0 * (d.daleth_p + d.daleth_m)) +
                        Cplx(T1) * (Cplx(Real(1)) / q0 + q0 * d.aleph_p * d.aleph_m) +
                        iu() * Cplx(S1 + T1) * (d.aleph_p - d.aleph_m);
            d.B(0, 0) = d.mho_phase * k1 * k2 * br11;
            d.B(0, 1) = d.mho_phase * k1 * k1 * br12;
            d.B(1, 0) = d.mho_phase * k2 * k2 * br21;
            d.B(1, 1) = d.mho_phase * k1 * k2 * br22;
        }
        data->push_back(std::move(d));
    }
    epdata_ = data;
    return *epdata_;
}

Mat2 AsymptoticEvaluator::r_infinity(const Cplx& z) const {
    const auto& eps = endpoint_data();
    Mat2 total;
    for (const auto& d : eps) {
        Cplx dz = z - Cplx(d.x);
        Cplx t1 = Cplx(Real(1)) / (d.alpha0 * dz * dz);
        Cplx t2 = Cplx(Real(1)) / (d.alpha0 * d.alpha0 * dz);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                total(i, j) += d.A(i, j) * t1 +
                               (d.B(i, j) * d.alpha0 - d.A(i, j) * d.alpha1) * t2;
    }
    return total;
}

Mat2 AsymptoticEvaluator::r_local(const RegionTag& tag, const Cplx& z, int side) const {
    bool left = tag.kind == RegionKind::DiscLeft;
    int j = tag.endpoint;
    int ep = left ? 2 * (j - 1) : 2 * j - 1;
    int mho_index = left ? j - 1 : j;
    ConformalPoint cp = conformal(ep, z, side);
    Mat2 M = model_matrix(z, side);
    Cplx E = mho_phase(mho_index);
    Real S1 = s1(), T1 = t1();
    Mat2 K;
    Cplx off = iu() * Cplx(S1 - T1);
    if (left) off = -off;
    K(0, 0) = Cplx(-(S1 + T1));
    K(0, 1) = off * E;
    K(1, 0) = off * conj(E);
    K(1, 1) = Cplx(S1 + T1);
    Mat2 R = M * K * M.inverse();
    return (Cplx(Real(1)) / cp.xi) * R;
}

Real AsymptoticEvaluator::xi_flat() const {
    Real span(0);
    for (int band = 1; band <= eq_->N + 1; ++band)
        span += eq_->sq.band_hi(band) - eq_->sq.band_lo(band);
    Cplx num = theta_at(u_inf_c_, +1, +1, +1) * theta_at(u_inf_c_, -1, 0, +1);
    Cplx den = theta_at(u_inf_c_, -1, +1, +1) * theta_at(u_inf_c_, +1, 0, +1);
    Cplx v = Cplx(Real(2) / span) * num / den;
    if (abs(v.im) > Real("1e-8") * (1 + abs(v.re)))
        throw AsymError("Xi_flat unexpectedly complex");
    if (v.re <= 0) throw AsymError("Xi_flat must be positive");
    return v.re;
}

Cplx AsymptoticEvaluator::q_flat_12() const {
    const auto& eps = endpoint_data();
    Cplx total;
    for (const auto& d : eps)
        total += (d.B(0, 1) * d.alpha0 - d.A(0, 1) * d.alpha1) / (d.alpha0 * d.alpha0);
    return Cplx(Real(0), Real(2)) * total;
}

Real AsymptoticEvaluator::norming_prediction(bool corrected) const {
    Real lead = exp(-n_ * eq_->ell) / pi() * xi_flat();
    if (corrected) {
        Cplx corr = Cplx(Real(1)) + Cplx(xi_flat() / n_) * q_flat_12();
        lead *= corr.re;
    }
    return sqrt(lead);
}

}  // namespace olp

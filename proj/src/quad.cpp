#include "olp/quad.hpp"

#include <mutex>

namespace olp {

namespace {

GaussLegendre build_gauss_legendre(int n) {
    GaussLegendre rule;
    rule.x.resize(n);
    rule.w.resize(n);
    Real tol = eps() * 16;
    for (int i = 0; i < n; ++i) {
        // Chebyshev-style initial guess, then Newton on P_n.
        Real x0 = cos(pi() * (Real(i) + Real(0.75)) / (Real(n) + Real(0.5)));
        for (int it = 0; it < 200; ++it) {
            Real p0(1), p1 = x0;
            for (int k = 2; k <= n; ++k) {
                Real p2 = ((2 * k - 1) * x0 * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            Real dp = n * (x0 * p1 - p0) / (x0 * x0 - 1);
            Real dx = p1 / dp;
            x0 -= dx;
            if (abs(dx) < tol) break;
        }
        Real p0(1), p1 = x0;
        for (int k = 2; k <= n; ++k) {
            Real p2 = ((2 * k - 1) * x0 * p1 - (k - 1) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        Real dp = n * (x0 * p1 - p0) / (x0 * x0 - 1);
        rule.x[i] = x0;
        rule.w[i] = 2 / ((1 - x0 * x0) * dp * dp);
    }
    return rule;
}

}  // namespace

const GaussLegendre& gauss_legendre(int order) {
    static std::map<std::pair<int, unsigned>, GaussLegendre> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto key = std::make_pair(order, current_precision_digits());
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, build_gauss_legendre(order)).first;
    return it->second;
}

ChebyshevRule chebyshev_rule(const Real& a, const Real& b, int npts) {
    ChebyshevRule rule;
    rule.s.resize(npts);
    Real mid = (a + b) / 2, half = (b - a) / 2;
    for (int k = 0; k < npts; ++k) {
        Real th = pi() * (2 * k + 1) / (2 * npts);
        rule.s[k] = mid + half * cos(th);
    }
    // int g/sqrt((s-a)(b-s)) ds = (pi/n) sum g(s_k); the jacobian of the
    // cosine substitution cancels the square-root weight exactly.
    rule.weight = pi() / npts;
    return rule;
}

Chebyshev2Rule chebyshev2_rule(const Real& a, const Real& b, int npts) {
    Chebyshev2Rule rule;
    rule.s.resize(npts);
    rule.w.resize(npts);
    rule.theta.resize(npts);
    Real mid = (a + b) / 2, half = (b - a) / 2;
    Real h2 = half * half;
    for (int k = 1; k <= npts; ++k) {
        Real th = pi() * k / (npts + 1);
        Real sn = sin(th);
        rule.theta[k - 1] = th;
        rule.s[k - 1] = mid + half * cos(th);
        rule.w[k - 1] = h2 * pi() / (npts + 1) * sn * sn;
    }
    return rule;
}

ChebSeries::ChebSeries(std::function<Real(const Real&)> f, Real a, Real b, int npts)
    : a_(std::move(a)), b_(std::move(b)) {
    std::vector<Real> vals(npts), theta(npts);
    Real mid = (a_ + b_) / 2, half = (b_ - a_) / 2;
    for (int k = 0; k < npts; ++k) {
        theta[k] = pi() * (2 * k + 1) / (2 * npts);
        vals[k] = f(mid + half * cos(theta[k]));
    }
    coef_.resize(npts);
    for (int j = 0; j < npts; ++j) {
        Real s(0);
        for (int k = 0; k < npts; ++k) s += vals[k] * cos(j * theta[k]);
        coef_[j] = s * 2 / npts;
    }
    coef_[0] /= 2;
    build_integral();
}

Real ChebSeries::eval(const Real& x) const {
    Real t = (2 * x - a_ - b_) / (b_ - a_);
    Real bk1(0), bk2(0);
    for (size_t j = coef_.size(); j-- > 1;) {
        Real bk = 2 * t * bk1 - bk2 + coef_[j];
        bk2 = bk1;
        bk1 = bk;
    }
    return t * bk1 - bk2 + coef_[0];
}

void ChebSeries::build_integral() {
    // Antiderivative of sum c_j T_j in Chebyshev basis, scaled to [a,b].
    size_t n = coef_.size();
    int_coef_.assign(n + 1, Real(0));
    Real scale = (b_ - a_) / 2;
    for (size_t j = 1; j + 1 < n; ++j)
        int_coef_[j] = scale * (coef_[j - 1] - coef_[j + 1]) / (2 * static_cast<int>(j));
    if (n >= 2) int_coef_[n - 1] = scale * coef_[n - 2] / (2 * static_cast<int>(n - 1));
    if (n >= 1) int_coef_[n] = scale * coef_[n - 1] / (2 * static_cast<int>(n));
    if (n >= 2) int_coef_[1] += scale * coef_[0];
    else if (n == 1) int_coef_[1] = scale * coef_[0];
}

Real ChebSeries::integral_from_a(const Real& x) const {
    auto eval_series = [&](const std::vector<Real>& c, const Real& t) {
        Real bk1(0), bk2(0);
        for (size_t j = c.size(); j-- > 1;) {
            Real bk = 2 * t * bk1 - bk2 + c[j];
            bk2 = bk1;
            bk1 = bk;
        }
        return t * bk1 - bk2 + c[0];
    };
    Real t = (2 * x - a_ - b_) / (b_ - a_);
    return eval_series(int_coef_, t) - eval_series(int_coef_, Real(-1));
}

Real ChebSeries::tail_estimate() const {
    size_t n = coef_.size();
    Real m(0);
    for (size_t j = n > 4 ? n - 4 : 0; j < n; ++j) m += abs(coef_[j]);
    return m;
}

}  // namespace olp

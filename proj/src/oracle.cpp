#include "olp/oracle.hpp"

#include "olp/quad.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace olp {

namespace {

// One half-axis strong moment int_0^inf s^k w(s) ds or its mirror on
// (-inf,0), via the log substitution s = +-exp(t). The transformed integrand
// exp((k+1)t) w(+-e^t) decays doubly exponentially in both directions, so the
// bilateral trapezoid sum converges geometrically under step halving.
Real half_axis_moment(const ExternalField& field, int n, int k, int sign, const Real& cutoff,
                      const Real& h, Real* peak = nullptr) {
    auto term = [&](const Real& t) {
        Real s = exp(t);
        Real x = sign > 0 ? s : -s;
        Real w = exp(Real(k + 1) * t - n * field.eval(x));
        return (sign < 0 && k % 2 != 0) ? Real(-w) : w;
    };
    return trapezoid_bilateral(term, h, cutoff, peak);
}

}  // namespace

MomentTable::MomentTable(const ExternalField& field, int n, unsigned precision_bits)
    : field_(&field), n_(n), precision_bits_(precision_bits) {
    if (n < 1) throw OracleError("moment table: weight exponent must be >= 1");
    auto rep = field.validate();
    if (!rep.admissible) throw OracleError("moment table: field not admissible: " + rep.reason);
}

std::pair<Real, Real> MomentTable::compute_moment(int k) const {
    PrecisionScope scope(precision_bits_);
    Real cutoff = pow(Real(10), -static_cast<int>(current_precision_digits()) - 8);
    Real tol = pow(Real(10), -static_cast<int>(current_precision_digits()) + 6);
    Real h("0.5");
    Real prev;
    bool have_prev = false;
    Real value(0), err(0);
    for (int level = 0; level < 9; ++level) {
        Real peak_p(0), peak_m(0);
        Real v = half_axis_moment(*field_, n_, k, +1, cutoff, h, &peak_p) +
                 half_axis_moment(*field_, n_, k, -1, cutoff, h, &peak_m);
        if (have_prev) {
            err = abs(v - prev);
            // cancellation-aware scale: the result cannot be resolved below
            // round-off relative to the largest term in the sum
            Real scale = abs(v) + peak_p + peak_m;
            value = v;
            if (err < scale * tol) return {value, err};
        }
        prev = v;
        have_prev = true;
        h /= 2;
    }
    throw OracleError("moment quadrature did not converge for k=" + std::to_string(k) +
                      " (last error estimate " + decimal_from_real(err) + ")");
}

void MomentTable::ensure_range(int k_min, int k_max) {
    for (int k = k_min; k <= k_max; ++k) {
        if (values_.count(k)) continue;
        auto [v, e] = compute_moment(k);
        values_[k] = v;
        errors_[k] = e;
    }
}

Real MomentTable::moment(int k) const {
    auto it = values_.find(k);
    if (it == values_.end())
        throw OracleError("moment c_" + std::to_string(k) + " absent from table");
    return it->second;
}

Real MomentTable::error_estimate(int k) const {
    auto it = errors_.find(k);
    if (it == errors_.end())
        throw OracleError("moment c_" + std::to_string(k) + " absent from table");
    return it->second;
}

std::string MomentTable::serialize() const {
    std::ostringstream os;
    os << "# field " << field_->signature() << "\n";
    os << "# n " << n_ << "\n";
    os << "# precision_bits " << precision_bits_ << "\n";
    for (const auto& [k, v] : values_)
        os << k << "\t" << decimal_from_real(v) << "\t" << decimal_from_real(errors_.at(k))
           << "\n";
    return os.str();
}

std::optional<MomentTable> MomentTable::deserialize(const ExternalField& field,
                                                    const std::string& text) {
    std::istringstream is(text);
    std::string line;
    std::string sig, nline, pline;
    if (!std::getline(is, sig) || !std::getline(is, nline) || !std::getline(is, pline))
        return std::nullopt;
    if (sig.rfind("# field ", 0) != 0 || sig.substr(8) != field.signature()) return std::nullopt;
    int n = std::stoi(nline.substr(4));
    unsigned bits = static_cast<unsigned>(std::stoul(pline.substr(17)));
    MomentTable table(field, n, bits);
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        int k;
        std::string v, e;
        ls >> k >> v >> e;
        table.values_[k] = real_from_decimal(v);
        table.errors_[k] = real_from_decimal(e);
    }
    return table;
}

LU lu_factor(std::vector<std::vector<Real>> a) {
    LU f;
    int m = static_cast<int>(a.size());
    f.row_perm.resize(m);
    f.col_perm.resize(m);
    for (int i = 0; i < m; ++i) f.row_perm[i] = f.col_perm[i] = i;
    for (int step = 0; step < m; ++step) {
        int pr = step, pc = step;
        Real best(-1);
        for (int i = step; i < m; ++i)
            for (int j = step; j < m; ++j) {
                Real v = abs(a[i][j]);
                if (v > best) {
                    best = v;
                    pr = i;
                    pc = j;
                }
            }
        if (best == 0) {
            f.singular = true;
            break;
        }
        if (pr != step) {
            std::swap(a[pr], a[step]);
            std::swap(f.row_perm[pr], f.row_perm[step]);
            f.sign = -f.sign;
        }
        if (pc != step) {
            for (int i = 0; i < m; ++i) std::swap(a[i][pc], a[i][step]);
            std::swap(f.col_perm[pc], f.col_perm[step]);
            f.sign = -f.sign;
        }
        for (int i = step + 1; i < m; ++i) {
            a[i][step] /= a[step][step];
            for (int j = step + 1; j < m; ++j) a[i][j] -= a[i][step] * a[step][j];
        }
    }
    f.lu = std::move(a);
    return f;
}

std::vector<Real> lu_solve(const LU& f, std::vector<Real> rhs) {
    if (f.singular) throw OracleError("linear system numerically singular at this precision");
    int m = static_cast<int>(f.lu.size());
    std::vector<Real> b(m);
    for (int i = 0; i < m; ++i) b[i] = rhs[f.row_perm[i]];
    for (int i = 1; i < m; ++i)
        for (int j = 0; j < i; ++j) b[i] -= f.lu[i][j] * b[j];
    for (int i = m - 1; i >= 0; --i) {
        for (int j = i + 1; j < m; ++j) b[i] -= f.lu[i][j] * b[j];
        b[i] /= f.lu[i][i];
    }
    std::vector<Real> x(m);
    for (int j = 0; j < m; ++j) x[f.col_perm[j]] = b[j];
    return x;
}

Real lu_det(const LU& f) {
    if (f.singular) return Real(0);
    Real d(f.sign);
    for (size_t i = 0; i < f.lu.size(); ++i) d *= f.lu[i][i];
    return d;
}

Real hankel_det(const MomentTable& table, int m, int k) {
    if (k == 0) return Real(1);
    if (k < 0) throw OracleError("hankel_det: negative order");
    std::vector<std::vector<Real>> a(k, std::vector<Real>(k));
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) a[i][j] = table.moment(m + i + j);
    return lu_det(lu_factor(std::move(a)));
}

LaurentPoly monic_olp_even(MomentTable& table, int n) {
    if (n == 0) return LaurentPoly(0, {Real(1)});
    // <pi_{2n}, z^j> = 0 for j=-n..n-1 with unit z^n coefficient:
    // sum_{l=-n}^{n-1} nu_l c_{l+j} = -c_{n+j}
    table.ensure_range(-2 * n, 2 * n);
    int m = 2 * n;
    std::vector<std::vector<Real>> a(m, std::vector<Real>(m));
    std::vector<Real> rhs(m);
    for (int r = 0; r < m; ++r) {
        int j = r - n;
        for (int c = 0; c < m; ++c) {
            int l = c - n;
            a[r][c] = table.moment(l + j);
        }
        rhs[r] = -table.moment(n + j);
    }
    auto nu = lu_solve(lu_factor(std::move(a)), std::move(rhs));
    nu.push_back(Real(1));
    return LaurentPoly(-n, std::move(nu));
}

LaurentPoly monic_olp_odd(MomentTable& table, int n) {
    // <pi_{2n+1}, z^j> = 0 for j=-n..n with unit z^{-n-1} coefficient:
    // sum_{l=-n}^{n} nu_l c_{l+j} = -c_{j-n-1}
    table.ensure_range(-2 * n - 2, 2 * n);
    int m = 2 * n + 1;
    std::vector<std::vector<Real>> a(m, std::vector<Real>(m));
    std::vector<Real> rhs(m);
    for (int r = 0; r < m; ++r) {
        int j = r - n;
        for (int c = 0; c < m; ++c) {
            int l = c - n;
            a[r][c] = table.moment(l + j);
        }
        rhs[r] = -table.moment(j - n - 1);
    }
    auto nu = lu_solve(lu_factor(std::move(a)), std::move(rhs));
    std::vector<Real> coef;
    coef.reserve(m + 1);
    coef.push_back(Real(1));
    for (auto& v : nu) coef.push_back(std::move(v));
    return LaurentPoly(-n - 1, std::move(coef));
}

Real norming_constant_even(MomentTable& table, int n) {
    table.ensure_range(-2 * n, 2 * n + 1);
    Real num = hankel_det(table, -2 * n, 2 * n);
    Real den = hankel_det(table, -2 * n, 2 * n + 1);
    if (num <= 0 || den <= 0)
        throw OracleError("hankel determinant positivity violated: precision exhausted");
    return sqrt(num / den);
}

namespace {

Real quadrature_inner(const std::function<Real(const Real&)>& poly_part,
                      const ExternalField& field, int n) {
    Real cutoff = pow(Real(10), -static_cast<int>(current_precision_digits()) - 8);
    Real tol = pow(Real(10), -static_cast<int>(current_precision_digits()) + 6);
    Real h("0.5");
    Real prev, result(0);
    bool have_prev = false;
    for (int level = 0; level < 9; ++level) {
        Real total(0), peaks(0);
        for (int sign : {+1, -1}) {
            auto term = [&](const Real& t) {
                Real s = exp(t);
                Real x = sign > 0 ? s : -s;
                return poly_part(x) * exp(t - n * field.eval(x));
            };
            Real peak(0);
            total += trapezoid_bilateral(term, h, cutoff, &peak);
            peaks += peak;
        }
        if (have_prev) {
            result = total;
            Real scale = abs(total) + peaks;
            if (abs(total - prev) < scale * tol) return result;
        }
        prev = total;
        have_prev = true;
        h /= 2;
    }
    throw OracleError("inner-product quadrature did not converge");
}

}  // namespace

std::vector<Real> orthogonality_residuals(const LaurentPoly& p, const ExternalField& field,
                                          int n, int j_min, int j_max) {
    std::vector<Real> out;
    for (int j = j_min; j <= j_max; ++j) {
        auto f = [&](const Real& x) {
            Real xp(1);
            Real base = j >= 0 ? x : 1 / x;
            for (int i = 0; i < (j >= 0 ? j : -j); ++i) xp *= base;
            return p.eval(x) * xp;
        };
        out.push_back(quadrature_inner(f, field, n));
    }
    return out;
}

Real weighted_inner_product(const LaurentPoly& p, const LaurentPoly& q,
                            const ExternalField& field, int n) {
    auto f = [&](const Real& x) { return p.eval(x) * q.eval(x); };
    return quadrature_inner(f, field, n);
}

Real hankel_multi_integral_check(const ExternalField& field, int n, int m, int k) {
    if (k < 0 || k > 3) throw OracleError("multi-integral check limited to k <= 3");
    if (k == 0) return Real(1);
    // (1/k!) int ... int prod s_i^m prod_{l<i} (s_i-s_l)^2 dmu(s_1)..dmu(s_k)
    // with a tensor-product of the 1-D log-substituted trapezoid grids.
    Real h("0.0625");
    Real cutoff = pow(Real(10), -static_cast<int>(current_precision_digits()) / 2 - 8);
    // collect 1-D nodes and weights (value of exp(t - n Vt(s)) at s = ±e^t)
    std::vector<Real> nodes;
    std::vector<Real> wts;
    for (int sign : {+1, -1}) {
        // scan outward from t=0 until decay, mirroring trapezoid_bilateral
        for (int dir : {+1, -1}) {
            Real peak(0);
            int consecutive_small = 0;
            for (int j = (dir == 1 ? 0 : 1); j < 4000; ++j) {
                Real t = dir * j * h;
                Real s = exp(t);
                Real x = sign > 0 ? s : -s;
                Real w = exp(t - n * field.eval(x));
                nodes.push_back(x);
                wts.push_back(w * h);
                if (w > peak) peak = w;
                if (w < cutoff * (peak + Real(1))) {
                    if (++consecutive_small > 3) break;
                } else {
                    consecutive_small = 0;
                }
            }
        }
    }
    size_t npts = nodes.size();
    auto smpow = [&](const Real& x) {
        Real xp(1);
        Real base = m >= 0 ? x : 1 / x;
        for (int i = 0; i < (m >= 0 ? m : -m); ++i) xp *= base;
        return xp;
    };
    Real total(0);
    if (k == 1) {
        for (size_t i = 0; i < npts; ++i) total += smpow(nodes[i]) * wts[i];
    } else if (k == 2) {
        for (size_t i = 0; i < npts; ++i) {
            Real fi = smpow(nodes[i]) * wts[i];
            if (fi == 0) continue;
            for (size_t j = 0; j < npts; ++j) {
                Real d = nodes[j] - nodes[i];
                total += fi * smpow(nodes[j]) * wts[j] * d * d;
            }
        }
        total /= 2;
    } else {
        for (size_t i = 0; i < npts; ++i) {
            Real fi = smpow(nodes[i]) * wts[i];
            if (fi == 0) continue;
            for (size_t j = 0; j < npts; ++j) {
                Real dij = nodes[j] - nodes[i];
                Real fj = fi * smpow(nodes[j]) * wts[j] * dij * dij;
                if (fj == 0) continue;
                for (size_t l = 0; l < npts; ++l) {
                    Real dil = nodes[l] - nodes[i];
                    Real djl = nodes[l] - nodes[j];
                    total += fj * smpow(nodes[l]) * wts[l] * dil * dil * djl * djl;
                }
            }
        }
        total /= 6;
    }
    return total;
}

}  // namespace olp

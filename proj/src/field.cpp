#include "olp/field.hpp"

#include <sstream>

namespace olp {

namespace {

Real real_int_pow(const Real& x, int k) {
    Real base = k >= 0 ? x : 1 / x;
    int e = k >= 0 ? k : -k;
    Real p(1);
    while (e) {
        if (e & 1) p *= base;
        base *= base;
        e >>= 1;
    }
    return p;
}

}  // namespace

ExternalField::ExternalField(std::map<int, Real> coefficients, Real z_o)
    : coeff_(std::move(coefficients)), z_o_(std::move(z_o)) {
    if (coeff_.empty()) throw FieldError("field: empty coefficient map");
    int lo = coeff_.begin()->first;
    int hi = coeff_.rbegin()->first;
    if (lo >= 0 || hi <= 0 || lo % 2 != 0 || hi % 2 != 0)
        throw FieldError("field: extreme exponents must be -2*m1 < 0 < 2*m2");
    m1_ = -lo / 2;
    m2_ = hi / 2;
}

ExternalField ExternalField::from_decimal(const std::map<int, std::string>& coeffs,
                                          const std::string& z_o) {
    std::map<int, Real> c;
    for (const auto& [k, v] : coeffs) c.emplace(k, real_from_decimal(v));
    return ExternalField(std::move(c), real_from_decimal(z_o));
}

bool ExternalField::is_even() const {
    for (const auto& [k, v] : coeff_)
        if (k % 2 != 0 && v != 0) return false;
    return true;
}

AdmissibilityReport ExternalField::validate() const {
    AdmissibilityReport rep;
    rep.m1 = m1_;
    rep.m2 = m2_;
    const Real& lead_neg = coeff_.begin()->second;
    const Real& lead_pos = coeff_.rbegin()->second;
    if (lead_pos <= 0) {
        rep.reason = "coefficient at exponent " + std::to_string(2 * m2_) +
                     " must be positive (growth at infinity fails)";
        return rep;
    }
    if (lead_neg <= 0) {
        rep.reason = "coefficient at exponent " + std::to_string(-2 * m1_) +
                     " must be positive (growth at the origin fails)";
        return rep;
    }
    if (z_o_ <= 0) {
        rep.reason = "z_o must be positive";
        return rep;
    }
    rep.admissible = true;
    return rep;
}

Cplx ExternalField::eval(const Cplx& z) const {
    if (z.re == 0 && z.im == 0) throw FieldError("field: evaluation at the origin");
    Cplx acc;
    for (const auto& [k, c] : coeff_) acc += Cplx(c) * pow(z, k);
    return acc * Cplx(z_o_);
}

Real ExternalField::eval(const Real& x) const {
    if (x == 0) throw FieldError("field: evaluation at the origin");
    Real acc(0);
    for (const auto& [k, c] : coeff_) acc += c * real_int_pow(x, k);
    return acc * z_o_;
}

Cplx ExternalField::derivative(const Cplx& z) const {
    if (z.re == 0 && z.im == 0) throw FieldError("field: evaluation at the origin");
    Cplx acc;
    for (const auto& [k, c] : coeff_) {
        if (k == 0) continue;
        acc += Cplx(c * k) * pow(z, k - 1);
    }
    return acc * Cplx(z_o_);
}

Real ExternalField::derivative(const Real& x) const {
    if (x == 0) throw FieldError("field: evaluation at the origin");
    Real acc(0);
    for (const auto& [k, c] : coeff_) {
        if (k == 0) continue;
        acc += c * k * real_int_pow(x, k - 1);
    }
    return acc * z_o_;
}

std::string ExternalField::signature() const {
    std::ostringstream os;
    os << "V{";
    for (const auto& [k, c] : coeff_) os << k << ":" << decimal_from_real(c) << ";";
    os << "}zo=" << decimal_from_real(z_o_);
    return os.str();
}

}  // namespace olp

#pragma once

#include "olp/cplx.hpp"
#include "olp/real.hpp"

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace olp {

struct FieldError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct AdmissibilityReport {
    bool admissible = false;
    int m1 = 0;  // lowest exponent is -2*m1
    int m2 = 0;  // highest exponent is 2*m2
    std::string reason;
};

// External field V(z) = sum_k rho_k z^k, a rational Laurent polynomial with
// rho_{-2 m1} > 0 and rho_{2 m2} > 0, scaled by z_o: the weight in all
// integrals is exp(-n * z_o * V(s)). Immutable after construction.
class ExternalField {
  public:
    ExternalField(std::map<int, Real> coefficients, Real z_o = Real(1));

    static ExternalField from_decimal(const std::map<int, std::string>& coeffs,
                                      const std::string& z_o = "1");

    const std::map<int, Real>& coefficients() const { return coeff_; }
    const Real& z_o() const { return z_o_; }
    int m1() const { return m1_; }
    int m2() const { return m2_; }
    bool is_even() const;

    AdmissibilityReport validate() const;

    // scaled field z_o * V(z); z must be nonzero
    Cplx eval(const Cplx& z) const;
    Real eval(const Real& x) const;

    // derivative of the scaled field, z_o * V'(z)
    Cplx derivative(const Cplx& z) const;
    Real derivative(const Real& x) const;

    // canonical text form, used for cache keys
    std::string signature() const;

  private:
    std::map<int, Real> coeff_;
    Real z_o_;
    int m1_ = 0, m2_ = 0;
};

}  // namespace olp

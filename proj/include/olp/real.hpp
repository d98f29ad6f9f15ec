#pragma once

#include <boost/multiprecision/mpfr.hpp>

#include <string>

namespace olp {

// Arbitrary-precision real scalar. Precision is process-global and set in
// decimal digits via set_precision_bits()/PrecisionScope before any values
// are constructed for a given run. Expression templates are off so that
// operations compose cleanly with lambdas, ternaries and std algorithms.
using Real = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>,
                                           boost::multiprecision::et_off>;

inline unsigned bits_to_digits10(unsigned bits) {
    return static_cast<unsigned>(bits * 0.30103) + 4;
}

inline void set_precision_bits(unsigned bits) {
    Real::default_precision(bits_to_digits10(bits));
}

inline unsigned current_precision_digits() { return Real::default_precision(); }

// Restores the ambient working precision on scope exit.
class PrecisionScope {
  public:
    explicit PrecisionScope(unsigned bits) : saved_(Real::default_precision()) {
        set_precision_bits(bits);
    }
    ~PrecisionScope() { Real::default_precision(saved_); }
    PrecisionScope(const PrecisionScope&) = delete;
    PrecisionScope& operator=(const PrecisionScope&) = delete;

  private:
    unsigned saved_;
};

inline Real pi() {
    Real r;
    mpfr_const_pi(r.backend().data(), MPFR_RNDN);
    return r;
}

// Machine epsilon at the current working precision.
inline Real eps() {
    Real e(1);
    return ldexp(e, -static_cast<int>(Real::default_precision() * 3.32193) + 4);
}

inline Real real_from_decimal(const std::string& s) { return Real(s); }

// Shortest decimal string that round-trips at the current precision.
inline std::string decimal_from_real(const Real& x) {
    return x.str(current_precision_digits(), std::ios_base::scientific);
}

inline int int_pow_sign(int k) { return (k % 2 == 0) ? 1 : -1; }

}  // namespace olp

#pragma once

#include "olp/cplx.hpp"
#include "olp/real.hpp"

#include <stdexcept>
#include <vector>

namespace olp {

// Real-coefficient Laurent polynomial sum_{k=lo}^{hi} c_k z^k.
class LaurentPoly {
  public:
    LaurentPoly() : lo_(0), coef_{Real(0)} {}
    LaurentPoly(int lo, std::vector<Real> coef) : lo_(lo), coef_(std::move(coef)) {
        if (coef_.empty()) coef_.push_back(Real(0));
    }

    int lowest() const { return lo_; }
    int highest() const { return lo_ + static_cast<int>(coef_.size()) - 1; }
    const std::vector<Real>& coefficients() const { return coef_; }

    Real coefficient(int k) const {
        if (k < lowest() || k > highest()) return Real(0);
        return coef_[k - lo_];
    }

    // split Horner: ascending part in z, descending part in 1/z
    Cplx eval(const Cplx& z) const {
        if (z.re == 0 && z.im == 0)
            throw std::domain_error("laurent: evaluation at the origin");
        Cplx up;   // sum_{k>=0} c_k z^k
        Cplx down; // sum_{k<0} c_k z^k
        int hi = highest();
        if (hi >= 0) {
            for (int k = hi; k >= 0; --k) {
                up = up * z;
                up += Cplx(coefficient(k));
            }
        }
        if (lo_ < 0) {
            Cplx zinv = Cplx(Real(1)) / z;
            for (int k = lo_; k < 0; ++k) {
                down = down * zinv;
                down += Cplx(coefficient(k));
            }
            down = down * zinv;  // lowest power applied last: ends at z^{-1} scale
            // after the loop down = sum_{k=lo..-1} c_k z^{k+1} * z^{-1}
        }
        return up + down;
    }

    Real eval(const Real& x) const {
        Cplx v = eval(Cplx(x));
        return v.re;
    }

  private:
    int lo_;
    std::vector<Real> coef_;
};

}  // namespace olp

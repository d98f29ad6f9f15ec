#pragma once

#include "olp/cplx.hpp"

#include <stdexcept>
#include <vector>

namespace olp {

struct ThetaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Riemann theta function of an N x N Riemann matrix tau (symmetric, purely
// imaginary, -i tau positive definite), evaluated as a truncated lattice sum
// with a certified Gaussian tail bound.
class ThetaContext {
  public:
    ThetaContext() = default;
    // the truncation radius budgets for arguments with |Im z_j| <= im_budget
    ThetaContext(std::vector<std::vector<Cplx>> tau, unsigned target_digits = 40,
                 Real im_budget = Real(1));

    int N() const { return N_; }
    int trunc_radius() const { return radius_; }
    const Real& lambda_min() const { return lambda_min_; }
    // tail of the truncated sum; im_inf bounds the sup-norm of Im z
    Real tail_bound(int radius, const Real& im_inf = Real(0)) const;

    // theta(z) = sum_m exp(2 pi i (m,z) + pi i (m,tau m)); empty product
    // convention theta = 1 for N = 0
    Cplx theta(const std::vector<Cplx>& z) const;

    // residual of theta(z + tau e_j) = exp(-2 pi i z_j - i pi tau_jj) theta(z)
    Real quasi_period_residual(const std::vector<Cplx>& z, int j) const;

    // lattice sum with the per-term factor ((m, w) * scale)^order, order 1
    // or 2; order 0 reduces to theta
    Cplx directional_sum(int order, const std::vector<Cplx>& w, const Cplx& scale,
                         const std::vector<Cplx>& z) const;

  private:
    int N_ = 0;
    int radius_ = 0;
    unsigned target_digits_ = 40;
    std::vector<std::vector<Cplx>> tau_;
    Real lambda_min_{1};

    template <typename Term>
    Cplx lattice_sum(const std::vector<Cplx>& z, Term&& term_factor) const;
};

}  // namespace olp

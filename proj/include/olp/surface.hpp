#pragma once

#include "olp/equilibrium.hpp"

#include <vector>

namespace olp {

struct SurfaceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Genus-N hyperelliptic data attached to a solved equilibrium configuration:
// normalized holomorphic differentials w_j = sum_k c_{jk} z^{N-k} / sqrtR dz
// with unit alpha-periods around the gaps, the Riemann matrix of
// beta-periods, the Abel-type map u(z) based at a_{N+1}, the gap zeros of
// the quarter-root combination, and the frequency/shift vectors entering the
// model solution.
class SurfaceData {
  public:
    SurfaceData() = default;
    SurfaceData(const EquilibriumData& eq, int quad_pts = 80);

    int N() const { return N_; }
    const std::vector<std::vector<Real>>& c_matrix() const { return c_; }
    const std::vector<std::vector<Cplx>>& tau() const { return tau_; }
    const std::vector<Real>& omega() const { return omega_; }          // Omega_j
    const std::vector<Real>& u_inf_plus() const { return u_inf_; }     // real vector
    const std::vector<Cplx>& d_vector() const { return d_; }
    const std::vector<Real>& gap_zeros() const { return gap_zeros_; }
    Real gerschgorin_bound() const;

    // alpha-period matrix entries  A[k][l] = oint_{alpha_k} s^{N-1-l}/sqrtR ds
    // (k, l zero-based), realized as twice the gap integral
    const std::vector<std::vector<Real>>& alpha_matrix() const { return alpha_; }

    // u_+(x): the boundary value from above of int_{a_{N+1}}^x w
    std::vector<Cplx> u_plus(const Real& x) const;
    // u(z) off the real axis (upper-sheet path through C+; lower half-plane
    // values are the conjugates of the reflected point)
    std::vector<Cplx> u(const Cplx& z) const;

    // quarter-root gamma of the model problem; side selects the boundary
    // value on its cuts (+1 from above, -1 from below); elsewhere both give
    // the same value
    Cplx gamma(const Cplx& z, int side = +1) const;

    // Q^e(z) = prod (z - b_k) - prod (z - a_j), the degree-N polynomial whose
    // roots are the gap zeros
    Real q_poly(const Real& x) const;

    // beta period of column k computed independently over an explicit
    // rectangle in the plane (branch-robust self-check route)
    Cplx beta_period_rectangle(int j, int k) const;

    // decompose v ~ n + tau m modulo the lattice; returns max distance of
    // (n, m) from integers
    Real lattice_residual(const std::vector<Cplx>& v) const;

    const EquilibriumData& equilibrium() const { return *eq_; }

  private:
    const EquilibriumData* eq_ = nullptr;
    int N_ = 0;
    int quad_pts_ = 80;
    std::vector<std::vector<Real>> alpha_;
    std::vector<std::vector<Real>> c_;
    std::vector<std::vector<Cplx>> tau_;
    std::vector<Real> omega_;
    std::vector<Real> u_inf_;
    std::vector<Cplx> d_;
    std::vector<Real> gap_zeros_;

    // int s^{N-1-l} / sqrtR_plus over [x1, x2] within one band/gap interval,
    // absorbing inverse square-root endpoint singularities
    Cplx basis_integral_piece(int l, const Real& x1, const Real& x2, bool from_above) const;
    std::vector<Cplx> u_between(const Real& x_lo, const Real& x_hi) const;
};

}  // namespace olp

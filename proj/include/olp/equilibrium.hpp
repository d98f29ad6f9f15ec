#pragma once

#include "olp/field.hpp"
#include "olp/quad.hpp"

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace olp {

struct EquilibriumError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Branch bookkeeping for (R_e(z))^{1/2} with R_e(z) = prod (z - e_i) over the
// 2N+2 endpoints b_0 < a_1 < b_1 < ... < b_N < a_{N+1}. The working branch is
// the product of principal square roots of the linear factors: analytic off
// the bands, ~ +z^{N+1} at infinity from every direction, and continuous
// across the gaps. Boundary values on the bands are taken from above unless
// stated otherwise.
class SqrtR {
  public:
    SqrtR() = default;
    explicit SqrtR(std::vector<Real> endpoints);

    int N() const { return N_; }
    const std::vector<Real>& endpoints() const { return e_; }
    Real b(int j) const { return e_[2 * j]; }          // b_j,   j = 0..N
    Real a(int j) const { return e_[2 * j - 1]; }      // a_j,   j = 1..N+1
    Real band_lo(int j) const { return e_[2 * j - 2]; }  // band j = (b_{j-1}, a_j), j = 1..N+1
    Real band_hi(int j) const { return e_[2 * j - 1]; }
    Real gap_lo(int j) const { return e_[2 * j - 1]; }   // gap j = (a_j, b_j), j = 1..N
    Real gap_hi(int j) const { return e_[2 * j]; }

    // band-cut branch, z off the closed bands
    Cplx value(const Cplx& z) const;
    // boundary value from the upper half-plane at real x (finite everywhere,
    // zero at the endpoints)
    Cplx plus(const Real& x) const;
    // |R_e(x)|^{1/2}
    Real abs_sqrt(const Real& x) const;
    // sign of the branch on gap j (and on the exterior pieces): value(x) for
    // real x off the bands equals sign * abs_sqrt(x)
    int real_sign(const Real& x) const;
    // sign factor sigma_j = (-1)^{N+1-j} with plus(x) = i*sigma_j*abs_sqrt on band j
    int band_sigma(int j) const { return ((N_ + 1 - j) % 2 == 0) ? 1 : -1; }

    int band_of(const Real& x) const;  // 1..N+1, or 0 if not inside a band
    int gap_of(const Real& x) const;   // 1..N, or 0

  private:
    std::vector<Real> e_;
    int N_ = 0;
};

// h_V(z): the two-circle contour integral
//   h(z) = (1/2) oint (i/(pi s) + i V~'(s)/(2 pi)) / (sqrtR(s) (s - z)) ds
// with the outer circle clockwise, the inner counter-clockwise and z inside
// the annulus. Derivatives differentiate under the integral sign.
class HContour {
  public:
    HContour() = default;
    HContour(const ExternalField& field, SqrtR sq);

    Cplx eval_c(const Cplx& z, int deriv = 0) const;
    Real eval(const Real& x, int deriv = 0) const;
    const Real& inner_radius() const { return r_in_; }
    const Real& outer_radius() const { return r_out_; }
    const SqrtR& sqrt_r() const { return sq_; }

  private:
    const ExternalField* field_ = nullptr;
    SqrtR sq_;
    Real r_in_, r_out_;
    mutable int cached_pts_ = 0;
    // z-independent samples K(s) = G(s)/sqrtR(s) * i s at the circle nodes,
    // cached per point count (the kernel 1/(s-z) is applied at eval time)
    struct CircleCache {
        int npts = 0;
        std::vector<Cplx> s;
        std::vector<Cplx> k;
    };
    mutable std::vector<CircleCache> inner_, outer_;

    const CircleCache& circle_cache(bool outer, int npts) const;
    Cplx circle_integral(bool outer, const Cplx& z, int deriv, int npts) const;
};

// Independent closed form of h for rational fields, as a Laurent polynomial:
// built from the Laurent series of 1/sqrtR at 0 and infinity. Returns the
// coefficient list (exponents low..high).
struct LaurentCoeffs {
    int lo = 0;
    std::vector<Real> c;
    Real eval(const Real& x) const;
    Cplx eval(const Cplx& z) const;
};
LaurentCoeffs h_closed_form(const ExternalField& field, const SqrtR& sq);

// Per-band spectral tables for the solved equilibrium measure:
// the density is psi(x) = sigma_j |R|^{1/2} h(x) / (2 pi) on band j, written
// as c * sqrt(1-t^2) * Q(t) under s = m + c t; Q is expanded in Chebyshev-U.
struct BandTable {
    Real m, c;                 // band midpoint / halfwidth
    std::vector<Real> ucoef;   // U-series of Q
    std::vector<Real> nodes;   // U-rule nodes (s values)
    std::vector<Real> psi;     // density at the nodes
    std::vector<Real> wts;     // U-rule weights incl. jacobian
    Real mass;                 // int_band psi

    Real psi_at(const Real& x) const;          // density inside the band
    Real mass_right_of(const Real& x) const;   // int_x^{band hi} psi
    // int_band ln|x-s| psi(s) ds, valid for x inside or outside the band
    Real log_potential(const Real& x) const;
    // int_band ln(z - s) psi(s) ds with the principal log; uses the
    // analytically continued Chebyshev form near the band (accurate
    // arbitrarily close to the cut) and plain node sums far away
    Cplx log_potential_c(const Cplx& z) const;
    // analytic continuation of mass_right_of off the band (two-sided: the
    // continuation through the open band, as needed by the oscillatory
    // phase factors)
    Cplx mass_right_c(const Cplx& z) const;
};

struct EquilibriumData {
    int N = 0;
    std::vector<Real> endpoints;
    Real ell;              // variational constant
    Real Q_re, Q_im;       // Q_e = int ln(s) dmu
    std::vector<Real> band_masses;
    Real residual_norm;
    SqrtR sq;
    std::vector<BandTable> bands;
    std::shared_ptr<HContour> h;

    Real total_mass() const;
    Real density(const Real& x) const;  // 0 outside the bands
    // int_x^{a_{N+1}} psi over the support, for real x
    Real mass_right_of(const Real& x) const;
    // sum of band log-potentials int ln|x-s| psi ds
    Real log_potential(const Real& x) const;
    // 4 int ln|x-s| dmu - 2 ln|x| - V~(x) - ell   (=0 on bands, <0 off)
    Real variational_value(const ExternalField& field, const Real& x) const;
    // complex potential g(z); see g_function below
    Cplx g(const ExternalField& field, const Cplx& z) const;
    Cplx g_plus(const ExternalField& field, const Real& x) const;
    Cplx g_minus(const ExternalField& field, const Real& x) const;
};

// Band tables for a candidate density built from h on the bands.
std::vector<BandTable> make_band_tables(const ExternalField& field, const SqrtR& sq,
                                        const HContour& h, int band_pts);

// Moment-condition residual (T_0,...,T_N, T_{N+1}+4, N_1,...,N_N). The gap
// conditions N_j are evaluated as differences of the effective potential
// 4 int ln|x-s| psi - 2 ln|x| - V~(x) across each gap (equivalent to the gap
// integral of sqrtR*h, but regular when a gap straddles the origin where h
// has its pole).
std::vector<Real> moment_conditions_residual(const ExternalField& field,
                                             const std::vector<Real>& endpoints,
                                             int quad_pts = 96);

struct SolveOptions {
    // a little below the documented 1e-10 so that derived quantities
    // (endpoint symmetries, masses) clear the same tolerance
    Real tol = Real("1e-14");
    int max_iter = 60;
    int quad_pts = 96;
    bool analytic_jacobian = true;
    Real fd_step = Real("1e-7");
};

// Damped Newton iteration on the moment conditions, starting from a strictly
// ordered guess. Returns endpoints only (no tables built).
std::vector<Real> solve_endpoints(const ExternalField& field, int N,
                                  std::vector<Real> guess, const SolveOptions& opt = {});

// Full solve: endpoints + density tables + masses + Q_e + ell.
EquilibriumData build_equilibrium(const ExternalField& field, std::vector<Real> endpoints,
                                  int band_pts = 120);

// Try N = 0..N_max with heuristic guesses; accept the first admissible
// solution (density nonneg, strict variational inequality off bands,
// h nonzero at the endpoints).
EquilibriumData detect_N(const ExternalField& field, int N_max, const SolveOptions& opt = {});

// Initial guesses
std::vector<Real> symmetric_two_band_guess(const ExternalField& field);
std::vector<Real> single_band_guess(const ExternalField& field, int side);

// Equilibrium moments int s^k dmu for k in {+-1,+-2,+-3} by the closed
// forms (band integrals of the field against 1/sqrtR plus symmetric
// functions of the endpoints).
Real equilibrium_moment_closed(const ExternalField& field, const EquilibriumData& eq, int k);
// the same moments by direct quadrature of the density
Real equilibrium_moment_direct(const EquilibriumData& eq, int k);

// ell_e evaluated from the variational equality at x0 (defaults to the
// midpoint of the last band when x0 is not finite).
Real variational_constant(const ExternalField& field, const EquilibriumData& eq, const Real& x0);

}  // namespace olp

#include "olp/theta.hpp"

#include "olp/real.hpp"

#include <cmath>

namespace olp {

ThetaContext::ThetaContext(std::vector<std::vector<Cplx>> tau, unsigned target_digits,
                           Real im_budget)
    : N_(static_cast<int>(tau.size())), target_digits_(target_digits), tau_(std::move(tau)) {
    if (N_ == 0) return;
    for (int i = 0; i < N_; ++i) {
        if (static_cast<int>(tau_[i].size()) != N_) throw ThetaError("tau not square");
        for (int j = 0; j < N_; ++j) {
            if (abs(tau_[i][j].re) > Real("1e-8"))
                throw ThetaError("tau has a significant real part");
            if (abs(tau_[i][j] - tau_[j][i]) > Real("1e-8"))
                throw ThetaError("tau not symmetric");
        }
    }
    // smallest eigenvalue of -i tau (symmetric positive definite); a
    // Gershgorin lower bound is enough to size the truncation at desk scale
    std::vector<std::vector<Real>> m(N_, std::vector<Real>(N_));
    for (int i = 0; i < N_; ++i)
        for (int j = 0; j < N_; ++j) m[i][j] = tau_[i][j].im;
    if (N_ == 1) {
        lambda_min_ = m[0][0];
    } else {
        Real lo = m[0][0];
        for (int i = 0; i < N_; ++i) {
            Real row = m[i][i];
            for (int j = 0; j < N_; ++j)
                if (j != i) row -= abs(m[i][j]);
            lo = std::min(lo, row);
        }
        lambda_min_ = lo > 0 ? lo : Real("1e-3");
    }
    if (lambda_min_ <= 0) throw ThetaError("-i tau is not positive definite");
    for (int r = 1; r < 4000; ++r) {
        if (tail_bound(r, im_budget) < pow(Real(10), -static_cast<int>(target_digits_))) {
            radius_ = r;
            return;
        }
    }
    throw ThetaError("truncation radius exceeds the budget; reduce target digits");
}

Real ThetaContext::tail_bound(int radius, const Real& im_inf) const {
    // shells ||m||_inf = k > radius have (2k+1)^N - (2k-1)^N points, each
    // bounded by exp(-pi lambda_min k^2 + 2 pi N k |Im z|)
    Real total(0);
    for (int k = radius + 1; k < radius + 400; ++k) {
        Real card = pow(Real(2 * k + 1), N_) - pow(Real(2 * k - 1), N_);
        Real term = card * exp(-pi() * lambda_min_ * k * k + 2 * pi() * N_ * k * im_inf);
        total += term;
        if (k > radius + 4 && term < total * Real("1e-40")) break;
    }
    return total;
}

template <typename Term>
Cplx ThetaContext::lattice_sum(const std::vector<Cplx>& z, Term&& term_factor) const {
    std::vector<int> m(N_, -radius_);
    Cplx total;
    while (true) {
        // exponent 2 pi i (m,z) + pi i (m, tau m); the real part of (m,z) is
        // reduced mod 1 so large frequency shifts stay well conditioned
        Real re_mz(0), im_mz(0);
        for (int i = 0; i < N_; ++i) {
            re_mz += m[i] * z[i].re;
            im_mz += m[i] * z[i].im;
        }
        re_mz -= floor(re_mz);
        Cplx expo = Cplx(Real(0), 2 * pi()) * Cplx(re_mz, im_mz);
        Cplx quad;
        for (int i = 0; i < N_; ++i)
            for (int j = 0; j < N_; ++j) quad += Cplx(Real(m[i] * m[j])) * tau_[i][j];
        expo += Cplx(Real(0), pi()) * quad;
        total += term_factor(m) * exp(expo);
        int pos = 0;
        while (pos < N_ && m[pos] == radius_) {
            m[pos] = -radius_;
            ++pos;
        }
        if (pos == N_) break;
        ++m[pos];
    }
    return total;
}

Cplx ThetaContext::theta(const std::vector<Cplx>& z) const {
    if (N_ == 0) return Cplx(Real(1));
    if (static_cast<int>(z.size()) != N_) throw ThetaError("theta: argument size mismatch");
    return lattice_sum(z, [](const std::vector<int>&) { return Cplx(Real(1)); });
}

Real ThetaContext::quasi_period_residual(const std::vector<Cplx>& z, int j) const {
    if (N_ == 0) return Real(0);
    std::vector<Cplx> shifted = z;
    for (int i = 0; i < N_; ++i) shifted[i] += tau_[i][j];
    Cplx lhs = theta(shifted);
    Cplx factor = exp(Cplx(Real(0), -2 * pi()) * z[j] + Cplx(Real(0), -pi()) * tau_[j][j]);
    Cplx rhs = factor * theta(z);
    return abs(lhs - rhs) / (abs(rhs) + Real(1));
}

Cplx ThetaContext::directional_sum(int order, const std::vector<Cplx>& w, const Cplx& scale,
                                   const std::vector<Cplx>& z) const {
    if (order == 0) return theta(z);
    if (N_ == 0) return Cplx();
    return lattice_sum(z, [&](const std::vector<int>& m) {
        Cplx mw;
        for (int i = 0; i < N_; ++i) mw += Cplx(Real(m[i])) * w[i];
        mw *= scale;
        return order == 1 ? mw : mw * mw;
    });
}

}  // namespace olp

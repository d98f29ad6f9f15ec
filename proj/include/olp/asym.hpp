#pragma once

#include "olp/equilibrium.hpp"
#include "olp/surface.hpp"
#include "olp/theta.hpp"

#include <array>
#include <memory>
#include <string>

namespace olp {

struct AsymError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Mat2 {
    std::array<std::array<Cplx, 2>, 2> a{};
    Cplx& operator()(int i, int j) { return a[i][j]; }
    const Cplx& operator()(int i, int j) const { return a[i][j]; }
    Cplx det() const { return a[0][0] * a[1][1] - a[0][1] * a[1][0]; }
    Mat2 inverse() const;
    Real norm() const;
};
Mat2 operator*(const Mat2& x, const Mat2& y);
Mat2 operator+(const Mat2& x, const Mat2& y);
Mat2 operator-(const Mat2& x, const Mat2& y);
Mat2 operator*(const Cplx& s, const Mat2& x);

enum class RegionKind { Upper, Lower, BandUpper, BandLower, DiscLeft, DiscRight };

struct RegionTag {
    RegionKind kind = RegionKind::Upper;
    int band = 0;      // band index for the strip regions (1..N+1)
    int endpoint = 0;  // disc regions: band index j of the endpoint (b_{j-1} or a_j)
    int sector = 0;    // disc regions: 1..4
    std::string label() const;
};

// Assembled strong asymptotics for one weight exponent n: region
// classification, the model solution, Airy-disc parametrices, the leading
// and 1/n-corrected values of pi_{2n}, its weighted Cauchy transform, and
// the norming constant.
class AsymptoticEvaluator {
  public:
    AsymptoticEvaluator(const ExternalField& field, const EquilibriumData& eq,
                        const SurfaceData& surf, int n, unsigned theta_digits = 40);

    int n() const { return n_; }
    const std::vector<Real>& disc_radii() const { return delta_; }

    RegionTag classify(const Cplx& z) const;

    // model solution; for real z the limit is taken from the upper side
    // unless side = -1
    Mat2 model_matrix(const Cplx& z, int side = +1) const;

    // xi and the conformal power p = ((3n/4) xi)^{2/3} at the endpoint with
    // vector index ep (0..2N+1); angle carries the branch-adjusted argument
    struct ConformalPoint {
        Cplx xi;
        Real p_mag;
        Real p_angle;
        Cplx p() const { return polar(p_mag, p_angle); }
        Cplx p_pow(const Real& e) const { return polar(pow(p_mag, e), p_angle * e); }
    };
    ConformalPoint conformal(int ep, const Cplx& z, int side = +1) const;

    // Airy parametrix matrix for a disc region
    Mat2 parametrix(const RegionTag& tag, const Cplx& z, int side = +1) const;

    // analytic continuation of int_z^{a_{N+1}} psi through band `band`
    Cplx osc_phase(int band, const Cplx& z) const;

    struct Prediction {
        RegionTag region;
        Cplx pi2n;
        Cplx cauchy;
        Cplx pi2n_corrected;
        Cplx cauchy_corrected;
    };
    Prediction predict(const Cplx& z, int side = +1) const;
    Prediction predict_in(const RegionTag& tag, const Cplx& z, int side = +1) const;

    // Tier-2 correction data
    struct EndpointData {
        Real x;
        bool left;  // b-type endpoint
        int j;      // band index (1..N+1); left endpoints use Omega_{j-1}
        Cplx lambda;        // branch coefficient of sqrtR at the endpoint
        Real eta;
        Cplx h, h_prime;
        Cplx alpha0, alpha1;
        Cplx q0, q1;
        Cplx kappa1, kappa2;
        Cplx aleph_p, aleph_m;    // aleph^1_{+1}, aleph^1_{-1}
        Cplx daleth_p, daleth_m;  // daleth^1_{+1}, daleth^1_{-1}
        Cplx mho_phase;           // exp(i n mho)
        Mat2 A, B;
    };
    const std::vector<EndpointData>& endpoint_data() const;

    Mat2 r_infinity(const Cplx& z) const;
    Mat2 r_local(const RegionTag& tag, const Cplx& z, int side = +1) const;

    // norming-constant asymptotics: leading factor and the (1 2) entry of
    // the correction matrix
    Real xi_flat() const;
    Cplx q_flat_12() const;
    Real norming_prediction(bool corrected) const;

    static Real s1() { return Real(5) / 72; }
    static Real t1() { return Real(-7) / 72; }

    // branch policy for the left-endpoint conformal maps. The mirrored
    // branch (upper half-plane mapped to upper conformal angles, matching
    // the non-orientation-preserving map) is the one under which the disc
    // parametrices match the model solution to O(1/n); the holomorphic
    // variant stays available for the self-check that distinguishes them.
    enum class LeftBranch { Holomorphic, Mirrored };
    void set_left_branch(LeftBranch b) { left_branch_ = b; }

    const ThetaContext& theta() const { return theta_; }
    const SurfaceData& surface() const { return *surf_; }
    const EquilibriumData& equilibrium() const { return *eq_; }

  private:
    const ExternalField* field_;
    const EquilibriumData* eq_;
    const SurfaceData* surf_;
    int n_;
    ThetaContext theta_;
    std::vector<Real> delta_;   // disc radius per endpoint vector index
    std::vector<Real> strip_;   // half-height per band
    LeftBranch left_branch_ = LeftBranch::Mirrored;
    mutable std::shared_ptr<std::vector<EndpointData>> epdata_;

    // frequency shift (n/2pi) Omega as a real vector
    std::vector<Real> n_shift_;
    std::vector<Cplx> u_inf_c_;
    std::vector<Cplx> d_c_;

    Cplx theta_at(const std::vector<Cplx>& u, int su, int somega, int sd) const;
    Cplx mho_phase(int index) const;  // exp(i n mho_index), index 0..N+1
    int ep_band(int ep) const { return ep / 2 + 1; }
    bool ep_left(int ep) const { return ep % 2 == 0; }
    Cplx g_value(const Cplx& z, int side) const;
};

}  // namespace olp

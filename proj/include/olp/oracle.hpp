#pragma once

#include "olp/field.hpp"
#include "olp/laurent.hpp"
#include "olp/real.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace olp {

struct OracleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Strong moments c_k = int_R s^k exp(-n*Vt(s)) ds for one weight exponent n.
class MomentTable {
  public:
    MomentTable(const ExternalField& field, int n, unsigned precision_bits);

    // extend the table to cover [k_min, k_max]
    void ensure_range(int k_min, int k_max);

    Real moment(int k) const;
    Real error_estimate(int k) const;
    bool has(int k) const { return values_.count(k) > 0; }
    int n() const { return n_; }
    unsigned precision_bits() const { return precision_bits_; }
    const ExternalField& field() const { return *field_; }

    // text persistence: header lines with field hash, n and precision, then
    // one record per line "k <tab> value <tab> error"
    std::string serialize() const;
    static std::optional<MomentTable> deserialize(const ExternalField& field,
                                                  const std::string& text);

  private:
    const ExternalField* field_;
    int n_;
    unsigned precision_bits_;
    std::map<int, Real> values_;
    std::map<int, Real> errors_;

    std::pair<Real, Real> compute_moment(int k) const;
};

// k x k Hankel determinant H^{(m)}_k of the table's moments (H_0 = 1).
Real hankel_det(const MomentTable& table, int m, int k);

// Monic orthogonal Laurent polynomials. Even degree 2n spans exponents
// [-n, n] with unit coefficient at z^n; odd degree 2n+1 spans [-n-1, n]
// with unit coefficient at z^{-n-1}.
LaurentPoly monic_olp_even(MomentTable& table, int n);
LaurentPoly monic_olp_odd(MomentTable& table, int n);

// xi_n^{(2n)} = sqrt(H^{(-2n)}_{2n} / H^{(-2n)}_{2n+1})
Real norming_constant_even(MomentTable& table, int n);

// <p, z^j> for j in [j_min, j_max], each by fresh quadrature (independent of
// the moment table).
std::vector<Real> orthogonality_residuals(const LaurentPoly& p, const ExternalField& field,
                                          int n, int j_min, int j_max);

// <p, q> by fresh quadrature
Real weighted_inner_product(const LaurentPoly& p, const LaurentPoly& q,
                            const ExternalField& field, int n);

// H^{(m)}_k via the k-fold integral representation (k <= 3): used only as a
// cross-check of hankel_det.
Real hankel_multi_integral_check(const ExternalField& field, int n, int m, int k);

// Dense linear algebra at working precision with full pivoting.
struct LU {
    std::vector<std::vector<Real>> lu;
    std::vector<int> row_perm, col_perm;
    int sign = 1;
    bool singular = false;
};
LU lu_factor(std::vector<std::vector<Real>> a);
std::vector<Real> lu_solve(const LU& f, std::vector<Real> rhs);
Real lu_det(const LU& f);

}  // namespace olp

#pragma once

#include "olp/cplx.hpp"

namespace olp {

// Airy function and derivative on the whole plane: Maclaurin series inside
// |z| <= 12 (round-off absorbed by the working precision), the standard
// asymptotic series outside, and the rotation identity
// Ai(z) = -w Ai(w z) - w^2 Ai(w^2 z), w = exp(2 pi i/3), near the negative
// axis where the asymptotic series degrades.
Cplx airy_ai(const Cplx& z);
Cplx airy_ai_prime(const Cplx& z);

}  // namespace olp

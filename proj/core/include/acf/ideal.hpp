#pragma once
// Prime classification in O_K, prime ideals above odd rational primes, and
// the residue ring isomorphism sigma: O_K/p ~ F_p (inertial degree 1 only).

#include <stdexcept>
#include <vector>

#include "acf/fp.hpp"
#include "acf/ring.hpp"

namespace acf {

enum class PrimeKind { split, ramified, inert };

/// Raised when an inert prime is passed where a degree-1 ideal is required.
/// The residue field would be F_{p^2}, which this library does not model.
struct InertPrimeError : std::domain_error {
  using std::domain_error::domain_error;
};

struct PrimeIdeal {
  Ring ring;
  long long p = 0;
  PrimeKind kind = PrimeKind::split;
  // Split case: a0^2 = d (mod p), normalized to the smaller of the two roots.
  // -1 when not applicable.
  long long a0 = -1;
  long long norm = 0;  // N(ideal) = p^f
  int f = 1;           // inertial degree
  // sigma(xi) in [0, p); determines sigma on all of O_K.
  long long xi_residue = 0;
  // Gauss-reduced Z-basis of the ideal viewed as a rank-2 lattice in C.
  QuadInt basis[2];
};

/// split, ramified or inert according to the Kronecker symbol of the
/// discriminant. p must be prime.
PrimeKind classify_prime(const Ring& ring, long long p);

/// The prime ideal (p, a0+sqrt(d)) above a split odd prime, or (p, sqrt(d))
/// above a ramified one. Inert primes raise InertPrimeError; p = 2 and
/// composite p raise std::invalid_argument.
PrimeIdeal prime_ideal_above(const Ring& ring, long long p);

/// sigma = M^{-1} o (mod ideal), the ring homomorphism O_K -> F_p with
/// kernel exactly the ideal. Computed as (a + b * xi_residue) mod p.
FpElem sigma(const QuadInt& x, const PrimeIdeal& ideal);

/// M, the canonical coset representative of c: the rational integer c itself.
/// sigma(lift(c)) = c and lift(sigma(x)) = x (mod ideal).
QuadInt lift(const FpElem& c, const PrimeIdeal& ideal);
QuadInt lift(long long c, const PrimeIdeal& ideal);

/// Odd primes < limit that split in the ring (optionally also the ramified
/// ones). p = 2 is never included; ideal construction requires odd p.
std::vector<long long> usable_primes(const Ring& ring, long long limit,
                                     bool include_ramified);

const char* to_string(PrimeKind k);

/// Generator display, e.g. "(23, 8+sqrt(-5))" for the split ideal above 23
/// in d = -5.
std::string generator_string(const PrimeIdeal& ideal);

}  // namespace acf

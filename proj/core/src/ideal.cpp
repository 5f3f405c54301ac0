#include "acf/ideal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace acf {

namespace {

// 2 * Re<embed(x), embed(y)> as an exact integer, via the norm form.
long long inner2(const Ring& ring, const QuadInt& x, const QuadInt& y) {
  return checked_sub(checked_sub(norm(ring, add(ring, x, y)), norm(ring, x)),
                     norm(ring, y));
}

QuadInt scale_qi(const Ring& ring, long long k, const QuadInt& x) {
  return {checked_mul(k, x.a), checked_mul(k, x.b), ring.d};
}

// Lagrange (Gauss) reduction of a rank-2 basis, exact integer arithmetic.
// mu rounds ties toward zero: a projection of exactly 1/2 is already reduced,
// and rounding it away oscillates between two equal-norm bases.
void reduce_basis(const Ring& ring, QuadInt& b1, QuadInt& b2) {
  for (;;) {
    if (norm(ring, b1) > norm(ring, b2)) std::swap(b1, b2);
    const long long n1 = norm(ring, b1);
    const long long ip2 = inner2(ring, b2, b1);  // 2<b2,b1>
    // nearest integer to <b2,b1>/<b1,b1> = ip2 / (2 n1)
    const long long den = checked_mul(2, n1);
    const long long mu =
        ip2 >= 0 ? (ip2 + n1 - 1) / den : -((-ip2 + n1 - 1) / den);
    if (mu == 0) break;
    const QuadInt cand = sub(ring, b2, scale_qi(ring, mu, b1));
    if (norm(ring, cand) >= norm(ring, b2)) break;
    b2 = cand;
  }
  if (norm(ring, b1) > norm(ring, b2)) std::swap(b1, b2);
}

}  // namespace

PrimeKind classify_prime(const Ring& ring, long long p) {
  const long long k = kronecker(ring.discriminant, p);
  if (k == 1) return PrimeKind::split;
  if (k == 0) return PrimeKind::ramified;
  return PrimeKind::inert;
}

PrimeIdeal prime_ideal_above(const Ring& ring, long long p) {
  if (!is_prime(p)) throw std::invalid_argument("p must be prime");
  if (p == 2)
    throw std::invalid_argument("p = 2 unsupported; ideals require an odd prime");
  const PrimeKind kind = classify_prime(ring, p);
  if (kind == PrimeKind::inert)
    throw InertPrimeError("inert prime: residue field F_{p^2} unsupported");

  PrimeIdeal ideal;
  ideal.ring = ring;
  ideal.p = p;
  ideal.kind = kind;
  ideal.norm = p;
  ideal.f = 1;

  if (kind == PrimeKind::split) {
    const auto root = sqrt_mod(mod_norm(ring.d, p), p);
    if (!root) throw std::logic_error("split prime without a square root of d");
    const long long r = *root;
    ideal.a0 = std::min(r, p - r);
  } else {
    ideal.a0 = -1;
  }

  // sigma(xi): sqrt(d) maps to -a0 (split) or 0 (ramified); in the half case
  // xi = (1 + sqrt(d))/2, so sigma(xi) = (1 - a0) / 2 resp. 1/2 mod p. This
  // is the choice whose kernel is generated by (p, a0 + sqrt(d)).
  const long long sd = ideal.kind == PrimeKind::split ? mod_norm(-ideal.a0, p) : 0;
  if (ring.xi_case == XiCase::whole) {
    ideal.xi_residue = sd;
  } else {
    const long long inv2 = inv_mod(2, p);
    ideal.xi_residue = mul_mod(add_mod(1, sd, p), inv2, p);
  }

  // Z-basis {(p, 0), (-xi_residue mod p, 1)} of the kernel of sigma.
  QuadInt b1{p, 0, ring.d};
  QuadInt b2{mod_norm(-ideal.xi_residue, p), 1, ring.d};
  reduce_basis(ring, b1, b2);
  ideal.basis[0] = b1;
  ideal.basis[1] = b2;
  return ideal;
}

FpElem sigma(const QuadInt& x, const PrimeIdeal& ideal) {
  if (x.d != ideal.ring.d)
    throw std::invalid_argument("QuadInt belongs to a different ring");
  const long long p = ideal.p;
  const long long v = add_mod(mod_norm(x.a, p),
                              mul_mod(mod_norm(x.b, p), ideal.xi_residue, p), p);
  return {v, p};
}

QuadInt lift(const FpElem& c, const PrimeIdeal& ideal) {
  if (c.p != ideal.p)
    throw std::invalid_argument("FpElem modulus does not match the ideal");
  return lift(c.value, ideal);
}

QuadInt lift(long long c, const PrimeIdeal& ideal) {
  return {mod_norm(c, ideal.p), 0, ideal.ring.d};
}

std::vector<long long> usable_primes(const Ring& ring, long long limit,
                                     bool include_ramified) {
  std::vector<long long> out;
  for (long long p = 3; p < limit; p += 2) {
    if (!is_prime(p)) continue;
    const PrimeKind k = classify_prime(ring, p);
    if (k == PrimeKind::split || (include_ramified && k == PrimeKind::ramified))
      out.push_back(p);
  }
  return out;
}

const char* to_string(PrimeKind k) {
  switch (k) {
    case PrimeKind::split: return "split";
    case PrimeKind::ramified: return "ramified";
    default: return "inert";
  }
}

std::string generator_string(const PrimeIdeal& ideal) {
  char buf[96];
  if (ideal.kind == PrimeKind::ramified) {
    std::snprintf(buf, sizeof(buf), "(%lld, sqrt(%lld))", ideal.p, ideal.ring.d);
  } else {
    std::snprintf(buf, sizeof(buf), "(%lld, %lld+sqrt(%lld))", ideal.p, ideal.a0,
                  ideal.ring.d);
  }
  return buf;
}

}  // namespace acf

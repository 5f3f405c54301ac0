#pragma once
// Prime-field scalar helpers: primality at desk scale, modular arithmetic,
// Kronecker symbols, Tonelli-Shanks square roots, and small dense linear
// algebra mod p.

#include <optional>
#include <vector>

namespace acf {

struct FpElem {
  long long value = 0;  // in [0, p)
  long long p = 2;
};

inline bool operator==(const FpElem& x, const FpElem& y) {
  return x.value == y.value && x.p == y.p;
}
inline bool operator!=(const FpElem& x, const FpElem& y) { return !(x == y); }

/// Deterministic trial-division primality test, valid for the desk-scale
/// moduli used here.
bool is_prime(long long n);

/// x mod m normalized to [0, m).
long long mod_norm(long long x, long long m);

long long add_mod(long long x, long long y, long long m);
long long sub_mod(long long x, long long y, long long m);
long long mul_mod(long long x, long long y, long long m);  // 128-bit product
long long pow_mod(long long base, long long exp, long long m);

/// Inverse mod prime p; throws std::invalid_argument on x = 0 (mod p).
long long inv_mod(long long x, long long p);

/// Kronecker symbol (delta/p) for prime p, in {-1, 0, 1}. For odd p this is
/// the Legendre symbol via Euler's criterion. Rejects non-prime p.
long long kronecker(long long delta, long long p);

/// Tonelli-Shanks square root mod an odd prime: r with r*r = a (mod p), or
/// nullopt when a is a non-residue. The nonresidue needed internally is found
/// by deterministic search from 2, so results are reproducible.
std::optional<long long> sqrt_mod(long long a, long long p);

/// Rank of a dense matrix over F_p (rows x cols, entries reduced mod p).
int rank_mod(std::vector<std::vector<long long>> m, long long p);

/// Determinant of a square matrix over F_p.
long long det_mod(std::vector<std::vector<long long>> m, long long p);

}  // namespace acf

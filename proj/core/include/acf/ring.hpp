#pragma once
// Exact arithmetic in rings of imaginary quadratic integers O_K = Z[xi],
// K = Q(sqrt(d)) with d < 0 squarefree. xi = sqrt(d) when d = 2,3 (mod 4)
// and xi = (1+sqrt(d))/2 when d = 1 (mod 4).

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace acf {

// Overflow-checked signed 64-bit helpers. Desk-scale inputs stay far from the
// limits; the checks turn silent wraparound into std::overflow_error.
long long checked_add(long long x, long long y);
long long checked_sub(long long x, long long y);
long long checked_mul(long long x, long long y);

enum class XiCase { whole, half };

struct Ring {
  long long d = -1;                  // squarefree, negative
  XiCase xi_case = XiCase::whole;    // half iff d = 1 (mod 4)
  long long discriminant = -4;      // d (half) or 4d (whole)
};

inline bool operator==(const Ring& r, const Ring& s) { return r.d == s.d; }
inline bool operator!=(const Ring& r, const Ring& s) { return r.d != s.d; }

/// Validates d (negative, squarefree) and fills in the xi case and
/// discriminant. Throws std::invalid_argument otherwise.
Ring make_ring(long long d);

// a + b*xi with exact integer coordinates. `d` tags the ring the value lives
// in so mixed-ring operands can be rejected.
struct QuadInt {
  long long a = 0;
  long long b = 0;
  long long d = -1;
};

inline bool operator==(const QuadInt& x, const QuadInt& y) {
  return x.a == y.a && x.b == y.b && x.d == y.d;
}
inline bool operator!=(const QuadInt& x, const QuadInt& y) { return !(x == y); }

inline QuadInt make_qi(const Ring& ring, long long a, long long b) {
  return QuadInt{a, b, ring.d};
}
inline QuadInt xi(const Ring& ring) { return QuadInt{0, 1, ring.d}; }

QuadInt add(const Ring& ring, const QuadInt& x, const QuadInt& y);
QuadInt sub(const Ring& ring, const QuadInt& x, const QuadInt& y);
QuadInt mul(const Ring& ring, const QuadInt& x, const QuadInt& y);
QuadInt neg(const Ring& ring, const QuadInt& x);
QuadInt conj(const Ring& ring, const QuadInt& x);

/// N(x) = x * conj(x), a nonnegative integer equal to |embed(x)|^2.
long long norm(const Ring& ring, const QuadInt& x);

std::complex<double> embed_xi(const Ring& ring);
std::complex<double> embed(const Ring& ring, const QuadInt& x);

/// Nearest ring element to z. Solves the 2x2 real basis system, rounds, and
/// checks the 3x3 neighbor grid, which is exact for these bases. Distance
/// ties resolve to the canonical smallest (a,b), see coord_less.
QuadInt quantize(const Ring& ring, std::complex<double> z);

bool is_unit(const Ring& ring, const QuadInt& x);

/// The unit group: 4 elements for d=-1, 6 for d=-3, 2 otherwise.
std::vector<QuadInt> units(const Ring& ring);

// Canonical coordinate order used by every tie rule in the library:
// 0 < 1 < -1 < 2 < -2 < ... (magnitude first, positive before negative).
// Deterministic outputs under this one ordering keep simulations and the
// exhaustive-search oracles consistent with each other.
inline bool coord_less(long long x, long long y) {
  const unsigned long long ax = x < 0 ? 0ULL - static_cast<unsigned long long>(x)
                                      : static_cast<unsigned long long>(x);
  const unsigned long long ay = y < 0 ? 0ULL - static_cast<unsigned long long>(y)
                                      : static_cast<unsigned long long>(y);
  if (ax != ay) return ax < ay;
  return x > y;  // same magnitude: positive first
}

/// Lexicographic comparison of (a, b) pairs under coord_less.
inline bool qi_less(const QuadInt& x, const QuadInt& y) {
  if (x.a != y.a) return coord_less(x.a, y.a);
  if (x.b != y.b) return coord_less(x.b, y.b);
  return false;
}

/// Lexicographic comparison of coordinate vectors under coord_less.
bool qi_vec_less(const std::vector<QuadInt>& x, const std::vector<QuadInt>& y);

std::string to_string(const Ring& ring);
std::string to_string(const Ring& ring, const QuadInt& x);

}  // namespace acf

#include "acf/ring.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace acf {

long long checked_add(long long x, long long y) {
  long long r;
  if (__builtin_add_overflow(x, y, &r))
    throw std::overflow_error("ring arithmetic overflow in add");
  return r;
}

long long checked_sub(long long x, long long y) {
  long long r;
  if (__builtin_sub_overflow(x, y, &r))
    throw std::overflow_error("ring arithmetic overflow in sub");
  return r;
}

long long checked_mul(long long x, long long y) {
  long long r;
  if (__builtin_mul_overflow(x, y, &r))
    throw std::overflow_error("ring arithmetic overflow in mul");
  return r;
}

namespace {

// Euclidean remainder in {0,1,2,3}.
long long mod4(long long d) {
  long long m = d % 4;
  return m < 0 ? m + 4 : m;
}

bool squarefree(long long d) {
  long long m = d < 0 ? -d : d;
  for (long long q = 2; q * q <= m; ++q) {
    if (m % (q * q) == 0) return false;
  }
  return true;
}

void require_same_ring(const Ring& ring, const QuadInt& x) {
  if (x.d != ring.d)
    throw std::invalid_argument("QuadInt belongs to a different ring");
}

}  // namespace

Ring make_ring(long long d) {
  if (d >= 0) throw std::invalid_argument("ring requires d < 0");
  if (!squarefree(d)) throw std::invalid_argument("ring requires squarefree d");
  Ring r;
  r.d = d;
  if (mod4(d) == 1) {
    r.xi_case = XiCase::half;
    r.discriminant = d;
  } else {
    r.xi_case = XiCase::whole;
    r.discriminant = checked_mul(4, d);
  }
  return r;
}

QuadInt add(const Ring& ring, const QuadInt& x, const QuadInt& y) {
  require_same_ring(ring, x);
  require_same_ring(ring, y);
  return {checked_add(x.a, y.a), checked_add(x.b, y.b), ring.d};
}

QuadInt sub(const Ring& ring, const QuadInt& x, const QuadInt& y) {
  require_same_ring(ring, x);
  require_same_ring(ring, y);
  return {checked_sub(x.a, y.a), checked_sub(x.b, y.b), ring.d};
}

QuadInt mul(const Ring& ring, const QuadInt& x, const QuadInt& y) {
  require_same_ring(ring, x);
  require_same_ring(ring, y);
  const long long bb = checked_mul(x.b, y.b);
  const long long cross = checked_add(checked_mul(x.a, y.b), checked_mul(x.b, y.a));
  if (ring.xi_case == XiCase::whole) {
    // xi^2 = d
    return {checked_add(checked_mul(x.a, y.a), checked_mul(ring.d, bb)), cross,
            ring.d};
  }
  // xi^2 = xi + (d-1)/4
  const long long q = (ring.d - 1) / 4;
  return {checked_add(checked_mul(x.a, y.a), checked_mul(q, bb)),
          checked_add(cross, bb), ring.d};
}

QuadInt neg(const Ring& ring, const QuadInt& x) {
  require_same_ring(ring, x);
  return {checked_sub(0, x.a), checked_sub(0, x.b), ring.d};
}

QuadInt conj(const Ring& ring, const QuadInt& x) {
  require_same_ring(ring, x);
  if (ring.xi_case == XiCase::whole) return {x.a, checked_sub(0, x.b), ring.d};
  // conj(xi) = 1 - xi
  return {checked_add(x.a, x.b), checked_sub(0, x.b), ring.d};
}

long long norm(const Ring& ring, const QuadInt& x) {
  require_same_ring(ring, x);
  const long long a2 = checked_mul(x.a, x.a);
  const long long b2 = checked_mul(x.b, x.b);
  if (ring.xi_case == XiCase::whole) {
    // a^2 - d b^2
    return checked_sub(a2, checked_mul(ring.d, b2));
  }
  // a^2 + ab + b^2 (1-d)/4
  const long long q = (1 - ring.d) / 4;
  return checked_add(checked_add(a2, checked_mul(x.a, x.b)),
                     checked_mul(q, b2));
}

std::complex<double> embed_xi(const Ring& ring) {
  const double s = std::sqrt(static_cast<double>(-ring.d));
  if (ring.xi_case == XiCase::whole) return {0.0, s};
  return {0.5, 0.5 * s};
}

std::complex<double> embed(const Ring& ring, const QuadInt& x) {
  require_same_ring(ring, x);
  const double s = std::sqrt(static_cast<double>(-ring.d));
  const double a = static_cast<double>(x.a);
  const double b = static_cast<double>(x.b);
  if (ring.xi_case == XiCase::whole) return {a, b * s};
  return {a + 0.5 * b, 0.5 * b * s};
}

QuadInt quantize(const Ring& ring, std::complex<double> z) {
  const double s = std::sqrt(static_cast<double>(-ring.d));
  double fb, fa;
  if (ring.xi_case == XiCase::whole) {
    fb = z.imag() / s;
    fa = z.real();
  } else {
    fb = 2.0 * z.imag() / s;
    fa = z.real() - 0.5 * fb;
  }
  const long long a0 = std::llround(fa);
  const long long b0 = std::llround(fb);
  QuadInt best{0, 0, ring.d};
  double best_d2 = 0.0;
  bool have = false;
  for (long long db = -1; db <= 1; ++db) {
    for (long long da = -1; da <= 1; ++da) {
      const QuadInt cand{a0 + da, b0 + db, ring.d};
      const std::complex<double> e = embed(ring, cand);
      const double dr = e.real() - z.real();
      const double di = e.imag() - z.imag();
      const double d2 = dr * dr + di * di;
      if (!have || d2 < best_d2 || (d2 == best_d2 && qi_less(cand, best))) {
        have = true;
        best_d2 = d2;
        best = cand;
      }
    }
  }
  return best;
}

bool is_unit(const Ring& ring, const QuadInt& x) { return norm(ring, x) == 1; }

std::vector<QuadInt> units(const Ring& ring) {
  const long long d = ring.d;
  if (d == -1) return {{1, 0, d}, {0, 1, d}, {-1, 0, d}, {0, -1, d}};
  if (d == -3)
    return {{1, 0, d}, {0, 1, d}, {-1, 1, d}, {-1, 0, d}, {0, -1, d}, {1, -1, d}};
  return {{1, 0, d}, {-1, 0, d}};
}

bool qi_vec_less(const std::vector<QuadInt>& x, const std::vector<QuadInt>& y) {
  const size_t n = x.size() < y.size() ? x.size() : y.size();
  for (size_t i = 0; i < n; ++i) {
    if (x[i].a != y[i].a) return coord_less(x[i].a, y[i].a);
    if (x[i].b != y[i].b) return coord_less(x[i].b, y[i].b);
  }
  return x.size() < y.size();
}

std::string to_string(const Ring& ring) {
  char buf[64];
  if (ring.xi_case == XiCase::whole)
    std::snprintf(buf, sizeof(buf), "Z[sqrt(%lld)]", ring.d);
  else
    std::snprintf(buf, sizeof(buf), "Z[(1+sqrt(%lld))/2]", ring.d);
  return buf;
}

std::string to_string(const Ring& ring, const QuadInt& x) {
  char buf[96];
  if (x.b == 0) {
    std::snprintf(buf, sizeof(buf), "%lld", x.a);
  } else if (x.a == 0) {
    std::snprintf(buf, sizeof(buf), "%lld*xi", x.b);
  } else {
    std::snprintf(buf, sizeof(buf), "%lld%+lld*xi", x.a, x.b);
  }
  (void)ring;
  return buf;
}

}  // namespace acf

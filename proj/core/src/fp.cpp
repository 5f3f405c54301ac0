#include "acf/fp.hpp"

#include <stdexcept>

namespace acf {

bool is_prime(long long n) {
  if (n < 2) return false;
  if (n < 4) return true;
  if (n % 2 == 0) return false;
  for (long long q = 3; q * q <= n; q += 2) {
    if (n % q == 0) return false;
  }
  return true;
}

long long mod_norm(long long x, long long m) {
  long long r = x % m;
  return r < 0 ? r + m : r;
}

long long add_mod(long long x, long long y, long long m) {
  long long r = x + y;
  return r >= m ? r - m : r;
}

long long sub_mod(long long x, long long y, long long m) {
  long long r = x - y;
  return r < 0 ? r + m : r;
}

long long mul_mod(long long x, long long y, long long m) {
  return static_cast<long long>(static_cast<__int128>(x) * y % m);
}

long long pow_mod(long long base, long long exp, long long m) {
  long long r = 1 % m;
  long long b = mod_norm(base, m);
  while (exp > 0) {
    if (exp & 1) r = mul_mod(r, b, m);
    b = mul_mod(b, b, m);
    exp >>= 1;
  }
  return r;
}

long long inv_mod(long long x, long long p) {
  const long long v = mod_norm(x, p);
  if (v == 0) throw std::invalid_argument("inverse of 0 mod p");
  return pow_mod(v, p - 2, p);
}

long long kronecker(long long delta, long long p) {
  if (!is_prime(p)) throw std::invalid_argument("kronecker requires prime p");
  if (p == 2) {
    if (delta % 2 == 0) return 0;
    const long long r = mod_norm(delta, 8);
    return (r == 1 || r == 7) ? 1 : -1;
  }
  const long long a = mod_norm(delta, p);
  if (a == 0) return 0;
  const long long e = pow_mod(a, (p - 1) / 2, p);
  return e == 1 ? 1 : -1;
}

std::optional<long long> sqrt_mod(long long a, long long p) {
  if (!is_prime(p) || p == 2)
    throw std::invalid_argument("sqrt_mod requires an odd prime");
  a = mod_norm(a, p);
  if (a == 0) return 0;
  if (pow_mod(a, (p - 1) / 2, p) != 1) return std::nullopt;
  if (p % 4 == 3) return pow_mod(a, (p + 1) / 4, p);

  // Tonelli-Shanks: write p-1 = q * 2^s with q odd.
  long long q = p - 1;
  long long s = 0;
  while (q % 2 == 0) {
    q /= 2;
    ++s;
  }
  long long z = 2;
  while (pow_mod(z, (p - 1) / 2, p) != p - 1) ++z;

  long long m = s;
  long long c = pow_mod(z, q, p);
  long long t = pow_mod(a, q, p);
  long long r = pow_mod(a, (q + 1) / 2, p);
  while (t != 1) {
    long long i = 0;
    long long t2 = t;
    while (t2 != 1) {
      t2 = mul_mod(t2, t2, p);
      ++i;
      if (i == m) throw std::logic_error("sqrt_mod internal failure");
    }
    long long b = c;
    for (long long j = 0; j < m - i - 1; ++j) b = mul_mod(b, b, p);
    m = i;
    c = mul_mod(b, b, p);
    t = mul_mod(t, c, p);
    r = mul_mod(r, b, p);
  }
  return r;
}

int rank_mod(std::vector<std::vector<long long>> m, long long p) {
  const int rows = static_cast<int>(m.size());
  const int cols = rows ? static_cast<int>(m[0].size()) : 0;
  for (auto& row : m)
    for (auto& v : row) v = mod_norm(v, p);
  int rank = 0;
  for (int col = 0; col < cols && rank < rows; ++col) {
    int pivot = -1;
    for (int r = rank; r < rows; ++r) {
      if (m[r][col] != 0) {
        pivot = r;
        break;
      }
    }
    if (pivot < 0) continue;
    std::swap(m[rank], m[pivot]);
    const long long inv = inv_mod(m[rank][col], p);
    for (int r = rank + 1; r < rows; ++r) {
      if (m[r][col] == 0) continue;
      const long long f = mul_mod(m[r][col], inv, p);
      for (int c = col; c < cols; ++c)
        m[r][c] = sub_mod(m[r][c], mul_mod(f, m[rank][c], p), p);
    }
    ++rank;
  }
  return rank;
}

long long det_mod(std::vector<std::vector<long long>> m, long long p) {
  const int n = static_cast<int>(m.size());
  for (auto& row : m) {
    if (static_cast<int>(row.size()) != n)
      throw std::invalid_argument("det_mod requires a square matrix");
    for (auto& v : row) v = mod_norm(v, p);
  }
  long long det = 1 % p;
  for (int col = 0; col < n; ++col) {
    int pivot = -1;
    for (int r = col; r < n; ++r) {
      if (m[r][col] != 0) {
        pivot = r;
        break;
      }
    }
    if (pivot < 0) return 0;
    if (pivot != col) {
      std::swap(m[pivot], m[col]);
      det = sub_mod(0, det, p);
    }
    det = mul_mod(det, m[col][col], p);
    const long long inv = inv_mod(m[col][col], p);
    for (int r = col + 1; r < n; ++r) {
      if (m[r][col] == 0) continue;
      const long long f = mul_mod(m[r][col], inv, p);
      for (int c = col; c < n; ++c)
        m[r][c] = sub_mod(m[r][c], mul_mod(f, m[col][c], p), p);
    }
  }
  return det;
}

}  // namespace acf

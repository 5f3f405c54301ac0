#include "acf/lattice.hpp"

#include <algorithm>
#include <cmath>

namespace acf {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

void validate_entries(std::vector<std::vector<long long>>& G, long long p) {
  for (auto& row : G)
    for (auto& v : row) v = mod_norm(v, p);
}

// Per-coordinate decoder table: for each residue v, the nearest element of
// lift(v) + ideal to the query coordinate, under the canonical tie rule.
struct CoordChoice {
  QuadInt z;
  double d2;
};

std::vector<CoordChoice> coord_table(const ConstructionALattice& lat,
                                     std::complex<double> y) {
  const Ring& ring = lat.ideal.ring;
  const long long p = lat.ideal.p;
  const double s = lat.scale;
  const std::complex<double> w = y / s;
  const std::complex<double> exi = embed_xi(ring);

  const QuadInt b1 = lat.ideal.basis[0];
  const QuadInt b2 = lat.ideal.basis[1];
  const double e1r = static_cast<double>(b1.a) + b1.b * exi.real();
  const double e1i = b1.b * exi.imag();
  const double e2r = static_cast<double>(b2.a) + b2.b * exi.real();
  const double e2i = b2.b * exi.imag();
  const double det = e1r * e2i - e1i * e2r;

  std::vector<CoordChoice> table(static_cast<size_t>(p));
  for (long long v = 0; v < p; ++v) {
    const double tr = w.real() - static_cast<double>(v);
    const double ti = w.imag();
    const double c1 = (tr * e2i - ti * e2r) / det;
    const double c2 = (e1r * ti - e1i * tr) / det;
    const long long r1 = std::llround(c1);
    const long long r2 = std::llround(c2);
    bool have = false;
    QuadInt best{0, 0, ring.d};
    double best_d2 = 0.0;
    for (long long u2 = r2 - 1; u2 <= r2 + 1; ++u2) {
      for (long long u1 = r1 - 1; u1 <= r1 + 1; ++u1) {
        const QuadInt z{v + u1 * b1.a + u2 * b2.a, u1 * b1.b + u2 * b2.b,
                        ring.d};
        const double zr = static_cast<double>(z.a) + z.b * exi.real();
        const double zi = z.b * exi.imag();
        const double dr = zr - w.real();
        const double di = zi - w.imag();
        const double d2 = dr * dr + di * di;
        if (!have || d2 < best_d2 || (d2 == best_d2 && qi_less(z, best))) {
          have = true;
          best_d2 = d2;
          best = z;
        }
      }
    }
    table[static_cast<size_t>(v)] = {best, best_d2 * s * s};
  }
  return table;
}

double ipow(double base, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

}  // namespace

LinearCode make_code(long long p, int N, std::vector<std::vector<long long>> G) {
  if (!is_prime(p)) throw std::invalid_argument("code modulus must be prime");
  if (N < 1) throw std::invalid_argument("block length must be positive");
  if (static_cast<int>(G.size()) != N)
    throw std::invalid_argument("generator matrix must have N rows");
  const int n = G.empty() ? 0 : static_cast<int>(G[0].size());
  for (const auto& row : G)
    if (static_cast<int>(row.size()) != n)
      throw std::invalid_argument("generator matrix rows differ in length");
  if (n > N) throw std::invalid_argument("code dimension exceeds block length");
  validate_entries(G, p);

  LinearCode code;
  code.p = p;
  code.N = N;
  code.n = n;
  code.G = G;

  // Row-reduce [G | I] so that E*G = [I_n; 0]; E doubles as the solver.
  auto R = G;
  auto& E = code.E;
  E.assign(static_cast<size_t>(N), std::vector<long long>(static_cast<size_t>(N), 0));
  for (int i = 0; i < N; ++i) E[i][i] = 1;
  for (int col = 0; col < n; ++col) {
    int pivot = -1;
    for (int r = col; r < N; ++r) {
      if (R[r][col] != 0) {
        pivot = r;
        break;
      }
    }
    if (pivot < 0)
      throw std::invalid_argument("generator matrix must have full column rank");
    std::swap(R[col], R[pivot]);
    std::swap(E[col], E[pivot]);
    const long long inv = inv_mod(R[col][col], p);
    for (int c = 0; c < n; ++c) R[col][c] = mul_mod(R[col][c], inv, p);
    for (int c = 0; c < N; ++c) E[col][c] = mul_mod(E[col][c], inv, p);
    for (int r = 0; r < N; ++r) {
      if (r == col || R[r][col] == 0) continue;
      const long long f = R[r][col];
      for (int c = 0; c < n; ++c)
        R[r][c] = sub_mod(R[r][c], mul_mod(f, R[col][c], p), p);
      for (int c = 0; c < N; ++c)
        E[r][c] = sub_mod(E[r][c], mul_mod(f, E[col][c], p), p);
    }
  }
  return code;
}

std::vector<long long> encode_codeword(const LinearCode& code,
                                       const std::vector<long long>& y) {
  if (static_cast<int>(y.size()) != code.n)
    throw std::invalid_argument("message length does not match code dimension");
  std::vector<long long> c(static_cast<size_t>(code.N), 0);
  for (int i = 0; i < code.N; ++i) {
    long long acc = 0;
    for (int j = 0; j < code.n; ++j)
      acc = add_mod(acc, mul_mod(code.G[i][j], mod_norm(y[j], code.p), code.p),
                    code.p);
    c[static_cast<size_t>(i)] = acc;
  }
  return c;
}

std::optional<std::vector<long long>> solve_codeword(
    const LinearCode& code, const std::vector<long long>& c) {
  if (static_cast<int>(c.size()) != code.N)
    throw std::invalid_argument("codeword length does not match block length");
  std::vector<long long> t(static_cast<size_t>(code.N), 0);
  for (int i = 0; i < code.N; ++i) {
    long long acc = 0;
    for (int j = 0; j < code.N; ++j)
      acc = add_mod(acc, mul_mod(code.E[i][j], mod_norm(c[j], code.p), code.p),
                    code.p);
    t[static_cast<size_t>(i)] = acc;
  }
  for (int i = code.n; i < code.N; ++i)
    if (t[static_cast<size_t>(i)] != 0) return std::nullopt;
  t.resize(static_cast<size_t>(code.n));
  return t;
}

ConstructionALattice make_lattice(LinearCode code, PrimeIdeal ideal,
                                  double scale) {
  if (code.p != ideal.p)
    throw std::invalid_argument("code modulus must equal the ideal norm");
  if (!(scale > 0.0)) throw std::invalid_argument("scale must be positive");
  return {std::move(code), std::move(ideal), scale};
}

bool is_lattice_point(const std::vector<QuadInt>& x,
                      const ConstructionALattice& lat) {
  if (static_cast<int>(x.size()) != lat.code.N)
    throw std::invalid_argument("coordinate count does not match block length");
  std::vector<long long> c(x.size());
  for (size_t i = 0; i < x.size(); ++i) c[i] = sigma(x[i], lat.ideal).value;
  return solve_codeword(lat.code, c).has_value();
}

LatticePoint decode_nearest(const std::vector<std::complex<double>>& y,
                            const ConstructionALattice& lat, double radius) {
  const int N = lat.code.N;
  const int n = lat.code.n;
  const long long p = lat.code.p;
  if (static_cast<int>(y.size()) != N)
    throw std::invalid_argument("query length does not match block length");
  if (N > 8) throw OversizeEnumeration("block length above desk scale (N > 8)");
  double cosets = 1.0;
  for (int j = 0; j < n; ++j) cosets *= static_cast<double>(p);
  if (cosets > 1e6)
    throw OversizeEnumeration("codeword enumeration above 10^6 cosets");

  std::vector<std::vector<CoordChoice>> tables(static_cast<size_t>(N));
  for (int i = 0; i < N; ++i)
    tables[static_cast<size_t>(i)] = coord_table(lat, y[static_cast<size_t>(i)]);

  std::vector<long long> msg(static_cast<size_t>(n), 0);
  std::vector<long long> cw(static_cast<size_t>(N), 0);
  bool have = false;
  double best_d2 = 0.0;
  std::vector<long long> best_cw;
  std::vector<QuadInt> best_vec;

  const auto candidate_vec = [&](const std::vector<long long>& c) {
    std::vector<QuadInt> v(static_cast<size_t>(N));
    for (int i = 0; i < N; ++i)
      v[static_cast<size_t>(i)] =
          tables[static_cast<size_t>(i)][static_cast<size_t>(c[i])].z;
    return v;
  };

  for (;;) {
    double total = 0.0;
    bool pruned = false;
    for (int i = 0; i < N; ++i) {
      total += tables[static_cast<size_t>(i)][static_cast<size_t>(cw[i])].d2;
      if (have && total > best_d2) {
        pruned = true;
        break;
      }
    }
    if (!pruned) {
      if (!have || total < best_d2) {
        have = true;
        best_d2 = total;
        best_cw = cw;
        best_vec.clear();
      } else if (total == best_d2) {
        if (best_vec.empty()) best_vec = candidate_vec(best_cw);
        auto cand = candidate_vec(cw);
        if (qi_vec_less(cand, best_vec)) {
          best_cw = cw;
          best_vec = std::move(cand);
        }
      }
    }
    // Odometer increment; every touched digit adds G[:,j] to the codeword.
    int j = 0;
    while (j < n && msg[static_cast<size_t>(j)] == p - 1) {
      msg[static_cast<size_t>(j)] = 0;
      for (int i = 0; i < N; ++i)
        cw[static_cast<size_t>(i)] =
            add_mod(cw[static_cast<size_t>(i)], lat.code.G[i][j], p);
      ++j;
    }
    if (j == n) break;
    ++msg[static_cast<size_t>(j)];
    for (int i = 0; i < N; ++i)
      cw[static_cast<size_t>(i)] =
          add_mod(cw[static_cast<size_t>(i)], lat.code.G[i][j], p);
  }

  if (best_vec.empty()) best_vec = candidate_vec(best_cw);
  if (std::isfinite(radius) && best_d2 > radius * radius)
    throw RadiusExhausted("no lattice point within the decoding radius");

  LatticePoint pt;
  pt.ring_coords = std::move(best_vec);
  pt.coords.resize(static_cast<size_t>(N));
  for (int i = 0; i < N; ++i)
    pt.coords[static_cast<size_t>(i)] =
        lat.scale * embed(lat.ideal.ring, pt.ring_coords[static_cast<size_t>(i)]);
  pt.dist2 = best_d2;
  return pt;
}

NestedCode build_nested(const std::vector<std::vector<long long>>& G_c,
                        const std::vector<std::vector<long long>>& G_tilde,
                        const PrimeIdeal& ideal, double P, double gamma_scale) {
  if (!(P > 0.0)) throw std::invalid_argument("power must be positive");
  if (!(gamma_scale > 0.0))
    throw std::invalid_argument("gamma_scale must be positive");
  const int N = static_cast<int>(G_tilde.empty() ? G_c.size() : G_tilde.size());
  if (N < 1) throw std::invalid_argument("empty generator matrices");
  if (!G_c.empty() && static_cast<int>(G_c.size()) != N)
    throw std::invalid_argument("coarse and extension row counts differ");
  const int m_c = G_c.empty() ? 0 : static_cast<int>(G_c[0].size());
  const int dm = G_tilde.empty() ? 0 : static_cast<int>(G_tilde[0].size());
  const int m_f = m_c + dm;

  std::vector<std::vector<long long>> Gc_full(
      static_cast<size_t>(N), std::vector<long long>(static_cast<size_t>(m_c)));
  std::vector<std::vector<long long>> Gf(
      static_cast<size_t>(N), std::vector<long long>(static_cast<size_t>(m_f)));
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < m_c; ++j) {
      Gc_full[i][static_cast<size_t>(j)] = G_c[i][static_cast<size_t>(j)];
      Gf[i][static_cast<size_t>(j)] = G_c[i][static_cast<size_t>(j)];
    }
    for (int j = 0; j < dm; ++j)
      Gf[i][static_cast<size_t>(m_c + j)] = G_tilde[i][static_cast<size_t>(j)];
  }

  const Ring& ring = ideal.ring;
  const double gamma =
      2.0 * std::sqrt(2.0 * N * P / std::sqrt(static_cast<double>(-ring.d))) *
      gamma_scale;
  const double scale = gamma / std::sqrt(static_cast<double>(ideal.p));

  NestedCode nc;
  nc.coarse = make_lattice(make_code(ideal.p, N, Gc_full), ideal, scale);
  nc.fine = make_lattice(make_code(ideal.p, N, Gf), ideal, scale);
  nc.m_c = m_c;
  nc.m_f = m_f;
  nc.P = P;
  nc.gamma = gamma;
  nc.design_rate =
      static_cast<double>(dm) / N * std::log2(static_cast<double>(ideal.p));
  return nc;
}

std::vector<LatticePoint> enumerate_codebook(const NestedCode& nc) {
  const long long p = nc.fine.code.p;
  const int N = nc.fine.code.N;
  const int dm = nc.m_f - nc.m_c;
  double size = 1.0;
  for (int j = 0; j < dm; ++j) size *= static_cast<double>(p);
  if (size > 1e4) throw OversizeEnumeration("codebook above 10^4 points");

  const Ring& ring = nc.fine.ideal.ring;
  std::vector<LatticePoint> book;
  book.reserve(static_cast<size_t>(size));
  std::vector<long long> tail(static_cast<size_t>(dm), 0);
  for (;;) {
    std::vector<long long> msg(static_cast<size_t>(nc.m_f), 0);
    for (int j = 0; j < dm; ++j)
      msg[static_cast<size_t>(nc.m_c + j)] = tail[static_cast<size_t>(j)];
    const auto cw = encode_codeword(nc.fine.code, msg);
    std::vector<QuadInt> t_int(static_cast<size_t>(N));
    std::vector<std::complex<double>> t(static_cast<size_t>(N));
    for (int i = 0; i < N; ++i) {
      t_int[static_cast<size_t>(i)] = lift(cw[static_cast<size_t>(i)], nc.fine.ideal);
      t[static_cast<size_t>(i)] =
          nc.fine.scale * embed(ring, t_int[static_cast<size_t>(i)]);
    }
    const LatticePoint q = decode_nearest(t, nc.coarse);
    LatticePoint pt;
    pt.ring_coords.resize(static_cast<size_t>(N));
    pt.coords.resize(static_cast<size_t>(N));
    for (int i = 0; i < N; ++i) {
      pt.ring_coords[static_cast<size_t>(i)] =
          sub(ring, t_int[static_cast<size_t>(i)], q.ring_coords[static_cast<size_t>(i)]);
      pt.coords[static_cast<size_t>(i)] =
          nc.fine.scale * embed(ring, pt.ring_coords[static_cast<size_t>(i)]);
    }
    book.push_back(std::move(pt));

    int j = 0;
    while (j < dm && tail[static_cast<size_t>(j)] == p - 1) {
      tail[static_cast<size_t>(j)] = 0;
      ++j;
    }
    if (j == dm) break;
    ++tail[static_cast<size_t>(j)];
  }
  return book;
}

std::vector<std::complex<double>> mod_coarse(
    const std::vector<std::complex<double>>& x, const NestedCode& nc) {
  const LatticePoint q = decode_nearest(x, nc.coarse);
  std::vector<std::complex<double>> r(x.size());
  for (size_t i = 0; i < x.size(); ++i) r[i] = x[i] - q.coords[i];
  return r;
}

namespace {

// Visit all ring points within squared distance r2 of (cx, cy); integer
// ranges are padded by one step and every point passes an explicit distance
// check, so range rounding cannot drop boundary points.
template <typename Fn>
void for_disk(const Ring& ring, double cx, double cy, double r2, Fn&& fn) {
  if (r2 < 0.0) return;
  const double r = std::sqrt(r2);
  const std::complex<double> exi = embed_xi(ring);
  const double im_step = exi.imag();
  const long long blo = static_cast<long long>(std::floor((cy - r) / im_step)) - 1;
  const long long bhi = static_cast<long long>(std::ceil((cy + r) / im_step)) + 1;
  for (long long b = blo; b <= bhi; ++b) {
    const double py = b * im_step;
    const double dy = py - cy;
    const double rem = r2 - dy * dy;
    if (rem < 0.0) continue;
    const double rr = std::sqrt(rem);
    const double re_off = b * exi.real();
    const long long alo =
        static_cast<long long>(std::floor(cx - rr - re_off)) - 1;
    const long long ahi =
        static_cast<long long>(std::ceil(cx + rr - re_off)) + 1;
    for (long long a = alo; a <= ahi; ++a) {
      const double dx = a + re_off - cx;
      const double d2 = dx * dx + dy * dy;
      if (d2 <= r2) fn(QuadInt{a, b, ring.d}, d2);
    }
  }
}

}  // namespace

long long count_points_in_ball(const Ring& ring, int N,
                               const std::vector<double>& center, double r) {
  if (N != 1 && N != 2)
    throw std::invalid_argument("ball counting supports N in {1, 2}");
  if (!(r >= 0.0) || r > 20.0)
    throw OversizeEnumeration("ball radius outside [0, 20]");
  if (static_cast<int>(center.size()) != 2 * N)
    throw std::invalid_argument("center must have 2N real coordinates");
  long long count = 0;
  if (N == 1) {
    for_disk(ring, center[0], center[1], r * r,
             [&](const QuadInt&, double) { ++count; });
    return count;
  }
  for_disk(ring, center[0], center[1], r * r, [&](const QuadInt&, double d1) {
    for_disk(ring, center[2], center[3], r * r - d1,
             [&](const QuadInt&, double) { ++count; });
  });
  return count;
}

BallBounds ball_count_bounds(const Ring& ring, int N, double r) {
  if (N != 1 && N != 2)
    throw std::invalid_argument("ball bounds support N in {1, 2}");
  const double rho = std::sqrt(2.0 * N * static_cast<double>(-ring.d)) / 2.0;
  const double covol =
      std::sqrt(static_cast<double>(-ring.discriminant)) / 2.0;
  const double vol_const = N == 1 ? kPi : kPi * kPi / 2.0;
  const double denom = ipow(covol, N);
  const double lo = std::max(r - rho, 0.0);
  BallBounds b;
  b.lower = ipow(lo, 2 * N) * vol_const / denom;
  b.upper = ipow(r + rho, 2 * N) * vol_const / denom;
  return b;
}

double lattice_covolume(const ConstructionALattice& lat) {
  const int N = lat.code.N;
  const int n = lat.code.n;
  const double covol_coord =
      lat.scale * lat.scale *
      std::sqrt(static_cast<double>(-lat.ideal.ring.discriminant)) / 2.0;
  double v = ipow(covol_coord, N);
  for (int i = 0; i < N - n; ++i) v *= static_cast<double>(lat.code.p);
  return v;
}

std::vector<std::complex<double>> sample_voronoi_uniform(
    const ConstructionALattice& lat, RngStream& rng) {
  const int N = lat.code.N;
  const double p = static_cast<double>(lat.code.p);
  const std::complex<double> exi = embed_xi(lat.ideal.ring);
  std::vector<std::complex<double>> u(static_cast<size_t>(N));
  // Uniform over the fundamental parallelepiped of scale * p * O_K^N, a
  // sublattice of any Construction A lattice at this scale; reducing mod the
  // lattice gives the exact uniform law on the Voronoi region.
  for (int i = 0; i < N; ++i) {
    const double x = rng.uniform() * p;
    const double y = rng.uniform() * p;
    u[static_cast<size_t>(i)] = lat.scale * std::complex<double>(
                                                 x + y * exi.real(),
                                                 y * exi.imag());
  }
  const LatticePoint q = decode_nearest(u, lat);
  for (int i = 0; i < N; ++i) u[static_cast<size_t>(i)] -= q.coords[static_cast<size_t>(i)];
  return u;
}

SecondMomentEstimate estimate_second_moment(const ConstructionALattice& lat,
                                            long long trials,
                                            std::uint64_t seed) {
  if (trials < 1000)
    throw std::invalid_argument("second moment estimate needs >= 1000 trials");
  const int N = lat.code.N;
  double sum = 0.0, comp = 0.0;
  double sumsq = 0.0, compsq = 0.0;
  for (long long t = 0; t < trials; ++t) {
    RngStream rng(seed, kTagSecondMoment, static_cast<std::uint64_t>(t));
    const auto u = sample_voronoi_uniform(lat, rng);
    double e2 = 0.0;
    for (const auto& z : u) e2 += std::norm(z);
    const double val = e2 / N;
    // Kahan compensated accumulation keeps the reduction order-independent
    // to near machine precision.
    double y = val - comp;
    double s = sum + y;
    comp = (s - sum) - y;
    sum = s;
    const double val2 = val * val;
    y = val2 - compsq;
    s = sumsq + y;
    compsq = (s - sumsq) - y;
    sumsq = s;
  }
  const double mean = sum / trials;
  const double var =
      std::max(0.0, (sumsq / trials - mean * mean)) * trials / (trials - 1);
  const double se = std::sqrt(var / trials);
  const double voln = std::pow(lattice_covolume(lat), 1.0 / N);
  SecondMomentEstimate est;
  est.sigma2_complex = mean;
  est.se_sigma2 = se;
  est.G = 0.5 * mean / voln;
  est.se_G = 0.5 * se / voln;
  est.trials = trials;
  return est;
}

}  // namespace acf

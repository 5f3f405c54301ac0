#include "acf/rate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>

namespace acf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Relative key window kept for the exact re-rank. It must comfortably exceed
// kRateTieBand (4e-9 rate ~ 2.8e-9 relative in the key) so every candidate
// that can win the banded tie-break is inside the window in every evaluation
// order.
constexpr double kNearEps = 1e-8;
constexpr size_t kNearCap = 256;
// Two candidates whose evaluated rates differ by less than this absolute band
// are treated as tied and ranked by integer norm, then canonical coordinate
// order. Mathematically tied vectors (unit rotations of each other) evaluate
// within ~1e-12 of each other even at 60 dB, far inside the band, so the
// winner does not depend on floating-point noise.
constexpr double kRateTieBand = 4e-9;

struct ChannelStats {
  double nh;  // ||h||^2
  double C1;  // 1 + P ||h||^2
};

ChannelStats channel_stats(const ChannelVector& ch) {
  double nh = 0.0;
  for (const auto& h : ch.h) nh += std::norm(h);
  return {nh, 1.0 + ch.P * nh};
}

void validate_channel(const ChannelVector& ch) {
  if (ch.h.empty()) throw std::invalid_argument("empty channel vector");
  if (!(ch.P > 0.0)) throw std::invalid_argument("power must be positive");
  for (const auto& h : ch.h)
    if (!std::isfinite(h.real()) || !std::isfinite(h.imag()))
      throw std::invalid_argument("channel coefficients must be finite");
}

// D in the cancellation-free form; clamps the Gram determinant at its exact
// lower bound 0 so D stays positive under rounding.
double mmse_d(const ChannelVector& ch, const std::vector<QuadInt>& a,
              const Ring& ring) {
  validate_channel(ch);
  if (a.size() != ch.h.size())
    throw std::invalid_argument("coefficient and channel lengths differ");
  double na = 0.0;
  bool nonzero = false;
  std::complex<double> dot{0.0, 0.0};
  for (size_t k = 0; k < a.size(); ++k) {
    na += static_cast<double>(norm(ring, a[k]));
    nonzero = nonzero || a[k].a != 0 || a[k].b != 0;
    dot += std::conj(ch.h[k]) * embed(ring, a[k]);
  }
  if (!nonzero) throw std::invalid_argument("coefficient vector must be nonzero");
  const ChannelStats st = channel_stats(ch);
  const double gram = std::max(na * st.nh - std::norm(dot), 0.0);
  const double d = (na + ch.P * gram) / st.C1;
  if (!(d > 0.0)) throw std::logic_error("MMSE distortion must be positive");
  return d;
}

// Per-coordinate candidate set within norm <= B and the coordinate cap,
// sorted by norm ascending then canonical coordinate order.
struct Cands {
  std::vector<double> zr, zi, nrm;
  std::vector<long long> ca, cb, cn;
};

Cands build_cands(const Ring& ring, std::complex<double> hk, double B,
                  long long cap, bool* truncated) {
  const double absd = static_cast<double>(-ring.d);
  const std::complex<double> exi = embed_xi(ring);
  const double sqB = std::sqrt(std::max(B, 0.0));

  const long long b_ball = static_cast<long long>(
      std::floor(ring.xi_case == XiCase::whole ? sqB / std::sqrt(absd)
                                               : 2.0 * sqB / std::sqrt(absd)));
  if (b_ball > cap) *truncated = true;
  const long long bmax = std::min(b_ball, cap);

  struct Raw {
    long long a, b, n;
  };
  std::vector<Raw> raw;
  for (long long b = -bmax; b <= bmax; ++b) {
    // Real-part extent of the ball slice at this b, padded by one; each
    // candidate re-checks its exact integer norm.
    const double re_off = b * exi.real();
    const long long alo_ball =
        static_cast<long long>(std::floor(-sqB - re_off)) - 1;
    const long long ahi_ball =
        static_cast<long long>(std::ceil(sqB - re_off)) + 1;
    // Flag the cap only when a point outside the box really has norm <= B.
    // The norm slice is convex in a, so testing the boundary and the integers
    // around the continuous minimizer is exact.
    const auto out_hits = [&](long long a) {
      if (a >= -cap && a <= cap) return false;
      return static_cast<double>(norm(ring, QuadInt{a, b, ring.d})) <= B;
    };
    if (ahi_ball > cap) {
      const long long am = std::max(
          cap + 1, static_cast<long long>(std::floor(-re_off)));
      if (out_hits(cap + 1) || out_hits(am) || out_hits(am + 1))
        *truncated = true;
    }
    if (alo_ball < -cap) {
      const long long am = std::min(
          -cap - 1, static_cast<long long>(std::ceil(-re_off)));
      if (out_hits(-cap - 1) || out_hits(am) || out_hits(am - 1))
        *truncated = true;
    }
    const long long alo = std::max(alo_ball, -cap);
    const long long ahi = std::min(ahi_ball, cap);
    for (long long a = alo; a <= ahi; ++a) {
      const long long n = norm(ring, QuadInt{a, b, ring.d});
      if (static_cast<double>(n) <= B) raw.push_back({a, b, n});
    }
  }
  std::sort(raw.begin(), raw.end(), [](const Raw& x, const Raw& y) {
    if (x.n != y.n) return x.n < y.n;
    if (x.a != y.a) return coord_less(x.a, y.a);
    return coord_less(x.b, y.b);
  });

  Cands c;
  const size_t m = raw.size();
  c.zr.resize(m);
  c.zi.resize(m);
  c.nrm.resize(m);
  c.ca.resize(m);
  c.cb.resize(m);
  c.cn.resize(m);
  for (size_t i = 0; i < m; ++i) {
    const double er = static_cast<double>(raw[i].a) + raw[i].b * exi.real();
    const double ei = raw[i].b * exi.imag();
    c.zr[i] = hk.real() * er + hk.imag() * ei;
    c.zi[i] = hk.real() * ei - hk.imag() * er;
    c.nrm[i] = static_cast<double>(raw[i].n);
    c.ca[i] = raw[i].a;
    c.cb[i] = raw[i].b;
    c.cn[i] = raw[i].n;
  }
  return c;
}

struct Entry {
  double key = 0.0;
  long long nint = 0;
  std::array<long long, 8> c{};  // (a, b) pairs, 2K used
};

bool entry_less(const Entry& x, const Entry& y, int k2) {
  if (x.key != y.key) return x.key < y.key;
  if (x.nint != y.nint) return x.nint < y.nint;
  for (int i = 0; i < k2; ++i)
    if (x.c[i] != y.c[i]) return coord_less(x.c[i], y.c[i]);
  return false;
}

// Tracks the running best key (with a relative near-tie window for the final
// exact re-rank) and the bounded candidate list for matrix selection.
struct Collector {
  int L;
  int k2;
  double best_key = kInf;
  double near_hi = kInf;
  double gate = kInf;
  std::vector<Entry> near;
  std::vector<Entry> top;

  Collector(int list_size, int K) : L(list_size), k2(2 * K) {
    near.reserve(16);
    top.reserve(static_cast<size_t>(list_size) + 1);
  }

  void refresh_gate() {
    const double kth =
        static_cast<int>(top.size()) < L ? kInf : top.back().key;
    gate = std::max(near_hi, kth);
  }

  void offer(const Entry& e) {
    if (e.key < best_key) {
      best_key = e.key;
      near_hi = e.key * (1.0 + kNearEps);
      near.erase(std::remove_if(near.begin(), near.end(),
                                [&](const Entry& x) { return x.key > near_hi; }),
                 near.end());
      near.push_back(e);
    } else if (e.key <= near_hi && near.size() < kNearCap) {
      near.push_back(e);
    }
    if (static_cast<int>(top.size()) < L || entry_less(e, top.back(), k2)) {
      auto it = std::lower_bound(
          top.begin(), top.end(), e,
          [&](const Entry& x, const Entry& y) { return entry_less(x, y, k2); });
      top.insert(it, e);
      if (static_cast<int>(top.size()) > L) top.pop_back();
    }
    refresh_gate();
  }
};

void search_recursive(const std::vector<Cands>& cands, int k, int K, double B,
                      double C1, double P, double dr, double di, double ntot,
                      long long nint, Entry& scratch, Collector& col) {
  const Cands& c = cands[static_cast<size_t>(k)];
  const size_t m = c.nrm.size();
  for (size_t i = 0; i < m; ++i) {
    if (ntot + c.nrm[i] > B) break;
    scratch.c[static_cast<size_t>(2 * k)] = c.ca[i];
    scratch.c[static_cast<size_t>(2 * k + 1)] = c.cb[i];
    const double ndr = dr + c.zr[i];
    const double ndi = di + c.zi[i];
    const double nn = ntot + c.nrm[i];
    const long long ni = nint + c.cn[i];
    if (k + 1 == K) {
      if (ni == 0) continue;
      const double key = nn * C1 - P * (ndr * ndr + ndi * ndi);
      if (key <= col.gate) {
        scratch.key = key;
        scratch.nint = ni;
        col.offer(scratch);
      }
    } else {
      search_recursive(cands, k + 1, K, B, C1, P, ndr, ndi, nn, ni, scratch,
                       col);
    }
  }
}

void search_k2(const std::vector<Cands>& cands, double B, double C1, double P,
               Collector& col) {
  const Cands& c1 = cands[0];
  const Cands& c2 = cands[1];
  const size_t m1 = c1.nrm.size();
  const size_t m2 = c2.nrm.size();
  Entry e;
  for (size_t i = 0; i < m1; ++i) {
    const double n1 = c1.nrm[i];
    if (n1 > B) break;
    const double rem = B - n1;
    const double dr0 = c1.zr[i];
    const double di0 = c1.zi[i];
    // candidate 0 of each sorted list is the zero element; skip the all-zero
    // vector by starting the inner scan at 1 on the first outer row
    for (size_t j = (i == 0 ? 1u : 0u); j < m2; ++j) {
      if (c2.nrm[j] > rem) break;
      const double dr = dr0 + c2.zr[j];
      const double di = di0 + c2.zi[j];
      const double key = (n1 + c2.nrm[j]) * C1 - P * (dr * dr + di * di);
      if (key <= col.gate) {
        e.key = key;
        e.nint = c1.cn[i] + c2.cn[j];
        e.c[0] = c1.ca[i];
        e.c[1] = c1.cb[i];
        e.c[2] = c2.ca[j];
        e.c[3] = c2.cb[j];
        col.offer(e);
      }
    }
  }
}

std::vector<QuadInt> entry_coords(const Entry& e, int K, long long d) {
  std::vector<QuadInt> a(static_cast<size_t>(K));
  for (int k = 0; k < K; ++k)
    a[static_cast<size_t>(k)] =
        QuadInt{e.c[static_cast<size_t>(2 * k)], e.c[static_cast<size_t>(2 * k + 1)], d};
  return a;
}

}  // namespace

double computation_rate(const ChannelVector& ch, const std::vector<QuadInt>& a,
                        const Ring& ring) {
  const double d = mmse_d(ch, a, ring);
  return std::max(0.0, -std::log2(d));
}

double effective_noise_power(const ChannelVector& ch,
                             const std::vector<QuadInt>& a, const Ring& ring) {
  return ch.P * mmse_d(ch, a, ring);
}

RankedCoefficients rank_coefficients(const ChannelVector& ch, const Ring& ring,
                                     const SearchOptions& opts) {
  validate_channel(ch);
  const int K = static_cast<int>(ch.h.size());
  if (K > 4) throw std::invalid_argument("coefficient search supports K <= 4");
  if (opts.coord_cap < 1 || opts.list_size < 1)
    throw std::invalid_argument("invalid search options");

  const ChannelStats st = channel_stats(ch);
  const double B = st.C1;  // any rate-positive a has ||embed(a)||^2 < 1+P||h||^2
  bool truncated = false;
  std::vector<Cands> cands;
  cands.reserve(static_cast<size_t>(K));
  for (int k = 0; k < K; ++k)
    cands.push_back(build_cands(ring, ch.h[static_cast<size_t>(k)], B,
                                opts.coord_cap, &truncated));
  if (truncated && opts.warn_on_cap)
    std::fprintf(stderr,
                 "rank_coefficients: coordinate cap %lld binds, result is the "
                 "best within the cap\n",
                 opts.coord_cap);

  Collector col(opts.list_size, K);
  if (K == 2) {
    search_k2(cands, B, st.C1, ch.P, col);
  } else {
    Entry scratch;
    search_recursive(cands, 0, K, B, st.C1, ch.P, 0.0, 0.0, 0.0, 0, scratch,
                     col);
  }
  if (col.near.empty()) throw std::logic_error("empty coefficient search");

  // Re-rank the near-tie set with the canonical rate expression; the key
  // ordering matches it to within the window by construction. Rates within
  // kRateTieBand of the maximum count as tied and resolve by integer norm,
  // then canonical coordinate order.
  const auto canonical = [&](const Entry& e) {
    CoeffVector cv;
    cv.a = entry_coords(e, K, ring.d);
    cv.rate = computation_rate(ch, cv.a, ring);
    return cv;
  };

  std::vector<CoeffVector> nearcv;
  nearcv.reserve(col.near.size());
  double rmax = 0.0;
  for (const auto& e : col.near) {
    nearcv.push_back(canonical(e));
    rmax = std::max(rmax, nearcv.back().rate);
  }
  size_t bi = nearcv.size();
  for (size_t i = 0; i < nearcv.size(); ++i) {
    if (nearcv[i].rate < rmax - kRateTieBand) continue;
    if (bi == nearcv.size() || col.near[i].nint < col.near[bi].nint ||
        (col.near[i].nint == col.near[bi].nint &&
         qi_vec_less(nearcv[i].a, nearcv[bi].a)))
      bi = i;
  }
  const CoeffVector best = nearcv[bi];

  RankedCoefficients out;
  out.cap_bound = truncated;
  out.list.reserve(col.top.size() + 1);
  bool best_in_top = false;
  for (const auto& e : col.top) {
    CoeffVector cv = canonical(e);
    best_in_top = best_in_top || cv.a == best.a;
    out.list.push_back(std::move(cv));
  }
  if (!best_in_top) out.list.push_back(best);
  std::vector<long long> nints(out.list.size());
  for (size_t i = 0; i < out.list.size(); ++i) {
    long long n = 0;
    for (const auto& q : out.list[i].a) n += norm(ring, q);
    nints[i] = n;
  }
  std::vector<size_t> order(out.list.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  // exact sort for the tail; the banded winner is then promoted to the front
  std::sort(order.begin(), order.end(), [&](size_t x, size_t y) {
    if (out.list[x].rate != out.list[y].rate)
      return out.list[x].rate > out.list[y].rate;
    if (nints[x] != nints[y]) return nints[x] < nints[y];
    return qi_vec_less(out.list[x].a, out.list[y].a);
  });
  std::vector<CoeffVector> sorted;
  sorted.reserve(out.list.size());
  sorted.push_back(best);
  for (size_t i : order) {
    if (static_cast<int>(sorted.size()) >= opts.list_size) break;
    if (out.list[i].a == best.a) continue;
    sorted.push_back(std::move(out.list[i]));
  }
  out.list = std::move(sorted);
  return out;
}

CoeffVector best_coefficients(const ChannelVector& ch, const Ring& ring,
                              const SearchOptions& opts) {
  return rank_coefficients(ch, ring, opts).list.front();
}

QuadInt det_ring(const Ring& ring, const std::vector<std::vector<QuadInt>>& A) {
  const int n = static_cast<int>(A.size());
  if (n < 1 || n > 4) throw std::invalid_argument("det_ring supports 1 <= K <= 4");
  for (const auto& row : A)
    if (static_cast<int>(row.size()) != n)
      throw std::invalid_argument("det_ring requires a square matrix");
  if (n == 1) return A[0][0];
  QuadInt det{0, 0, ring.d};
  std::vector<std::vector<QuadInt>> minor(static_cast<size_t>(n - 1));
  for (int j = 0; j < n; ++j) {
    for (int r = 1; r < n; ++r) {
      auto& row = minor[static_cast<size_t>(r - 1)];
      row.clear();
      for (int c = 0; c < n; ++c)
        if (c != j) row.push_back(A[static_cast<size_t>(r)][static_cast<size_t>(c)]);
    }
    const QuadInt term =
        mul(ring, A[0][static_cast<size_t>(j)], det_ring(ring, minor));
    det = (j % 2 == 0) ? add(ring, det, term) : sub(ring, det, term);
  }
  return det;
}

Selection select_matrix(const std::vector<ChannelVector>& H, const Ring& ring,
                        const SearchOptions& opts, const PrimeIdeal* mod_check) {
  const int M = static_cast<int>(H.size());
  if (M < 1) throw std::invalid_argument("no relays");
  const int K = static_cast<int>(H[0].h.size());
  if (M != K)
    throw std::invalid_argument("select_matrix requires the square case M = K");
  for (const auto& ch : H)
    if (static_cast<int>(ch.h.size()) != K)
      throw std::invalid_argument("relay channel lengths differ");
  if (mod_check && mod_check->ring.d != ring.d)
    throw std::invalid_argument("mod_check ideal belongs to a different ring");

  std::vector<RankedCoefficients> lists;
  lists.reserve(static_cast<size_t>(M));
  bool cap_any = false;
  for (const auto& ch : H) {
    lists.push_back(rank_coefficients(ch, ring, opts));
    cap_any = cap_any || lists.back().cap_bound;
  }

  std::vector<int> idx(static_cast<size_t>(M), 0), best_idx;
  double best_net = -1.0;

  std::vector<std::vector<QuadInt>> A(static_cast<size_t>(M));
  const auto feasible = [&]() {
    for (int m = 0; m < M; ++m)
      A[static_cast<size_t>(m)] =
          lists[static_cast<size_t>(m)].list[static_cast<size_t>(idx[static_cast<size_t>(m)])].a;
    const QuadInt det = det_ring(ring, A);
    if (det.a == 0 && det.b == 0) return false;
    if (mod_check) {
      std::vector<std::vector<long long>> S(static_cast<size_t>(M),
                                            std::vector<long long>(static_cast<size_t>(M)));
      for (int m = 0; m < M; ++m)
        for (int k = 0; k < K; ++k)
          S[static_cast<size_t>(m)][static_cast<size_t>(k)] =
              sigma(A[static_cast<size_t>(m)][static_cast<size_t>(k)], *mod_check).value;
      if (det_mod(S, mod_check->p) == 0) return false;
    }
    return true;
  };

  const auto dfs = [&](const auto& self, int m, double cur_min) -> void {
    const auto& list = lists[static_cast<size_t>(m)].list;
    for (int i = 0; i < static_cast<int>(list.size()); ++i) {
      const double r = list[static_cast<size_t>(i)].rate;
      const double cm = std::min(cur_min, r);
      if (cm <= best_net) break;  // list sorted by rate descending
      idx[static_cast<size_t>(m)] = i;
      if (m + 1 == M) {
        if (feasible()) {
          best_net = cm;
          best_idx = idx;
        }
      } else {
        self(self, m + 1, cm);
      }
    }
  };
  dfs(dfs, 0, kInf);

  if (best_idx.empty())
    throw DegenerateChannel(
        "no full-rank coefficient matrix within the candidate lists");

  Selection sel;
  sel.ring = ring;
  sel.cap_bound = cap_any;
  sel.A.resize(static_cast<size_t>(M));
  sel.relay_rates.resize(static_cast<size_t>(M));
  double net = kInf;
  for (int m = 0; m < M; ++m) {
    const auto& cv =
        lists[static_cast<size_t>(m)].list[static_cast<size_t>(best_idx[static_cast<size_t>(m)])];
    sel.A[static_cast<size_t>(m)] = cv.a;
    sel.relay_rates[static_cast<size_t>(m)] = cv.rate;
    net = std::min(net, cv.rate);
  }
  sel.network_rate = net;
  return sel;
}

Selection adaptive_select(const std::vector<ChannelVector>& H,
                          const std::vector<Ring>& rings,
                          const SearchOptions& opts,
                          const PrimeIdeal* mod_check) {
  if (rings.empty()) throw std::invalid_argument("empty ring list");
  bool have = false;
  Selection best;
  for (const auto& ring : rings) {
    Selection s;
    try {
      s = select_matrix(H, ring, opts,
                        mod_check && mod_check->ring.d == ring.d ? mod_check
                                                                 : nullptr);
    } catch (const DegenerateChannel&) {
      continue;
    }
    if (!have || s.network_rate > best.network_rate) {
      have = true;
      best = std::move(s);
    }
  }
  if (!have)
    throw DegenerateChannel("all rings failed to produce a full-rank matrix");
  return best;
}

}  // namespace acf

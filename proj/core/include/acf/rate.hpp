#pragma once
// Computation-rate evaluation, exact coefficient-vector search per relay,
// full-rank matrix selection, and adaptive ring selection.

#include <complex>
#include <stdexcept>
#include <vector>

#include "acf/ideal.hpp"
#include "acf/ring.hpp"

namespace acf {

struct ChannelVector {
  std::vector<std::complex<double>> h;
  double P = 1.0;  // transmit power with unit-variance noise; SNR = 10 log10 P
};

struct CoeffVector {
  std::vector<QuadInt> a;
  double rate = 0.0;
};

struct SearchOptions {
  long long coord_cap = 12;  // per-coordinate bound on |a|, |b|
  int list_size = 16;        // ranked candidates kept per relay
  bool warn_on_cap = true;   // stderr note when the cap truncates the search
};

struct RankedCoefficients {
  // Front entry is the maximizer under the banded tie rule (see
  // best_coefficients); the tail is sorted by evaluated rate descending, then
  // smaller ||a||^2, then canonical coordinate order.
  std::vector<CoeffVector> list;
  bool cap_bound = false;  // true when the coordinate cap truncated the
                           // rate-positive search region
};

struct Selection {
  Ring ring;
  std::vector<std::vector<QuadInt>> A;  // A[m] = coefficient row of relay m
  std::vector<double> relay_rates;
  double network_rate = 0.0;  // min over relays
  bool cap_bound = false;
};

struct DegenerateChannel : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Achievable rate log2+( 1 / (||a||^2 - P |h^H a|^2 / (1 + P ||h||^2)) ).
/// Evaluated in the cancellation-free form
///   D = (||a||^2 + P (||a||^2 ||h||^2 - |h^H a|^2)) / (1 + P ||h||^2),
/// rate = max(0, -log2 D). Rejects the zero vector; D > 0 by Cauchy-Schwarz.
double computation_rate(const ChannelVector& ch, const std::vector<QuadInt>& a,
                        const Ring& ring);

/// P * D: the per-complex-dimension effective noise power after MMSE scaling
/// when inputs have power P.
double effective_noise_power(const ChannelVector& ch,
                             const std::vector<QuadInt>& a, const Ring& ring);

/// Exact maximizer of the computation rate over nonzero a in O_K^K within
/// the sufficient region ||embed(a)||^2 <= 1 + P ||h||^2 (every rate-positive
/// vector lies inside), intersected with the coordinate cap. Rates within an
/// absolute 4e-9 band of the maximum count as tied (unit rotations of one
/// vector are mathematically tied but evaluate apart by rounding) and break
/// to smaller ||a||^2, then canonical coordinate order.
CoeffVector best_coefficients(const ChannelVector& ch, const Ring& ring,
                              const SearchOptions& opts = {});

/// Same search, returning the top candidates for matrix selection.
RankedCoefficients rank_coefficients(const ChannelVector& ch, const Ring& ring,
                                     const SearchOptions& opts = {});

/// Exact determinant over O_K by cofactor expansion (K <= 4).
QuadInt det_ring(const Ring& ring, const std::vector<std::vector<QuadInt>>& A);

/// Max-min rate coefficient matrix: per relay the ranked candidate list,
/// then backtracking over the lists for the best min-rate with det(A) != 0
/// in O_K. When mod_check is given, sigma(A) must also be invertible mod p.
/// Throws DegenerateChannel when no full-rank combination exists within the
/// candidate lists. Requires M = K (square case).
Selection select_matrix(const std::vector<ChannelVector>& H, const Ring& ring,
                        const SearchOptions& opts = {},
                        const PrimeIdeal* mod_check = nullptr);

/// Best Selection across rings for the same channel; rings that fail with
/// DegenerateChannel are skipped, and the error propagates only when every
/// ring fails. Rate ties keep the earliest ring in the list.
Selection adaptive_select(const std::vector<ChannelVector>& H,
                          const std::vector<Ring>& rings,
                          const SearchOptions& opts = {},
                          const PrimeIdeal* mod_check = nullptr);

}  // namespace acf

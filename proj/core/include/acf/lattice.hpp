#pragma once
// Desk-scale Construction A lattices over O_K: a linear code over F_p lifted
// through the residue map and tiled by the ideal, plus the nested pair used
// for shaping and coding.

#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "acf/ideal.hpp"
#include "acf/ring.hpp"
#include "acf/rng.hpp"

namespace acf {

struct RadiusExhausted : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct OversizeEnumeration : std::length_error {
  using std::length_error::length_error;
};

struct LinearCode {
  long long p = 2;
  int N = 0;  // block length
  int n = 0;  // dimension, n <= N, G full column rank
  std::vector<std::vector<long long>> G;  // N x n, entries in [0, p)
  // Solver cache: E*G = [I_n; 0] after row reduction. E is N x N.
  std::vector<std::vector<long long>> E;
};

/// Validates dimensions, reduces entries mod p and checks rank(G) = n.
LinearCode make_code(long long p, int N, std::vector<std::vector<long long>> G);

/// G * y over F_p.
std::vector<long long> encode_codeword(const LinearCode& code,
                                       const std::vector<long long>& y);

/// Solves G * y = c; nullopt when c is not a codeword.
std::optional<std::vector<long long>> solve_codeword(
    const LinearCode& code, const std::vector<long long>& c);

struct ConstructionALattice {
  LinearCode code;
  PrimeIdeal ideal;
  // Overall coordinate scale applied to (lift(C) + ideal^N). When built from
  // a nested pair this is gamma / sqrt(p).
  double scale = 1.0;
};

ConstructionALattice make_lattice(LinearCode code, PrimeIdeal ideal,
                                  double scale);

struct LatticePoint {
  std::vector<QuadInt> ring_coords;          // unscaled O_K coordinates
  std::vector<std::complex<double>> coords;  // scale * embed(ring_coords)
  double dist2 = 0.0;  // squared distance to the decoder input, if decoded
};

/// Membership test on unscaled coordinates: x is a lattice point iff the
/// coordinate-wise residue vector is a codeword.
bool is_lattice_point(const std::vector<QuadInt>& x,
                      const ConstructionALattice& lat);

/// Exact nearest lattice point to y among all points within `radius`
/// (Euclidean, scaled coordinates). Enumerates the p^n codeword cosets with
/// an exact per-coordinate nearest-translate table; distance ties resolve to
/// the canonical smallest coordinate vector. Throws RadiusExhausted when no
/// point lies within radius, OversizeEnumeration when p^n > 10^6 or N > 8.
LatticePoint decode_nearest(
    const std::vector<std::complex<double>>& y, const ConstructionALattice& lat,
    double radius = std::numeric_limits<double>::infinity());

struct NestedCode {
  ConstructionALattice coarse;  // from G_c
  ConstructionALattice fine;    // from [G_c Gtilde]
  int m_c = 0;
  int m_f = 0;
  double P = 1.0;
  double gamma = 1.0;  // power scaling; lattice scale is gamma / sqrt(p)
  double design_rate = 0.0;  // ((m_f - m_c) / N) log2 p
};

/// Builds the nested pair from the coarse generator and the extension
/// columns. gamma = 2 sqrt(2 N P / sqrt(|d|)) * gamma_scale; the default
/// gamma_scale = 1 keeps the conservative power margin.
NestedCode build_nested(const std::vector<std::vector<long long>>& G_c,
                        const std::vector<std::vector<long long>>& G_tilde,
                        const PrimeIdeal& ideal, double P,
                        double gamma_scale = 1.0);

/// The p^(m_f - m_c) codebook points: fine cosets reduced into the coarse
/// Voronoi region. Throws OversizeEnumeration above 10^4 points.
std::vector<LatticePoint> enumerate_codebook(const NestedCode& nc);

/// x mod the coarse lattice: x minus its nearest coarse point.
std::vector<std::complex<double>> mod_coarse(
    const std::vector<std::complex<double>>& x, const NestedCode& nc);

/// Exact number of O_K^N points in the closed ball of radius r around
/// `center` (2N real coordinates). N in {1, 2}, r <= 20.
long long count_points_in_ball(const Ring& ring, int N,
                               const std::vector<double>& center, double r);

struct BallBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// Volume-based lower/upper bounds on the ball count: the ball radius is
/// padded by the coordinate-wise covering radius sqrt(2N|d|)/2 and compared
/// against the covolume (sqrt(|disc|)/2)^N, with V_2 = pi and V_4 = pi^2/2.
BallBounds ball_count_bounds(const Ring& ring, int N, double r);

/// Real 2N-dimensional volume of the Voronoi cell:
/// scale^(2N) * (sqrt(|disc|)/2)^N * p^(N-n).
double lattice_covolume(const ConstructionALattice& lat);

/// A point uniform over the Voronoi region of the lattice, sampled as a
/// uniform point of a fundamental parallelepiped reduced mod the lattice.
std::vector<std::complex<double>> sample_voronoi_uniform(
    const ConstructionALattice& lat, RngStream& rng);

struct SecondMomentEstimate {
  double sigma2_complex = 0.0;  // E ||u||^2 / N, per complex dimension
  double se_sigma2 = 0.0;
  double G = 0.0;  // normalized second moment per real dimension
  double se_G = 0.0;
  long long trials = 0;
};

/// Monte Carlo second moment of the Voronoi region. trials >= 1000.
/// G = (sigma2_complex / 2) / covolume^(1/N); 1/12 for a square cell,
/// about 0.0802 for the hexagonal one, never below 1/(2 pi e).
SecondMomentEstimate estimate_second_moment(const ConstructionALattice& lat,
                                            long long trials,
                                            std::uint64_t seed);

}  // namespace acf

// Micro-benchmarks for the hot paths: ring quantization, residue maps,
// nearest-point decoding and the coefficient search.

#include <benchmark/benchmark.h>

#include <complex>
#include <vector>

#include "acf/ideal.hpp"
#include "acf/lattice.hpp"
#include "acf/rate.hpp"
#include "acf/ring.hpp"
#include "acf/rng.hpp"

using namespace acf;

namespace {

void BM_quantize(benchmark::State& state) {
  const Ring ring = make_ring(-3);
  RngStream rng(1, 0xB0, 0);
  std::vector<std::complex<double>> pts(1024);
  for (auto& z : pts) z = 25.0 * rng.cgaussian();
  size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(quantize(ring, pts[i]));
    i = (i + 1) & 1023;
  }
}
BENCHMARK(BM_quantize);

void BM_sigma(benchmark::State& state) {
  const Ring ring = make_ring(-5);
  const PrimeIdeal ideal = prime_ideal_above(ring, 23);
  RngStream rng(2, 0xB1, 0);
  std::vector<QuadInt> xs(1024, make_qi(ring, 0, 0));
  for (auto& x : xs)
    x = make_qi(ring, rng.uniform_int(2001) - 1000,
                rng.uniform_int(2001) - 1000);
  size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sigma(xs[i], ideal).value);
    i = (i + 1) & 1023;
  }
}
BENCHMARK(BM_sigma);

void BM_decode_nearest(benchmark::State& state) {
  const Ring ring = make_ring(-1);
  const PrimeIdeal ideal = prime_ideal_above(ring, 13);
  const ConstructionALattice lat = make_lattice(
      make_code(13, 4, {{1, 0}, {0, 1}, {2, 5}, {7, 3}}), ideal, 0.8);
  RngStream rng(3, 0xB2, 0);
  std::vector<std::vector<std::complex<double>>> ys(64);
  for (auto& y : ys) {
    y.resize(4);
    for (auto& z : y) z = 6.0 * rng.cgaussian();
  }
  size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(decode_nearest(ys[i], lat).dist2);
    i = (i + 1) & 63;
  }
}
BENCHMARK(BM_decode_nearest);

void BM_rank_coefficients(benchmark::State& state) {
  const Ring ring = make_ring(-1);
  RngStream rng(4, 0xB3, 0);
  const ChannelVector ch{{rng.cgaussian(), rng.cgaussian()}, 1000.0};
  SearchOptions opts;
  opts.warn_on_cap = false;
  for (auto _ : state)
    benchmark::DoNotOptimize(rank_coefficients(ch, ring, opts).list.size());
}
BENCHMARK(BM_rank_coefficients);

void BM_select_matrix(benchmark::State& state) {
  const Ring ring = make_ring(-6);
  RngStream rng(5, 0xB4, 0);
  std::vector<ChannelVector> chans(2);
  for (auto& ch : chans) {
    ch.h = {rng.cgaussian(), rng.cgaussian()};
    ch.P = 100.0;
  }
  SearchOptions opts;
  opts.warn_on_cap = false;
  for (auto _ : state)
    benchmark::DoNotOptimize(select_matrix(chans, ring, opts).network_rate);
}
BENCHMARK(BM_select_matrix);

}  // namespace

BENCHMARK_MAIN();

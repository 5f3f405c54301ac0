#pragma once
// Monte Carlo rate sweeps over fading channels, end-to-end
// encode/relay/decode trials, and the report serialization used by the
// command-line driver.

#include <complex>
#include <string>
#include <vector>

#include "acf/lattice.hpp"
#include "acf/rate.hpp"
#include "acf/rng.hpp"

namespace acf {

enum class SimMode { fixed_channel, rayleigh };

struct SimConfig {
  int K = 2;
  int M = 2;
  std::vector<double> snr_db = {10.0};
  std::vector<long long> rings = {-1, -2, -3, -5, -6, -7};
  int trials = 200;
  unsigned long long seed = 12345;
  SimMode mode = SimMode::rayleigh;
  // M x K channel matrix, used when mode == fixed_channel (trials collapse
  // to 1 since nothing is random).
  std::vector<std::vector<std::complex<double>>> fixed_H;
  SearchOptions search;
  bool adaptive = true;       // append the best-ring row to the report
  bool keep_samples = false;  // retain per-trial network rates in each cell
};

struct RateCell {
  double mean_rate = 0.0;
  double se = 0.0;  // standard error of the mean
  int trials = 0;
  std::vector<double> samples;  // filled when keep_samples
};

struct RateReport {
  SimConfig config;
  // Row per ring in config order, plus a final "adaptive" row when enabled.
  // cells[row][i] corresponds to config.snr_db[i].
  std::vector<std::string> row_labels;
  std::vector<std::vector<RateCell>> cells;
  long long redraws = 0;   // channel draws rejected as degenerate
  bool cap_bound = false;  // some search hit the coordinate cap
};

// M x K matrix of i.i.d. circularly symmetric unit-variance Gaussians.
std::vector<std::vector<std::complex<double>>> gen_channel(int M, int K,
                                                           RngStream& rng);

// Shares one channel draw per trial across every ring and SNR point, so ring
// comparisons are paired and the adaptive row dominates pointwise by
// construction. A draw is redrawn (and counted) if any relay vector is
// numerically zero or any ring fails to produce a full-rank matrix at some
// SNR.
RateReport rate_sweep(const SimConfig& cfg);

// One line per (snr, ring) pair: snr_db,ring_d,mean_rate,stderr,trials with
// doubles printed at full round-trip precision.
std::string report_csv(const RateReport& rep);
std::string report_json(const RateReport& rep);

struct CsvRow {
  double snr_db = 0.0;
  std::string ring;
  double mean_rate = 0.0;
  double se = 0.0;
  int trials = 0;
};
std::vector<CsvRow> parse_report_csv(const std::string& text);

struct E2EParams {
  long long p = 13;
  int N = 4;
  int m_c = 2;
  int m_f = 4;
  long long ring_d = -1;
  int K = 2;
  int M = 2;
  double snr_db = 20.0;
  double noise_var = 1.0;  // receiver noise variance; 0 runs noiseless
  double gamma_scale = 1.0;
  int trials = 100;
  unsigned long long seed = 12345;
  unsigned long long code_seed = 1;  // generator-matrix draw
  SearchOptions search;
  // Optional overrides; empty means draw H from the seed and pick A by the
  // full-rank search.
  std::vector<std::vector<std::complex<double>>> fixed_H;
  std::vector<std::vector<QuadInt>> fixed_A;
};

struct E2EContext {
  Ring ring;
  PrimeIdeal ideal;
  NestedCode code;
  std::vector<std::vector<std::complex<double>>> H;
  std::vector<std::vector<QuadInt>> A;
  std::vector<double> relay_rates;
  double P = 0.0;
};

E2EContext build_e2e_context(const E2EParams& par);

struct E2ETrial {
  int trial = 0;
  bool success = false;         // every relay recovered its combination
  std::vector<int> relay_ok;    // per-relay 0/1
  std::vector<double> zeq_power;  // measured effective-noise power per symbol
};

E2ETrial e2e_trial(const E2EContext& ctx, const E2EParams& par, int trial);

struct E2ESummary {
  E2EParams params;
  double design_rate = 0.0;
  std::vector<double> relay_rates;
  int trials = 0;
  int successes = 0;
  double success_rate = 0.0;
  double mean_zeq_power = 0.0;
  std::vector<E2ETrial> log;  // filled when keep_log
};

E2ESummary run_e2e(const E2EParams& par, bool keep_log = false);

std::string e2e_json(const E2ESummary& s);
// One JSON object per line, one line per trial; requires keep_log.
std::string e2e_jsonl(const E2ESummary& s);

struct NoiseStats {
  double analytic = 0.0;  // MMSE effective-noise power for the pair (h, a)
  double measured = 0.0;  // Monte Carlo average of |alpha y - a x|^2
  double se = 0.0;
  int trials = 0;
};

// Draws x_k i.i.d. CN(0, P) and unit-variance receiver noise, applies the
// MMSE scaling, and compares the realized effective-noise power with the
// closed form.
NoiseStats effective_noise_stats(const ChannelVector& ch,
                                 const std::vector<QuadInt>& a,
                                 const Ring& ring, int trials,
                                 unsigned long long seed);

}  // namespace acf

#include "acf/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace acf {

namespace {

using ordered_json = nlohmann::ordered_json;

// Compensated accumulator; sweeps sum many near-equal rates.
struct Kahan {
  double s = 0.0, c = 0.0;
  void add(double x) {
    const double y = x - c;
    const double t = s + y;
    c = (t - s) - y;
    s = t;
  }
};

double snr_to_power(double snr_db) { return std::pow(10.0, snr_db / 10.0); }

double mean_se(const Kahan& sum, const Kahan& sum2, int n, double* mean) {
  *mean = n > 0 ? sum.s / n : 0.0;
  if (n < 2) return 0.0;
  const double var = std::max(0.0, (sum2.s - n * *mean * *mean) / (n - 1));
  return std::sqrt(var / n);
}

std::string fmt_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void validate_matrix(const std::vector<std::vector<std::complex<double>>>& H,
                     int M, int K, const char* what) {
  if (static_cast<int>(H.size()) != M)
    throw std::invalid_argument(std::string(what) + ": wrong row count");
  for (const auto& row : H)
    if (static_cast<int>(row.size()) != K)
      throw std::invalid_argument(std::string(what) + ": wrong column count");
}

ordered_json config_json(const SimConfig& cfg) {
  ordered_json j;
  j["K"] = cfg.K;
  j["M"] = cfg.M;
  j["snr_db"] = cfg.snr_db;
  j["rings"] = cfg.rings;
  j["trials"] = cfg.trials;
  j["seed"] = cfg.seed;
  j["mode"] = cfg.mode == SimMode::rayleigh ? "rayleigh" : "fixed";
  j["adaptive"] = cfg.adaptive;
  j["coord_cap"] = cfg.search.coord_cap;
  j["list_size"] = cfg.search.list_size;
  if (!cfg.fixed_H.empty()) {
    ordered_json h = ordered_json::array();
    for (const auto& row : cfg.fixed_H) {
      ordered_json r = ordered_json::array();
      for (const auto& z : row) r.push_back({z.real(), z.imag()});
      h.push_back(std::move(r));
    }
    j["fixed_H"] = std::move(h);
  }
  return j;
}

}  // namespace

std::vector<std::vector<std::complex<double>>> gen_channel(int M, int K,
                                                           RngStream& rng) {
  std::vector<std::vector<std::complex<double>>> H(
      static_cast<size_t>(M),
      std::vector<std::complex<double>>(static_cast<size_t>(K)));
  for (auto& row : H)
    for (auto& z : row) z = rng.cgaussian();
  return H;
}

RateReport rate_sweep(const SimConfig& cfg) {
  if (cfg.K < 1 || cfg.K > 4 || cfg.M != cfg.K)
    throw std::invalid_argument("rate_sweep requires 1 <= K = M <= 4");
  if (cfg.trials < 1) throw std::invalid_argument("trials must be positive");
  if (cfg.snr_db.empty() || cfg.rings.empty())
    throw std::invalid_argument("need at least one SNR and one ring");

  std::vector<Ring> rings;
  rings.reserve(cfg.rings.size());
  for (long long d : cfg.rings) rings.push_back(make_ring(d));
  if (cfg.mode == SimMode::fixed_channel)
    validate_matrix(cfg.fixed_H, cfg.M, cfg.K, "fixed_H");

  const size_t R = rings.size();
  const size_t S = cfg.snr_db.size();
  const size_t rows = R + (cfg.adaptive ? 1 : 0);
  const int trials = cfg.mode == SimMode::fixed_channel ? 1 : cfg.trials;
  // A per-call warning would repeat once per draw; the report carries the
  // aggregated flag instead.
  SearchOptions search = cfg.search;
  search.warn_on_cap = false;

  std::vector<std::vector<Kahan>> sum(rows, std::vector<Kahan>(S));
  std::vector<std::vector<Kahan>> sum2(rows, std::vector<Kahan>(S));
  std::vector<std::vector<std::vector<double>>> samples;
  if (cfg.keep_samples)
    samples.assign(rows, std::vector<std::vector<double>>(S));

  RateReport rep;
  rep.config = cfg;

  std::uint64_t draw_idx = 0;
  std::vector<std::vector<double>> rate(R, std::vector<double>(S));
  for (int t = 0; t < trials; ++t) {
    std::vector<std::vector<std::complex<double>>> H;
    for (;;) {
      if (cfg.mode == SimMode::fixed_channel) {
        H = cfg.fixed_H;
      } else {
        RngStream rng(cfg.seed, kTagChannel, draw_idx++);
        H = gen_channel(cfg.M, cfg.K, rng);
        bool degenerate = false;
        for (const auto& row : H) {
          double nh = 0.0;
          for (const auto& z : row) nh += std::norm(z);
          degenerate = degenerate || nh < 1e-12;
        }
        if (degenerate) {
          ++rep.redraws;
          continue;
        }
      }
      bool ok = true;
      for (size_t s = 0; s < S && ok; ++s) {
        const double P = snr_to_power(cfg.snr_db[s]);
        std::vector<ChannelVector> chans(static_cast<size_t>(cfg.M));
        for (int m = 0; m < cfg.M; ++m)
          chans[static_cast<size_t>(m)] = ChannelVector{H[static_cast<size_t>(m)], P};
        for (size_t r = 0; r < R && ok; ++r) {
          try {
            const Selection sel = select_matrix(chans, rings[r], search);
            rate[r][s] = sel.network_rate;
            rep.cap_bound = rep.cap_bound || sel.cap_bound;
          } catch (const DegenerateChannel&) {
            ok = false;
          }
        }
      }
      if (ok) break;
      if (cfg.mode == SimMode::fixed_channel)
        throw DegenerateChannel("fixed channel admits no full-rank selection");
      ++rep.redraws;
    }
    for (size_t s = 0; s < S; ++s) {
      double best = 0.0;
      for (size_t r = 0; r < R; ++r) {
        sum[r][s].add(rate[r][s]);
        sum2[r][s].add(rate[r][s] * rate[r][s]);
        if (cfg.keep_samples) samples[r][s].push_back(rate[r][s]);
        best = std::max(best, rate[r][s]);
      }
      if (cfg.adaptive) {
        sum[R][s].add(best);
        sum2[R][s].add(best * best);
        if (cfg.keep_samples) samples[R][s].push_back(best);
      }
    }
  }

  rep.row_labels.reserve(rows);
  for (long long d : cfg.rings) rep.row_labels.push_back(std::to_string(d));
  if (cfg.adaptive) rep.row_labels.push_back("adaptive");
  rep.cells.assign(rows, std::vector<RateCell>(S));
  for (size_t r = 0; r < rows; ++r)
    for (size_t s = 0; s < S; ++s) {
      RateCell& cell = rep.cells[r][s];
      cell.trials = trials;
      cell.se = mean_se(sum[r][s], sum2[r][s], trials, &cell.mean_rate);
      if (cfg.keep_samples) cell.samples = std::move(samples[r][s]);
    }
  return rep;
}

std::string report_csv(const RateReport& rep) {
  std::string out = "snr_db,ring_d,mean_rate,stderr,trials\n";
  for (size_t s = 0; s < rep.config.snr_db.size(); ++s)
    for (size_t r = 0; r < rep.row_labels.size(); ++r) {
      const RateCell& cell = rep.cells[r][s];
      out += fmt_double(rep.config.snr_db[s]);
      out += ',';
      out += rep.row_labels[r];
      out += ',';
      out += fmt_double(cell.mean_rate);
      out += ',';
      out += fmt_double(cell.se);
      out += ',';
      out += std::to_string(cell.trials);
      out += '\n';
    }
  return out;
}

std::string report_json(const RateReport& rep) {
  ordered_json j;
  j["config"] = config_json(rep.config);
  j["redraws"] = rep.redraws;
  j["cap_bound"] = rep.cap_bound;
  ordered_json rows = ordered_json::array();
  for (size_t r = 0; r < rep.row_labels.size(); ++r) {
    ordered_json row;
    row["ring"] = rep.row_labels[r];
    ordered_json cells = ordered_json::array();
    for (size_t s = 0; s < rep.config.snr_db.size(); ++s) {
      const RateCell& cell = rep.cells[r][s];
      ordered_json c;
      c["snr_db"] = rep.config.snr_db[s];
      c["mean_rate"] = cell.mean_rate;
      c["stderr"] = cell.se;
      c["trials"] = cell.trials;
      if (!cell.samples.empty()) c["samples"] = cell.samples;
      cells.push_back(std::move(c));
    }
    row["cells"] = std::move(cells);
    rows.push_back(std::move(row));
  }
  j["rows"] = std::move(rows);
  return j.dump(2) + "\n";
}

std::vector<CsvRow> parse_report_csv(const std::string& text) {
  std::vector<CsvRow> rows;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (line.rfind("snr_db,", 0) == 0) continue;
    }
    std::istringstream ls(line);
    std::string f[5];
    for (int i = 0; i < 5; ++i)
      if (!std::getline(ls, f[i], ','))
        throw std::invalid_argument("malformed CSV row: " + line);
    CsvRow row;
    row.snr_db = std::strtod(f[0].c_str(), nullptr);
    row.ring = f[1];
    row.mean_rate = std::strtod(f[2].c_str(), nullptr);
    row.se = std::strtod(f[3].c_str(), nullptr);
    row.trials = static_cast<int>(std::strtoll(f[4].c_str(), nullptr, 10));
    rows.push_back(std::move(row));
  }
  return rows;
}

E2EContext build_e2e_context(const E2EParams& par) {
  if (par.K < 1 || par.K > 4 || par.M != par.K)
    throw std::invalid_argument("end-to-end runs require 1 <= K = M <= 4");
  if (par.N < 1 || par.N > 8) throw std::invalid_argument("N must be in [1, 8]");
  if (par.m_c < 1 || par.m_c >= par.m_f || par.m_f > par.N)
    throw std::invalid_argument("need 1 <= m_c < m_f <= N");
  if (par.noise_var < 0.0)
    throw std::invalid_argument("noise variance must be nonnegative");

  E2EContext ctx;
  ctx.ring = make_ring(par.ring_d);
  ctx.ideal = prime_ideal_above(ctx.ring, par.p);
  ctx.P = snr_to_power(par.snr_db);

  // Retry generator draws until both the coarse block and the concatenated
  // fine matrix have full column rank.
  bool built = false;
  for (std::uint64_t attempt = 0; attempt < 100 && !built; ++attempt) {
    RngStream g(par.code_seed, kTagCode, attempt);
    std::vector<std::vector<long long>> Gc(
        static_cast<size_t>(par.N),
        std::vector<long long>(static_cast<size_t>(par.m_c)));
    std::vector<std::vector<long long>> Gt(
        static_cast<size_t>(par.N),
        std::vector<long long>(static_cast<size_t>(par.m_f - par.m_c)));
    for (auto& row : Gc)
      for (auto& x : row) x = g.uniform_int(par.p);
    for (auto& row : Gt)
      for (auto& x : row) x = g.uniform_int(par.p);
    try {
      ctx.code = build_nested(Gc, Gt, ctx.ideal, ctx.P, par.gamma_scale);
      built = true;
    } catch (const std::invalid_argument&) {
    }
  }
  if (!built)
    throw std::runtime_error("no full-rank generator pair after 100 draws");

  if (!par.fixed_H.empty()) {
    validate_matrix(par.fixed_H, par.M, par.K, "fixed_H");
    ctx.H = par.fixed_H;
  } else {
    RngStream rng(par.seed, kTagChannel, 0);
    ctx.H = gen_channel(par.M, par.K, rng);
  }

  std::vector<ChannelVector> chans(static_cast<size_t>(par.M));
  for (int m = 0; m < par.M; ++m)
    chans[static_cast<size_t>(m)] = ChannelVector{ctx.H[static_cast<size_t>(m)], ctx.P};

  if (!par.fixed_A.empty()) {
    if (static_cast<int>(par.fixed_A.size()) != par.M)
      throw std::invalid_argument("fixed_A: wrong row count");
    ctx.A.resize(par.fixed_A.size());
    for (size_t m = 0; m < par.fixed_A.size(); ++m) {
      if (static_cast<int>(par.fixed_A[m].size()) != par.K)
        throw std::invalid_argument("fixed_A: wrong column count");
      ctx.A[m] = par.fixed_A[m];
      for (auto& q : ctx.A[m]) q.d = ctx.ring.d;
    }
    const QuadInt det = det_ring(ctx.ring, ctx.A);
    if (det.a == 0 && det.b == 0)
      throw std::invalid_argument("fixed_A is singular over the ring");
    std::vector<std::vector<long long>> S(
        ctx.A.size(), std::vector<long long>(static_cast<size_t>(par.K)));
    for (size_t m = 0; m < ctx.A.size(); ++m)
      for (int k = 0; k < par.K; ++k)
        S[m][static_cast<size_t>(k)] =
            sigma(ctx.A[m][static_cast<size_t>(k)], ctx.ideal).value;
    if (det_mod(S, par.p) == 0)
      throw std::invalid_argument("fixed_A is singular mod p");
    ctx.relay_rates.resize(ctx.A.size());
    for (size_t m = 0; m < ctx.A.size(); ++m)
      ctx.relay_rates[m] = computation_rate(chans[m], ctx.A[m], ctx.ring);
  } else {
    Selection sel = select_matrix(chans, ctx.ring, par.search, &ctx.ideal);
    ctx.A = sel.A;
    ctx.relay_rates = sel.relay_rates;
  }
  return ctx;
}

E2ETrial e2e_trial(const E2EContext& ctx, const E2EParams& par, int trial) {
  const int K = par.K;
  const int M = par.M;
  const int N = par.N;
  const int dm = par.m_f - par.m_c;
  const long long p = par.p;
  const double scale = ctx.code.fine.scale;

  RngStream src(par.seed, kTagE2E, static_cast<std::uint64_t>(trial));
  RngStream nz(par.seed, kTagNoise, static_cast<std::uint64_t>(trial));

  // Per source: message digits, dithered codeword, exact fine-lattice
  // coordinates of the transmitted coset representative.
  std::vector<std::vector<long long>> w(
      static_cast<size_t>(K), std::vector<long long>(static_cast<size_t>(dm)));
  std::vector<std::vector<QuadInt>> v_int(static_cast<size_t>(K));
  std::vector<std::vector<std::complex<double>>> X(static_cast<size_t>(K));
  std::vector<std::vector<std::complex<double>>> dith(static_cast<size_t>(K));
  for (int k = 0; k < K; ++k) {
    auto& wk = w[static_cast<size_t>(k)];
    for (auto& digit : wk) digit = src.uniform_int(p);
    std::vector<long long> y(static_cast<size_t>(par.m_f), 0);
    for (int j = 0; j < dm; ++j)
      y[static_cast<size_t>(par.m_c + j)] = wk[static_cast<size_t>(j)];
    const std::vector<long long> cw = encode_codeword(ctx.code.fine.code, y);
    std::vector<QuadInt> t_int(static_cast<size_t>(N));
    for (int i = 0; i < N; ++i)
      t_int[static_cast<size_t>(i)] = lift(cw[static_cast<size_t>(i)], ctx.ideal);

    dith[static_cast<size_t>(k)] =
        sample_voronoi_uniform(ctx.code.coarse, src);
    std::vector<std::complex<double>> tx(static_cast<size_t>(N));
    for (int i = 0; i < N; ++i)
      tx[static_cast<size_t>(i)] =
          scale * embed(ctx.ring, t_int[static_cast<size_t>(i)]) +
          dith[static_cast<size_t>(k)][static_cast<size_t>(i)];
    const LatticePoint q = decode_nearest(tx, ctx.code.coarse);
    v_int[static_cast<size_t>(k)].resize(static_cast<size_t>(N));
    X[static_cast<size_t>(k)].resize(static_cast<size_t>(N));
    for (int i = 0; i < N; ++i) {
      v_int[static_cast<size_t>(k)][static_cast<size_t>(i)] =
          sub(ctx.ring, t_int[static_cast<size_t>(i)],
              q.ring_coords[static_cast<size_t>(i)]);
      X[static_cast<size_t>(k)][static_cast<size_t>(i)] =
          tx[static_cast<size_t>(i)] - q.coords[static_cast<size_t>(i)];
    }
  }

  E2ETrial res;
  res.trial = trial;
  res.relay_ok.assign(static_cast<size_t>(M), 0);
  res.zeq_power.assign(static_cast<size_t>(M), 0.0);
  bool all_ok = true;
  for (int m = 0; m < M; ++m) {
    const auto& hrow = ctx.H[static_cast<size_t>(m)];
    const auto& arow = ctx.A[static_cast<size_t>(m)];
    std::vector<std::complex<double>> y(static_cast<size_t>(N), {0.0, 0.0});
    for (int k = 0; k < K; ++k)
      for (int i = 0; i < N; ++i)
        y[static_cast<size_t>(i)] +=
            hrow[static_cast<size_t>(k)] * X[static_cast<size_t>(k)][static_cast<size_t>(i)];
    if (par.noise_var > 0.0) {
      const double sd = std::sqrt(par.noise_var);
      for (int i = 0; i < N; ++i) y[static_cast<size_t>(i)] += sd * nz.cgaussian();
    }

    std::complex<double> dot{0.0, 0.0};
    double nh = 0.0;
    for (int k = 0; k < K; ++k) {
      dot += std::conj(hrow[static_cast<size_t>(k)]) *
             embed(ctx.ring, arow[static_cast<size_t>(k)]);
      nh += std::norm(hrow[static_cast<size_t>(k)]);
    }
    const std::complex<double> alpha = ctx.P * dot / (par.noise_var + ctx.P * nh);

    std::vector<std::complex<double>> s(static_cast<size_t>(N));
    for (int i = 0; i < N; ++i) {
      std::complex<double> acc = alpha * y[static_cast<size_t>(i)];
      for (int k = 0; k < K; ++k)
        acc -= embed(ctx.ring, arow[static_cast<size_t>(k)]) *
               dith[static_cast<size_t>(k)][static_cast<size_t>(i)];
      s[static_cast<size_t>(i)] = acc;
    }

    // Exact integer combination the relay should recover.
    std::vector<QuadInt> theta(static_cast<size_t>(N), QuadInt{0, 0, ctx.ring.d});
    for (int i = 0; i < N; ++i)
      for (int k = 0; k < K; ++k)
        theta[static_cast<size_t>(i)] =
            add(ctx.ring, theta[static_cast<size_t>(i)],
                mul(ctx.ring, arow[static_cast<size_t>(k)],
                    v_int[static_cast<size_t>(k)][static_cast<size_t>(i)]));
    double zp = 0.0;
    for (int i = 0; i < N; ++i)
      zp += std::norm(s[static_cast<size_t>(i)] -
                      scale * embed(ctx.ring, theta[static_cast<size_t>(i)]));
    res.zeq_power[static_cast<size_t>(m)] = zp / N;

    const LatticePoint hat = decode_nearest(s, ctx.code.fine);
    std::vector<long long> resid(static_cast<size_t>(N));
    for (int i = 0; i < N; ++i)
      resid[static_cast<size_t>(i)] =
          sigma(hat.ring_coords[static_cast<size_t>(i)], ctx.ideal).value;
    const auto digits = solve_codeword(ctx.code.fine.code, resid);
    if (!digits) throw std::logic_error("decoded point left the code");

    bool ok = true;
    for (int j = 0; j < dm; ++j) {
      long long u = 0;
      for (int k = 0; k < K; ++k) {
        const long long sk = sigma(arow[static_cast<size_t>(k)], ctx.ideal).value;
        u = (u + sk * w[static_cast<size_t>(k)][static_cast<size_t>(j)]) % p;
      }
      ok = ok && (*digits)[static_cast<size_t>(par.m_c + j)] == u;
    }
    res.relay_ok[static_cast<size_t>(m)] = ok ? 1 : 0;
    all_ok = all_ok && ok;
  }
  res.success = all_ok;
  return res;
}

E2ESummary run_e2e(const E2EParams& par, bool keep_log) {
  if (par.trials < 1) throw std::invalid_argument("trials must be positive");
  const E2EContext ctx = build_e2e_context(par);

  E2ESummary sum;
  sum.params = par;
  sum.design_rate = ctx.code.design_rate;
  sum.relay_rates = ctx.relay_rates;
  sum.trials = par.trials;
  Kahan zeq;
  long long zeq_n = 0;
  for (int t = 0; t < par.trials; ++t) {
    E2ETrial tr = e2e_trial(ctx, par, t);
    sum.successes += tr.success ? 1 : 0;
    for (double z : tr.zeq_power) {
      zeq.add(z);
      ++zeq_n;
    }
    if (keep_log) sum.log.push_back(std::move(tr));
  }
  sum.success_rate = static_cast<double>(sum.successes) / par.trials;
  sum.mean_zeq_power = zeq_n > 0 ? zeq.s / zeq_n : 0.0;
  return sum;
}

std::string e2e_json(const E2ESummary& s) {
  ordered_json j;
  ordered_json p;
  p["p"] = s.params.p;
  p["N"] = s.params.N;
  p["m_c"] = s.params.m_c;
  p["m_f"] = s.params.m_f;
  p["ring_d"] = s.params.ring_d;
  p["K"] = s.params.K;
  p["M"] = s.params.M;
  p["snr_db"] = s.params.snr_db;
  p["noise_var"] = s.params.noise_var;
  p["gamma_scale"] = s.params.gamma_scale;
  p["trials"] = s.params.trials;
  p["seed"] = s.params.seed;
  p["code_seed"] = s.params.code_seed;
  j["params"] = std::move(p);
  j["design_rate"] = s.design_rate;
  j["relay_rates"] = s.relay_rates;
  j["trials"] = s.trials;
  j["successes"] = s.successes;
  j["success_rate"] = s.success_rate;
  j["mean_zeq_power"] = s.mean_zeq_power;
  return j.dump(2) + "\n";
}

std::string e2e_jsonl(const E2ESummary& s) {
  std::string out;
  for (const auto& tr : s.log) {
    ordered_json j;
    j["trial"] = tr.trial;
    j["success"] = tr.success;
    j["relay_ok"] = tr.relay_ok;
    j["zeq_power"] = tr.zeq_power;
    out += j.dump();
    out += '\n';
  }
  return out;
}

NoiseStats effective_noise_stats(const ChannelVector& ch,
                                 const std::vector<QuadInt>& a,
                                 const Ring& ring, int trials,
                                 unsigned long long seed) {
  if (trials < 1) throw std::invalid_argument("trials must be positive");
  NoiseStats st;
  st.trials = trials;
  st.analytic = effective_noise_power(ch, a, ring);

  const size_t K = ch.h.size();
  std::complex<double> dot{0.0, 0.0};
  double nh = 0.0;
  std::vector<std::complex<double>> ea(K);
  for (size_t k = 0; k < K; ++k) {
    ea[k] = embed(ring, a[k]);
    dot += std::conj(ch.h[k]) * ea[k];
    nh += std::norm(ch.h[k]);
  }
  const std::complex<double> alpha = ch.P * dot / (1.0 + ch.P * nh);
  const double sd = std::sqrt(ch.P);

  RngStream rng(seed, kTagNoise, 0);
  Kahan sum, sum2;
  for (int t = 0; t < trials; ++t) {
    std::complex<double> y = rng.cgaussian();  // unit receiver noise
    std::complex<double> lin{0.0, 0.0};
    for (size_t k = 0; k < K; ++k) {
      const std::complex<double> x = sd * rng.cgaussian();
      y += ch.h[k] * x;
      lin += ea[k] * x;
    }
    const double e2 = std::norm(alpha * y - lin);
    sum.add(e2);
    sum2.add(e2 * e2);
  }
  st.se = mean_se(sum, sum2, trials, &st.measured);
  return st;
}

}  // namespace acf

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "acf/sim.hpp"

using namespace acf;

namespace {

SimConfig small_config() {
  SimConfig cfg;
  cfg.K = cfg.M = 2;
  cfg.snr_db = {10.0, 20.0};
  cfg.rings = {-1, -2};
  cfg.trials = 5;
  cfg.seed = 777;
  cfg.search.warn_on_cap = false;
  return cfg;
}

}  // namespace

TEST_CASE("channel generator shape, determinism and scale") {
  RngStream a(5, kTagChannel, 3);
  RngStream b(5, kTagChannel, 3);
  const auto H1 = gen_channel(3, 2, a);
  const auto H2 = gen_channel(3, 2, b);
  REQUIRE(H1.size() == 3);
  REQUIRE(H1[0].size() == 2);
  CHECK(H1 == H2);
  double s2 = 0.0;
  RngStream c(6, kTagChannel, 0);
  const int n = 1000;
  for (int i = 0; i < n; ++i) s2 += std::norm(gen_channel(1, 1, c)[0][0]);
  CHECK(std::abs(s2 / n - 1.0) < 0.15);
}

TEST_CASE("rate sweep report shape, labels and config echo") {
  const SimConfig cfg = small_config();
  const RateReport rep = rate_sweep(cfg);
  REQUIRE(rep.row_labels.size() == 3);
  CHECK(rep.row_labels[0] == "-1");
  CHECK(rep.row_labels[1] == "-2");
  CHECK(rep.row_labels[2] == "adaptive");
  REQUIRE(rep.cells.size() == 3);
  for (const auto& row : rep.cells) {
    REQUIRE(row.size() == cfg.snr_db.size());
    for (const auto& cell : row) {
      CHECK(cell.trials == cfg.trials);
      CHECK(std::isfinite(cell.mean_rate));
      CHECK(cell.mean_rate >= 0.0);
      CHECK(cell.se >= 0.0);
      CHECK(cell.samples.empty());
    }
  }
  CHECK(rep.config.seed == cfg.seed);
  CHECK(rep.config.trials == cfg.trials);
  CHECK(rep.redraws >= 0);
}

TEST_CASE("adaptive row dominates pointwise and means match the samples") {
  SimConfig cfg = small_config();
  cfg.rings = {-1, -3};
  cfg.trials = 6;
  cfg.keep_samples = true;
  const RateReport rep = rate_sweep(cfg);
  REQUIRE(rep.cells.size() == 3);
  for (size_t s = 0; s < cfg.snr_db.size(); ++s) {
    const auto& r0 = rep.cells[0][s].samples;
    const auto& r1 = rep.cells[1][s].samples;
    const auto& ad = rep.cells[2][s].samples;
    REQUIRE(r0.size() == static_cast<size_t>(cfg.trials));
    REQUIRE(r1.size() == static_cast<size_t>(cfg.trials));
    REQUIRE(ad.size() == static_cast<size_t>(cfg.trials));
    for (size_t t = 0; t < ad.size(); ++t)
      CHECK(ad[t] == std::max(r0[t], r1[t]));
    for (size_t row = 0; row < 3; ++row) {
      double m = 0.0;
      for (double x : rep.cells[row][s].samples) m += x;
      m /= static_cast<double>(cfg.trials);
      CHECK(rep.cells[row][s].mean_rate == doctest::Approx(m).epsilon(1e-12));
    }
  }
}

TEST_CASE("fixed channel mode is a single deterministic evaluation") {
  SimConfig cfg = small_config();
  cfg.mode = SimMode::fixed_channel;
  cfg.trials = 50;  // collapses to 1
  cfg.fixed_H = {{{1.0, 0.0}, {0.0, 0.5}}, {{0.3, 0.0}, {1.0, 0.0}}};
  const RateReport rep = rate_sweep(cfg);
  for (size_t s = 0; s < cfg.snr_db.size(); ++s) {
    const double P = std::pow(10.0, cfg.snr_db[s] / 10.0);
    std::vector<ChannelVector> chans = {{cfg.fixed_H[0], P},
                                        {cfg.fixed_H[1], P}};
    double best = 0.0;
    for (size_t r = 0; r < cfg.rings.size(); ++r) {
      const Selection sel =
          select_matrix(chans, make_ring(cfg.rings[r]), cfg.search);
      CHECK(rep.cells[r][s].trials == 1);
      CHECK(rep.cells[r][s].se == 0.0);
      CHECK(rep.cells[r][s].mean_rate == sel.network_rate);
      best = std::max(best, sel.network_rate);
    }
    CHECK(rep.cells[2][s].mean_rate == best);
  }
  CHECK(rep.redraws == 0);
}

TEST_CASE("sweep validation") {
  SimConfig cfg = small_config();
  cfg.trials = 0;
  CHECK_THROWS_AS(rate_sweep(cfg), std::invalid_argument);
  cfg = small_config();
  cfg.snr_db.clear();
  CHECK_THROWS_AS(rate_sweep(cfg), std::invalid_argument);
  cfg = small_config();
  cfg.rings.clear();
  CHECK_THROWS_AS(rate_sweep(cfg), std::invalid_argument);
  cfg = small_config();
  cfg.M = 3;
  CHECK_THROWS_AS(rate_sweep(cfg), std::invalid_argument);
  cfg = small_config();
  cfg.mode = SimMode::fixed_channel;  // no fixed_H supplied
  CHECK_THROWS_AS(rate_sweep(cfg), std::invalid_argument);
  cfg = small_config();
  cfg.rings = {-4};  // not squarefree
  CHECK_THROWS_AS(rate_sweep(cfg), std::invalid_argument);
}

TEST_CASE("csv serialization round-trips exactly") {
  SimConfig cfg = small_config();
  const RateReport rep = rate_sweep(cfg);
  const std::string text = report_csv(rep);
  CHECK(text.rfind("snr_db,ring_d,mean_rate,stderr,trials\n", 0) == 0);
  const auto rows = parse_report_csv(text);
  REQUIRE(rows.size() == cfg.snr_db.size() * rep.row_labels.size());
  size_t i = 0;
  for (size_t s = 0; s < cfg.snr_db.size(); ++s)
    for (size_t r = 0; r < rep.row_labels.size(); ++r, ++i) {
      CHECK(rows[i].snr_db == cfg.snr_db[s]);
      CHECK(rows[i].ring == rep.row_labels[r]);
      CHECK(rows[i].mean_rate == rep.cells[r][s].mean_rate);
      CHECK(rows[i].se == rep.cells[r][s].se);
      CHECK(rows[i].trials == rep.cells[r][s].trials);
    }
}

TEST_CASE("json report parses and echoes the configuration") {
  SimConfig cfg = small_config();
  cfg.keep_samples = true;
  const RateReport rep = rate_sweep(cfg);
  const nlohmann::json j = nlohmann::json::parse(report_json(rep));
  CHECK(j["config"]["K"] == 2);
  CHECK(j["config"]["mode"] == "rayleigh");
  CHECK(j["config"]["trials"] == cfg.trials);
  CHECK(j["config"]["snr_db"] == nlohmann::json(cfg.snr_db));
  CHECK(j["config"]["rings"] == nlohmann::json(cfg.rings));
  CHECK(j["redraws"] >= 0);
  CHECK(j["cap_bound"].is_boolean());
  REQUIRE(j["rows"].size() == rep.row_labels.size());
  for (size_t r = 0; r < rep.row_labels.size(); ++r) {
    CHECK(j["rows"][r]["ring"] == rep.row_labels[r]);
    REQUIRE(j["rows"][r]["cells"].size() == cfg.snr_db.size());
    for (size_t s = 0; s < cfg.snr_db.size(); ++s) {
      const auto& c = j["rows"][r]["cells"][s];
      CHECK(c["snr_db"] == cfg.snr_db[s]);
      CHECK(c["mean_rate"] == rep.cells[r][s].mean_rate);
      CHECK(c["stderr"] == rep.cells[r][s].se);
      CHECK(c["trials"] == rep.cells[r][s].trials);
      REQUIRE(c.contains("samples"));
      CHECK(c["samples"].size() == static_cast<size_t>(cfg.trials));
    }
  }
}

TEST_CASE("sweep reruns are byte identical") {
  const SimConfig cfg = small_config();
  const RateReport r1 = rate_sweep(cfg);
  const RateReport r2 = rate_sweep(cfg);
  CHECK(report_csv(r1) == report_csv(r2));
  CHECK(report_json(r1) == report_json(r2));
}

TEST_CASE("noiseless integer channel decodes every trial exactly") {
  const Ring ring = make_ring(-1);
  E2EParams par;
  par.noise_var = 0.0;
  par.trials = 20;
  par.seed = 4242;
  par.fixed_A = {{make_qi(ring, 1, 0), make_qi(ring, 1, 0)},
                 {make_qi(ring, 1, 0), make_qi(ring, -1, 0)}};
  par.fixed_H = {{{1.0, 0.0}, {1.0, 0.0}}, {{1.0, 0.0}, {-1.0, 0.0}}};
  const E2ESummary sum = run_e2e(par);
  CHECK(sum.successes == par.trials);
  CHECK(sum.success_rate == 1.0);
  CHECK(sum.mean_zeq_power < 1e-15);
  CHECK(sum.design_rate ==
        doctest::Approx(0.5 * std::log2(13.0)).epsilon(1e-12));
  REQUIRE(sum.relay_rates.size() == 2);
}

TEST_CASE("end-to-end runs are deterministic") {
  E2EParams par;
  par.trials = 6;
  par.snr_db = 25.0;
  par.seed = 99;
  const E2ESummary a = run_e2e(par);
  const E2ESummary b = run_e2e(par);
  CHECK(a.successes == b.successes);
  CHECK(a.mean_zeq_power == b.mean_zeq_power);
  CHECK(e2e_json(a) == e2e_json(b));
  const nlohmann::json j = nlohmann::json::parse(e2e_json(a));
  CHECK(j["params"]["p"] == 13);
  CHECK(j["trials"] == 6);
  CHECK(j["design_rate"] == a.design_rate);
}

TEST_CASE("per-trial log serializes one line per trial") {
  E2EParams par;
  par.trials = 4;
  par.snr_db = 25.0;
  const E2ESummary sum = run_e2e(par, true);
  REQUIRE(sum.log.size() == 4);
  const std::string lines = e2e_jsonl(sum);
  size_t count = 0;
  size_t pos = 0;
  while ((pos = lines.find('\n', pos)) != std::string::npos) {
    ++count;
    ++pos;
  }
  CHECK(count == 4);
  std::istringstream in(lines);
  std::string line;
  int expect = 0;
  while (std::getline(in, line)) {
    const nlohmann::json j = nlohmann::json::parse(line);
    CHECK(j["trial"] == expect++);
    CHECK(j["success"].is_boolean());
    CHECK(j["relay_ok"].size() == 2);
    CHECK(j["zeq_power"].size() == 2);
  }
  // without the log the line dump is empty
  CHECK(e2e_jsonl(run_e2e(par)).empty());
}

TEST_CASE("context validation") {
  E2EParams par;
  par.m_c = 4;  // m_c must stay below m_f
  CHECK_THROWS_AS(build_e2e_context(par), std::invalid_argument);
  par = E2EParams{};
  par.noise_var = -1.0;
  CHECK_THROWS_AS(build_e2e_context(par), std::invalid_argument);
  par = E2EParams{};
  par.p = 7;  // inert in Z[i]
  CHECK_THROWS_AS(build_e2e_context(par), InertPrimeError);
  par = E2EParams{};
  const Ring ring = make_ring(-1);
  par.fixed_A = {{make_qi(ring, 1, 0), make_qi(ring, 1, 0)},
                 {make_qi(ring, 1, 0), make_qi(ring, 1, 0)}};
  CHECK_THROWS_AS(build_e2e_context(par), std::invalid_argument);
  par = E2EParams{};
  par.trials = 0;
  CHECK_THROWS_AS(run_e2e(par), std::invalid_argument);
}

TEST_CASE("measured effective noise matches the closed form") {
  const Ring ring = make_ring(-6);
  RngStream rng(61, kTagChannel, 7);
  const auto H = gen_channel(1, 2, rng);
  const ChannelVector ch{H[0], 40.0};
  SearchOptions quiet;
  quiet.warn_on_cap = false;
  const CoeffVector best = best_coefficients(ch, ring, quiet);
  const NoiseStats st = effective_noise_stats(ch, best.a, ring, 20000, 99);
  CHECK(st.trials == 20000);
  CHECK(st.analytic == effective_noise_power(ch, best.a, ring));
  CHECK(st.se > 0.0);
  CHECK(std::abs(st.measured - st.analytic) <= 4.0 * st.se);
  // deterministic under the seed
  const NoiseStats again = effective_noise_stats(ch, best.a, ring, 20000, 99);
  CHECK(again.measured == st.measured);

  // single-user closed form: P / (1 + P)
  const ChannelVector one{{{1.0, 0.0}}, 100.0};
  const NoiseStats u =
      effective_noise_stats(one, {make_qi(make_ring(-1), 1, 0)},
                            make_ring(-1), 20000, 5);
  CHECK(u.analytic == doctest::Approx(100.0 / 101.0).epsilon(1e-12));
  CHECK(std::abs(u.measured - u.analytic) <= 4.0 * u.se);
}

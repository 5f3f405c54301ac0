// Command-line front end: ring/ideal inspection, computation rates, Monte
// Carlo sweeps, end-to-end relay trials, and ball-count bound checks.
//
// Exit codes: 0 success, 1 usage error, 2 degenerate or invalid input.

#include <cctype>
#include <clocale>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "acf/fp.hpp"
#include "acf/ideal.hpp"
#include "acf/lattice.hpp"
#include "acf/rate.hpp"
#include "acf/ring.hpp"
#include "acf/rng.hpp"
#include "acf/sim.hpp"

namespace {

long long parse_ll(const std::string& s) {
  size_t pos = 0;
  const long long v = std::stoll(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("bad integer: " + s);
  return v;
}

double parse_num(const std::string& s) {
  size_t pos = 0;
  const double v = std::stod(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("bad number: " + s);
  return v;
}

std::string strip_ws(const std::string& s) {
  std::string out;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) out += c;
  return out;
}

// Complex literals use a trailing j: "1", "2.449j", "1-0.5j", "-j".
std::complex<double> parse_complex(const std::string& raw) {
  const std::string s = strip_ws(raw);
  if (s.empty()) throw std::invalid_argument("empty complex literal");
  size_t split = std::string::npos;
  for (size_t i = 1; i < s.size(); ++i) {
    const char c = s[i];
    const char prev = s[i - 1];
    if ((c == '+' || c == '-') && prev != 'e' && prev != 'E') split = i;
  }
  const auto imag_of = [](const std::string& b) {
    if (b.empty() || b == "+") return 1.0;
    if (b == "-") return -1.0;
    return parse_num(b);
  };
  if (split != std::string::npos && s.back() == 'j') {
    const double re = parse_num(s.substr(0, split));
    const double im = imag_of(s.substr(split, s.size() - split - 1));
    return {re, im};
  }
  if (s.back() == 'j') return {0.0, imag_of(s.substr(0, s.size() - 1))};
  return {parse_num(s), 0.0};
}

// Ring-integer literals: "3", "1+2*xi", "2-xi", "-xi".
acf::QuadInt parse_quadint(const std::string& raw, long long d) {
  const std::string s = strip_ws(raw);
  const size_t xp = s.find("xi");
  if (xp == std::string::npos) return acf::QuadInt{parse_ll(s), 0, d};
  if (xp + 2 != s.size())
    throw std::invalid_argument("bad ring integer: " + raw);
  std::string head = s.substr(0, xp);
  if (!head.empty() && head.back() == '*') head.pop_back();
  size_t split = std::string::npos;
  for (size_t i = 1; i < head.size(); ++i)
    if (head[i] == '+' || head[i] == '-') split = i;
  std::string astr, bstr;
  if (split == std::string::npos) {
    bstr = head;
  } else {
    astr = head.substr(0, split);
    bstr = head.substr(split);
  }
  const long long a = astr.empty() ? 0 : parse_ll(astr);
  long long b = 1;
  if (bstr == "-")
    b = -1;
  else if (!bstr.empty() && bstr != "+")
    b = parse_ll(bstr);
  return acf::QuadInt{a, b, d};
}

// Either "lo:step:hi" (inclusive) or a comma list.
std::vector<double> parse_grid(const std::string& s) {
  std::vector<double> out;
  if (s.find(':') != std::string::npos) {
    const size_t c1 = s.find(':');
    const size_t c2 = s.find(':', c1 + 1);
    if (c2 == std::string::npos)
      throw std::invalid_argument("range must be lo:step:hi");
    const double lo = parse_num(s.substr(0, c1));
    const double step = parse_num(s.substr(c1 + 1, c2 - c1 - 1));
    const double hi = parse_num(s.substr(c2 + 1));
    if (!(step > 0.0)) throw std::invalid_argument("range step must be positive");
    for (double v = lo; v <= hi + 1e-9; v += step) out.push_back(v);
  } else {
    std::istringstream in(s);
    std::string tok;
    while (std::getline(in, tok, ',')) out.push_back(parse_num(tok));
  }
  if (out.empty()) throw std::invalid_argument("empty grid: " + s);
  return out;
}

std::vector<long long> parse_ring_list(const std::string& s) {
  std::vector<long long> out;
  std::istringstream in(s);
  std::string tok;
  while (std::getline(in, tok, ',')) out.push_back(parse_ll(strip_ws(tok)));
  if (out.empty()) throw std::invalid_argument("empty ring list");
  return out;
}

std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

// Flat "key = value" file; '#' starts a comment. Values for list options are
// comma separated.
std::map<std::string, std::string> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CLI::FileError::Missing(path);
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const size_t eq = line.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = trim(line.substr(0, eq));
    if (!key.empty()) kv[key] = trim(line.substr(eq + 1));
  }
  return kv;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string tok;
  while (std::getline(in, tok, ',')) out.push_back(trim(tok));
  return out;
}

struct ConfKey {
  const char* flag;  // long option name, for "was it given on the line"
  const char* key;   // file key
  std::function<void(const std::string&)> set;
};

// Config values fill in only the options absent from the command line.
void apply_config(const CLI::App* sub, const std::string& path,
                  const std::vector<ConfKey>& keys) {
  if (path.empty()) return;
  const auto kv = read_config(path);
  for (const auto& k : keys) {
    if (sub->count(k.flag) > 0) continue;
    const auto it = kv.find(k.key);
    if (it != kv.end()) k.set(it->second);
  }
}

std::string out_path(const std::string& name) {
  const char* dir = std::getenv("ACF_OUT_DIR");
  std::string base = dir && *dir ? dir : ".";
  if (base.back() != '/') base += '/';
  return base + name;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

int run_ring_info(long long d) {
  const acf::Ring ring = acf::make_ring(d);
  std::printf("d = %lld\n", ring.d);
  std::printf("xi = %s\n", ring.xi_case == acf::XiCase::whole
                               ? "sqrt(d)"
                               : "(1+sqrt(d))/2");
  std::printf("discriminant = %lld\n", ring.discriminant);
  std::string us;
  for (const auto& u : acf::units(ring)) {
    if (!us.empty()) us += ", ";
    us += acf::to_string(ring, u);
  }
  std::printf("units = %s\n", us.c_str());
  std::printf("odd primes below 60:\n");
  for (long long p = 3; p < 60; p += 2) {
    if (!acf::is_prime(p)) continue;
    std::printf("  p = %-3lld %s\n", p,
                acf::to_string(acf::classify_prime(ring, p)));
  }
  return 0;
}

int run_prime_info(long long d, long long p) {
  const acf::Ring ring = acf::make_ring(d);
  const acf::PrimeIdeal ideal = acf::prime_ideal_above(ring, p);
  std::printf("d = %lld\n", d);
  std::printf("discriminant = %lld\n", ring.discriminant);
  std::printf("p = %lld: %s\n", p, acf::to_string(ideal.kind));
  if (ideal.kind == acf::PrimeKind::split) std::printf("a0 = %lld\n", ideal.a0);
  std::printf("ideal = %s\n", acf::generator_string(ideal).c_str());
  std::printf("norm = %lld\n", ideal.norm);
  std::printf("f = %d\n", ideal.f);
  std::printf("sigma(xi) = %lld\n", ideal.xi_residue);
  std::printf("sigma samples:\n");
  const acf::QuadInt samples[] = {
      {1, 0, d}, {0, 1, d}, {2, 3, d}, {-1, 1, d}, {5, -2, d}};
  for (const auto& x : samples)
    std::printf("  sigma(%s) = %lld\n", acf::to_string(ring, x).c_str(),
                acf::sigma(x, ideal).value);
  return 0;
}

int run_rate(long long d, double P, const std::vector<std::string>& hs,
             const std::vector<std::string>& as) {
  const acf::Ring ring = acf::make_ring(d);
  if (hs.size() != as.size() || hs.empty())
    throw std::invalid_argument("need matching nonempty --h and --a lists");
  acf::ChannelVector ch;
  ch.P = P;
  std::vector<acf::QuadInt> a;
  for (const auto& s : hs) ch.h.push_back(parse_complex(s));
  for (const auto& s : as) a.push_back(parse_quadint(s, d));
  const double rate = acf::computation_rate(ch, a, ring);
  std::printf("%.4f\n", rate);
  return 0;
}

int run_sweep(acf::SimConfig cfg, const std::string& csv_name,
              const std::string& json_name) {
  const acf::RateReport rep = acf::rate_sweep(cfg);
  const std::string csv = acf::report_csv(rep);
  const std::string json = acf::report_json(rep);
  const std::string csv_path = out_path(csv_name);
  const std::string json_path = out_path(json_name);
  write_file(csv_path, csv);
  write_file(json_path, json);
  std::fputs(json.c_str(), stdout);
  std::fprintf(stderr, "wrote %s and %s\n", csv_path.c_str(),
               json_path.c_str());
  return 0;
}

int run_e2e(const acf::E2EParams& par, const std::string& log_name) {
  const acf::E2ESummary sum = acf::run_e2e(par, true);
  const std::string log_path = out_path(log_name);
  write_file(log_path, acf::e2e_jsonl(sum));
  std::fputs(acf::e2e_json(sum).c_str(), stdout);
  std::fprintf(stderr, "wrote %s\n", log_path.c_str());
  return 0;
}

int run_lemma_check(long long d, int N, int cases, double rmax,
                    unsigned long long seed) {
  const acf::Ring ring = acf::make_ring(d);
  acf::RngStream rng(seed, 0x77, 0);
  int violations = 0;
  std::printf("%-6s %-10s %-12s %-14s %-14s %s\n", "case", "r", "count",
              "lower", "upper", "ok");
  for (int c = 0; c < cases; ++c) {
    const double r = rmax * rng.uniform_pos();
    std::vector<double> center(static_cast<size_t>(2 * N));
    for (auto& x : center) x = 10.0 * rng.uniform() - 5.0;
    const long long count = acf::count_points_in_ball(ring, N, center, r);
    const acf::BallBounds b = acf::ball_count_bounds(ring, N, r);
    const bool ok = static_cast<double>(count) >= b.lower &&
                    static_cast<double>(count) <= b.upper;
    violations += ok ? 0 : 1;
    std::printf("%-6d %-10.4f %-12lld %-14.4f %-14.4f %s\n", c, r, count,
                b.lower, b.upper, ok ? "yes" : "NO");
  }
  std::printf("violations = %d\n", violations);
  return violations == 0 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  std::setlocale(LC_ALL, "C");
  CLI::App app{"adaptive compute-and-forward over imaginary quadratic rings"};
  // --h is a channel entry on some subcommands, so help has no short flag
  app.set_help_flag("--help", "print help");
  app.require_subcommand(1);
  int rc = 0;
  const auto sub = [&](const char* name, const char* desc) {
    auto* s = app.add_subcommand(name, desc);
    s->set_help_flag("--help", "print help");
    return s;
  };

  // ring-info
  auto* ring_info = sub("ring-info", "describe a ring O_K");
  long long ri_d = -1;
  ring_info->add_option("-d,--ring", ri_d, "squarefree d < 0")->required();
  ring_info->callback([&] { rc = run_ring_info(ri_d); });

  // prime-info
  auto* prime_info =
      sub("prime-info", "classify p and describe the ideal");
  long long pi_d = -1, pi_p = 5;
  prime_info->add_option("-d,--ring", pi_d, "squarefree d < 0")->required();
  prime_info->add_option("-p,--prime", pi_p, "odd prime")->required();
  prime_info->callback([&] { rc = run_prime_info(pi_d, pi_p); });

  // rate
  auto* rate = sub("rate", "computation rate for (h, a, P)");
  long long r_d = -1;
  int r_K = 1;
  double r_P = 1.0;
  std::vector<std::string> r_h, r_a;
  std::string r_conf;
  rate->add_option("-d,--ring", r_d, "squarefree d < 0");
  rate->add_option("-K,--sources", r_K, "number of sources (checked)");
  rate->add_option("-P,--power", r_P, "transmit power (required)");
  rate->add_option("--h", r_h, "channel entries, complex a+bj (required)");
  rate->add_option("--a", r_a, "coefficient entries, ring integers (required)");
  rate->add_option("--config", r_conf,
                   "flat key=value file of defaults; flags override");
  rate->callback([&] {
    bool have_P = rate->count("--power") > 0;
    apply_config(
        rate, r_conf,
        {{"--ring", "ring", [&](const std::string& v) { r_d = parse_ll(v); }},
         {"--sources", "sources",
          [&](const std::string& v) { r_K = static_cast<int>(parse_ll(v)); }},
         {"--power", "power",
          [&](const std::string& v) {
            r_P = parse_num(v);
            have_P = true;
          }},
         {"--h", "h", [&](const std::string& v) { r_h = split_list(v); }},
         {"--a", "a", [&](const std::string& v) { r_a = split_list(v); }}});
    if (!have_P) throw CLI::RequiredError("--power");
    if (r_h.empty()) throw CLI::RequiredError("--h");
    if (r_a.empty()) throw CLI::RequiredError("--a");
    if (r_K != static_cast<int>(r_h.size()))
      throw std::invalid_argument("-K disagrees with the --h list length");
    rc = run_rate(r_d, r_P, r_h, r_a);
  });

  // sweep
  auto* sweep = sub("sweep", "Monte Carlo network-rate sweep");
  std::string sw_mode = "rayleigh", sw_rings = "-1,-2,-3,-5,-6,-7";
  std::string sw_snr = "0:5:30";
  std::string sw_csv = "sweep.csv", sw_json = "sweep.json";
  std::string h11, h12, h21, h22;
  std::string sw_conf;
  acf::SimConfig cfg;
  sweep->add_option("--mode", sw_mode, "fixed or rayleigh");
  sweep->add_option("-K,--sources", cfg.K, "sources (K = M <= 4)");
  sweep->add_option("-M,--relays", cfg.M, "relays");
  sweep->add_option("--rings", sw_rings, "comma list of squarefree d < 0");
  sweep->add_option("--snr", sw_snr, "dB grid, lo:step:hi or comma list");
  sweep->add_option("--trials", cfg.trials, "Rayleigh channel draws");
  sweep->add_option("--seed", cfg.seed, "RNG seed (echoed in the report)");
  sweep->add_option("--cap", cfg.search.coord_cap, "coefficient coordinate cap");
  sweep->add_option("--list", cfg.search.list_size, "candidates per relay");
  sweep->add_flag("--no-adaptive{false}", cfg.adaptive,
                  "skip the adaptive best-ring row");
  sweep->add_option("--h11", h11, "fixed-mode channel entry (complex)");
  sweep->add_option("--h12", h12, "fixed-mode channel entry");
  sweep->add_option("--h21", h21, "fixed-mode channel entry");
  sweep->add_option("--h22", h22, "fixed-mode channel entry");
  sweep->add_option("--csv", sw_csv, "CSV file name under the output dir");
  sweep->add_option("--json", sw_json, "JSON file name under the output dir");
  sweep->add_option("--config", sw_conf,
                    "flat key=value file of defaults; flags override");
  sweep->callback([&] {
    const auto to_bool = [](const std::string& v) {
      if (v == "1" || v == "true") return true;
      if (v == "0" || v == "false") return false;
      throw std::invalid_argument("bad boolean: " + v);
    };
    const auto as_int = [](const std::string& v) {
      return static_cast<int>(parse_ll(v));
    };
    apply_config(
        sweep, sw_conf,
        {{"--mode", "mode", [&](const std::string& v) { sw_mode = v; }},
         {"--sources", "sources",
          [&](const std::string& v) { cfg.K = as_int(v); }},
         {"--relays", "relays",
          [&](const std::string& v) { cfg.M = as_int(v); }},
         {"--rings", "rings", [&](const std::string& v) { sw_rings = v; }},
         {"--snr", "snr", [&](const std::string& v) { sw_snr = v; }},
         {"--trials", "trials",
          [&](const std::string& v) { cfg.trials = as_int(v); }},
         {"--seed", "seed",
          [&](const std::string& v) {
            cfg.seed = static_cast<unsigned long long>(parse_ll(v));
          }},
         {"--cap", "cap",
          [&](const std::string& v) { cfg.search.coord_cap = as_int(v); }},
         {"--list", "list",
          [&](const std::string& v) { cfg.search.list_size = as_int(v); }},
         {"--no-adaptive", "adaptive",
          [&](const std::string& v) { cfg.adaptive = to_bool(v); }},
         {"--h11", "h11", [&](const std::string& v) { h11 = v; }},
         {"--h12", "h12", [&](const std::string& v) { h12 = v; }},
         {"--h21", "h21", [&](const std::string& v) { h21 = v; }},
         {"--h22", "h22", [&](const std::string& v) { h22 = v; }},
         {"--csv", "csv", [&](const std::string& v) { sw_csv = v; }},
         {"--json", "json", [&](const std::string& v) { sw_json = v; }}});
    if (sw_mode == "fixed") {
      cfg.mode = acf::SimMode::fixed_channel;
      if (cfg.K != 2 || cfg.M != 2)
        throw std::invalid_argument("fixed mode takes the 2x2 --hIJ entries");
      if (h11.empty() || h12.empty() || h21.empty() || h22.empty())
        throw std::invalid_argument("fixed mode needs --h11 --h12 --h21 --h22");
      cfg.fixed_H = {{parse_complex(h11), parse_complex(h12)},
                     {parse_complex(h21), parse_complex(h22)}};
    } else if (sw_mode != "rayleigh") {
      throw std::invalid_argument("--mode must be fixed or rayleigh");
    }
    cfg.rings = parse_ring_list(sw_rings);
    cfg.snr_db = parse_grid(sw_snr);
    rc = run_sweep(cfg, sw_csv, sw_json);
  });

  // e2e
  auto* e2e = sub("e2e", "end-to-end relay decoding trials");
  acf::E2EParams par;
  std::string e_log = "e2e.jsonl";
  std::string eh11, eh12, eh21, eh22;
  std::string e_conf;
  e2e->add_option("-d,--ring", par.ring_d, "squarefree d < 0");
  e2e->add_option("-p,--prime", par.p, "split or ramified odd prime");
  e2e->add_option("-N,--blocklength", par.N, "block length (<= 8)");
  e2e->add_option("--mc", par.m_c, "coarse code dimension");
  e2e->add_option("--mf", par.m_f, "fine code dimension");
  e2e->add_option("--snr", par.snr_db, "SNR in dB");
  e2e->add_option("--noise-var", par.noise_var, "receiver noise variance");
  e2e->add_option("--gamma-scale", par.gamma_scale, "shaping scale multiplier");
  e2e->add_option("--trials", par.trials, "decode trials");
  e2e->add_option("--seed", par.seed, "RNG seed (echoed in the summary)");
  e2e->add_option("--code-seed", par.code_seed, "generator-matrix seed");
  e2e->add_option("--h11", eh11, "fixed channel entry (complex)");
  e2e->add_option("--h12", eh12, "fixed channel entry");
  e2e->add_option("--h21", eh21, "fixed channel entry");
  e2e->add_option("--h22", eh22, "fixed channel entry");
  e2e->add_option("--log", e_log, "JSONL file name under the output dir");
  e2e->add_option("--config", e_conf,
                  "flat key=value file of defaults; flags override");
  e2e->callback([&] {
    const auto as_int = [](const std::string& v) {
      return static_cast<int>(parse_ll(v));
    };
    const auto as_seed = [](const std::string& v) {
      return static_cast<unsigned long long>(parse_ll(v));
    };
    apply_config(
        e2e, e_conf,
        {{"--ring", "ring",
          [&](const std::string& v) { par.ring_d = parse_ll(v); }},
         {"--prime", "prime",
          [&](const std::string& v) { par.p = parse_ll(v); }},
         {"--blocklength", "blocklength",
          [&](const std::string& v) { par.N = as_int(v); }},
         {"--mc", "mc", [&](const std::string& v) { par.m_c = as_int(v); }},
         {"--mf", "mf", [&](const std::string& v) { par.m_f = as_int(v); }},
         {"--snr", "snr",
          [&](const std::string& v) { par.snr_db = parse_num(v); }},
         {"--noise-var", "noise-var",
          [&](const std::string& v) { par.noise_var = parse_num(v); }},
         {"--gamma-scale", "gamma-scale",
          [&](const std::string& v) { par.gamma_scale = parse_num(v); }},
         {"--trials", "trials",
          [&](const std::string& v) { par.trials = as_int(v); }},
         {"--seed", "seed",
          [&](const std::string& v) { par.seed = as_seed(v); }},
         {"--code-seed", "code-seed",
          [&](const std::string& v) { par.code_seed = as_seed(v); }},
         {"--h11", "h11", [&](const std::string& v) { eh11 = v; }},
         {"--h12", "h12", [&](const std::string& v) { eh12 = v; }},
         {"--h21", "h21", [&](const std::string& v) { eh21 = v; }},
         {"--h22", "h22", [&](const std::string& v) { eh22 = v; }},
         {"--log", "log", [&](const std::string& v) { e_log = v; }}});
    const bool any =
        !eh11.empty() || !eh12.empty() || !eh21.empty() || !eh22.empty();
    if (any) {
      if (eh11.empty() || eh12.empty() || eh21.empty() || eh22.empty())
        throw std::invalid_argument("fixed channel needs all four --hIJ");
      par.fixed_H = {{parse_complex(eh11), parse_complex(eh12)},
                     {parse_complex(eh21), parse_complex(eh22)}};
    }
    rc = run_e2e(par, e_log);
  });

  // lemma-check
  auto* lemma = sub("lemma-check", "ball-count bounds verification table");
  long long l_d = -1;
  int l_N = 1, l_cases = 100;
  double l_rmax = 10.0;
  unsigned long long l_seed = 12345;
  lemma->add_option("-d,--ring", l_d, "squarefree d < 0");
  lemma->add_option("-N,--dim", l_N, "coordinates (1 or 2)");
  lemma->add_option("--cases", l_cases, "random (center, radius) cases");
  lemma->add_option("--radius", l_rmax, "max radius");
  lemma->add_option("--seed", l_seed, "RNG seed");
  lemma->callback(
      [&] { rc = run_lemma_check(l_d, l_N, l_cases, l_rmax, l_seed); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return rc;
}

// subwalk: command-line front end for the subwalk core library.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "subwalk/bernstein.hpp"
#include "subwalk/config.hpp"
#include "subwalk/error.hpp"
#include "subwalk/estimates.hpp"
#include "subwalk/format.hpp"
#include "subwalk/io.hpp"
#include "subwalk/lattice.hpp"
#include "subwalk/montecarlo.hpp"
#include "subwalk/report.hpp"
#include "subwalk/subordination.hpp"

using namespace subwalk;

namespace {

using Clock = std::chrono::steady_clock;

struct Common {
  std::string phi = "stable:0.5";
  std::string config;
  std::string out;
  int threads = 0;
  int d = 1;
  std::uint64_t seed = 1;
  std::size_t trials = 100000;
  std::size_t terms = std::size_t{1} << 20;
};

// Flat key=value config expanded into --key=value arguments that the command
// line does not already set.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty() || args.empty() || args[0] == "report") return args;
  std::set<std::string> given;
  for (const auto& a : args) {
    if (a.rfind("--", 0) != 0) continue;
    given.insert(a.substr(2, a.find('=') == std::string::npos ? std::string::npos : a.find('=') - 2));
  }
  const KeyValueConfig kv = KeyValueConfig::load(path);
  bool phi_keys = false;
  for (const auto& key : kv.keys()) {
    if (key.rfind("phi.", 0) == 0) {
      phi_keys = true;
      continue;
    }
    if (!given.count(key)) args.push_back("--" + key + "=" + *kv.get(key));
  }
  if (phi_keys && !kv.has("phi") && !given.count("phi")) args.push_back("--phi=" + kv.phi()->label());
  return args;
}

void add_common(CLI::App* sub, Common& c, bool mc) {
  sub->add_option("--phi", c.phi, "Bernstein function, kind:param[,param]")->capture_default_str();
  sub->add_option("--config", c.config, "key=value file; keys mirror flags");
  sub->add_option("--threads", c.threads, "worker threads (0: SUBWALK_THREADS or all cores)");
  if (mc) {
    sub->add_option("--trials", c.trials, "Monte Carlo trials")->capture_default_str();
    sub->add_option("--seed", c.seed, "base seed")->capture_default_str();
    sub->add_option("--terms", c.terms, "subordination weights kept by the sampler")->capture_default_str();
  }
}

Json echo(const CLI::App* sub) {
  Json j = Json::object();
  for (const CLI::Option* opt : sub->get_options()) {
    if (opt->get_lnames().empty() || opt->get_lnames()[0] == "help") continue;
    const auto& res = opt->results();
    const std::string name = opt->get_lnames()[0];
    if (res.size() == 1) {
      j[name] = res[0];
    } else if (res.size() > 1) {
      j[name] = res;
    } else if (!opt->get_default_str().empty()) {
      j[name] = opt->get_default_str();
    }
  }
  return j;
}

Site parse_site(const std::string& text, int d) {
  const auto v = parse_number_list(text);
  if (static_cast<int>(v.size()) != d) {
    fail(ErrorKind::configuration, "site '" + text + "' needs " + std::to_string(d) + " coordinates");
  }
  Site x{};
  for (int i = 0; i < d; ++i) x[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(std::llround(v[static_cast<std::size_t>(i)]));
  return x;
}

SimulationConfig sim_config(const Common& c) {
  SimulationConfig s;
  s.d = c.d;
  s.trials = c.trials;
  s.base_seed = c.seed;
  s.threads = c.threads;
  return s;
}

IncrementSampler make_sampler(const PhiSpec& phi, const Common& c) {
  return build_sampler(weights_quadrature_terms(phi, c.terms), c.seed);
}

void finish(const std::string& command, const CLI::App* sub, const Common& c, Clock::time_point t0,
            const std::vector<std::string>& outputs, std::vector<std::uint64_t> seeds = {}) {
  RunManifest m;
  m.command = command;
  m.config = echo(sub);
  m.seeds = std::move(seeds);
  for (const auto& p : outputs) m.add_output(p);
  m.wall_time = std::chrono::duration<double>(Clock::now() - t0).count();
  m.write(c.out + ".manifest.json");
  for (const auto& p : outputs) std::cout << "wrote " << p << '\n';
}

void write_json(const std::string& path, const Json& j) { write_text_file(path, dump(j)); }

int run(int argc, char** argv) {
  CLI::App app{"subordinate random walks on Z^d: weights, kernels, estimates, Monte Carlo", "subwalk"};
  app.set_version_flag("--version", version_string());
  app.require_subcommand(1);

  Common c;
  const auto t0 = Clock::now();

  // weights
  auto* w_cmd = app.add_subcommand("weights", "subordination weights a_m");
  add_common(w_cmd, c, false);
  double tol = 1e-10;
  std::size_t max_terms = kDefaultMaxTerms;
  std::string w_method = "quadrature";
  w_cmd->add_option("--tol", tol, "tail tolerance")->capture_default_str();
  w_cmd->add_option("--terms", max_terms, "maximum number of terms")->capture_default_str();
  w_cmd->add_option("--method", w_method)->check(CLI::IsMember({"quadrature", "series"}))->capture_default_str();
  w_cmd->add_option("--out", c.out, "output path [weights.csv]");

  // kernel
  auto* k_cmd = app.add_subcommand("kernel", "exact transition kernel");
  add_common(k_cmd, c, false);
  long n = 1;
  double t = 1.0;
  int radius = 256, grid = 0;
  std::string k_method = "spectral";
  k_cmd->add_option("--d", c.d)->capture_default_str();
  k_cmd->add_option("--n", n, "steps (convolution, spectral)")->capture_default_str();
  k_cmd->add_option("--t", t, "time (poissonized)")->capture_default_str();
  k_cmd->add_option("--radius", radius, "reporting box half-width")->capture_default_str();
  k_cmd->add_option("--grid", grid, "periodic cell size (0: 4 * radius)")->capture_default_str();
  k_cmd->add_option("--method", k_method)
      ->check(CLI::IsMember({"convolution", "spectral", "poissonized"}))
      ->capture_default_str();
  k_cmd->add_option("--terms", c.terms, "weights for the convolution route")->capture_default_str();
  k_cmd->add_option("--out", c.out, "output path [kernel.csv]");

  // envelope
  auto* e_cmd = app.add_subcommand("envelope", "two-sided estimate envelope");
  add_common(e_cmd, c, false);
  long xmax = 128;
  e_cmd->add_option("--d", c.d)->capture_default_str();
  e_cmd->add_option("--n", n)->capture_default_str();
  e_cmd->add_option("--xmax", xmax)->capture_default_str();
  e_cmd->add_option("--out", c.out, "output path [envelope.csv]");

  // verify
  auto* v_cmd = app.add_subcommand("verify", "exact kernels against the envelope");
  add_common(v_cmd, c, false);
  long nmax = 128;
  v_cmd->add_option("--d", c.d)->capture_default_str();
  v_cmd->add_option("--nmax", nmax)->capture_default_str();
  v_cmd->add_option("--xmax", xmax)->capture_default_str();
  v_cmd->add_option("--grid", grid, "periodic cell size (0: 4 * xmax)")->capture_default_str();
  v_cmd->add_option("--out", c.out, "output path [report.json]");

  // simulate
  auto* s_cmd = app.add_subcommand("simulate", "empirical distribution of S_n");
  add_common(s_cmd, c, true);
  int box = 64;
  s_cmd->add_option("--d", c.d)->capture_default_str();
  s_cmd->add_option("--n", n)->capture_default_str();
  s_cmd->add_option("--radius", box, "histogram half-width")->capture_default_str();
  s_cmd->add_option("--out", c.out, "output path [simulate.json]");

  // exit-time
  auto* x_cmd = app.add_subcommand("exit-time", "mean exit time from B(0, r)");
  add_common(x_cmd, c, true);
  std::vector<double> radii{8, 16, 32};
  std::string clock = "discrete";
  long step_cap = kDefaultStepCap;
  x_cmd->add_option("--d", c.d)->capture_default_str();
  x_cmd->add_option("--r", radii)->delimiter(',')->capture_default_str();
  x_cmd->add_option("--clock", clock)->check(CLI::IsMember({"discrete", "continuous"}))->capture_default_str();
  x_cmd->add_option("--step-cap", step_cap)->capture_default_str();
  x_cmd->add_option("--out", c.out, "output path [exit_time.json]");

  // hitting
  auto* h_cmd = app.add_subcommand("hitting", "probability of entering B(y, r_n) within n steps");
  add_common(h_cmd, c, true);
  std::string from = "64", to = "0";
  h_cmd->add_option("--d", c.d)->capture_default_str();
  h_cmd->add_option("--x", from, "start, comma-separated")->capture_default_str();
  h_cmd->add_option("--y", to, "target, comma-separated")->capture_default_str();
  h_cmd->add_option("--n", n)->capture_default_str();
  h_cmd->add_option("--out", c.out, "output path [hitting.json]");

  // probe-max
  auto* p_cmd = app.add_subcommand("probe-max", "P(max_k |S_k| >= r/2) over gamma/phi(r^-2) steps");
  add_common(p_cmd, c, true);
  double gamma = 0.0;
  std::vector<double> calib{8, 16, 32};
  p_cmd->add_option("--d", c.d)->capture_default_str();
  p_cmd->add_option("--r", radii)->delimiter(',')->capture_default_str();
  p_cmd->add_option("--gamma", gamma, "0: calibrate on --calibrate-r")->capture_default_str();
  p_cmd->add_option("--calibrate-r", calib)->delimiter(',')->capture_default_str();
  p_cmd->add_option("--out", c.out, "output path [probe_max.json]");

  // harnack
  auto* H_cmd = app.add_subcommand("harnack", "parabolic Harnack ratio of the heat kernel");
  add_common(H_cmd, c, false);
  std::vector<double> big_r{32, 64, 128};
  std::string z = "0";
  double h_gamma = 0.5;
  int h_grid = 16384;
  H_cmd->add_option("--d", c.d)->capture_default_str();
  H_cmd->add_option("--R", big_r)->delimiter(',')->capture_default_str();
  H_cmd->add_option("--gamma", h_gamma)->capture_default_str();
  H_cmd->add_option("--z", z, "cylinder centre, comma-separated")->capture_default_str();
  H_cmd->add_option("--grid", h_grid)->capture_default_str();
  H_cmd->add_option("--out", c.out, "output path [harnack.json]");

  // report
  auto* r_cmd = app.add_subcommand("report", "full acceptance sweep");
  std::string only;
  bool no_rerun = false;
  r_cmd->add_option("--config", c.config, "key=value file with report settings");
  r_cmd->add_option("--threads", c.threads);
  r_cmd->add_option("--only", only, "comma-separated criterion ids");
  r_cmd->add_flag("--no-rerun", no_rerun, "skip the determinism rerun");
  r_cmd->add_option("--out", c.out, "output path [report.json]");

  std::vector<std::string> args(argv + 1, argv + argc);
  args = expand_config(std::move(args));
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << (app.get_subcommands().empty() ? app.help() : app.get_subcommands()[0]->help());
    return 2;
  }

  static const std::map<std::string, std::string> default_out = {
      {"weights", "weights.csv"},     {"kernel", "kernel.csv"},   {"envelope", "envelope.csv"},
      {"verify", "report.json"},      {"simulate", "simulate.json"}, {"exit-time", "exit_time.json"},
      {"hitting", "hitting.json"},    {"probe-max", "probe_max.json"}, {"harnack", "harnack.json"},
      {"report", "report.json"}};
  if (c.out.empty()) c.out = default_out.at(app.get_subcommands()[0]->get_name());

  if (c.threads > 0) setenv("SUBWALK_THREADS", std::to_string(c.threads).c_str(), 1);

  if (*r_cmd) {
    KeyValueConfig kv = c.config.empty() ? KeyValueConfig{} : KeyValueConfig::load(c.config);
    if (c.threads > 0) kv.set("threads", std::to_string(c.threads));
    if (!only.empty()) kv.set("only", only);
    if (no_rerun) kv.set("rerun", "false");
    const ReportConfig cfg = ReportConfig::from(kv);
    const ReportOutcome outcome = run_report(cfg, [](const CriterionResult& r) {
      std::cerr << "criterion " << r.id << ": " << (r.passed ? "pass" : "FAIL") << " (" << r.summary << ")\n";
    });
    write_json(c.out, outcome.json);
    std::cout << summary_table(outcome.results) << "digest " << outcome.digest << '\n';
    RunManifest m;
    m.command = "report";
    m.config = cfg.to_json();
    m.seeds = {cfg.seed};
    m.add_output(c.out);
    m.wall_time = std::chrono::duration<double>(Clock::now() - t0).count();
    m.write(c.out + ".manifest.json");
    int status = 0;
    for (const auto& r : outcome.results) {
      if (r.passed) continue;
      std::cerr << "failed criterion " << r.id << ": " << r.name << '\n';
      status = 1;
    }
    return status;
  }

  const PhiSpec phi = parse_phi(c.phi);

  if (*w_cmd) {
    const SubordinationWeights wts =
        w_method == "series" ? weights_series(phi, max_terms) : weights_quadrature(phi, tol, max_terms);
    write_weights(c.out, wts, phi.label());
    std::cout << "terms " << wts.terms() << ", tail " << format_double(wts.tail_mass) << '\n';
    finish("weights", w_cmd, c, t0, {c.out, c.out + ".json"});
  } else if (*k_cmd) {
    const int cell = grid > 0 ? grid : 4 * radius;
    LatticeKernel k = [&] {
      if (k_method == "spectral") return nstep_kernel_spectral(phi, c.d, static_cast<int>(n), cell, radius);
      if (k_method == "poissonized") return ctrw_kernel(phi, c.d, t, cell, radius);
      const LatticeKernel step = subordinate_step_kernel(c.d, weights_quadrature_terms(phi, c.terms), radius, cell);
      return nstep_kernel_convolve(step, static_cast<int>(n));
    }();
    write_kernel(c.out, k, phi.label());
    std::cout << "mass defect " << format_double(k.mass_defect()) << '\n';
    finish("kernel", k_cmd, c, t0, {c.out, c.out + ".json"});
  } else if (*e_cmd) {
    const EstimateEnvelope env(phi, c.d);
    std::ostringstream csv;
    csv << "r,envelope,j\n";
    for (long r = 0; r <= xmax; ++r) {
      const Site x = make_site({r});
      csv << r << ',' << format_double(env(n, x)) << ',' << (r == 0 ? std::string("") : format_double(env.j(static_cast<double>(r)))) << '\n';
    }
    write_text_file(c.out, csv.str());
    Json side = {{"phi", phi.label()}, {"d", c.d}, {"n", n},
                 {"diagonal", number(env.diagonal(n))}, {"r_n", number(env.r_n(n))},
                 {"crossover_radius", number(env.crossover_radius(n))}};
    write_json(c.out + ".json", side);
    finish("envelope", e_cmd, c, t0, {c.out, c.out + ".json"});
  } else if (*v_cmd) {
    const int cell = grid > 0 ? grid : static_cast<int>(4 * xmax);
    std::vector<LatticeKernel> kernels;
    for (long k = 1; k <= nmax; ++k) {
      kernels.push_back(nstep_kernel_spectral(phi, c.d, static_cast<int>(k), cell, static_cast<int>(xmax)));
    }
    const RatioReport rep = verify_two_sided(kernels, EstimateEnvelope(phi, c.d));
    Json j = to_json(rep);
    j["band"] = number(rep.band());
    write_json(c.out, j);
    std::cout << "ratio_inf " << format_double(rep.ratio_inf) << ", ratio_sup " << format_double(rep.ratio_sup)
              << ", band " << format_double(rep.band()) << '\n';
    finish("verify", v_cmd, c, t0, {c.out});
  } else if (*s_cmd) {
    const SimulationConfig s = sim_config(c);
    const EmpiricalPmf pmf = empirical_pmf(s, make_sampler(phi, c), n, box);
    const Site origin{};
    Json j = {{"config", echo(s_cmd)}, {"phi", phi.label()}, {"d", c.d}, {"n", n}, {"trials", pmf.trials},
              {"outside_box", pmf.outside}, {"p_origin", to_json(wilson_estimate(pmf.count(origin), pmf.trials))}};
    if (c.d == 1 || (c.d == 2 && box <= 256)) {
      const LatticeKernel exact = nstep_kernel_spectral(phi, c.d, static_cast<int>(n), 4 * box, box);
      j["p_origin_exact"] = number(exact(origin));
    }
    Json rows = Json::array();
    for (std::size_t i = 0; i < pmf.counts.size(); ++i) {
      if (pmf.counts[i] == 0) continue;
      Site x{};
      std::size_t rest = i;
      const std::size_t side = 2 * static_cast<std::size_t>(box) + 1;
      for (int a = c.d - 1; a >= 0; --a) {
        x[static_cast<std::size_t>(a)] = static_cast<std::int64_t>(rest % side) - box;
        rest /= side;
      }
      rows.push_back({{"x", site_json(x, c.d)}, {"count", pmf.counts[i]}});
    }
    j["counts"] = rows;
    write_json(c.out, j);
    finish("simulate", s_cmd, c, t0, {c.out}, {c.seed});
  } else if (*x_cmd) {
    SimulationConfig s = sim_config(c);
    s.step_cap = step_cap;
    const IncrementSampler sampler = make_sampler(phi, c);
    Json rows = Json::array();
    for (double r : radii) {
      const ExitTimeReport e =
          estimate_exit_time(s, phi, sampler, r, clock == "continuous" ? ExitClock::continuous : ExitClock::discrete);
      std::cout << "r " << format_double(r) << ": E[tau] " << format_double(e.tau.mean) << ", ratio "
                << format_double(e.ratio) << ", censored " << e.censored << '\n';
      rows.push_back(to_json(e));
    }
    write_json(c.out, {{"config", echo(x_cmd)}, {"phi", phi.label()}, {"results", rows}});
    finish("exit-time", x_cmd, c, t0, {c.out}, {c.seed});
  } else if (*h_cmd) {
    const HittingReport h =
        estimate_hitting(sim_config(c), phi, make_sampler(phi, c), parse_site(from, c.d), parse_site(to, c.d), n);
    std::cout << "probability " << format_double(h.probability.p) << ", bound " << format_double(h.bound)
              << ", ratio " << format_double(h.ratio) << '\n';
    write_json(c.out, {{"config", echo(h_cmd)}, {"phi", phi.label()}, {"result", to_json(h, c.d)}});
    finish("hitting", h_cmd, c, t0, {c.out}, {c.seed});
  } else if (*p_cmd) {
    const SimulationConfig s = sim_config(c);
    const IncrementSampler sampler = make_sampler(phi, c);
    Json j = {{"config", echo(p_cmd)}, {"phi", phi.label()}};
    std::vector<std::uint64_t> seeds{c.seed};
    double g = gamma;
    if (g <= 0.0) {
      const GammaCalibration cal = calibrate_gamma(s, phi, sampler, calib);
      g = cal.gamma;
      j["calibrated_gamma"] = number(g);
    }
    Json rows = Json::array();
    SimulationConfig probe = s;
    if (gamma <= 0.0) {
      probe.base_seed = mix_seed(c.seed, 1);
      seeds.push_back(probe.base_seed);
    }
    for (double r : radii) {
      const MaximalProbe m = maximal_inequality_probe(probe, phi, sampler, r, g);
      std::cout << "r " << format_double(r) << ": P " << format_double(m.probability.p) << " (depth " << m.depth
                << ")\n";
      rows.push_back(to_json(m));
    }
    j["gamma"] = number(g);
    j["results"] = rows;
    write_json(c.out, j);
    finish("probe-max", p_cmd, c, t0, {c.out}, seeds);
  } else if (*H_cmd) {
    const Site centre = parse_site(z, c.d);
    Json rows = Json::array();
    for (double R : big_r) {
      const HarnackWindow w = HarnackWindow::from_profile(phi, h_gamma, R, centre);
      const long n0 = w.horizon(phi) + 1;
      const RatioReport rep = harnack_ratio(phi, c.d, n0, centre, w, kernel_harnack_function(phi, c.d, n0, centre, h_grid));
      std::cout << "R " << format_double(R) << ": C_PH " << format_double(rep.ratio_sup) << '\n';
      Json row = to_json(rep);
      row["R"] = number(R);
      row["n0"] = n0;
      row["B"] = number(w.B);
      row["b"] = w.b;
      rows.push_back(row);
    }
    write_json(c.out, {{"config", echo(H_cmd)}, {"phi", phi.label()}, {"results", rows}});
    finish("harnack", H_cmd, c, t0, {c.out});
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const Error& e) {
    std::cerr << "subwalk: " << to_string(e.kind()) << ": " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "subwalk: " << e.what() << '\n';
    return 2;
  }
}

// fbmcalc command-line front end.
//
// Exit codes: 0 success, 1 verification failure or runtime error, 2 usage error.

#include "fbmcalc/experiments.hpp"
#include "fbmcalc/fbm_integrate.hpp"
#include "fbmcalc/fraccalc.hpp"
#include "fbmcalc/gaussian_paths.hpp"
#include "fbmcalc/io.hpp"
#include "fbmcalc/itocalc.hpp"
#include "fbmcalc/path_stats.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace fbmcalc;

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

/// Input the user can fix: bad flags, config values, files.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Flag name -> config key.  Flags are kept as strings and parsed by RunConfig::set.
const std::vector<std::pair<std::string, std::string>> kConfigFlags{
    {"--hurst", "hurst"},         {"--tmax", "t_max"},           {"--steps", "steps"},
    {"--seed", "seed"},           {"--replicates", "replicates"}, {"--generator", "generator"},
    {"--truncation", "truncation"}, {"--kernel-mesh", "kernel_mesh"}, {"--eps", "eps"},
    {"--tolerance", "tolerance"}, {"--out", "output_dir"},
};

struct ConfigFlags {
  std::string config_file;
  std::map<std::string, std::string> values;  // flag -> raw text
};

void add_config_flags(CLI::App* app, ConfigFlags& flags, const std::vector<std::string>& which) {
  app->add_option("--config", flags.config_file, "Flat key=value config file (flags win)");
  for (const auto& [flag, key] : kConfigFlags) {
    if (std::find(which.begin(), which.end(), key) == which.end()) continue;
    app->add_option(flag, flags.values[flag], "config key " + key);
  }
}

RunConfig resolve_config(CLI::App* app, const ConfigFlags& flags) {
  RunConfig cfg;
  try {
    if (!flags.config_file.empty()) cfg = RunConfig::load(flags.config_file);
    for (const auto& [flag, key] : kConfigFlags) {
      auto it = flags.values.find(flag);
      if (it == flags.values.end() || app->count(flag) == 0) continue;
      cfg.set(key, it->second);
    }
    cfg.validate();
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
  return cfg;
}

Generator pick_generator(const RunConfig& cfg) {
  if (cfg.generator != "auto") return generator_from_string(cfg.generator);
  if (cfg.hurst == 0.5) return Generator::BmIncrements;
  return cfg.steps <= CholeskyOptions{}.max_steps ? Generator::FbmCholesky : Generator::FbmCirculant;
}

SamplePath make_path(const RunConfig& cfg, std::uint64_t stream) {
  const GridSpec grid{cfg.t_max, cfg.steps};
  const RngSeed seed{cfg.seed, stream};
  switch (pick_generator(cfg)) {
    case Generator::BmIncrements:
      if (cfg.hurst != 0.5) throw UsageError("bm-increments requires --hurst 0.5");
      return generate_bm(grid, seed);
    case Generator::FbmCholesky: return generate_fbm_cholesky(grid, cfg.hurst, seed);
    case Generator::FbmMovingAverage:
      return generate_fbm_moving_average(grid, cfg.hurst, seed, cfg.truncation, cfg.kernel_mesh);
    case Generator::FbmCirculant: return generate_fbm_circulant(grid, cfg.hurst, seed);
    default: throw UsageError("generator cannot be used to sample paths");
  }
}

Json manifest_header(const std::string& command, const RunConfig& cfg) {
  Json h;
  h["tool"] = "fbmcalc";
  h["version"] = FBMCALC_VERSION;
  h["command"] = command;
  h["root_seed"] = cfg.seed;
  h["config"] = cfg.to_json();
  return h;
}

SamplePath load_path(const std::string& file) {
  try {
    return read_series_csv(file).to_path();
  } catch (const std::exception& e) {
    throw UsageError(file + ": " + e.what());
  }
}

EpsilonSchedule eps_schedule(const RunConfig& cfg, double h) {
  EpsilonSchedule s;
  for (auto m : cfg.eps_multiples) s.values.push_back(static_cast<double>(m) * h);
  return s;
}

void emit(const Json& record, std::optional<RunDirectory>& dir, const std::string& name, const Json& header) {
  std::cout << record.dump(2) << "\n";
  if (!dir) return;
  dir->write(name, record.dump(2) + "\n");
  dir->write_manifest(header);
}

// generate ---------------------------------------------------------------

int cmd_generate(CLI::App* app, const ConfigFlags& flags) {
  const RunConfig cfg = resolve_config(app, flags);
  RunDirectory dir(cfg.output_dir);
  for (std::uint64_t i = 0; i < cfg.replicates; ++i) {
    const SamplePath p = make_path(cfg, i);
    char name[32];
    std::snprintf(name, sizeof name, "path_%04llu.csv", static_cast<unsigned long long>(i));
    dir.write(name, path_to_csv(p));
  }
  Json header = manifest_header("generate", cfg);
  header["generator"] = to_string(pick_generator(cfg));
  dir.write_manifest(header);
  std::cout << "wrote " << cfg.replicates << " path(s) to " << dir.root().string() << "\n";
  return kOk;
}

// fracint ----------------------------------------------------------------

struct FracintArgs {
  std::string input, side = "left", kind = "integral", out;
  double alpha = 0.5;
  double weight = 0.0;
};

int cmd_fracint(const FracintArgs& a) {
  GridFunction f = [&] {
    try {
      const GridFunction g = read_series_csv(a.input).to_grid_function();
      return a.weight != 0.0 ? GridFunction(g.a(), g.b(), g.values(), a.weight) : g;
    } catch (const std::exception& e) {
      throw UsageError(a.input + ": " + e.what());
    }
  }();
  const Side side = a.side == "right" ? Side::Right : Side::Left;
  GridFunction result = f;
  try {
    if (a.kind == "integral")
      result = fractional_integral(f, a.alpha, side);
    else if (a.kind == "derivative")
      result = fractional_derivative(f, a.alpha, side);
    else
      result = cauchy_repeated_integral(f, static_cast<int>(a.alpha));
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const std::string csv = grid_function_to_csv(result);
  if (a.out.empty()) {
    std::cout << csv;
    return kOk;
  }
  RunDirectory dir(a.out);
  dir.write("result.csv", csv);
  Json header{{"tool", "fbmcalc"}, {"version", FBMCALC_VERSION}, {"command", "fracint"},
              {"input", a.input},  {"kind", a.kind},               {"alpha", a.alpha},
              {"side", a.side},    {"weight", a.weight}};
  dir.write_manifest(header);
  std::cout << "wrote " << (dir.root() / "result.csv").string() << "\n";
  return kOk;
}

// integrands shared by ito and fbm-integrate ------------------------------

AdaptedIntegrand adapted(const std::string& name) {
  if (name == "one") return integrands::constant(1.0);
  if (name == "path") return integrands::path_value();
  if (name == "time") return integrands::deterministic([](double t) { return t; });
  throw UsageError("unknown integrand '" + name + "' (one, path, time)");
}

GridFunction on_grid(const std::string& name, const SamplePath& g) {
  if (name == "one") return GridFunction(0.0, g.t_max(), Eigen::VectorXd::Ones(g.values.size()));
  if (name == "path") return g.as_grid_function();
  if (name == "time") return GridFunction(0.0, g.t_max(), g.times);
  throw UsageError("unknown integrand '" + name + "' (one, path, time)");
}

// ito --------------------------------------------------------------------

int cmd_ito(CLI::App* app, const ConfigFlags& flags, const std::string& input, const std::string& integrand) {
  RunConfig cfg = resolve_config(app, flags);
  const AdaptedIntegrand f = adapted(integrand);
  Json record;
  record["integrand"] = integrand;
  if (!input.empty()) {
    const SamplePath p = load_path(input);
    record["input"] = input;
    record["integral"] = ito_integral(f, p);
    const auto qv = ito_integral_qv(f, p);
    record["quadratic_variation"] = Json{{"qv", qv.qv}, {"int_f2_dt", qv.target}};
  } else {
    if (cfg.hurst != 0.5) throw UsageError("ito integrates against Brownian motion: --hurst must be 0.5");
    const GridSpec grid{cfg.t_max, cfg.steps};
    const auto ens = bm_ensemble(grid, cfg.seed, cfg.replicates);
    const auto values = map_replicates(ens.replicates, [&](std::size_t i) { return ito_integral(f, ens.draw(i)); });
    record["grid"] = to_json(grid);
    record["integral"] = to_json(summarize(values));
    const auto cmp = endpoint_comparison(ens, cfg.t_max);
    record["endpoint_sums_B_dB"] = Json{{"left", to_json(cmp.left)}, {"right", to_json(cmp.right)}, {"wide_ci", cmp.wide_ci}};
    if (cfg.replicates >= 1000) {
      const auto iso = isometry_check(f, ens);
      record["isometry"] = Json{{"lhs", iso.lhs},
                                {"rhs", iso.rhs},
                                {"ci", iso.ci},
                                {"bias_bound", iso.bias_bound},
                                {"agrees", iso.agrees()}};
    }
  }
  std::optional<RunDirectory> dir;
  if (app->count("--out")) dir.emplace(cfg.output_dir);
  emit(record, dir, "ito.json", manifest_header("ito", cfg));
  return kOk;
}

// fbm-integrate ----------------------------------------------------------

int cmd_fbm_integrate(CLI::App* app, const ConfigFlags& flags, const std::string& input, const std::string& integrand,
                      const std::string& type) {
  const RunConfig cfg = resolve_config(app, flags);
  const SamplePath g = input.empty() ? make_path(cfg, 0) : load_path(input);
  if (!g.uniform()) throw UsageError("fbm-integrate needs a path on a uniform grid");
  const GridFunction f = on_grid(integrand, g);
  const EpsilonSchedule eps = eps_schedule(cfg, g.grid.dt());
  const ConvergencePolicy policy{cfg.tolerance};
  IntegralResult r;
  try {
    if (type == "symmetric")
      r = symmetric_integral(f, g, eps, policy);
    else if (type == "forward")
      r = forward_integral(f, g, eps, policy);
    else if (type == "backward")
      r = backward_integral(f, g, eps, policy);
    else if (type == "covariation")
      r = covariation(f, g, eps, policy);
    else if (type == "extended-forward")
      r = extended_forward_integral(f, g);
    else
      r = riemann_stieltjes_integral(f, g);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  Json record;
  record["type"] = type;
  record["integrand"] = integrand;
  record["path"] = Json{{"hurst", g.hurst}, {"steps", g.steps()}, {"t_max", g.t_max()}, {"generator", to_string(g.generator)}};
  record["result"] = to_json(r);
  std::optional<RunDirectory> dir;
  if (app->count("--out")) dir.emplace(cfg.output_dir);
  emit(record, dir, "integral.json", manifest_header("fbm-integrate", cfg));
  return kOk;
}

// stats ------------------------------------------------------------------

struct StatsArgs {
  std::string input, out;
  std::vector<std::string> estimators{"rs", "vi"};
  double p = 2.0;
  int levels = 6;
  int max_lag = 10;
};

int cmd_stats(const StatsArgs& a) {
  const SamplePath p = load_path(a.input);
  Json record;
  record["input"] = a.input;
  record["steps"] = p.steps();
  Json results;
  try {
    for (const auto& e : a.estimators) {
      if (e == "rs") {
        const Eigen::VectorXd inc = p.values.tail(p.steps()) - p.values.head(p.steps());
        results["rs"] = to_json(rescaled_range_hurst(inc));
      } else if (e == "vi") {
        results["vi"] = to_json(variation_index(p));
      } else if (e == "holder") {
        results["holder"] = to_json(holder_exponent(p));
      } else if (e == "qv") {
        results["qv"] = quadratic_variation(p);
      } else if (e == "pvar") {
        results["pvar"] = to_json(p_variation(p, a.p, a.levels));
      } else if (e == "acf") {
        const Eigen::VectorXd acf = empirical_acf(p, a.max_lag);
        results["acf"] = std::vector<double>(acf.data(), acf.data() + acf.size());
      } else {
        throw UsageError("unknown estimator '" + e + "' (rs, vi, holder, qv, pvar, acf)");
      }
    }
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  } catch (const std::domain_error& e) {
    throw UsageError(e.what());
  }
  record["estimates"] = results;
  std::optional<RunDirectory> dir;
  if (!a.out.empty()) dir.emplace(a.out);
  emit(record, dir, "stats.json",
       Json{{"tool", "fbmcalc"}, {"version", FBMCALC_VERSION}, {"command", "stats"}, {"input", a.input}});
  return kOk;
}

// verify -----------------------------------------------------------------

struct VerifyArgs {
  std::string suite = "all", out = "verify-out";
  std::uint64_t seed = 42;
  std::size_t replicates = 0;
  unsigned workers = 0;
};

int cmd_verify(const VerifyArgs& a) {
  std::vector<std::string> ids;
  try {
    ids = parse_suite(a.suite);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  ExperimentOptions opts{a.seed, a.replicates, a.workers};
  RunDirectory dir(a.out);
  std::vector<ExperimentRecord> records;
  bool all_pass = true;
  Json results = Json::array();
  for (const auto& id : ids) {
    ExperimentRecord rec = run_experiment(id, opts);
    std::cout << (rec.verdict == Verdict::Pass ? "PASS " : rec.verdict == Verdict::Fail ? "FAIL " : "ERROR ") << rec.id
              << ": " << rec.title;
    if (!rec.error.empty()) std::cout << " (" << rec.error << ")";
    std::cout << "\n";
    dir.write(rec.id + ".json", rec.to_json().dump(2) + "\n");
    results.push_back(Json{{"id", rec.id}, {"verdict", to_string(rec.verdict)}});
    all_pass = all_pass && rec.verdict == Verdict::Pass;
    records.push_back(std::move(rec));
  }
  dir.write("summary.csv", summary_csv(records));
  Json header;
  header["tool"] = "fbmcalc";
  header["version"] = FBMCALC_VERSION;
  header["command"] = "verify";
  header["root_seed"] = a.seed;
  header["config"] = Json{{"suite", a.suite}, {"replicates", a.replicates}};
  header["results"] = results;
  header["all_pass"] = all_pass;
  dir.write_manifest(header);
  return all_pass ? kOk : kFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fbmcalc: fractional calculus, Brownian and fractional Brownian paths, stochastic integrals"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(FBMCALC_VERSION));

  ConfigFlags gen_flags, ito_flags, fbm_flags;
  auto* gen = app.add_subcommand("generate", "Sample paths to CSV");
  add_config_flags(gen, gen_flags,
                   {"hurst", "t_max", "steps", "seed", "replicates", "generator", "truncation", "kernel_mesh", "output_dir"});

  FracintArgs frac;
  auto* fi = app.add_subcommand("fracint", "Fractional integral or derivative of a t,value CSV");
  fi->add_option("--input", frac.input, "t,value CSV on a uniform grid")->required();
  fi->add_option("--alpha", frac.alpha, "Order (integer m for --kind cauchy)");
  fi->add_option("--side", frac.side, "left or right")->check(CLI::IsMember({"left", "right"}));
  fi->add_option("--kind", frac.kind, "integral, derivative or cauchy")
      ->check(CLI::IsMember({"integral", "derivative", "cauchy"}));
  fi->add_option("--weight", frac.weight, "Left-endpoint exponent beta: f = (t-a)^beta * values");
  fi->add_option("--out", frac.out, "Run directory (default: CSV to stdout)");

  std::string ito_input, ito_integrand = "path";
  auto* ito = app.add_subcommand("ito", "Ito integral of an adapted integrand against Brownian motion");
  add_config_flags(ito, ito_flags, {"hurst", "t_max", "steps", "seed", "replicates", "output_dir"});
  ito->add_option("--input", ito_input, "Integrate along an imported path instead of an ensemble");
  ito->add_option("--integrand", ito_integrand, "one, path or time");

  std::string fbm_input, fbm_integrand = "path", fbm_type = "forward";
  auto* fbm = app.add_subcommand("fbm-integrate", "Pathwise integral against an fBm path");
  add_config_flags(fbm, fbm_flags,
                   {"hurst", "t_max", "steps", "seed", "generator", "truncation", "kernel_mesh", "eps", "tolerance",
                    "output_dir"});
  fbm->add_option("--input", fbm_input, "Integrator path CSV (default: generate one)");
  fbm->add_option("--integrand", fbm_integrand, "one, path or time");
  fbm->add_option("--type", fbm_type, "Integral type")
      ->check(CLI::IsMember({"symmetric", "forward", "backward", "covariation", "extended-forward", "riemann-stieltjes"}));

  StatsArgs stats;
  auto* st = app.add_subcommand("stats", "Path statistics of a t,value CSV");
  st->add_option("--input", stats.input, "Path CSV")->required();
  st->add_option("--estimators", stats.estimators, "rs, vi, holder, qv, pvar, acf")->delimiter(',');
  st->add_option("--p", stats.p, "Exponent for pvar");
  st->add_option("--levels", stats.levels, "Dyadic levels for pvar");
  st->add_option("--max-lag", stats.max_lag, "Largest lag for acf");
  st->add_option("--out", stats.out, "Run directory (default: JSON to stdout only)");

  VerifyArgs verify;
  auto* ver = app.add_subcommand("verify", "Run acceptance experiments E1..E12");
  ver->add_option("--suite", verify.suite, "all or comma-separated ids, e.g. E1,E4");
  ver->add_option("--seed", verify.seed, "Root seed");
  ver->add_option("--replicates", verify.replicates, "Override ensemble sizes (seed sweeps use the smaller)");
  ver->add_option("--workers", verify.workers, "Worker threads (0 = hardware concurrency)");
  ver->add_option("--out", verify.out, "Run directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*gen) return cmd_generate(gen, gen_flags);
    if (*fi) return cmd_fracint(frac);
    if (*ito) return cmd_ito(ito, ito_flags, ito_input, ito_integrand);
    if (*fbm) return cmd_fbm_integrate(fbm, fbm_flags, fbm_input, fbm_integrand, fbm_type);
    if (*st) return cmd_stats(stats);
    if (*ver) return cmd_verify(verify);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kUsage;
}

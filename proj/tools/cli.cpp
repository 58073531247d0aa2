#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "selfnorm/errors.hpp"
#include "selfnorm/experiments.hpp"
#include "selfnorm/fbm.hpp"
#include "selfnorm/normalizer.hpp"
#include "selfnorm/parallel.hpp"
#include "selfnorm/process.hpp"

namespace selfnorm::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string num(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string join(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + num(v[i]);
  return s;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("out", "cannot write '" + path.string() + "'");
  out << text;
}

// Per-experiment defaults; the replicate counts and path lengths are those
// the acceptance runs use.
ExperimentConfig defaults_for(ExperimentKind kind) {
  ExperimentConfig cfg;
  cfg.kind = kind;
  switch (kind) {
    case ExperimentKind::Clt:
      cfg.model = InnovationModel(InnovationKind::StandardGaussian);
      cfg.scheme = CoefficientScheme::power_law(0.75);
      cfg.n_list = {1024, 4096, 16384};
      cfg.replicates = 2000;
      break;
    case ExperimentKind::SelfNorm:
      cfg.model = InnovationModel(InnovationKind::SymmetricPareto2);
      cfg.scheme = CoefficientScheme::farima(0.3);
      cfg.n_list = {1024, 4096, 16384};
      cfg.replicates = 2000;
      break;
    case ExperimentKind::Fdd:
      cfg.model = InnovationModel(InnovationKind::StandardGaussian);
      cfg.scheme = CoefficientScheme::farima(0.25);
      cfg.n_list = {16384};
      cfg.replicates = 4000;
      break;
    case ExperimentKind::UnitRoot:
      // stat_b and stat_c carry an exact offset -1 / (2 n^2 a_n^2); with
      // a_n = n^{-3/4} it is about 13 times smaller than under FARIMA(0.25)
      cfg.model = InnovationModel(InnovationKind::StandardGaussian);
      cfg.scheme = CoefficientScheme::power_law(0.75);
      cfg.n_list = {8192};
      cfg.replicates = 2000;
      break;
    case ExperimentKind::Truncation:
      cfg.model = InnovationModel(InnovationKind::SymmetricPareto2);
      cfg.scheme = CoefficientScheme::farima(0.3);
      cfg.n_list = {1024, 4096, 16384};
      cfg.replicates = 500;
      break;
  }
  return cfg;
}

// Flags shared by the experiment subcommands. Options that were not given
// leave the configuration untouched.
struct ExperimentFlags {
  std::string config;
  std::vector<std::size_t> n;
  std::size_t replicates = 0;
  std::uint64_t seed = 0;
  double alpha = 0.0;
  double d = 0.0;
  std::string model;
  std::string scheme;
  std::string out = ".";
  std::size_t workers = 0;
  double tolerance = 0.0;
  std::vector<double> times;
  std::size_t lag = 0;
  std::map<std::string, CLI::Option*> opts;

  void attach(CLI::App* app) {
    opts["config"] = app->add_option("--config", config,
                                     "key=value config file or a run manifest (JSON)");
    opts["n"] = app->add_option("--n", n, "path length(s)")->delimiter(',');
    opts["replicates"] = app->add_option("--replicates", replicates, "Monte Carlo replicates R");
    opts["seed"] = app->add_option("--seed", seed, "master seed");
    opts["alpha"] = app->add_option("--alpha", alpha, "power-law coefficients a_i = i^-alpha");
    opts["d"] = app->add_option("--d", d, "FARIMA(0, d, 0) coefficients");
    opts["alpha"]->excludes(opts["d"]);
    opts["model"] = app->add_option("--model", model, "rademacher | gaussian | pareto2");
    opts["scheme"] = app->add_option("--scheme", scheme, "farima:<d> | powerlaw:<alpha>[:const|logpower:<p>]");
    opts["out"] = app->add_option("--out", out, "output directory");
    opts["workers"] = app->add_option("--workers", workers, "worker threads (default: all cores)");
    opts["tolerance"] = app->add_option("--tolerance", tolerance, "pass threshold at the largest n");
    opts["times"] = app->add_option("--times", times, "covariance grid in (0, 1]")->delimiter(',');
    opts["lag"] = app->add_option("--lag", lag, "burn-in lag M (default: coefficient-mass policy)");
  }

  bool given(const std::string& key) const { return opts.at(key)->count() > 0; }
};

struct Loaded {
  ExperimentConfig cfg;
  bool tolerance_set = false;
  bool workers_set = false;
};

Loaded load_config(ExperimentKind kind, const ExperimentFlags& f, bool allow_kind_change) {
  Loaded l{defaults_for(kind)};
  if (f.given("config")) {
    const std::string text = read_file(f.config);
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
      json j;
      try {
        j = json::parse(text);
      } catch (const json::exception& e) {
        throw ConfigError("config", std::string("malformed JSON: ") + e.what());
      }
      const json& c = j.contains("config") ? j.at("config") : j;
      l.cfg = config_from_json(c);
      l.tolerance_set = true;
      if (j.contains("workers") && j.at("workers").is_number_unsigned())
        l.cfg.workers = j.at("workers").get<std::size_t>();
    } else {
      std::istringstream lines(text);
      std::string line;
      auto trim = [](std::string v) {
        const auto b = v.find_first_not_of(" \t\r");
        if (b == std::string::npos) return std::string();
        return v.substr(b, v.find_last_not_of(" \t\r") - b + 1);
      };
      while (std::getline(lines, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(line, "expected key=value");
        const std::string key = trim(line.substr(0, eq));
        apply_setting(l.cfg, key, trim(line.substr(eq + 1)));
        if (key == "tolerance") l.tolerance_set = true;
        if (key == "workers") l.workers_set = true;
      }
    }
    if (l.cfg.kind != kind && !allow_kind_change)
      throw ConfigError("experiment", "config describes '" + to_string(l.cfg.kind) +
                                          "' but the subcommand runs '" + to_string(kind) + "'");
  }
  auto& cfg = l.cfg;
  if (f.given("model")) apply_setting(cfg, "model", f.model);
  if (f.given("scheme")) apply_setting(cfg, "scheme", f.scheme);
  if (f.given("alpha")) apply_setting(cfg, "alpha", num(f.alpha));
  if (f.given("d")) apply_setting(cfg, "d", num(f.d));
  if (f.given("n")) apply_setting(cfg, "n", join(f.n));
  if (f.given("replicates")) apply_setting(cfg, "replicates", std::to_string(f.replicates));
  if (f.given("seed")) apply_setting(cfg, "seed", std::to_string(f.seed));
  if (f.given("times")) apply_setting(cfg, "times", join(f.times));
  if (f.given("lag")) apply_setting(cfg, "lag", std::to_string(f.lag));
  if (f.given("tolerance")) {
    apply_setting(cfg, "tolerance", num(f.tolerance));
    l.tolerance_set = true;
  }
  if (f.given("workers")) {
    cfg.workers = f.workers;
    l.workers_set = true;
  }
  if (!l.tolerance_set) cfg.tolerance = default_tolerance(cfg.kind, cfg.replicates);
  if (cfg.workers == 0) cfg.workers = default_workers();
  cfg.validate();
  return l;
}

std::string describe_check(const Check& c) {
  return std::string(c.passed ? "PASS " : "FAIL ") + c.name + " value=" + num(c.value) +
         " threshold=" + num(c.threshold);
}

// Runs one experiment and writes <stem>.json, <stem>.csv and
// <stem>.manifest.json into `out`. Returns true when every check passed.
bool run_and_write(const std::string& command, const ExperimentConfig& cfg,
                   const std::string& out_dir, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  const ExperimentOutput res = run_experiment(cfg);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const fs::path dir(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("out", "cannot create '" + out_dir + "': " + ec.message());
  const std::string stem = output_stem(cfg);
  const fs::path report_path = dir / (stem + ".json");
  const fs::path raw_path = dir / (stem + ".csv");
  const fs::path manifest_path = dir / (stem + ".manifest.json");
  write_file(report_path, format_report_json(res.report));
  write_file(raw_path, format_raw_csv(res.raw));

  json manifest;
  manifest["schema_version"] = 1;
  manifest["library_version"] = SELFNORM_VERSION;
  manifest["command"] = command;
  manifest["config"] = config_to_json(cfg);
  manifest["seed"] = cfg.seed;
  manifest["workers"] = cfg.workers;
  manifest["wall_clock_seconds"] = seconds;
  manifest["outputs"] = {{"report", report_path.string()}, {"raw", raw_path.string()}};
  write_file(manifest_path, manifest.dump(2) + "\n");

  out << to_string(cfg.kind) << ": " << (res.report.passed ? "PASS" : "FAIL") << " ("
      << report_path.string() << ")\n";
  for (const auto& c : res.report.checks) out << "  " << describe_check(c) << "\n";
  return res.report.passed;
}

const char* const kExperimentFooter =
    "Writes <stem>.json (report), <stem>.csv (per-replicate statistics) and\n"
    "<stem>.manifest.json into --out. Raw CSV columns: n, replicate, status\n"
    "(0 ok, 1 degenerate) followed by the experiment's statistics:\n"
    "  verify-clt       S_n_over_B_n\n"
    "  verify-selfnorm  SN_1, lln\n"
    "  verify-fdd       W_<t> for each covariance time\n"
    "  unit-root        stat_a, stat_b, stat_c\n"
    "Re-running with --config <stem>.manifest.json reproduces the report byte for byte.";

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Long-memory linear processes: simulation, normalizers and limit-theorem checks",
               "selfnorm"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "help for every subcommand");

  // simulate
  auto* sim = app.add_subcommand("simulate", "simulate one path; CSV columns k,eps_k,X_k,S_k");
  std::string sim_model = "gaussian", sim_scheme, sim_out;
  double sim_alpha = 0.75, sim_d = 0.0;
  std::size_t sim_n = 1024, sim_lag = 0, sim_replicate = 0;
  std::uint64_t sim_seed = 1;
  sim->add_option("--model", sim_model, "rademacher | gaussian | pareto2");
  auto* sim_alpha_opt = sim->add_option("--alpha", sim_alpha, "power-law exponent");
  auto* sim_d_opt = sim->add_option("--d", sim_d, "FARIMA memory parameter");
  sim_alpha_opt->excludes(sim_d_opt);
  auto* sim_scheme_opt = sim->add_option("--scheme", sim_scheme, "coefficient scheme text");
  sim->add_option("--n", sim_n, "path length");
  sim->add_option("--seed", sim_seed, "master seed");
  sim->add_option("--replicate", sim_replicate, "replicate index of the substream");
  auto* sim_lag_opt = sim->add_option("--lag", sim_lag, "burn-in lag M");
  sim->add_option("--out", sim_out, "CSV file (default: stdout)");

  // normalizer
  auto* nor = app.add_subcommand(
      "normalizer", "print normalizing quantities; CSV columns quantity,index,value");
  std::string nor_model = "gaussian", nor_scheme;
  double nor_alpha = 0.75, nor_d = 0.0;
  std::vector<std::size_t> nor_j, nor_n;
  nor->add_option("--model", nor_model, "rademacher | gaussian | pareto2");
  auto* nor_alpha_opt = nor->add_option("--alpha", nor_alpha, "power-law exponent");
  auto* nor_d_opt = nor->add_option("--d", nor_d, "FARIMA memory parameter");
  nor_alpha_opt->excludes(nor_d_opt);
  auto* nor_scheme_opt = nor->add_option("--scheme", nor_scheme, "coefficient scheme text");
  nor->add_option("--j", nor_j, "indices j for eta_j")->delimiter(',');
  nor->add_option("--n", nor_n, "path lengths n for l_n, B_n^2, D_n^2")->delimiter(',');

  // fbm-sample
  auto* fbm = app.add_subcommand(
      "fbm-sample",
      "sample fractional Brownian motion; CSV columns path,k,t,w or, with --functionals, "
      "path,w1sq,integral,ratio");
  double fbm_h = 0.75;
  std::size_t fbm_m = 1024, fbm_paths = 1;
  std::uint64_t fbm_seed = 1;
  bool fbm_functionals = false;
  std::string fbm_out;
  fbm->add_option("--hurst", fbm_h, "Hurst index H in (0, 1)");
  fbm->add_option("--m", fbm_m, "grid size m");
  fbm->add_option("--paths", fbm_paths, "number of paths");
  fbm->add_option("--seed", fbm_seed, "master seed");
  fbm->add_flag("--functionals", fbm_functionals, "emit W(1)^2, int W^2 and their ratio");
  fbm->add_option("--out", fbm_out, "CSV file (default: stdout)");

  struct ExpCommand {
    const char* name;
    ExperimentKind kind;
    const char* help;
    ExperimentFlags flags;
    CLI::App* app = nullptr;
  };
  std::vector<ExpCommand> commands;
  commands.push_back({"verify-clt", ExperimentKind::Clt,
                      "KS distance of S_n / B_n to N(0, 1) across n", {}});
  commands.push_back({"verify-selfnorm", ExperimentKind::SelfNorm,
                      "KS distance of the self-normalized sum to N(0, c_alpha / A^2) and the "
                      "LLN statistic",
                      {}});
  commands.push_back({"verify-fdd", ExperimentKind::Fdd,
                      "covariance of W_n on a time grid against the fBm kernel", {}});
  commands.push_back({"unit-root", ExperimentKind::UnitRoot,
                      "unit-root statistics against fBm functional references", {}});
  for (auto& c : commands) {
    c.app = app.add_subcommand(c.name, c.help);
    c.flags.attach(c.app);
    c.app->footer(kExperimentFooter);
  }
  auto* all = app.add_subcommand(
      "all", "run verify-clt, verify-selfnorm, verify-fdd, unit-root and the truncation check; "
      "with --config, run only the experiment the config or manifest names");
  ExperimentFlags all_flags;
  all_flags.attach(all);
  all->footer(kExperimentFooter);

  std::vector<std::string> rest(args.begin() + (args.empty() ? 0 : 1), args.end());
  std::reverse(rest.begin(), rest.end());
  try {
    app.parse(rest);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  auto scheme_from = [](CLI::Option* scheme_opt, const std::string& scheme, CLI::Option* d_opt,
                        double d, CLI::Option* alpha_opt, double alpha) {
    if (scheme_opt->count()) return CoefficientScheme::parse(scheme);
    if (d_opt->count()) return CoefficientScheme::farima(d);
    if (alpha_opt->count()) return CoefficientScheme::power_law(alpha);
    return CoefficientScheme::power_law(0.75);
  };

  try {
    if (sim->parsed()) {
      ExperimentConfig cfg;
      apply_setting(cfg, "model", sim_model);
      if (sim_scheme_opt->count()) apply_setting(cfg, "scheme", sim_scheme);
      else if (sim_d_opt->count()) apply_setting(cfg, "d", num(sim_d));
      else if (sim_alpha_opt->count()) apply_setting(cfg, "alpha", num(sim_alpha));
      if (sim_n < 1) throw ConfigError("n", "must be >= 1");
      std::optional<std::size_t> lag;
      if (sim_lag_opt->count()) {
        if (sim_lag < sim_n) throw ConfigError("lag", "burn-in must be >= n");
        lag = sim_lag;
      }
      const PathSimulator simulator(cfg.model, cfg.scheme, sim_n, lag);
      RandomStream stream(sim_seed, {static_cast<std::uint64_t>(StreamTag::Path), sim_n,
                                     sim_replicate});
      const SamplePath p = simulator.simulate(stream);
      std::string csv = "k,eps_k,X_k,S_k\n";
      for (std::size_t k = 1; k <= p.n; ++k)
        csv += std::to_string(k) + "," + num(p.eps_at(static_cast<std::ptrdiff_t>(k))) + "," +
               num(p.x[k - 1]) + "," + num(p.s[k]) + "\n";
      if (sim_out.empty()) out << csv;
      else write_file(sim_out, csv);
      return 0;
    }

    if (nor->parsed()) {
      const InnovationModel model = InnovationModel::from_name(nor_model);
      const CoefficientScheme scheme =
          scheme_from(nor_scheme_opt, nor_scheme, nor_d_opt, nor_d, nor_alpha_opt, nor_alpha);
      const NormalizerTable table(model, scheme, nor_n);
      out << "quantity,index,value\n";
      out << "c_alpha,0," << num(table.c_alpha()) << "\n";
      out << "A_sq,0," << num(table.a_sq()) << "\n";
      for (std::size_t j : nor_j) out << "eta," << j << "," << num(table.eta(j)) << "\n";
      for (std::size_t n : nor_n) {
        out << "l_n," << n << "," << num(table.l_n(n)) << "\n";
        out << "B_sq," << n << "," << num(table.B_sq(n)) << "\n";
        out << "D_sq," << n << "," << num(table.D_sq(n)) << "\n";
      }
      return 0;
    }

    if (fbm->parsed()) {
      const FbmSpec spec(fbm_h, fbm_m);
      const FbmSampler sampler(spec);
      std::string csv = fbm_functionals ? "path,w1sq,integral,ratio\n" : "path,k,t,w\n";
      for (std::size_t r = 0; r < fbm_paths; ++r) {
        RandomStream stream(fbm_seed, {static_cast<std::uint64_t>(StreamTag::Fbm), 0, r});
        const FbmPath p = sampler.sample(stream);
        if (fbm_functionals) {
          const FbmFunctionals f = functionals_fbm(p);
          csv += std::to_string(r) + "," + num(f.w1sq) + "," + num(f.integral) + "," +
                 num(f.ratio) + "\n";
        } else {
          for (std::size_t k = 0; k <= spec.m; ++k)
            csv += std::to_string(r) + "," + std::to_string(k) + "," +
                   num(static_cast<double>(k) / static_cast<double>(spec.m)) + "," +
                   num(p.w[k]) + "\n";
        }
      }
      if (fbm_out.empty()) out << csv;
      else write_file(fbm_out, csv);
      return 0;
    }

    for (auto& c : commands) {
      if (!c.app->parsed()) continue;
      const Loaded l = load_config(c.kind, c.flags, false);
      return run_and_write(c.name, l.cfg, c.flags.out, out) ? 0 : 1;
    }

    if (all->parsed()) {
      if (all_flags.given("config")) {
        // rerun the single experiment a config or manifest describes
        const Loaded l = load_config(ExperimentKind::Clt, all_flags, true);
        return run_and_write("all", l.cfg, all_flags.out, out) ? 0 : 1;
      }
      bool ok = true;
      for (ExperimentKind kind : {ExperimentKind::Clt, ExperimentKind::SelfNorm,
                                  ExperimentKind::Fdd, ExperimentKind::UnitRoot,
                                  ExperimentKind::Truncation}) {
        const Loaded l = load_config(kind, all_flags, false);
        ok = run_and_write("all", l.cfg, all_flags.out, out) && ok;
      }
      return ok ? 0 : 1;
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  err << "error: no subcommand\n";
  return 2;
}

}  // namespace selfnorm::cli

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "selfnorm/errors.hpp"
#include "selfnorm/experiments.hpp"

namespace selfnorm {
namespace {

using nlohmann::json;

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

template <class T>
T parse_number(std::string_view field, std::string_view text) {
  text = trim(text);
  T v{};
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end || text.empty())
    throw ConfigError(std::string(field), "cannot parse '" + std::string(text) + "'");
  return v;
}

template <class T>
std::vector<T> parse_list(std::string_view field, std::string_view text) {
  std::vector<T> out;
  for (auto part : split(text, ',')) out.push_back(parse_number<T>(field, part));
  return out;
}

SlowVary parse_slow(std::string_view text) {
  const auto parts = split(text, ':');
  if (parts.size() == 2) {
    const double p = parse_number<double>("L", parts[1]);
    if (parts[0] == "const") return SlowVary::constant(p);
    if (parts[0] == "logpower") return SlowVary::log_power(p);
  }
  throw ConfigError("L", "expected const:<c> or logpower:<p>, got '" + std::string(text) + "'");
}

template <class F>
auto rethrow_as_config(std::string_view field, F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string(field), e.what());
  }
}

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> get_opt(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

// shortest text that parses back to the same double
std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Clt: return "clt";
    case ExperimentKind::SelfNorm: return "selfnorm";
    case ExperimentKind::Fdd: return "fdd";
    case ExperimentKind::UnitRoot: return "unitroot";
    case ExperimentKind::Truncation: return "truncation";
  }
  return "unknown";
}

ExperimentKind experiment_from_name(std::string_view name) {
  if (name == "clt" || name == "verify-clt") return ExperimentKind::Clt;
  if (name == "selfnorm" || name == "verify-selfnorm") return ExperimentKind::SelfNorm;
  if (name == "fdd" || name == "verify-fdd") return ExperimentKind::Fdd;
  if (name == "unitroot" || name == "unit-root") return ExperimentKind::UnitRoot;
  if (name == "truncation") return ExperimentKind::Truncation;
  throw ConfigError("experiment", "unknown experiment '" + std::string(name) + "'");
}

void ExperimentConfig::validate() const {
  if (n_list.empty()) throw ConfigError("n", "at least one path length is required");
  for (std::size_t n : n_list)
    if (n < 2) throw ConfigError("n", "every n must be >= 2, got " + std::to_string(n));
  if (replicates < 2) throw ConfigError("replicates", "must be >= 2");
  if (times.empty()) throw ConfigError("times", "at least one time is required");
  for (double t : times)
    if (!(t > 0.0 && t <= 1.0)) throw ConfigError("times", "every time must lie in (0, 1]");
  if (!(tolerance > 0.0)) throw ConfigError("tolerance", "must be positive");
  if (!(lln_tolerance > 0.0)) throw ConfigError("lln_tolerance", "must be positive");
  if (reference_multiple < 1) throw ConfigError("reference_multiple", "must be >= 1");
  if (fbm_grid < 2) throw ConfigError("fbm_grid", "must be >= 2");
  if (lag) {
    for (std::size_t n : n_list)
      if (*lag < n) throw ConfigError("lag", "burn-in must be >= every n");
  }
}

double default_tolerance(ExperimentKind kind, std::size_t replicates) {
  double base = 0.08;
  std::size_t reference = 2000;
  switch (kind) {
    case ExperimentKind::Clt: base = 0.05; break;
    case ExperimentKind::SelfNorm: base = 0.08; break;
    case ExperimentKind::Fdd: base = 0.08; reference = 4000; break;
    case ExperimentKind::UnitRoot: base = 0.08; break;
    case ExperimentKind::Truncation: break;  // not consulted by the truncation check
  }
  if (replicates >= reference || replicates == 0) return base;
  return base * std::sqrt(static_cast<double>(reference) / static_cast<double>(replicates));
}

void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  const std::string field(key);
  if (key == "experiment") {
    cfg.kind = experiment_from_name(value);
  } else if (key == "model") {
    cfg.model = rethrow_as_config(key, [&] { return InnovationModel::from_name(value); });
  } else if (key == "scheme") {
    cfg.scheme = rethrow_as_config(key, [&] { return CoefficientScheme::parse(value); });
  } else if (key == "kind") {
    if (value == "farima") {
      const double d = cfg.scheme.kind() == CoefficientScheme::Kind::Farima ? cfg.scheme.d() : 0.25;
      cfg.scheme = CoefficientScheme::farima(d);
    } else if (value == "powerlaw") {
      const double a =
          cfg.scheme.kind() == CoefficientScheme::Kind::PowerLaw ? cfg.scheme.alpha() : 0.75;
      cfg.scheme = CoefficientScheme::power_law(a);
    } else {
      throw ConfigError(field, "expected farima or powerlaw, got '" + std::string(value) + "'");
    }
  } else if (key == "d") {
    const double d = parse_number<double>(key, value);
    cfg.scheme = rethrow_as_config(key, [&] { return CoefficientScheme::farima(d); });
  } else if (key == "alpha") {
    const double a = parse_number<double>(key, value);
    const SlowVary slow = cfg.scheme.kind() == CoefficientScheme::Kind::PowerLaw
                              ? cfg.scheme.slow()
                              : SlowVary::constant(1.0);
    cfg.scheme = rethrow_as_config(key, [&] { return CoefficientScheme::power_law(a, slow); });
  } else if (key == "L") {
    const SlowVary slow = parse_slow(value);
    const double a =
        cfg.scheme.kind() == CoefficientScheme::Kind::PowerLaw ? cfg.scheme.alpha() : 0.75;
    cfg.scheme = rethrow_as_config(key, [&] { return CoefficientScheme::power_law(a, slow); });
  } else if (key == "n") {
    cfg.n_list = parse_list<std::size_t>(key, value);
  } else if (key == "replicates") {
    cfg.replicates = parse_number<std::size_t>(key, value);
  } else if (key == "seed") {
    cfg.seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "times") {
    cfg.times = parse_list<double>(key, value);
  } else if (key == "tolerance") {
    cfg.tolerance = parse_number<double>(key, value);
  } else if (key == "lln_tolerance") {
    cfg.lln_tolerance = parse_number<double>(key, value);
  } else if (key == "reference_multiple") {
    cfg.reference_multiple = parse_number<std::size_t>(key, value);
  } else if (key == "fbm_grid") {
    cfg.fbm_grid = parse_number<std::size_t>(key, value);
  } else if (key == "lag") {
    if (value == "auto" || value.empty()) cfg.lag.reset();
    else cfg.lag = parse_number<std::size_t>(key, value);
  } else if (key == "workers") {
    cfg.workers = parse_number<std::size_t>(key, value);
  } else {
    throw ConfigError(field, "unknown key");
  }
}

json config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["experiment"] = to_string(cfg.kind);
  j["model"] = cfg.model.name();
  j["scheme"] = cfg.scheme.describe();
  j["n"] = cfg.n_list;
  j["replicates"] = cfg.replicates;
  j["times"] = cfg.times;
  j["seed"] = cfg.seed;
  j["tolerance"] = cfg.tolerance;
  j["lln_tolerance"] = cfg.lln_tolerance;
  j["reference_multiple"] = cfg.reference_multiple;
  j["fbm_grid"] = cfg.fbm_grid;
  j["lag"] = cfg.lag ? json(*cfg.lag) : json(nullptr);
  return j;
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig cfg;
  auto field = [&](const char* key) -> const json& {
    if (!j.contains(key)) throw ConfigError(key, "missing from manifest");
    return j.at(key);
  };
  try {
    cfg.kind = experiment_from_name(field("experiment").get<std::string>());
    cfg.model = rethrow_as_config("model", [&] {
      return InnovationModel::from_name(field("model").get<std::string>());
    });
    cfg.scheme = rethrow_as_config("scheme", [&] {
      return CoefficientScheme::parse(field("scheme").get<std::string>());
    });
    cfg.n_list = field("n").get<std::vector<std::size_t>>();
    cfg.replicates = field("replicates").get<std::size_t>();
    cfg.times = field("times").get<std::vector<double>>();
    cfg.seed = field("seed").get<std::uint64_t>();
    cfg.tolerance = field("tolerance").get<double>();
    cfg.lln_tolerance = field("lln_tolerance").get<double>();
    cfg.reference_multiple = field("reference_multiple").get<std::size_t>();
    cfg.fbm_grid = field("fbm_grid").get<std::size_t>();
    const json& lag = field("lag");
    if (lag.is_null()) cfg.lag.reset();
    else cfg.lag = lag.get<std::size_t>();
  } catch (const json::exception& e) {
    throw ConfigError("manifest", e.what());
  }
  return cfg;
}

json report_to_json(const ConvergenceReport& r) {
  json j;
  j["schema_version"] = r.schema_version;
  j["experiment"] = r.experiment;
  j["config"] = r.config;
  j["a_sq"] = r.a_sq;
  j["c_alpha"] = r.c_alpha;
  j["hurst"] = r.hurst;
  j["limit_variance"] = r.limit_variance;
  j["noise_floor"] = r.noise_floor;
  j["results"] = json::array();
  for (const auto& n : r.results) {
    json e;
    e["n"] = n.n;
    e["lag"] = n.lag;
    e["completed"] = n.completed;
    e["failed"] = n.failed;
    e["B_n"] = n.B_n;
    e["l_n"] = n.l_n;
    e["ks"] = opt(n.ks);
    e["second_moment"] = opt(n.second_moment);
    e["lln_median"] = opt(n.lln_median);
    e["lln_mean"] = opt(n.lln_mean);
    e["max_cov_error"] = opt(n.max_cov_error);
    e["covariance"] = n.covariance;
    e["kernel"] = n.kernel;
    e["ks_a"] = opt(n.ks_a);
    e["ks_b"] = opt(n.ks_b);
    e["ks_c"] = opt(n.ks_c);
    e["truncation_mean"] = opt(n.truncation_mean);
    e["truncation_stderr"] = opt(n.truncation_stderr);
    j["results"].push_back(std::move(e));
  }
  j["checks"] = json::array();
  for (const auto& c : r.checks)
    j["checks"].push_back(
        {{"name", c.name}, {"value", c.value}, {"threshold", c.threshold}, {"passed", c.passed}});
  j["passed"] = r.passed;
  j["note"] = r.note;
  return j;
}

ConvergenceReport report_from_json(const json& j) {
  ConvergenceReport r;
  r.schema_version = j.at("schema_version").get<int>();
  if (r.schema_version != ConvergenceReport::kSchemaVersion)
    throw ConfigError("schema_version", "unsupported report schema " +
                                            std::to_string(r.schema_version));
  r.experiment = j.at("experiment").get<std::string>();
  r.config = j.at("config");
  r.a_sq = j.at("a_sq").get<double>();
  r.c_alpha = j.at("c_alpha").get<double>();
  r.hurst = j.at("hurst").get<double>();
  r.limit_variance = j.at("limit_variance").get<double>();
  r.noise_floor = j.at("noise_floor").get<double>();
  for (const auto& e : j.at("results")) {
    NResult n;
    n.n = e.at("n").get<std::size_t>();
    n.lag = e.at("lag").get<std::size_t>();
    n.completed = e.at("completed").get<std::size_t>();
    n.failed = e.at("failed").get<std::size_t>();
    n.B_n = e.at("B_n").get<double>();
    n.l_n = e.at("l_n").get<double>();
    n.ks = get_opt(e, "ks");
    n.second_moment = get_opt(e, "second_moment");
    n.lln_median = get_opt(e, "lln_median");
    n.lln_mean = get_opt(e, "lln_mean");
    n.max_cov_error = get_opt(e, "max_cov_error");
    n.covariance = e.at("covariance").get<std::vector<std::vector<double>>>();
    n.kernel = e.at("kernel").get<std::vector<std::vector<double>>>();
    n.ks_a = get_opt(e, "ks_a");
    n.ks_b = get_opt(e, "ks_b");
    n.ks_c = get_opt(e, "ks_c");
    n.truncation_mean = get_opt(e, "truncation_mean");
    n.truncation_stderr = get_opt(e, "truncation_stderr");
    r.results.push_back(std::move(n));
  }
  for (const auto& c : j.at("checks"))
    r.checks.push_back({c.at("name").get<std::string>(), c.at("value").get<double>(),
                        c.at("threshold").get<double>(), c.at("passed").get<bool>()});
  r.passed = j.at("passed").get<bool>();
  r.note = j.at("note").get<std::string>();
  return r;
}

std::string output_stem(const ExperimentConfig& cfg) {
  std::string ns;
  for (std::size_t i = 0; i < cfg.n_list.size(); ++i)
    ns += (i ? "-" : "") + std::to_string(cfg.n_list[i]);
  std::string stem = to_string(cfg.kind) + "_" + cfg.model.name() + "_" +
                     cfg.scheme.describe() + "_n" + ns + "_R" + std::to_string(cfg.replicates) +
                     "_seed" + std::to_string(cfg.seed);
  for (char& c : stem)
    if (c == ':' || c == '/' || c == '@') c = '-';
  return stem;
}

std::string format_raw_csv(const RawTable& raw) {
  std::string out;
  for (std::size_t i = 0; i < raw.columns.size(); ++i) out += (i ? "," : "") + raw.columns[i];
  out += '\n';
  for (const auto& row : raw.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + num(row[i]);
    out += '\n';
  }
  return out;
}

std::string format_report_json(const ConvergenceReport& report) {
  return report_to_json(report).dump(2) + "\n";
}

}  // namespace selfnorm

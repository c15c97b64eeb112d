#include "mallows/experiment.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "mallows/errors.hpp"
#include "mallows/limit_theory.hpp"
#include "mallows/parallel.hpp"
#include "mallows/pattern_count.hpp"
#include "mallows/samplers.hpp"
#include "mallows/stats.hpp"

namespace mallows {

double QRule::at(double n) const {
  if (type == "fixed") return value;
  if (type == "power") return 1.0 - c * std::pow(n, -x);
  throw ConfigError("unknown q_rule.type '" + type + "'");
}

double ExperimentConfig::threshold(const std::string& name, double fallback) const {
  auto it = thresholds.find(name);
  return it == thresholds.end() ? fallback : it->second;
}

bool ExperimentReport::all_pass() const {
  for (const auto& r : rows)
    if (!r.pass) return false;
  return true;
}

Table ExperimentReport::table() const {
  Table t{{"name", "estimate", "se", "target", "pass"}, {}};
  for (const auto& r : rows) t.rows.push_back({r.name, r.estimate, r.se, r.target, r.pass});
  return t;
}

void emit_report(const ExperimentReport& report, Format format, std::ostream& out) {
  if (format == Format::Csv) {
    emit_series(report.table(), format, out);
    return;
  }
  out << "{\"config\": {";
  bool first = true;
  for (const auto& [k, v] : report.config) {
    out << (first ? "" : ", ") << nlohmann::json(k).dump() << ": " << nlohmann::json(v).dump();
    first = false;
  }
  out << "},\n\"rows\": ";
  emit_series(report.table(), format, out);
  out << "}\n";
}

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': expected a number, got '" + v + "'");
  }
}

std::int64_t to_int(const std::string& key, const std::string& v) {
  double x = to_double(key, v);
  if (x != std::floor(x) || x < 0) throw ConfigError("key '" + key + "': expected a nonnegative integer");
  return static_cast<std::int64_t>(x);
}

}  // namespace

ExperimentConfig parse_experiment_config(std::istream& in) {
  ExperimentConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    cfg.raw[key] = val;
    if (key == "regime") {
      cfg.regime = val;
    } else if (key == "pattern") {
      try {
        cfg.pattern = Permutation::parse(val);
      } catch (const Error& e) {
        throw ConfigError(std::string("pattern: ") + e.what());
      }
    } else if (key == "n_grid") {
      cfg.n_grid.clear();
      std::stringstream ss(val);
      std::string tok;
      while (std::getline(ss, tok, ',')) cfg.n_grid.push_back(static_cast<int>(to_int(key, trim(tok))));
    } else if (key == "q_rule.type" || key == "q_rule") {
      cfg.q_rule.type = val;
    } else if (key == "q_rule.value" || key == "q") {
      cfg.q_rule.value = to_double(key, val);
    } else if (key == "q_rule.c") {
      cfg.q_rule.c = to_double(key, val);
    } else if (key == "q_rule.x") {
      cfg.q_rule.x = to_double(key, val);
    } else if (key == "replicates") {
      cfg.replicates = to_int(key, val);
    } else if (key == "blocks") {
      cfg.blocks = to_int(key, val);
    } else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(to_int(key, val));
    } else if (key.rfind("thresholds.", 0) == 0) {
      cfg.thresholds[key.substr(11)] = to_double(key, val);
    } else {
      throw ConfigError("unknown key '" + key + "'");
    }
  }
  static const std::vector<std::string> regimes{"almost-uniform", "transition", "regenerative", "identity-pattern", "renewal"};
  if (std::find(regimes.begin(), regimes.end(), cfg.regime) == regimes.end())
    throw ConfigError("regime must be one of almost-uniform, transition, regenerative, identity-pattern, renewal");
  if (cfg.n_grid.empty()) throw ConfigError("n_grid is required");
  for (int n : cfg.n_grid)
    if (n < 1) throw ConfigError("n_grid entries must be positive");
  if (cfg.q_rule.type != "fixed" && cfg.q_rule.type != "power") throw ConfigError("q_rule.type must be fixed or power");
  for (int n : cfg.n_grid) {
    const double q = cfg.q_rule.at(n);
    if (!(q > 0 && q <= 1)) throw ConfigError("q rule yields q=" + std::to_string(q) + " outside (0,1] at n=" + std::to_string(n));
  }
  if (cfg.replicates < 2) throw ConfigError("replicates must be at least 2");
  return cfg;
}

namespace {

constexpr std::uint64_t kGridStride = 1ULL << 32;
constexpr std::uint64_t kSecondArm = 1ULL << 48;

std::string at_n(const std::string& name, int n) { return name + "[n=" + std::to_string(n) + "]"; }

double occ_double(const Permutation& pi, const Permutation& tau) { return occ(pi, tau).convert_to<double>(); }

bool fast_countable(const Permutation& pi) {
  return pi.size() <= 3 || pi.is_identity() || reverse(pi).is_identity();
}

void add_clt_rows(ExperimentReport& rep, const ExperimentConfig& cfg, const std::string& tag, const std::vector<double>& z) {
  auto d = clt_diagnostics(z);
  const double N = static_cast<double>(z.size());
  rep.rows.push_back({tag + ".skewness", d.skewness, std::sqrt(6 / N), 0, std::abs(d.skewness) < cfg.threshold("skewness", 0.1)});
  rep.rows.push_back({tag + ".excess_kurtosis", d.excess_kurtosis, std::sqrt(24 / N), 0,
                      std::abs(d.excess_kurtosis) < cfg.threshold("excess_kurtosis", 0.2)});
  rep.rows.push_back({tag + ".ks", d.ks, 0, 0, d.ks < cfg.threshold("ks_scale", 1.5) / std::sqrt(N)});
}

void almost_uniform(const ExperimentConfig& cfg, ExperimentReport& rep) {
  for (std::size_t g = 0; g < cfg.n_grid.size(); ++g) {
    const int n = cfg.n_grid[g];
    const double q = cfg.q_rule.at(n);
    if (!fast_countable(cfg.pattern) && n > 3000) throw ConfigError("general patterns are limited to n <= 3000");
    auto stats = [&](bool uniform) {
      return parallel_map(static_cast<std::size_t>(cfg.replicates), [&](std::size_t i) {
        RngStream rng(cfg.seed, g * kGridStride + i + (uniform ? kSecondArm : 0));
        Permutation tau = uniform ? sample_uniform(n, rng) : sample_mallows({n, q}, Side::Left, rng);
        return std::pair<double, double>{static_cast<double>(inversion_number(tau)), occ_double(cfg.pattern, tau)};
      });
    };
    auto a = stats(false), b = stats(true);
    std::vector<double> ai, bi, ao, bo;
    for (auto& [x, y] : a) ai.push_back(x), ao.push_back(y);
    for (auto& [x, y] : b) bi.push_back(x), bo.push_back(y);
    const double tol = cfg.threshold("ks", 0.02);
    const double ks_inv = ks_two_sample(standardize(ai), standardize(bi));
    const double ks_occ = ks_two_sample(standardize(ao), standardize(bo));
    rep.rows.push_back({at_n("n^1.5(1-q)", n), std::pow(n, 1.5) * (1 - q), 0, 0, true});
    rep.rows.push_back({at_n("ks_inv", n), ks_inv, 0, 0, ks_inv < tol});
    rep.rows.push_back({at_n("ks_occ_" + cfg.pattern.to_string(), n), ks_occ, 0, 0, ks_occ < tol});
  }
}

void transition(const ExperimentConfig& cfg, ExperimentReport& rep) {
  const int r = cfg.pattern.size();
  const int d = static_cast<int>(block_decomposition(cfg.pattern).blocks.size());
  const double x = cfg.q_rule.type == "power" ? cfg.q_rule.x : 0.0;
  std::vector<double> lx, ly, lse;
  for (std::size_t g = 0; g < cfg.n_grid.size(); ++g) {
    const int n = cfg.n_grid[g];
    const double q = cfg.q_rule.at(n);
    if (!fast_countable(cfg.pattern) && n > 3000) throw ConfigError("general patterns are limited to n <= 3000");
    auto counts = parallel_map(static_cast<std::size_t>(cfg.replicates), [&](std::size_t i) {
      RngStream rng(cfg.seed, g * kGridStride + i);
      return occ_double(cfg.pattern, sample_mallows({n, q}, Side::Left, rng));
    });
    const double m = sample_mean(counts);
    const double se = std::sqrt(sample_variance(counts) / counts.size());
    rep.rows.push_back({at_n("mean_occ", n), m, se, NAN, true});
    lx.push_back(std::log(n));
    ly.push_back(std::log(m));
    lse.push_back(se / m);
  }
  const double slope = ols_slope(lx, ly);
  const double mx = sample_mean(lx);
  double sxx = 0, var = 0;
  for (double v : lx) sxx += (v - mx) * (v - mx);
  for (std::size_t i = 0; i < lx.size(); ++i) var += std::pow((lx[i] - mx) / sxx * lse[i], 2);
  const double target = x * r + (1 - x) * d;
  rep.rows.push_back({"loglog_slope", slope, std::sqrt(var), target, std::abs(slope - target) <= cfg.threshold("slope_tol", 0.15)});
}

void regenerative(const ExperimentConfig& cfg, ExperimentReport& rep) {
  const double q = cfg.q_rule.at(cfg.n_grid.front());
  if (cfg.q_rule.type != "fixed" || !(q < 1)) throw ConfigError("regenerative regime needs a fixed q in (0,1)");
  const int d = static_cast<int>(block_decomposition(cfg.pattern).blocks.size());
  auto moments = sample_block_moments(q, distinct_blocks({cfg.pattern}), cfg.blocks, cfg.seed + 0x9e3779b9ULL);
  const auto e = estimate_e_from(cfg.pattern, moments);
  const auto gamma = gamma_matrix_from(d, {cfg.pattern}, moments);
  rep.rows.push_back({"e_hat", e.value, e.se, NAN, true});
  rep.rows.push_back({"gamma_diag", gamma.value(0, 0), gamma.se(0, 0), NAN, true});
  for (std::size_t g = 0; g < cfg.n_grid.size(); ++g) {
    const int n = cfg.n_grid[g];
    if (!fast_countable(cfg.pattern) && n > 3000) throw ConfigError("general patterns are limited to n <= 3000");
    auto counts = parallel_map(static_cast<std::size_t>(cfg.replicates), [&](std::size_t i) {
      RngStream rng(cfg.seed, g * kGridStride + i);
      return occ_double(cfg.pattern, sample_mallows({n, q}, Side::Left, rng));
    });
    const double center = binomial(n, d).convert_to<double>() * e.value;
    const double scale = std::pow(static_cast<double>(n), d - 0.5);
    std::vector<double> z, ratio;
    for (double c : counts) {
      z.push_back((c - center) / scale);
      ratio.push_back(c / center);
    }
    const double rm = sample_mean(ratio);
    rep.rows.push_back({at_n("lln_ratio", n), rm, std::sqrt(sample_variance(ratio) / ratio.size()), 1.0,
                        std::abs(rm - 1) <= cfg.threshold("lln_tol", 0.02)});
    const double v = sample_variance(z);
    rep.rows.push_back({at_n("clt_variance", n), v, v * std::sqrt(2.0 / z.size()), gamma.value(0, 0),
                        std::abs(v / gamma.value(0, 0) - 1) <= cfg.threshold("var_tol", 0.15)});
    add_clt_rows(rep, cfg, at_n("clt", n), z);
  }
}

void identity_pattern(const ExperimentConfig& cfg, ExperimentReport& rep) {
  const int r = cfg.pattern.size();
  if (!cfg.pattern.is_identity() || r < 2) throw ConfigError("identity-pattern regime needs pattern id_r with r >= 2");
  const double q = cfg.q_rule.at(cfg.n_grid.front());
  if (cfg.q_rule.type != "fixed" || !(q < 1)) throw ConfigError("identity-pattern regime needs a fixed q in (0,1)");
  const Permutation p21 = Permutation::trusted({2, 1});
  auto moments = sample_block_moments(q, {p21}, cfg.blocks, cfg.seed + 0x9e3779b9ULL);
  const auto ratio = estimate_e_from(p21, moments);
  const auto gamma = gamma_id_variance_from(r, moments);
  rep.rows.push_back({"inv_ratio", ratio.value, ratio.se, q / (1 - q), std::abs(ratio.value - q / (1 - q)) <= 4 * ratio.se});
  rep.rows.push_back({"gamma_r_squared", gamma.value, gamma.se, NAN, gamma.value > 0});
  for (std::size_t g = 0; g < cfg.n_grid.size(); ++g) {
    const int n = cfg.n_grid[g];
    auto counts = parallel_map(static_cast<std::size_t>(cfg.replicates), [&](std::size_t i) {
      RngStream rng(cfg.seed, g * kGridStride + i);
      return occ_increasing(r, sample_mallows({n, q}, Side::Left, rng));
    });
    const BigInt top = binomial(n, r);
    const double lower = binomial(n, r - 1).convert_to<double>() * (r - 1);
    const double scale = std::pow(static_cast<double>(n), r - 1.5);
    std::vector<double> z;
    for (const auto& c : counts) z.push_back((BigInt(c - top).convert_to<double>() + lower * ratio.value) / scale);
    const double m = sample_mean(z);
    const double se = std::sqrt(sample_variance(z) / z.size() + std::pow(lower * ratio.se / scale, 2));
    rep.rows.push_back({at_n("centered_mean", n), m, se, 0.0, std::abs(m) <= cfg.threshold("mean_se", 3.0) * se});
    const double v = sample_variance(z);
    rep.rows.push_back({at_n("variance", n), v, v * std::sqrt(2.0 / z.size()), gamma.value,
                        std::abs(v / gamma.value - 1) <= cfg.threshold("var_tol", 0.15)});
    add_clt_rows(rep, cfg, at_n("clt", n), z);
  }
}

void renewal(const ExperimentConfig& cfg, ExperimentReport& rep) {
  const double q = cfg.q_rule.at(cfg.n_grid.front());
  if (cfg.q_rule.type != "fixed" || !(q < 1)) throw ConfigError("renewal regime needs a fixed q in (0,1)");
  auto moments = sample_block_moments(q, {}, cfg.blocks, cfg.seed + 0x9e3779b9ULL);
  const double mu = moments.total.mean(0);
  const double var_b = moments.total.cov(0, 0);
  const double N = static_cast<double>(moments.total.count());
  const double inv_mu = 1 / mu;
  const double inv_mu_se = std::sqrt(var_b / N) / (mu * mu);
  const double var_target = var_b / (mu * mu * mu);
  rep.rows.push_back({"mean_block_size", mu, std::sqrt(var_b / N), NAN, true});
  for (std::size_t g = 0; g < cfg.n_grid.size(); ++g) {
    const int n = cfg.n_grid[g];
    auto k = parallel_map(static_cast<std::size_t>(cfg.replicates), [&](std::size_t i) {
      RngStream rng(cfg.seed, g * kGridStride + i);
      return static_cast<double>(sample_block_sum(n, q, rng).K_n);
    });
    std::vector<double> ratio;
    for (double v : k) ratio.push_back(v / n);
    const double m = sample_mean(ratio);
    const double se = std::sqrt(sample_variance(ratio) / ratio.size());
    const double comb = std::sqrt(se * se + inv_mu_se * inv_mu_se);
    rep.rows.push_back({at_n("K_n_over_n", n), m, se, inv_mu, std::abs(m - inv_mu) <= cfg.threshold("mean_se", 3.0) * comb});
    const double v = sample_variance(k) / n;
    rep.rows.push_back({at_n("var_K_n_over_n", n), v, v * std::sqrt(2.0 / k.size()), var_target,
                        std::abs(v / var_target - 1) <= cfg.threshold("var_tol", 0.15)});
  }
}

}  // namespace

ExperimentReport run_regime_experiment(const ExperimentConfig& cfg) {
  ExperimentReport rep;
  rep.config = cfg.raw;
  if (cfg.regime == "almost-uniform")
    almost_uniform(cfg, rep);
  else if (cfg.regime == "transition")
    transition(cfg, rep);
  else if (cfg.regime == "regenerative")
    regenerative(cfg, rep);
  else if (cfg.regime == "identity-pattern")
    identity_pattern(cfg, rep);
  else if (cfg.regime == "renewal")
    renewal(cfg, rep);
  else
    throw ConfigError("unknown regime '" + cfg.regime + "'");
  return rep;
}

}  // namespace mallows

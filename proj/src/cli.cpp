#include "mallows/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "mallows/coupling.hpp"
#include "mallows/ct_process.hpp"
#include "mallows/errors.hpp"
#include "mallows/experiment.hpp"
#include "mallows/limit_theory.hpp"
#include "mallows/parallel.hpp"
#include "mallows/pattern_count.hpp"
#include "mallows/report.hpp"
#include "mallows/samplers.hpp"

namespace mallows {

namespace {

struct Common {
  std::uint64_t seed = 1;
  std::int64_t replicates = 1;
  std::string out;
  std::string format = "csv";
};

void add_common(CLI::App* sub, Common& c, std::int64_t default_replicates) {
  c.replicates = default_replicates;
  sub->add_option("--seed", c.seed, "master seed")->capture_default_str();
  sub->add_option("--replicates", c.replicates, "replicate count")->capture_default_str();
  sub->add_option("--out", c.out, "output file (default stdout)");
  sub->add_option("--format", c.format, "csv or json")->capture_default_str()->check(CLI::IsMember({"csv", "json"}));
}

std::vector<double> parse_grid(const std::string& spec) {
  std::vector<double> parts;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ':')) {
    try {
      parts.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw ConfigError("bad grid '" + spec + "' (expected a:b:step)");
    }
  }
  if (parts.size() != 3 || !(parts[2] > 0) || parts[1] < parts[0]) throw ConfigError("bad grid '" + spec + "' (expected a:b:step)");
  std::vector<double> grid;
  for (int i = 0;; ++i) {
    const double t = parts[0] + i * parts[2];
    if (t > parts[1] + 1e-12) break;
    grid.push_back(std::min(t, parts[1]));
  }
  return grid;
}

std::string compact(const Permutation& p) {
  if (p.size() > 9) return p.to_string();
  std::string s;
  for (int v : p.values()) s += static_cast<char>('0' + v);
  return s;
}

void require_q(double q, bool allow_one) {
  if (!(q > 0) || q > 1 || (!allow_one && q == 1)) throw ConfigError("q must lie in " + std::string(allow_one ? "(0,1]" : "(0,1)"));
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"mallows_lab: Mallows permutation sampling, pattern counting and limit-theory checks"};
  app.require_subcommand(1);

  Common c_sample, c_count, c_blocks, c_coupled, c_process, c_estimate, c_experiment;
  int n = 0;
  double q = 0.5;
  std::string side = "left", in_path, grid_spec, config_path;
  std::vector<std::string> patterns;
  std::string pattern = "21";
  std::int64_t blocks = 100000;

  auto* sample = app.add_subcommand("sample", "sample permutations; one comma-separated permutation per line (json: array of arrays)");
  add_common(sample, c_sample, 1);
  sample->add_option("--n", n, "size")->required()->check(CLI::PositiveNumber);
  sample->add_option("--q", q, "parameter; q > 1 samples at 1/q and reverses")->required();
  sample->add_option("--side", side, "left, right, infinite or uniform")->capture_default_str()
      ->check(CLI::IsMember({"left", "right", "infinite", "uniform"}));

  auto* count = app.add_subcommand("count", "count patterns in permutations read one per line; CSV columns: pattern,count");
  add_common(count, c_count, 1);
  count->add_option("--pattern", patterns, "pattern in one-line notation (repeatable)")->required();
  count->add_option("--in", in_path, "input file (default stdin)");

  auto* blk = app.add_subcommand("blocks", "sample Mallows blocks, or the block sum of a prefix with --n; CSV columns: replicate,kind,size,permutation");
  add_common(blk, c_blocks, 1);
  blk->add_option("--q", q, "parameter in (0,1)")->required();
  blk->add_option("--n", n, "prefix size for a block-sum sample");

  auto* coupled = app.add_subcommand("coupled", "coupled Mallows/uniform pairs; CSV columns: replicate,H_n,inv_tau,inv_u");
  add_common(coupled, c_coupled, 1);
  coupled->add_option("--n", n, "size")->required()->check(CLI::PositiveNumber);
  coupled->add_option("--q", q, "parameter in (0,1]")->required();

  auto* process = app.add_subcommand("process", "pattern counts along the continuous-time process; CSV columns: t,occ,e_estimate,centered");
  add_common(process, c_process, 1);
  process->add_option("--n", n, "prefix size")->required()->check(CLI::PositiveNumber);
  process->add_option("--q", q, "horizon q_max in (0,1); defaults to the last grid time");
  process->add_option("--grid", grid_spec, "time grid a:b:step")->required();
  process->add_option("--pattern", pattern, "pattern")->capture_default_str();
  process->add_option("--blocks", blocks, "q-block samples for the e estimates (0 disables)")->capture_default_str();

  auto* estimate = app.add_subcommand("estimate", "estimate e and the d-block variance of a pattern; CSV columns: name,estimate,se,target,pass");
  add_common(estimate, c_estimate, 100000);
  estimate->add_option("--pattern", pattern, "pattern")->capture_default_str();
  estimate->add_option("--q", q, "parameter in (0,1)")->required();

  auto* experiment = app.add_subcommand("experiment", "run a regime experiment from a key-value config; CSV columns: name,estimate,se,target,pass; exit 3 if a threshold fails");
  add_common(experiment, c_experiment, 1);
  experiment->add_option("--config", config_path, "config file")->required();

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  const Common& common = sample->parsed() ? c_sample : count->parsed() ? c_count : blk->parsed() ? c_blocks
                         : coupled->parsed() ? c_coupled : process->parsed() ? c_process
                         : estimate->parsed() ? c_estimate : c_experiment;

  try {
    const Format format = parse_format(common.format);
    std::unique_ptr<std::ofstream> file;
    if (!common.out.empty()) {
      file = std::make_unique<std::ofstream>(common.out);
      if (!*file) throw IoError("cannot open " + common.out);
    }
    std::ostream& sink = file ? *file : out;
    if (common.replicates < 1) throw ConfigError("--replicates must be positive");
    const auto reps = static_cast<std::size_t>(common.replicates);

    if (sample->parsed()) {
      if (!(q > 0)) throw ConfigError("q must be positive");
      const bool flip = q > 1;
      const double qq = flip ? 1 / q : q;
      if (side == "infinite" && qq == 1) throw ConfigError("the infinite sampler needs q != 1");
      auto perms = parallel_map(reps, [&](std::size_t i) {
        RngStream rng(common.seed, i);
        Permutation p = side == "uniform" ? sample_uniform(n, rng)
                        : side == "infinite" ? sample_infinite_prefix(n, qq, rng)
                        : sample_mallows({n, qq}, side == "left" ? Side::Left : Side::Right, rng);
        return flip ? reverse(p) : p;
      });
      if (format == Format::Csv) {
        for (const auto& p : perms) sink << p.to_string() << '\n';
      } else {
        sink << '[';
        for (std::size_t i = 0; i < perms.size(); ++i) sink << (i ? ",\n " : "\n ") << '[' << perms[i].to_string() << ']';
        sink << "\n]\n";
      }
    } else if (count->parsed()) {
      std::vector<Permutation> pis;
      for (const auto& s : patterns) pis.push_back(Permutation::parse(s));
      std::ifstream fin;
      if (!in_path.empty()) {
        fin.open(in_path);
        if (!fin) throw IoError("cannot open " + in_path);
      }
      std::istream& src = in_path.empty() ? std::cin : fin;
      Table t{{"pattern", "count"}, {}};
      std::string line;
      while (std::getline(src, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        if (line.back() == '\r') line.pop_back();
        const Permutation p = Permutation::parse(line);
        for (const auto& pi : pis) t.rows.push_back({compact(pi), occ(pi, p)});
      }
      emit_series(t, format, sink);
    } else if (blk->parsed()) {
      require_q(q, false);
      Table t{{"replicate", "kind", "size", "permutation"}, {}};
      for (std::size_t i = 0; i < reps; ++i) {
        RngStream rng(common.seed, i);
        if (n > 0) {
          auto s = sample_block_sum(n, q, rng);
          for (const auto& b : s.blocks)
            t.rows.push_back({static_cast<std::int64_t>(i), std::string("block"), static_cast<std::int64_t>(b.size()), b.to_string()});
          if (s.remainder)
            t.rows.push_back({static_cast<std::int64_t>(i), std::string("remainder"),
                              static_cast<std::int64_t>(s.remainder->size()), s.remainder->to_string()});
        } else {
          auto b = sample_block(q, rng);
          t.rows.push_back({static_cast<std::int64_t>(i), std::string("block"), static_cast<std::int64_t>(b.size()), b.to_string()});
        }
      }
      emit_series(t, format, sink);
    } else if (coupled->parsed()) {
      require_q(q, true);
      if (n * (1 - q) > 1) err << "warning: n(1-q) = " << n * (1 - q) << " > 1; the error bound is loose in this regime\n";
      auto pairs = parallel_map(reps, [&](std::size_t i) {
        RngStream rng(common.seed, i);
        auto c = sample_coupled(n, q, rng);
        return std::vector<Cell>{static_cast<std::int64_t>(i), static_cast<std::int64_t>(c.errors.size()), inv(c.tau), inv(c.u)};
      });
      emit_series(Table{{"replicate", "H_n", "inv_tau", "inv_u"}, std::move(pairs)}, format, sink);
    } else if (process->parsed()) {
      const auto grid = parse_grid(grid_spec);
      const double horizon = process->count("--q") ? q : grid.back();
      if (!(horizon > 0 && horizon < 1)) throw ConfigError("process horizon must lie in (0,1)");
      if (grid.front() < 0 || grid.back() > horizon) throw ConfigError("grid must lie in [0, horizon]");
      const Permutation pi = Permutation::parse(pattern);
      RngStream rng(common.seed, 0);
      const auto prefix = sample_process_prefix(n, horizon, rng);
      std::optional<std::vector<double>> e;
      if (blocks > 0) {
        auto m = sample_qblock_moments(pi, grid, horizon, blocks, common.seed + 1);
        e.emplace();
        for (std::size_t g = 0; g < grid.size(); ++g) e->push_back(e_at_time(pi, m, g).value);
      }
      Table t{{"t", "occ", "e_estimate", "centered"}, {}};
      for (const auto& pt : occ_process(pi, n, grid, prefix, e))
        t.rows.push_back({pt.t, pt.occ, pt.e_estimate ? Cell{*pt.e_estimate} : Cell{},
                          pt.centered ? Cell{*pt.centered} : Cell{}});
      emit_series(t, format, sink);
    } else if (estimate->parsed()) {
      require_q(q, false);
      const Permutation pi = Permutation::parse(pattern);
      const int d = static_cast<int>(block_decomposition(pi).blocks.size());
      auto m = sample_block_moments(q, distinct_blocks({pi}), common.replicates, common.seed);
      const auto e = estimate_e_from(pi, m);
      const auto g = gamma_matrix_from(d, {pi}, m);
      ExperimentReport rep;
      const std::string s = compact(pi);
      const bool known = s == "21" || s == "132" || s == "213";
      const double target = known ? q / (1 - q) : NAN;
      rep.rows.push_back({"e_hat", e.value, e.se, target, !known || std::abs(e.value - target) <= 3 * e.se});
      rep.rows.push_back({"gamma_diag", g.value(0, 0), g.se(0, 0), NAN, true});
      emit_report(rep, format, sink);
    } else {
      std::ifstream fin(config_path);
      if (!fin) throw ConfigError("cannot open config " + config_path);
      const auto cfg = parse_experiment_config(fin);
      const auto rep = run_regime_experiment(cfg);
      emit_report(rep, format, sink);
      if (!rep.all_pass()) {
        err << "experiment: one or more thresholds failed\n";
        return kExitThresholds;
      }
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DomainError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NotAPermutation& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace mallows

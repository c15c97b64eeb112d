#include "mallows/ct_process.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mallows/errors.hpp"
#include "mallows/samplers.hpp"

namespace mallows {

namespace {

void check_horizon(double horizon) {
  if (!(horizon > 0.0 && horizon < 1.0)) throw DomainError("horizon must lie in (0,1)");
}

std::vector<std::int64_t> counts_at(const std::vector<BirthPath>& paths, std::size_t n, double t) {
  std::vector<std::int64_t> r(n);
  for (std::size_t i = 0; i < n; ++i) r[i] = eval_state(paths[i], t) - 1;
  return r;
}

}  // namespace

void extend_birth_path(BirthPath& path, double horizon, RngStream& rng) {
  check_horizon(horizon);
  if (horizon < path.horizon) throw DomainError("cannot shrink a path horizon");
  double s = path.jump_times.empty() ? 0.0 : path.jump_times.back();
  int j = 1 + static_cast<int>(path.jump_times.size());
  // Restart from the old horizon: the rate is memoryless given the current state.
  if (path.horizon > s) s = path.horizon;
  while (true) {
    const double next = 1.0 - (1.0 - s) * std::pow(rng.uniform_open(), 1.0 / j);
    if (!(next < horizon)) break;
    path.jump_times.push_back(next);
    s = next;
    ++j;
  }
  path.horizon = horizon;
}

BirthPath sample_birth_path(double horizon, RngStream& rng) {
  BirthPath path;
  extend_birth_path(path, horizon, rng);
  return path;
}

int eval_state(const BirthPath& path, double t) {
  if (t < 0.0 || t > path.horizon) throw OutOfHorizon("t=" + std::to_string(t) + " outside [0, horizon]");
  auto it = std::upper_bound(path.jump_times.begin(), path.jump_times.end(), t);
  return 1 + static_cast<int>(it - path.jump_times.begin());
}

ProcessPrefix sample_process_prefix(int n, double horizon, RngStream& rng) {
  if (n < 1) throw DomainError("n must be positive");
  check_horizon(horizon);
  ProcessPrefix prefix;
  prefix.horizon = horizon;
  prefix.paths.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) prefix.paths.push_back(sample_birth_path(horizon, rng));
  return prefix;
}

Permutation tau_nt(const ProcessPrefix& prefix, int n, double t) {
  if (n < 1 || static_cast<std::size_t>(n) > prefix.paths.size()) throw DomainError("prefix has fewer than n paths");
  if (t < 0.0 || t > prefix.horizon) throw OutOfHorizon("t outside [0, horizon]");
  return rank_reduce(prefix_values_from_right_inversions(counts_at(prefix.paths, static_cast<std::size_t>(n), t)));
}

Permutation QBlockProcess::at(double t) const {
  if (t < 0.0 || t > q) throw OutOfHorizon("t outside [0, q]");
  auto r = counts_at(paths, paths.size(), t);
  return from_right_inversions(std::vector<int>(r.begin(), r.end()));
}

QBlockBundle cut_q_blocks(const ProcessPrefix& prefix, double q) {
  if (!(q > 0.0) || q > prefix.horizon) throw OutOfHorizon("q outside (0, horizon]");
  QBlockBundle bundle;
  BoundaryTracker tracker;
  std::size_t start = 0;
  for (std::size_t i = 0; i < prefix.paths.size(); ++i) {
    if (!tracker.push(eval_state(prefix.paths[i], q) - 1)) continue;
    QBlockProcess block;
    block.q = q;
    block.paths.assign(prefix.paths.begin() + static_cast<std::ptrdiff_t>(start),
                       prefix.paths.begin() + static_cast<std::ptrdiff_t>(i + 1));
    bundle.blocks.push_back(std::move(block));
    start = i + 1;
  }
  bundle.remainder = static_cast<int>(prefix.paths.size() - start);
  return bundle;
}

QBlockProcess sample_q_block_process(double q, RngStream& rng) {
  check_horizon(q);
  QBlockProcess block;
  block.q = q;
  BoundaryTracker tracker;
  while (true) {
    block.paths.push_back(sample_birth_path(q, rng));
    if (tracker.push(static_cast<std::int64_t>(block.paths.back().jump_times.size()))) break;
    if (tracker.index() >= kBlockCap) throw DomainError("q-block exceeded the size cap");
  }
  return block;
}

double transition_pmf(int k, double s, double t, int j) {
  if (!(s >= 0.0 && s <= t && t < 1.0) || k < 1) throw DomainError("transition_pmf needs 0 <= s <= t < 1, k >= 1");
  if (j < k) throw DomainError("transition_pmf needs j >= k");
  if (t == s) return j == k ? 1.0 : 0.0;
  const double a = (t - s) / (1.0 - s);
  const double b = (1.0 - t) / (1.0 - s);
  const double log_c = std::lgamma(static_cast<double>(j)) - std::lgamma(static_cast<double>(k)) -
                       std::lgamma(static_cast<double>(j - k + 1));
  return std::exp(log_c + (j - k) * std::log(a) + k * std::log(b));
}

std::pair<double, double> increment_moments(double s, double t) {
  if (!(s >= 0.0 && s <= t && t < 1.0)) throw DomainError("increment_moments needs 0 <= s <= t < 1");
  const double mean = (t - s) / ((1.0 - s) * (1.0 - t));
  const double var = (t - s) * (1.0 + s * t - 2.0 * s) / ((1.0 - s) * (1.0 - s) * (1.0 - t) * (1.0 - t));
  return {mean, var};
}

std::vector<ProcessPoint> occ_process(const Permutation& pi, int n, const std::vector<double>& grid,
                                      const ProcessPrefix& prefix,
                                      const std::optional<std::vector<double>>& e_estimates) {
  if (!std::is_sorted(grid.begin(), grid.end())) throw DomainError("grid must be sorted");
  if (e_estimates && e_estimates->size() != grid.size()) throw DomainError("one e-estimate per grid point expected");
  const int d = static_cast<int>(block_decomposition(pi).blocks.size());
  const BigInt scale = binomial(n, d);
  std::vector<ProcessPoint> out;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    ProcessPoint pt;
    pt.t = grid[g];
    pt.occ = occ(pi, tau_nt(prefix, n, grid[g]));
    if (e_estimates) {
      pt.e_estimate = (*e_estimates)[g];
      pt.centered = pt.occ.convert_to<double>() - scale.convert_to<double>() * (*e_estimates)[g];
    }
    out.push_back(std::move(pt));
  }
  return out;
}

}  // namespace mallows

#include "mallows/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mallows/errors.hpp"

namespace mallows {

void validate_q(double q, bool allow_one) {
  bool ok = q > 0.0 && (allow_one ? q <= 1.0 : q < 1.0);
  if (!ok || std::isnan(q))
    throw DomainError("q=" + std::to_string(q) + (allow_one ? " outside (0,1]" : " outside (0,1)"));
}

double tgeom_pmf(int k, double q, int j) {
  if (k < 1 || j < 1 || j > k) throw DomainError("tgeom_pmf: j outside [k]");
  validate_q(q);
  if (q == 1.0) return 1.0 / k;
  const double lq = std::log(q);
  return std::exp((j - 1) * lq) * -std::expm1(lq) / -std::expm1(k * lq);
}

int tgeom_sample(int k, double q, RngStream& rng) {
  if (k <= 1) return 1;
  if (q == 1.0) return static_cast<int>(rng.uniform_int(k));
  const double lq = std::log(q);
  const double mass = -std::expm1(k * lq);  // 1 - q^k
  const double u = rng.uniform_open();
  double x = std::ceil(std::log1p(-u * mass) / lq);
  return static_cast<int>(std::clamp(x, 1.0, static_cast<double>(k)));
}

std::int64_t geom_sample(double q, RngStream& rng) {
  const double x = std::ceil(std::log(rng.uniform_open()) / std::log(q));
  if (!(x >= 1.0)) return 1;
  if (x > 4.0e18) return static_cast<std::int64_t>(4.0e18);
  return static_cast<std::int64_t>(x);
}

double mallows_pmf(const Permutation& p, double q) {
  validate_q(q);
  const int n = p.size();
  if (q == 1.0) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return 1.0 / f;
  }
  const double lq = std::log(q);
  double log_z = 0.0;
  for (int k = 1; k <= n; ++k) log_z += std::log(-std::expm1(k * lq)) - std::log(-std::expm1(lq));
  return std::exp(static_cast<double>(inversion_number(p)) * lq - log_z);
}

std::vector<int> sample_left_inversions(int n, double q, RngStream& rng) {
  std::vector<int> l(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) l[static_cast<std::size_t>(i - 1)] = tgeom_sample(i, q, rng) - 1;
  return l;
}

Permutation sample_mallows(const MallowsParams& params, Side side, RngStream& rng) {
  if (params.n < 1) throw DomainError("n must be positive");
  validate_q(params.q);
  if (side == Side::Left) return from_left_inversions(sample_left_inversions(params.n, params.q, rng));
  std::vector<int> r(static_cast<std::size_t>(params.n));
  for (int i = 1; i <= params.n; ++i)
    r[static_cast<std::size_t>(i - 1)] = tgeom_sample(params.n - i + 1, params.q, rng) - 1;
  return from_right_inversions(r);
}

Permutation sample_uniform(int n, RngStream& rng) {
  if (n < 1) throw DomainError("n must be positive");
  std::vector<int> l(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) l[static_cast<std::size_t>(i - 1)] = static_cast<int>(rng.uniform_int(i)) - 1;
  return from_left_inversions(l);
}

Permutation sample_infinite_prefix(int n, double q, RngStream& rng) {
  if (n < 1) throw DomainError("n must be positive");
  validate_q(q, false);
  std::vector<std::int64_t> r(static_cast<std::size_t>(n));
  for (auto& x : r) x = geom_sample(q, rng) - 1;
  return rank_reduce(prefix_values_from_right_inversions(r));
}

namespace {

Permutation block_from_closed_counts(const std::vector<std::int64_t>& r) {
  std::vector<int> c(r.begin(), r.end());
  return from_right_inversions(c);
}

}  // namespace

Permutation sample_block(double q, RngStream& rng) {
  validate_q(q, false);
  std::vector<std::int64_t> r;
  BoundaryTracker tracker;
  while (true) {
    r.push_back(geom_sample(q, rng) - 1);
    if (tracker.push(r.back())) break;
    if (tracker.index() >= kBlockCap)
      throw DomainError("block exceeded " + std::to_string(kBlockCap) + " elements at q=" + std::to_string(q));
  }
  return block_from_closed_counts(r);
}

Permutation first_block_from_counts(const std::vector<std::int64_t>& r) {
  BoundaryTracker tracker;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r[i] < 0) throw RangeViolation("negative right-inversion count");
    if (tracker.push(r[i]))
      return block_from_closed_counts(std::vector<std::int64_t>(r.begin(), r.begin() + static_cast<std::ptrdiff_t>(i + 1)));
  }
  throw DomainError("no block boundary within the supplied counts");
}

BlockSumSample sample_block_sum(int n, double q, RngStream& rng) {
  if (n < 1) throw DomainError("n must be positive");
  validate_q(q, false);
  std::vector<std::int64_t> r(static_cast<std::size_t>(n));
  for (auto& x : r) x = geom_sample(q, rng) - 1;
  const Permutation tau = rank_reduce(prefix_values_from_right_inversions(r));

  BlockSumSample out;
  BoundaryTracker tracker;
  int start = 0;
  for (int i = 1; i <= n; ++i) {
    if (!tracker.push(r[static_cast<std::size_t>(i - 1)])) continue;
    std::vector<int> v;
    for (int j = start + 1; j <= i; ++j) v.push_back(tau(j) - start);
    out.blocks.push_back(Permutation::trusted(std::move(v)));
    start = i;
  }
  out.K_n = static_cast<int>(out.blocks.size());
  if (start < n) {
    std::vector<int> v;
    for (int j = start + 1; j <= n; ++j) v.push_back(tau(j));
    out.remainder = rank_reduce(v);
  }
  return out;
}

Permutation reassemble(const BlockSumSample& s) {
  std::vector<Permutation> parts = s.blocks;
  if (s.remainder) parts.push_back(*s.remainder);
  return direct_sum(parts);
}

}  // namespace mallows

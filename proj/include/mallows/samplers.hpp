#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mallows/permutation.hpp"
#include "mallows/rng.hpp"

namespace mallows {

struct MallowsParams {
  int n = 1;
  double q = 1.0;
};

struct BlockSumSample {
  std::vector<Permutation> blocks;
  std::optional<Permutation> remainder;
  int K_n = 0;
};

inline constexpr std::int64_t kBlockCap = 10'000'000;

void validate_q(double q, bool allow_one = true);

double tgeom_pmf(int k, double q, int j);
int tgeom_sample(int k, double q, RngStream& rng);
// Geometric on {1,2,...} with P(X > j) = q^j.
std::int64_t geom_sample(double q, RngStream& rng);

// Exact Mallows(n,q) probability of p.
double mallows_pmf(const Permutation& p, double q);

std::vector<int> sample_left_inversions(int n, double q, RngStream& rng);
Permutation sample_mallows(const MallowsParams& params, Side side, RngStream& rng);
Permutation sample_uniform(int n, RngStream& rng);
Permutation sample_infinite_prefix(int n, double q, RngStream& rng);

Permutation sample_block(double q, RngStream& rng);
// First block determined by a finite right-inversion stream; throws if no boundary closes.
Permutation first_block_from_counts(const std::vector<std::int64_t>& r);

BlockSumSample sample_block_sum(int n, double q, RngStream& rng);
Permutation reassemble(const BlockSumSample& s);

}  // namespace mallows

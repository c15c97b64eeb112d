#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "mallows/permutation.hpp"

namespace mallows {

using BigInt = boost::multiprecision::cpp_int;

struct PatternCount {
  Permutation pattern;
  BigInt count;
};

inline constexpr std::uint64_t kDefaultBruteForceBudget = 1'000'000'000ULL;

BigInt binomial(std::int64_t n, std::int64_t k);

BigInt inv(const Permutation& p);

// Subset enumeration with pruning; budget counts partial-tuple expansions.
BigInt occ_bruteforce(const Permutation& pi, const Permutation& p,
                      std::uint64_t budget = kDefaultBruteForceBudget);

// Counts of all size-r patterns by classifying every r-subset; indexed by lexicographic rank in S_r.
std::vector<BigInt> occ_bruteforce_all(int r, const Permutation& p,
                                       std::uint64_t budget = kDefaultBruteForceBudget);

// Order: 123, 132, 213, 231, 312, 321.
std::array<Permutation, 6> size3_patterns();
std::array<BigInt, 6> occ3_all(const Permutation& p);
std::array<std::int64_t, 6> occ3_all_i64(const Permutation& p);

BigInt occ_increasing(int r, const Permutation& p);

// Ordered sum over k_1 < ... < k_d of prod_j counts[j][k_j].
BigInt ordered_product_sum(const std::vector<std::vector<BigInt>>& counts);
BigInt occ_blockwise(const std::vector<Permutation>& pi_blocks, const std::vector<Permutation>& blocks);

// Exact count using the fastest applicable method.
BigInt occ(const Permutation& pi, const Permutation& p);

BigInt occ_swap_delta_bound(const Permutation& pi, const Permutation& p, const Permutation& p_prime);

std::vector<Permutation> all_permutations(int r);

}  // namespace mallows

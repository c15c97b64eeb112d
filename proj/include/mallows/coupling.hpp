#pragma once

#include <utility>
#include <vector>

#include "mallows/permutation.hpp"
#include "mallows/rng.hpp"

namespace mallows {

// Probability masses on the integer support offset, offset+1, ...
struct FinitePmf {
  int offset = 1;
  std::vector<double> mass;
};

struct CoupledPair {
  Permutation tau = Permutation::identity(1);
  Permutation u = Permutation::identity(1);
  std::vector<int> errors;      // H_n, increasing
  std::vector<double> step_tv;  // step_tv[k] = mismatch probability at step k+1, given the past
  bool outside_regime = false;  // n(1-q) > 1
};

int phi_shift(const Permutation& sigma, const std::vector<int>& H, int x);

std::pair<int, int> maximal_coupling_sample(const FinitePmf& p1, const FinitePmf& p2, RngStream& rng);
double total_variation(const FinitePmf& p1, const FinitePmf& p2);

CoupledPair sample_coupled(int n, double q, RngStream& rng);

// Indices of [n] outside H.
std::vector<int> complement_indices(int n, const std::vector<int>& H);

}  // namespace mallows

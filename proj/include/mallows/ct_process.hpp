#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "mallows/pattern_count.hpp"
#include "mallows/permutation.hpp"
#include "mallows/rng.hpp"

namespace mallows {

struct BirthPath {
  std::vector<double> jump_times;  // strictly increasing, all < horizon
  double horizon = 0.0;
};

struct ProcessPrefix {
  std::vector<BirthPath> paths;
  double horizon = 0.0;
};

// One regenerative block of the process; boundaries fixed by the states at time q.
struct QBlockProcess {
  std::vector<BirthPath> paths;
  double q = 0.0;
  int size() const { return static_cast<int>(paths.size()); }
  Permutation at(double t) const;
};

struct QBlockBundle {
  std::vector<QBlockProcess> blocks;
  int remainder = 0;  // trailing paths that do not close a block at time q
};

struct ProcessPoint {
  double t = 0.0;
  BigInt occ;
  std::optional<double> e_estimate;
  std::optional<double> centered;
};

BirthPath sample_birth_path(double horizon, RngStream& rng);
// Continues a path from its last state up to a later horizon.
void extend_birth_path(BirthPath& path, double horizon, RngStream& rng);
int eval_state(const BirthPath& path, double t);

ProcessPrefix sample_process_prefix(int n, double horizon, RngStream& rng);
Permutation tau_nt(const ProcessPrefix& prefix, int n, double t);

QBlockBundle cut_q_blocks(const ProcessPrefix& prefix, double q);
// Streams fresh paths until a block closes at time q.
QBlockProcess sample_q_block_process(double q, RngStream& rng);

double transition_pmf(int k, double s, double t, int j);
std::pair<double, double> increment_moments(double s, double t);

std::vector<ProcessPoint> occ_process(const Permutation& pi, int n, const std::vector<double>& grid,
                                      const ProcessPrefix& prefix,
                                      const std::optional<std::vector<double>>& e_estimates = std::nullopt);

}  // namespace mallows

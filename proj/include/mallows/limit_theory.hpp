#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mallows/ct_process.hpp"
#include "mallows/permutation.hpp"
#include "mallows/stats.hpp"

namespace mallows {

struct Estimate {
  double value = 0;
  double se = 0;
};

// Exact moments of inv under Mallows(n,q), 0 < q <= 1.
long double inv_mean_exact(int n, double q);
long double inv_var_exact(int n, double q);
// Leading-order (mean, variance): n^2/4 - (1-q) n^3/36 and n^3/36.
std::pair<double, double> inv_asymptotics(double n, double q);

// Per-block counts of a fixed list of block patterns; feature 0 is always |B|.
class BlockFeatureSet {
 public:
  explicit BlockFeatureSet(const std::vector<Permutation>& patterns = {});
  std::size_t width() const { return patterns_.size(); }
  std::size_t index_of(const Permutation& rho) const;
  const std::vector<Permutation>& patterns() const { return patterns_; }
  void evaluate(const Permutation& block, double* out) const;

 private:
  std::vector<Permutation> patterns_;
  bool needs_occ3_ = false;
};

struct BlockMoments {
  BlockFeatureSet features;
  CovarianceAccumulator total;
  std::vector<CovarianceAccumulator> batches;
  std::int64_t samples = 0;
};

// Samples MallowsBlock(q) in about sqrt(samples) batches, one stream per batch.
BlockMoments sample_block_moments(double q, const std::vector<Permutation>& block_patterns, std::int64_t samples,
                                  std::uint64_t seed);

// Blocks of every pattern, without repetition.
std::vector<Permutation> distinct_blocks(const std::vector<Permutation>& patterns);
std::vector<Permutation> patterns_with_blocks(int r, int d);

Estimate estimate_e(const Permutation& pi, double q, std::int64_t block_samples, std::uint64_t seed);
Estimate estimate_e_from(const Permutation& pi, const BlockMoments& m);

// Asymptotic covariance of two patterns with d blocks each, from joint plug-in moments.
// a and b hold feature indices of the blocks of each pattern; index 0 is the size feature.
// A feature with zero mean is treated as the constant ratio 1.
double ustat_covariance(int d, const CovarianceAccumulator& acc, const std::vector<std::size_t>& a,
                        const std::vector<std::size_t>& b);

struct GammaMatrixEstimate {
  int d = 0;
  std::vector<Permutation> patterns;
  Eigen::MatrixXd value;
  Eigen::MatrixXd se;
  std::int64_t blocks = 0;
};

struct RankReport {
  int rank = 0;
  std::vector<double> singular_values;  // decreasing
  double gap_ratio = 0;                 // retained smallest / discarded largest
  double threshold = 0;
};

GammaMatrixEstimate gamma_matrix(int d, double q, const std::vector<Permutation>& patterns,
                                 std::int64_t block_samples, std::uint64_t seed);
GammaMatrixEstimate gamma_matrix_from(int d, const std::vector<Permutation>& patterns, const BlockMoments& m);
RankReport gamma_rank_report(const GammaMatrixEstimate& est, double gap_threshold = 1e-2);

Estimate gamma_id_variance(int r, double q, std::int64_t block_samples, std::uint64_t seed);
Estimate gamma_id_variance_from(int r, const BlockMoments& m);

// q-block path bundles evaluated at fixed times.
struct QBlockMoments {
  std::vector<Permutation> block_patterns;
  std::vector<double> times;
  double q = 0;
  CovarianceAccumulator total;
  std::vector<CovarianceAccumulator> batches;
  std::int64_t samples = 0;
  std::size_t feature(std::size_t pattern_index, std::size_t time_index) const {
    return 1 + time_index * block_patterns.size() + pattern_index;
  }
};

QBlockMoments sample_qblock_moments(const Permutation& pi, const std::vector<double>& times, double q,
                                    std::int64_t samples, std::uint64_t seed);
Estimate e_at_time(const Permutation& pi, const QBlockMoments& m, std::size_t time_index);
Estimate h_cov_from(const Permutation& pi, const QBlockMoments& m, std::size_t s_index, std::size_t t_index);

struct HCovMatrix {
  std::vector<double> times;
  Eigen::MatrixXd value;
  Eigen::MatrixXd se;
};

HCovMatrix h_cov_matrix(const Permutation& pi, const std::vector<double>& grid, double q, std::int64_t samples,
                        std::uint64_t seed);
Estimate h_cov(const Permutation& pi, double s, double t, double q, std::int64_t samples, std::uint64_t seed);

}  // namespace mallows

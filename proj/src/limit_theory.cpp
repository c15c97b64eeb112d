#include "mallows/limit_theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mallows/errors.hpp"
#include "mallows/parallel.hpp"
#include "mallows/pattern_count.hpp"
#include "mallows/samplers.hpp"

namespace mallows {

namespace {

// Neumaier compensated sum.
struct CompensatedSum {
  long double sum = 0, c = 0;
  void add(long double x) {
    const long double t = sum + x;
    if (std::fabs(sum) >= std::fabs(x))
      c += (sum - t) + x;
    else
      c += (x - t) + sum;
    sum = t;
  }
  long double value() const { return sum + c; }
};

// 1/(e^z - 1) - 1/z + 1/2
long double f_reg(long double z) {
  if (z < 0.05L) {
    const long double z2 = z * z;
    return z * (1.0L / 12 + z2 * (-1.0L / 720 + z2 * (1.0L / 30240 + z2 * (-1.0L / 1209600 + z2 / 47900160))));
  }
  return 1.0L / std::expm1(z) - 1.0L / z + 0.5L;
}

// e^z/(e^z - 1)^2 - 1/z^2 + 1/12
long double h_reg(long double z) {
  if (z < 0.05L) {
    const long double z2 = z * z;
    return z2 * (1.0L / 240 + z2 * (-1.0L / 6048 + z2 * (1.0L / 172800 - z2 / 5322240)));
  }
  const long double s = std::sinh(z / 2);
  return 1.0L / (4 * s * s) - 1.0L / (z * z) + 1.0L / 12;
}

double factorial(int k) {
  double f = 1;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

double binom_d(int n, int k) {
  if (k < 0 || k > n) return 0;
  return std::round(std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)));
}

std::vector<std::int64_t> batch_sizes(std::int64_t samples) {
  if (samples < 1) throw InsufficientSamples("need at least one sample");
  const auto batches = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(std::sqrt(static_cast<double>(samples)))));
  std::vector<std::int64_t> sizes(static_cast<std::size_t>(batches));
  for (std::int64_t b = 0; b < batches; ++b) sizes[static_cast<std::size_t>(b)] = samples * (b + 1) / batches - samples * b / batches;
  return sizes;
}

double batch_se(const std::vector<double>& values) {
  if (values.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  return std::sqrt(sample_variance(values) / static_cast<double>(values.size()));
}

std::vector<std::size_t> block_features(const Permutation& pi, const std::vector<Permutation>& patterns) {
  std::vector<std::size_t> idx;
  for (const auto& b : block_decomposition(pi).blocks) {
    auto it = std::find(patterns.begin(), patterns.end(), b);
    if (it == patterns.end()) throw DomainError("block " + b.to_string() + " missing from the feature set");
    idx.push_back(static_cast<std::size_t>(it - patterns.begin()));
  }
  return idx;
}

// Product of feature means over the size mean to the power d, and its delta-method standard error.
Estimate product_ratio(const CovarianceAccumulator& acc, const std::vector<std::size_t>& idx) {
  const double m0 = acc.mean(0);
  double value = 1;
  std::vector<double> grad(acc.width(), 0.0);
  for (auto i : idx) {
    value *= acc.mean(i) / m0;
    grad[i] += 1.0 / acc.mean(i);
    grad[0] -= 1.0 / m0;
  }
  double var = 0;
  for (std::size_t i = 0; i < grad.size(); ++i)
    for (std::size_t j = 0; j < grad.size(); ++j)
      if (grad[i] != 0 && grad[j] != 0) var += grad[i] * grad[j] * acc.cov(i, j);
  var /= static_cast<double>(acc.count());
  return {value, std::abs(value) * std::sqrt(std::max(0.0, var))};
}

}  // namespace

long double inv_mean_exact(int n, double q) {
  if (n < 1) throw DomainError("n must be positive");
  validate_q(q);
  if (q == 1.0) return static_cast<long double>(n) * (n - 1) / 4;
  const long double y = -std::log(static_cast<long double>(q));
  CompensatedSum s;
  const long double fy = f_reg(y);
  for (int k = 2; k <= n; ++k) s.add(fy - k * f_reg(k * y) + (k - 1) / 2.0L);
  return s.value();
}

long double inv_var_exact(int n, double q) {
  if (n < 1) throw DomainError("n must be positive");
  validate_q(q);
  if (q == 1.0) return static_cast<long double>(n) * (n - 1) * (2.0L * n + 5) / 72;
  const long double y = -std::log(static_cast<long double>(q));
  CompensatedSum s;
  const long double hy = h_reg(y);
  for (int k = 2; k <= n; ++k) {
    const long double kk = static_cast<long double>(k) * k;
    s.add(hy - kk * h_reg(k * y) + (kk - 1) / 12);
  }
  return s.value();
}

std::pair<double, double> inv_asymptotics(double n, double q) {
  return {n * n / 4 - (1 - q) * n * n * n / 36, n * n * n / 36};
}

BlockFeatureSet::BlockFeatureSet(const std::vector<Permutation>& patterns) {
  patterns_.push_back(Permutation::identity(1));
  for (const auto& p : patterns)
    if (std::find(patterns_.begin(), patterns_.end(), p) == patterns_.end()) patterns_.push_back(p);
  for (const auto& p : patterns_) needs_occ3_ = needs_occ3_ || p.size() == 3;
}

std::size_t BlockFeatureSet::index_of(const Permutation& rho) const {
  auto it = std::find(patterns_.begin(), patterns_.end(), rho);
  if (it == patterns_.end()) throw DomainError("pattern not in feature set");
  return static_cast<std::size_t>(it - patterns_.begin());
}

void BlockFeatureSet::evaluate(const Permutation& block, double* out) const {
  const auto m = block.size();
  std::array<std::int64_t, 6> c3{};
  if (needs_occ3_ && m >= 3) c3 = occ3_all_i64(block);
  std::int64_t inversions = -1;
  static const auto pats3 = size3_patterns();
  for (std::size_t f = 0; f < patterns_.size(); ++f) {
    const auto& rho = patterns_[f];
    switch (rho.size()) {
      case 1:
        out[f] = m;
        break;
      case 2:
        if (inversions < 0) inversions = inversion_number(block);
        out[f] = rho(1) == 2 ? static_cast<double>(inversions)
                             : static_cast<double>(static_cast<std::int64_t>(m) * (m - 1) / 2 - inversions);
        break;
      case 3: {
        out[f] = 0;
        for (std::size_t i = 0; i < 6; ++i)
          if (pats3[i] == rho) out[f] = static_cast<double>(c3[i]);
        break;
      }
      default:
        out[f] = occ(rho, block).convert_to<double>();
    }
  }
}

std::vector<Permutation> distinct_blocks(const std::vector<Permutation>& patterns) {
  std::vector<Permutation> out;
  for (const auto& p : patterns)
    for (const auto& b : block_decomposition(p).blocks)
      if (std::find(out.begin(), out.end(), b) == out.end()) out.push_back(b);
  return out;
}

std::vector<Permutation> patterns_with_blocks(int r, int d) {
  std::vector<Permutation> out;
  for (auto& p : all_permutations(r))
    if (static_cast<int>(block_decomposition(p).blocks.size()) == d) out.push_back(p);
  return out;
}

BlockMoments sample_block_moments(double q, const std::vector<Permutation>& block_patterns, std::int64_t samples,
                                  std::uint64_t seed) {
  validate_q(q, false);
  BlockMoments m{BlockFeatureSet(block_patterns), {}, {}, samples};
  const auto sizes = batch_sizes(samples);
  const auto& fs = m.features;
  m.batches = parallel_map(sizes.size(), [&](std::size_t b) {
    RngStream rng(seed, b);
    CovarianceAccumulator acc(fs.width());
    std::vector<double> x(fs.width());
    for (std::int64_t i = 0; i < sizes[b]; ++i) {
      fs.evaluate(sample_block(q, rng), x.data());
      acc.add(x);
    }
    return acc;
  });
  m.total = CovarianceAccumulator(fs.width());
  for (const auto& b : m.batches) m.total.merge(b);
  return m;
}

Estimate estimate_e_from(const Permutation& pi, const BlockMoments& m) {
  return product_ratio(m.total, block_features(pi, m.features.patterns()));
}

Estimate estimate_e(const Permutation& pi, double q, std::int64_t block_samples, std::uint64_t seed) {
  auto m = sample_block_moments(q, distinct_blocks({pi}), block_samples, seed);
  return estimate_e_from(pi, m);
}

double ustat_covariance(int d, const CovarianceAccumulator& acc, const std::vector<std::size_t>& a,
                        const std::vector<std::size_t>& b) {
  const double mS = acc.mean(0);
  auto rc = [&](std::size_t i, std::size_t j) {
    const double mi = acc.mean(i), mj = acc.mean(j);
    if (mi == 0 || mj == 0) return 0.0;
    return acc.cov(i, j) / (mi * mj);
  };
  double eA = 1, eB = 1;
  for (int j = 0; j < d; ++j) {
    eA *= acc.mean(a[static_cast<std::size_t>(j)]) / mS;
    eB *= acc.mean(b[static_cast<std::size_t>(j)]) / mS;
  }
  double t1 = 0, t2 = 0;
  for (int i = 1; i <= d; ++i) {
    for (int j = 1; j <= d; ++j)
      t1 += binom_d(i + j - 2, i - 1) * binom_d(2 * d - i - j, d - i) *
            rc(a[static_cast<std::size_t>(j - 1)], b[static_cast<std::size_t>(i - 1)]);
    t2 += rc(0, b[static_cast<std::size_t>(i - 1)]) + rc(0, a[static_cast<std::size_t>(i - 1)]);
  }
  t1 /= factorial(2 * d - 1);
  t2 /= factorial(d - 1) * factorial(d);
  const double t3 = rc(0, 0) / (factorial(d - 1) * factorial(d - 1));
  return mS * eA * eB * (t1 - t2 + t3);
}

GammaMatrixEstimate gamma_matrix_from(int d, const std::vector<Permutation>& patterns, const BlockMoments& m) {
  GammaMatrixEstimate est;
  est.d = d;
  est.patterns = patterns;
  est.blocks = m.samples;
  std::vector<std::vector<std::size_t>> idx;
  for (const auto& p : patterns) {
    idx.push_back(block_features(p, m.features.patterns()));
    if (static_cast<int>(idx.back().size()) != d) throw DomainError("pattern " + p.to_string() + " does not have d blocks");
    for (auto i : idx.back())
      if (!(m.total.mean(i) > 0)) throw InsufficientSamples("zero mean count for block " + m.features.patterns()[i].to_string());
  }
  const auto P = static_cast<Eigen::Index>(patterns.size());
  est.value = Eigen::MatrixXd::Zero(P, P);
  est.se = Eigen::MatrixXd::Zero(P, P);
  std::vector<double> per_batch(m.batches.size());
  for (Eigen::Index i = 0; i < P; ++i) {
    for (Eigen::Index j = i; j < P; ++j) {
      const auto& ai = idx[static_cast<std::size_t>(i)];
      const auto& aj = idx[static_cast<std::size_t>(j)];
      // symmetrize: the binomial weights are symmetric, so both orders agree up to rounding
      const double v = 0.5 * (ustat_covariance(d, m.total, ai, aj) + ustat_covariance(d, m.total, aj, ai));
      for (std::size_t b = 0; b < m.batches.size(); ++b) per_batch[b] = ustat_covariance(d, m.batches[b], ai, aj);
      est.value(i, j) = est.value(j, i) = v;
      est.se(i, j) = est.se(j, i) = batch_se(per_batch);
    }
  }
  return est;
}

GammaMatrixEstimate gamma_matrix(int d, double q, const std::vector<Permutation>& patterns, std::int64_t block_samples,
                                 std::uint64_t seed) {
  auto m = sample_block_moments(q, distinct_blocks(patterns), block_samples, seed);
  return gamma_matrix_from(d, patterns, m);
}

RankReport gamma_rank_report(const GammaMatrixEstimate& est, double gap_threshold) {
  RankReport rep;
  rep.threshold = gap_threshold;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(est.value);
  const auto& s = svd.singularValues();
  for (Eigen::Index i = 0; i < s.size(); ++i) rep.singular_values.push_back(s(i));
  if (rep.singular_values.empty()) return rep;
  const double top = rep.singular_values.front();
  for (double v : rep.singular_values) rep.rank += v > gap_threshold * top;
  if (rep.rank == 0 || rep.rank == static_cast<int>(rep.singular_values.size()))
    rep.gap_ratio = std::numeric_limits<double>::infinity();
  else
    rep.gap_ratio = rep.singular_values[static_cast<std::size_t>(rep.rank - 1)] /
                    rep.singular_values[static_cast<std::size_t>(rep.rank)];
  return rep;
}

namespace {

double id_variance(int r, const CovarianceAccumulator& acc, std::size_t inv_index) {
  const int d = r - 1;
  const double a = acc.mean(inv_index), b = acc.mean(0);
  const double v = a * a * acc.cov(0, 0) - 2 * a * b * acc.cov(0, inv_index) + b * b * acc.cov(inv_index, inv_index);
  return v / (b * b * b) / (factorial(d - 1) * factorial(d - 1));
}

}  // namespace

Estimate gamma_id_variance_from(int r, const BlockMoments& m) {
  if (r < 2) throw DomainError("gamma_id_variance needs r >= 2");
  const std::size_t k = m.features.index_of(Permutation::trusted({2, 1}));
  std::vector<double> per_batch;
  for (const auto& b : m.batches) per_batch.push_back(id_variance(r, b, k));
  return {id_variance(r, m.total, k), batch_se(per_batch)};
}

Estimate gamma_id_variance(int r, double q, std::int64_t block_samples, std::uint64_t seed) {
  auto m = sample_block_moments(q, {Permutation::trusted({2, 1})}, block_samples, seed);
  return gamma_id_variance_from(r, m);
}

QBlockMoments sample_qblock_moments(const Permutation& pi, const std::vector<double>& times, double q,
                                    std::int64_t samples, std::uint64_t seed) {
  for (double t : times)
    if (t < 0 || t > q) throw OutOfHorizon("time outside [0, q]");
  BlockFeatureSet fs(distinct_blocks({pi}));
  QBlockMoments m;
  m.block_patterns = fs.patterns();
  m.times = times;
  m.q = q;
  m.samples = samples;
  const std::size_t P = fs.width();
  const std::size_t width = 1 + times.size() * P;
  const auto sizes = batch_sizes(samples);
  m.batches = parallel_map(sizes.size(), [&](std::size_t b) {
    RngStream rng(seed, b);
    CovarianceAccumulator acc(width);
    std::vector<double> x(width);
    for (std::int64_t i = 0; i < sizes[b]; ++i) {
      const auto block = sample_q_block_process(q, rng);
      x[0] = block.size();
      for (std::size_t t = 0; t < times.size(); ++t) fs.evaluate(block.at(times[t]), x.data() + 1 + t * P);
      acc.add(x);
    }
    return acc;
  });
  m.total = CovarianceAccumulator(width);
  for (const auto& b : m.batches) m.total.merge(b);
  return m;
}

namespace {

std::vector<std::size_t> time_features(const Permutation& pi, const QBlockMoments& m, std::size_t t) {
  auto idx = block_features(pi, m.block_patterns);
  for (auto& i : idx) i = m.feature(i, t);
  return idx;
}

}  // namespace

Estimate e_at_time(const Permutation& pi, const QBlockMoments& m, std::size_t time_index) {
  return product_ratio(m.total, time_features(pi, m, time_index));
}

Estimate h_cov_from(const Permutation& pi, const QBlockMoments& m, std::size_t s_index, std::size_t t_index) {
  const int d = static_cast<int>(block_decomposition(pi).blocks.size());
  const auto a = time_features(pi, m, t_index);
  const auto b = time_features(pi, m, s_index);
  std::vector<double> per_batch;
  for (const auto& acc : m.batches) per_batch.push_back(ustat_covariance(d, acc, a, b));
  return {ustat_covariance(d, m.total, a, b), batch_se(per_batch)};
}

HCovMatrix h_cov_matrix(const Permutation& pi, const std::vector<double>& grid, double q, std::int64_t samples,
                        std::uint64_t seed) {
  auto m = sample_qblock_moments(pi, grid, q, samples, seed);
  HCovMatrix out;
  out.times = grid;
  const auto G = static_cast<Eigen::Index>(grid.size());
  out.value = Eigen::MatrixXd::Zero(G, G);
  out.se = Eigen::MatrixXd::Zero(G, G);
  for (Eigen::Index i = 0; i < G; ++i)
    for (Eigen::Index j = i; j < G; ++j) {
      auto e = h_cov_from(pi, m, static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      out.value(i, j) = out.value(j, i) = e.value;
      out.se(i, j) = out.se(j, i) = e.se;
    }
  return out;
}

Estimate h_cov(const Permutation& pi, double s, double t, double q, std::int64_t samples, std::uint64_t seed) {
  auto m = sample_qblock_moments(pi, {s, t}, q, samples, seed);
  return h_cov_from(pi, m, 0, 1);
}

}  // namespace mallows

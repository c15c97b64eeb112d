#pragma once

#include <cstdint>
#include <vector>

namespace mallows {

class MomentAccumulator {
 public:
  void add(long double x);
  void merge(const MomentAccumulator& other);

  std::int64_t count() const { return n_; }
  long double sum() const { return s1_; }
  double mean() const;
  double variance() const;  // unbiased
  double skewness() const;
  double excess_kurtosis() const;
  double standard_error() const;

 private:
  std::int64_t n_ = 0;
  long double s1_ = 0, s2_ = 0, s3_ = 0, s4_ = 0;
};

// Means and cross products of a fixed-width feature vector.
class CovarianceAccumulator {
 public:
  CovarianceAccumulator() = default;
  explicit CovarianceAccumulator(std::size_t width);

  void add(const std::vector<double>& x);
  void merge(const CovarianceAccumulator& other);

  std::size_t width() const { return width_; }
  std::int64_t count() const { return n_; }
  double mean(std::size_t i) const;
  // Plug-in covariance (divides by count).
  double cov(std::size_t i, std::size_t j) const;

 private:
  std::size_t width_ = 0;
  std::int64_t n_ = 0;
  std::vector<long double> s_;
  std::vector<long double> ss_;  // upper triangle, row-major
};

struct CltDiagnostics {
  double mean = 0, variance = 0, skewness = 0, excess_kurtosis = 0, ks = 0;
  std::size_t n = 0;
  bool degenerate = false;
  bool passes() const;  // |skew| < 0.1, |exkurt| < 0.2, KS < 1.5/sqrt(N)
};

struct ChiSquare {
  double statistic = 0;
  int dof = 0;
  double p_value = 1;
};

double normal_cdf(double x);
double sample_mean(const std::vector<double>& x);
double sample_variance(const std::vector<double>& x);
CltDiagnostics clt_diagnostics(const std::vector<double>& samples);
double ks_two_sample(std::vector<double> a, std::vector<double> b);
std::vector<double> standardize(const std::vector<double>& x);
// Goodness of fit; cells with zero expected mass must be empty.
ChiSquare chi_square_gof(const std::vector<std::int64_t>& observed, const std::vector<double>& probs);
ChiSquare chi_square_two_sample(const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b);
double chi_square_sf(double x, int dof);
// Least-squares slope of y on x.
double ols_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace mallows

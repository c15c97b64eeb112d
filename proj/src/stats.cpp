#include "mallows/stats.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/special_functions/gamma.hpp>

#include "mallows/errors.hpp"

namespace mallows {

void MomentAccumulator::add(long double x) {
  ++n_;
  const long double x2 = x * x;
  s1_ += x;
  s2_ += x2;
  s3_ += x2 * x;
  s4_ += x2 * x2;
}

void MomentAccumulator::merge(const MomentAccumulator& o) {
  n_ += o.n_;
  s1_ += o.s1_;
  s2_ += o.s2_;
  s3_ += o.s3_;
  s4_ += o.s4_;
}

double MomentAccumulator::mean() const { return n_ ? static_cast<double>(s1_ / n_) : 0.0; }

double MomentAccumulator::variance() const {
  if (n_ < 2) return 0.0;
  const long double m = s1_ / n_;
  return static_cast<double>((s2_ - n_ * m * m) / (n_ - 1));
}

double MomentAccumulator::skewness() const {
  if (n_ < 2) return 0.0;
  const long double m = s1_ / n_;
  const long double m2 = s2_ / n_ - m * m;
  const long double m3 = s3_ / n_ - 3 * m * s2_ / n_ + 2 * m * m * m;
  return m2 > 0 ? static_cast<double>(m3 / std::pow(m2, 1.5L)) : 0.0;
}

double MomentAccumulator::excess_kurtosis() const {
  if (n_ < 2) return 0.0;
  const long double m = s1_ / n_;
  const long double m2 = s2_ / n_ - m * m;
  const long double m4 = s4_ / n_ - 4 * m * s3_ / n_ + 6 * m * m * s2_ / n_ - 3 * m * m * m * m;
  return m2 > 0 ? static_cast<double>(m4 / (m2 * m2) - 3) : 0.0;
}

double MomentAccumulator::standard_error() const {
  return n_ >= 2 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
}

CovarianceAccumulator::CovarianceAccumulator(std::size_t width)
    : width_(width), s_(width, 0.0L), ss_(width * (width + 1) / 2, 0.0L) {}

void CovarianceAccumulator::add(const std::vector<double>& x) {
  ++n_;
  std::size_t k = 0;
  for (std::size_t i = 0; i < width_; ++i) {
    s_[i] += x[i];
    for (std::size_t j = i; j < width_; ++j) ss_[k++] += static_cast<long double>(x[i]) * x[j];
  }
}

void CovarianceAccumulator::merge(const CovarianceAccumulator& o) {
  if (width_ == 0 && n_ == 0) {
    *this = o;
    return;
  }
  n_ += o.n_;
  for (std::size_t i = 0; i < s_.size(); ++i) s_[i] += o.s_[i];
  for (std::size_t i = 0; i < ss_.size(); ++i) ss_[i] += o.ss_[i];
}

double CovarianceAccumulator::mean(std::size_t i) const { return n_ ? static_cast<double>(s_[i] / n_) : 0.0; }

double CovarianceAccumulator::cov(std::size_t i, std::size_t j) const {
  if (n_ == 0) return 0.0;
  if (i > j) std::swap(i, j);
  const std::size_t k = i * width_ - i * (i - 1) / 2 + (j - i);
  const long double mi = s_[i] / n_, mj = s_[j] / n_;
  return static_cast<double>(ss_[k] / n_ - mi * mj);
}

bool CltDiagnostics::passes() const {
  if (degenerate || n == 0) return false;
  return std::abs(skewness) < 0.1 && std::abs(excess_kurtosis) < 0.2 && ks < 1.5 / std::sqrt(static_cast<double>(n));
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double sample_mean(const std::vector<double>& x) {
  long double s = 0;
  for (double v : x) s += v;
  return x.empty() ? 0.0 : static_cast<double>(s / x.size());
}

double sample_variance(const std::vector<double>& x) {
  if (x.size() < 2) return 0.0;
  const long double m = sample_mean(x);
  long double s = 0;
  for (double v : x) s += (v - m) * (v - m);
  return static_cast<double>(s / (x.size() - 1));
}

std::vector<double> standardize(const std::vector<double>& x) {
  const double m = sample_mean(x);
  const double sd = std::sqrt(sample_variance(x));
  std::vector<double> z(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) z[i] = sd > 0 ? (x[i] - m) / sd : 0.0;
  return z;
}

CltDiagnostics clt_diagnostics(const std::vector<double>& samples) {
  if (samples.size() < 100) throw InsufficientSamples("clt_diagnostics needs at least 100 samples");
  CltDiagnostics d;
  d.n = samples.size();
  const long double m = sample_mean(samples);
  long double c2 = 0, c3 = 0, c4 = 0;
  for (double v : samples) {
    const long double z = v - m;
    c2 += z * z;
    c3 += z * z * z;
    c4 += z * z * z * z;
  }
  const long double N = static_cast<long double>(samples.size());
  c2 /= N;
  c3 /= N;
  c4 /= N;
  d.mean = static_cast<double>(m);
  d.variance = static_cast<double>(c2 * N / (N - 1));
  if (!(c2 > 0)) {
    d.degenerate = true;
    return d;
  }
  d.skewness = static_cast<double>(c3 / std::pow(c2, 1.5L));
  d.excess_kurtosis = static_cast<double>(c4 / (c2 * c2) - 3);
  std::vector<double> z = samples;
  std::sort(z.begin(), z.end());
  const double sd = std::sqrt(d.variance);
  double ks = 0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double f = normal_cdf((z[i] - d.mean) / sd);
    ks = std::max({ks, f - static_cast<double>(i) / z.size(), static_cast<double>(i + 1) / z.size() - f});
  }
  d.ks = ks;
  return d;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw InsufficientSamples("ks_two_sample needs nonempty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
  }
  return d;
}

double chi_square_sf(double x, int dof) {
  if (dof <= 0) return 1.0;
  if (x <= 0) return 1.0;
  return boost::math::gamma_q(dof / 2.0, x / 2.0);
}

ChiSquare chi_square_gof(const std::vector<std::int64_t>& observed, const std::vector<double>& probs) {
  if (observed.size() != probs.size()) throw DomainError("chi_square_gof: size mismatch");
  std::int64_t total = 0;
  for (auto o : observed) total += o;
  ChiSquare c;
  int cells = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double e = probs[i] * static_cast<double>(total);
    if (e <= 0) {
      if (observed[i] > 0) {
        c.statistic = INFINITY;
        c.p_value = 0;
        return c;
      }
      continue;
    }
    c.statistic += (observed[i] - e) * (observed[i] - e) / e;
    ++cells;
  }
  c.dof = cells - 1;
  c.p_value = chi_square_sf(c.statistic, c.dof);
  return c;
}

ChiSquare chi_square_two_sample(const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b) {
  if (a.size() != b.size()) throw DomainError("chi_square_two_sample: size mismatch");
  double na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    na += static_cast<double>(a[i]);
    nb += static_cast<double>(b[i]);
  }
  const double ka = std::sqrt(nb / na), kb = std::sqrt(na / nb);
  ChiSquare c;
  int cells = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double s = static_cast<double>(a[i] + b[i]);
    if (s == 0) continue;
    const double diff = ka * static_cast<double>(a[i]) - kb * static_cast<double>(b[i]);
    c.statistic += diff * diff / s;
    ++cells;
  }
  c.dof = cells - 1;
  c.p_value = chi_square_sf(c.statistic, c.dof);
  return c;
}

double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double mx = sample_mean(x), my = sample_mean(y);
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace mallows

#include "mallows/coupling.hpp"

#include <algorithm>
#include <cmath>

#include "mallows/errors.hpp"
#include "mallows/samplers.hpp"

namespace mallows {

int phi_shift(const Permutation& sigma, const std::vector<int>& H, int x) {
  const int k = sigma.size();
  if (x < 1 || x > k + 1) throw DomainError("phi_shift: x outside [k+1]");
  int y = x;
  for (int h : H) {
    if (h < 1 || h > k) throw IndexOutOfRange("phi_shift: error index outside [k]");
    y += x < k - sigma(h) + 2;
  }
  return y;
}

double total_variation(const FinitePmf& p1, const FinitePmf& p2) {
  const int lo = std::min(p1.offset, p2.offset);
  const int hi = std::max(p1.offset + static_cast<int>(p1.mass.size()), p2.offset + static_cast<int>(p2.mass.size()));
  auto at = [](const FinitePmf& p, int y) {
    int i = y - p.offset;
    return (i >= 0 && i < static_cast<int>(p.mass.size())) ? p.mass[static_cast<std::size_t>(i)] : 0.0;
  };
  double s = 0.0;
  for (int y = lo; y < hi; ++y) s += std::abs(at(p1, y) - at(p2, y));
  return 0.5 * s;
}

namespace {

// Inverse CDF over weights w (need not be normalized); total is their sum.
std::size_t draw_index(const std::vector<double>& w, double total, double u) {
  double target = u * total;
  double acc = 0.0;
  std::size_t last = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] <= 0.0) continue;
    last = i;
    acc += w[i];
    if (target < acc) return i;
  }
  return last;
}

}  // namespace

std::pair<int, int> maximal_coupling_sample(const FinitePmf& p1, const FinitePmf& p2, RngStream& rng) {
  const int lo = std::min(p1.offset, p2.offset);
  const int hi = std::max(p1.offset + static_cast<int>(p1.mass.size()), p2.offset + static_cast<int>(p2.mass.size()));
  const std::size_t m = static_cast<std::size_t>(hi - lo);
  std::vector<double> a(m, 0.0), b(m, 0.0), overlap(m), r1(m), r2(m);
  for (std::size_t i = 0; i < p1.mass.size(); ++i) a[static_cast<std::size_t>(p1.offset - lo) + i] = p1.mass[i];
  for (std::size_t i = 0; i < p2.mass.size(); ++i) b[static_cast<std::size_t>(p2.offset - lo) + i] = p2.mass[i];
  double alpha = 0.0, res1 = 0.0, res2 = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    overlap[i] = std::min(a[i], b[i]);
    r1[i] = a[i] - overlap[i];
    r2[i] = b[i] - overlap[i];
    alpha += overlap[i];
    res1 += r1[i];
    res2 += r2[i];
  }
  const double u = rng.uniform();
  if (u < alpha || res1 <= 0.0 || res2 <= 0.0) {
    int y = lo + static_cast<int>(draw_index(overlap, alpha, u < alpha ? u / alpha : rng.uniform()));
    return {y, y};
  }
  int y1 = lo + static_cast<int>(draw_index(r1, res1, rng.uniform()));
  int y2 = lo + static_cast<int>(draw_index(r2, res2, rng.uniform()));
  return {y1, y2};
}

std::vector<int> complement_indices(int n, const std::vector<int>& H) {
  std::vector<char> in(static_cast<std::size_t>(n) + 1, 0);
  for (int h : H) in[static_cast<std::size_t>(h)] = 1;
  std::vector<int> out;
  for (int i = 1; i <= n; ++i)
    if (!in[static_cast<std::size_t>(i)]) out.push_back(i);
  return out;
}

namespace {

// phi over x = 1..k+1 for the current prefix values (values of size k, 1-based content).
std::vector<int> phi_table(const std::vector<int>& values, const std::vector<int>& H) {
  const int k = static_cast<int>(values.size());
  std::vector<int> shift(static_cast<std::size_t>(k) + 3, 0);
  for (int h : H) {
    int threshold = k - values[static_cast<std::size_t>(h - 1)] + 2;  // adds 1 for x < threshold
    shift[static_cast<std::size_t>(std::clamp(threshold, 1, k + 2))] += 1;
  }
  std::vector<int> phi(static_cast<std::size_t>(k) + 2, 0);
  int above = 0;  // number of thresholds strictly greater than x
  for (int x = k + 1; x >= 1; --x) {
    above += shift[static_cast<std::size_t>(x + 1)];
    phi[static_cast<std::size_t>(x)] = x + above;
  }
  return phi;
}

void insert_last(std::vector<int>& values, int v) {
  for (int& x : values)
    if (x >= v) ++x;
  values.push_back(v);
}

}  // namespace

CoupledPair sample_coupled(int n, double q, RngStream& rng) {
  if (n < 1) throw DomainError("n must be positive");
  validate_q(q);
  CoupledPair out;
  out.outside_regime = n * (1.0 - q) > 1.0;
  std::vector<int> tv{1}, uv{1};
  std::vector<int> H;
  out.step_tv.push_back(0.0);
  const double lq = q < 1.0 ? std::log(q) : 0.0;

  std::vector<double> pl, p1, p2;
  for (int k = 1; k < n; ++k) {
    const int m = k + 1;
    const int lo = 1 + static_cast<int>(H.size());
    const auto phi_t = phi_table(tv, H);
    const auto phi_u = phi_table(uv, H);

    pl.assign(static_cast<std::size_t>(m) + 1, 0.0);
    if (q == 1.0) {
      for (int x = 1; x <= m; ++x) pl[static_cast<std::size_t>(x)] = 1.0 / m;
    } else {
      const double norm = -std::expm1(lq) / -std::expm1(m * lq);
      for (int x = 1; x <= m; ++x) pl[static_cast<std::size_t>(x)] = std::exp((x - 1) * lq) * norm;
    }
    FinitePmf f1{lo, std::vector<double>(static_cast<std::size_t>(m - lo + 1), 0.0)};
    FinitePmf f2{lo, std::vector<double>(static_cast<std::size_t>(m - lo + 1), 0.0)};
    for (int x = 1; x <= m; ++x) {
      f1.mass[static_cast<std::size_t>(phi_t[static_cast<std::size_t>(x)] - lo)] += pl[static_cast<std::size_t>(x)];
      f2.mass[static_cast<std::size_t>(phi_u[static_cast<std::size_t>(x)] - lo)] += 1.0 / m;
    }
    out.step_tv.push_back(total_variation(f1, f2));
    auto [y1, y2] = maximal_coupling_sample(f1, f2, rng);

    // fibers are contiguous because phi is nondecreasing
    std::vector<double> fiber;
    int first = 0;
    for (int x = 1; x <= m; ++x) {
      if (phi_t[static_cast<std::size_t>(x)] != y1) continue;
      if (fiber.empty()) first = x;
      fiber.push_back(pl[static_cast<std::size_t>(x)]);
    }
    double fiber_mass = 0.0;
    for (double w : fiber) fiber_mass += w;
    const int L = first + static_cast<int>(draw_index(fiber, fiber_mass, rng.uniform()));

    int ufirst = 0, ucount = 0;
    for (int x = 1; x <= m; ++x) {
      if (phi_u[static_cast<std::size_t>(x)] != y2) continue;
      if (ucount == 0) ufirst = x;
      ++ucount;
    }
    const int U = ufirst + static_cast<int>(rng.uniform_int(ucount)) - 1;

    if (y1 != y2) H.push_back(m);
    insert_last(tv, m + 1 - L);
    insert_last(uv, m + 1 - U);
  }
  out.tau = Permutation::trusted(std::move(tv));
  out.u = Permutation::trusted(std::move(uv));
  out.errors = std::move(H);
  return out;
}

}  // namespace mallows

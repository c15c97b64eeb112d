#include <doctest.h>

#include <functional>
#include <map>

#include "../oracles.hpp"
#include "mallows/errors.hpp"
#include "mallows/samplers.hpp"
#include "mallows/stats.hpp"

using namespace mallows;

namespace {

using Sampler = std::function<Permutation(RngStream&)>;

// Chi-square p-value of a sampler against the exact Mallows pmf on S_n.
double law_p_value(const Sampler& draw, int n, double q, std::int64_t reps, std::uint64_t seed) {
  const auto exact = oracle::exact_pmf(n, q);
  std::map<std::vector<int>, std::int64_t> counts;
  RngStream rng(seed, 0);
  for (std::int64_t i = 0; i < reps; ++i) ++counts[draw(rng).values()];
  std::vector<std::int64_t> obs;
  std::vector<double> probs;
  for (const auto& [v, p] : exact) {
    obs.push_back(counts[v]);
    probs.push_back(p);
  }
  REQUIRE(counts.size() <= exact.size());
  return chi_square_gof(obs, probs).p_value;
}

}  // namespace

TEST_CASE("truncated geometric pmf") {
  CHECK(tgeom_pmf(3, 0.5, 1) == doctest::Approx(4.0 / 7));
  CHECK(tgeom_pmf(3, 0.5, 2) == doctest::Approx(2.0 / 7));
  CHECK(tgeom_pmf(3, 0.5, 3) == doctest::Approx(1.0 / 7));
  CHECK(tgeom_pmf(1, 0.3, 1) == doctest::Approx(1.0));
  for (int j = 1; j <= 4; ++j) CHECK(tgeom_pmf(4, 1.0, j) == doctest::Approx(0.25));
  CHECK_THROWS_AS(tgeom_pmf(3, 0.5, 4), DomainError);
  CHECK_THROWS_AS(tgeom_pmf(3, 0.5, 0), DomainError);
  for (double q : {0.1, 0.9, 1 - 1e-6}) {
    double s = 0;
    for (int j = 1; j <= 50; ++j) s += tgeom_pmf(50, q, j);
    CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("truncated geometric sampling") {
  RngStream rng(21, 0);
  for (int i = 0; i < 1000; ++i) CHECK(tgeom_sample(1, 0.5, rng) == 1);

  const int N = 1'000'000;
  int ones = 0;
  for (int i = 0; i < N; ++i) ones += tgeom_sample(2, 0.5, rng) == 1;
  const double p = 2.0 / 3, se = std::sqrt(p * (1 - p) / N);
  CHECK(std::abs(ones / double(N) - p) < 3 * se);

  std::vector<std::int64_t> c(5, 0);
  for (int i = 0; i < 100000; ++i) ++c[static_cast<std::size_t>(tgeom_sample(5, 1.0, rng) - 1)];
  CHECK(chi_square_gof(c, std::vector<double>(5, 0.2)).p_value > 1e-3);

  // close to q = 1 the law must stay exact
  const int k = 2000;
  for (double q : {1 - 1e-6, 1 - 1e-3}) {
    std::vector<double> probs(static_cast<std::size_t>(k));
    double mean = 0;
    for (int j = 1; j <= k; ++j) {
      probs[static_cast<std::size_t>(j - 1)] = tgeom_pmf(k, q, j);
      mean += j * probs[static_cast<std::size_t>(j - 1)];
    }
    MomentAccumulator acc;
    for (int i = 0; i < 200000; ++i) {
      const int x = tgeom_sample(k, q, rng);
      REQUIRE(x >= 1);
      REQUIRE(x <= k);
      acc.add(x);
    }
    CHECK(std::abs(acc.mean() - mean) < 4 * acc.standard_error());
  }
}

TEST_CASE("geometric sampling") {
  RngStream rng(22, 0);
  MomentAccumulator acc;
  int above3 = 0;
  const int N = 400000;
  for (int i = 0; i < N; ++i) {
    const auto x = geom_sample(0.6, rng);
    REQUIRE(x >= 1);
    acc.add(static_cast<long double>(x));
    above3 += x > 3;
  }
  CHECK(std::abs(acc.mean() - 1 / 0.4) < 4 * acc.standard_error());
  const double p = 0.6 * 0.6 * 0.6;
  CHECK(std::abs(above3 / double(N) - p) < 4 * std::sqrt(p * (1 - p) / N));
}

TEST_CASE("mallows pmf normalizes") {
  for (double q : {0.3, 1.0}) {
    double s = 0;
    for (const auto& v : oracle::all_perms(5)) s += mallows_pmf(Permutation::from_one_line(v), q);
    CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
  }
  const auto exact = oracle::exact_pmf(4, 0.5);
  for (const auto& [v, p] : exact) CHECK(mallows_pmf(Permutation::from_one_line(v), 0.5) == doctest::Approx(p).epsilon(1e-12));
}

TEST_CASE("n=2 sampler frequency") {
  RngStream rng(23, 0);
  const int N = 300000;
  int inverted = 0;
  for (int i = 0; i < N; ++i) inverted += sample_mallows({2, 0.5}, Side::Left, rng)(1) == 2;
  const double p = 1.0 / 3;
  CHECK(std::abs(inverted / double(N) - p) < 4 * std::sqrt(p * (1 - p) / N));
}

TEST_CASE("exact law of every sampler on S_5") {
  for (double q : {0.3, 0.5, 0.8}) {
    const MallowsParams par{5, q};
    CAPTURE(q);
    CHECK(law_p_value([&](RngStream& r) { return sample_mallows(par, Side::Left, r); }, 5, q, 1'000'000, 31) > 1e-3);
    CHECK(law_p_value([&](RngStream& r) { return sample_mallows(par, Side::Right, r); }, 5, q, 1'000'000, 32) > 1e-3);
    CHECK(law_p_value([&](RngStream& r) { return sample_infinite_prefix(5, q, r); }, 5, q, 1'000'000, 33) > 1e-3);
    CHECK(law_p_value([&](RngStream& r) { return reassemble(sample_block_sum(5, q, r)); }, 5, q, 1'000'000, 34) > 1e-3);
  }
  CHECK(law_p_value([](RngStream& r) { return sample_mallows({4, 1.0}, Side::Left, r); }, 4, 1.0, 200000, 35) > 1e-3);
  CHECK(law_p_value([](RngStream& r) { return sample_uniform(4, r); }, 4, 1.0, 200000, 36) > 1e-3);
  CHECK(law_p_value([](RngStream& r) { return sample_mallows({3, 0.7}, Side::Right, r); }, 3, 0.7, 200000, 37) > 1e-3);
}

TEST_CASE("left and right samplers agree on S_4") {
  std::map<std::vector<int>, int> index;
  int next = 0;
  for (const auto& v : oracle::all_perms(4)) index[v] = next++;
  std::vector<std::int64_t> a(24, 0), b(24, 0);
  RngStream ra(41, 0), rb(41, 1);
  for (int i = 0; i < 200000; ++i) {
    ++a[static_cast<std::size_t>(index[sample_mallows({4, 0.6}, Side::Left, ra).values()])];
    ++b[static_cast<std::size_t>(index[sample_mallows({4, 0.6}, Side::Right, rb).values()])];
  }
  CHECK(chi_square_two_sample(a, b).p_value > 1e-3);
}

TEST_CASE("uniform sampler and Mahonian counts") {
  RngStream rng(42, 0);
  CHECK(sample_uniform(1, rng) == Permutation::identity(1));
  std::vector<std::int64_t> c(4, 0);
  for (int i = 0; i < 120000; ++i) ++c[static_cast<std::size_t>(inversion_number(sample_uniform(3, rng)))];
  CHECK(chi_square_gof(c, {1.0 / 6, 2.0 / 6, 2.0 / 6, 1.0 / 6}).p_value > 1e-3);
}

TEST_CASE("inv equals the sum of left draws") {
  RngStream rng(43, 0);
  for (int rep = 0; rep < 200; ++rep) {
    const auto l = sample_left_inversions(300, 0.97, rng);
    std::int64_t s = 0;
    for (int x : l) s += x;  // sum of (L_k - 1)
    CHECK(inversion_number(from_left_inversions(l)) == s);
  }
}

TEST_CASE("displacement tail") {
  const int n = 1000, reps = 3000;
  const double q = 0.9;
  const std::vector<int> positions{1, 10, 250, 500, 999, 1000};
  const std::vector<int> ts{1, 3, 8, 15, 30, 60};
  std::vector<std::vector<int>> hits(positions.size(), std::vector<int>(ts.size(), 0));
  for (int rep = 0; rep < reps; ++rep) {
    RngStream rng(44, static_cast<std::uint64_t>(rep));
    const auto p = sample_mallows({n, q}, Side::Left, rng);
    for (std::size_t a = 0; a < positions.size(); ++a) {
      const int disp = std::abs(p(positions[a]) - positions[a]);
      for (std::size_t b = 0; b < ts.size(); ++b) hits[a][b] += disp >= ts[b];
    }
  }
  for (std::size_t a = 0; a < positions.size(); ++a)
    for (std::size_t b = 0; b < ts.size(); ++b) {
      const double bound = std::min(1.0, 2 * std::pow(q, ts[b]));
      const double margin = 3 * std::sqrt(bound * (1 - bound) / reps) + 1.0 / reps;
      CAPTURE(positions[a]);
      CAPTURE(ts[b]);
      CHECK(hits[a][b] / double(reps) <= bound + margin);
    }
}

TEST_CASE("determinism of streams") {
  RngStream a(99, 7), b(99, 7), c(99, 8);
  const auto pa = sample_mallows({50, 0.8}, Side::Right, a);
  CHECK(pa == sample_mallows({50, 0.8}, Side::Right, b));
  CHECK_FALSE(pa == sample_mallows({50, 0.8}, Side::Right, c));
}

TEST_CASE("infinite prefix and blocks") {
  RngStream rng(45, 0);
  CHECK(sample_infinite_prefix(1, 0.5, rng) == Permutation::identity(1));
  CHECK(sample_infinite_prefix(20, 1e-12, rng) == Permutation::identity(20));
  CHECK_THROWS_AS(sample_infinite_prefix(3, 1.0, rng), DomainError);
  CHECK_THROWS_AS(sample_mallows({3, 0.0}, Side::Left, rng), DomainError);
  CHECK_THROWS_AS(sample_mallows({3, 1.5}, Side::Left, rng), DomainError);

  CHECK(first_block_from_counts({0, 3, 1}) == Permutation::identity(1));
  CHECK(first_block_from_counts({1, 0, 0}) == Permutation::parse("21"));
  CHECK(first_block_from_counts({2, 0, 0, 0}) == Permutation::parse("312"));
  CHECK_THROWS_AS(first_block_from_counts({2, 0}), DomainError);

  const int N = 200000;
  int singles = 0;
  for (int i = 0; i < N; ++i) {
    const auto b = sample_block(0.5, rng);
    singles += b.size() == 1;
    if (i < 2000) REQUIRE(is_indecomposable(b));
  }
  CHECK(std::abs(singles / double(N) - 0.5) < 3 * std::sqrt(0.25 / N));
}

TEST_CASE("block sum structure") {
  RngStream rng(46, 0);
  const auto tiny = sample_block_sum(30, 1e-12, rng);
  CHECK(tiny.K_n == 30);
  CHECK_FALSE(tiny.remainder.has_value());
  for (int rep = 0; rep < 300; ++rep) {
    const int n = 1 + rep;
    const auto s = sample_block_sum(n, 0.7, rng);
    int total = s.remainder ? s.remainder->size() : 0;
    for (const auto& b : s.blocks) {
      REQUIRE(is_indecomposable(b));
      total += b.size();
    }
    CHECK(total == n);
    CHECK(s.K_n == static_cast<int>(s.blocks.size()));
    if (s.remainder) CHECK(s.remainder->size() >= 1);
  }
}

TEST_CASE("renewal rate of complete blocks") {
  const int n = 100000, reps = 200;
  MomentAccumulator kn;
  for (int rep = 0; rep < reps; ++rep) {
    RngStream rng(47, static_cast<std::uint64_t>(rep));
    kn.add(sample_block_sum(n, 0.5, rng).K_n / static_cast<long double>(n));
  }
  MomentAccumulator size;
  RngStream rng(48, 0);
  for (int i = 0; i < 1'000'000; ++i) size.add(sample_block(0.5, rng).size());
  const double target = 1 / size.mean();
  const double target_se = size.standard_error() / (size.mean() * size.mean());
  CHECK(std::abs(kn.mean() - target) < 3 * std::hypot(kn.standard_error(), target_se));
}

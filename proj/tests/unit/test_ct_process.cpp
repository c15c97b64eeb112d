#include <doctest.h>

#include <map>

#include "../oracles.hpp"
#include "mallows/ct_process.hpp"
#include "mallows/errors.hpp"
#include "mallows/samplers.hpp"
#include "mallows/stats.hpp"

using namespace mallows;

TEST_CASE("birth path basics") {
  RngStream rng(71, 0);
  for (int i = 0; i < 200; ++i) {
    const auto p = sample_birth_path(0.9, rng);
    REQUIRE(eval_state(p, 0.0) == 1);
    REQUIRE(std::is_sorted(p.jump_times.begin(), p.jump_times.end()));
    for (double t : p.jump_times) REQUIRE(t < 0.9);
    if (!p.jump_times.empty()) {
      const double t1 = p.jump_times.front();
      CHECK(eval_state(p, t1) == 2);
      CHECK(eval_state(p, std::nextafter(t1, 0.0)) == 1);
    }
  }
  BirthPath p = sample_birth_path(0.5, rng);
  CHECK_THROWS_AS(eval_state(p, 0.51), OutOfHorizon);
  CHECK_THROWS_AS(eval_state(p, -0.1), OutOfHorizon);
  CHECK_THROWS_AS(sample_birth_path(1.0, rng), DomainError);
}

TEST_CASE("birth path marginals and survival") {
  RngStream rng(72, 0);
  const int N = 300000;
  std::vector<std::int64_t> hist(30, 0);
  std::int64_t survive = 0;
  for (int i = 0; i < N; ++i) {
    const auto p = sample_birth_path(0.7, rng);
    const int s = eval_state(p, 0.7);
    ++hist[static_cast<std::size_t>(std::min(s, 30) - 1)];
    survive += eval_state(p, 0.4) == 1;
  }
  std::vector<double> probs(30);
  double tail = 1.0;
  for (int j = 1; j < 30; ++j) {
    probs[static_cast<std::size_t>(j - 1)] = std::pow(0.7, j - 1) * 0.3;
    tail -= probs[static_cast<std::size_t>(j - 1)];
  }
  probs[29] = tail;
  CHECK(chi_square_gof(hist, probs).p_value > 1e-3);
  CHECK(std::abs(survive / double(N) - 0.6) < 4 * std::sqrt(0.24 / N));
}

TEST_CASE("extending a path keeps the marginal law") {
  RngStream rng(73, 0);
  MomentAccumulator acc;
  for (int i = 0; i < 200000; ++i) {
    auto p = sample_birth_path(0.4, rng);
    const int before = eval_state(p, 0.4);
    extend_birth_path(p, 0.8, rng);
    REQUIRE(eval_state(p, 0.4) == before);
    acc.add(eval_state(p, 0.8));
  }
  CHECK(std::abs(acc.mean() - 1 / 0.2) < 4 * acc.standard_error());
  CHECK(acc.variance() == doctest::Approx(0.8 / 0.04).epsilon(0.03));
}

TEST_CASE("transition pmf") {
  for (int j = 1; j <= 8; ++j) CHECK(transition_pmf(1, 0.0, 0.6, j) == doctest::Approx(std::pow(0.6, j - 1) * 0.4));
  CHECK(transition_pmf(3, 0.4, 0.4, 3) == 1.0);
  CHECK(transition_pmf(3, 0.4, 0.4, 4) == 0.0);
  CHECK_THROWS_AS(transition_pmf(3, 0.5, 0.4, 3), DomainError);
  CHECK_THROWS_AS(transition_pmf(3, 0.1, 0.4, 2), DomainError);
  for (int k : {1, 2, 5}) {
    double s = 0;
    for (int j = k; j < k + 3000; ++j) s += transition_pmf(k, 0.2, 0.7, j);
    CHECK(s == doctest::Approx(1.0).epsilon(1e-10));
  }
  // Chapman-Kolmogorov through an intermediate time
  for (int k : {1, 3})
    for (int m = k; m < k + 12; ++m) {
      double s = 0;
      for (int j = k; j <= m; ++j) s += transition_pmf(k, 0.1, 0.35, j) * transition_pmf(j, 0.35, 0.6, m);
      CHECK(std::abs(s - transition_pmf(k, 0.1, 0.6, m)) < 1e-10);
    }
}

TEST_CASE("conditional transitions of sampled paths") {
  RngStream rng(74, 0);
  std::vector<std::int64_t> hist(25, 0);
  for (int i = 0; i < 600000; ++i) {
    const auto p = sample_birth_path(0.6, rng);
    if (eval_state(p, 0.3) != 2) continue;
    const int j = eval_state(p, 0.6);
    ++hist[static_cast<std::size_t>(std::min(j, 26) - 2)];
  }
  std::vector<double> probs(25);
  double tail = 1;
  for (int j = 2; j < 26; ++j) {
    probs[static_cast<std::size_t>(j - 2)] = transition_pmf(2, 0.3, 0.6, j);
    tail -= probs[static_cast<std::size_t>(j - 2)];
  }
  probs[24] = tail;
  CHECK(chi_square_gof(hist, probs).p_value > 1e-3);
}

TEST_CASE("increment moments") {
  CHECK(increment_moments(0.3, 0.3) == std::pair<double, double>{0.0, 0.0});
  CHECK(increment_moments(0.0, 0.6).first == doctest::Approx(0.6 / 0.4));
  CHECK(increment_moments(0.0, 0.6).second == doctest::Approx(0.6 / 0.16));
  CHECK(increment_moments(0.25, 0.5).first == doctest::Approx(2.0 / 3));
  RngStream rng(75, 0);
  MomentAccumulator acc;
  for (int i = 0; i < 1'000'000; ++i) {
    const auto p = sample_birth_path(0.5, rng);
    acc.add(eval_state(p, 0.5) - eval_state(p, 0.25));
  }
  const auto [m, v] = increment_moments(0.25, 0.5);
  CHECK(std::abs(acc.mean() - m) < 4 * acc.standard_error());
  // SE of the sample variance from the fourth central moment
  const double m4 = (acc.excess_kurtosis() + 3) * acc.variance() * acc.variance();
  const double var_se = std::sqrt((m4 - acc.variance() * acc.variance()) / acc.count());
  CHECK(std::abs(acc.variance() - v) < 4 * var_se);
}

TEST_CASE("prefix permutations follow Mallows(n,t)") {
  RngStream rng(76, 0);
  const auto pre = sample_process_prefix(40, 0.9, rng);
  CHECK(tau_nt(pre, 40, 0.0) == Permutation::identity(40));
  CHECK_THROWS_AS(tau_nt(pre, 40, 0.95), OutOfHorizon);
  CHECK_THROWS(tau_nt(pre, 41, 0.5));

  const std::vector<double> ts{0.2, 0.5, 0.8};
  std::vector<std::map<std::vector<int>, std::int64_t>> counts(ts.size());
  const int N = 150000;
  for (int i = 0; i < N; ++i) {
    const auto p = sample_process_prefix(3, 0.8, rng);
    for (std::size_t g = 0; g < ts.size(); ++g) ++counts[g][tau_nt(p, 3, ts[g]).values()];
  }
  for (std::size_t g = 0; g < ts.size(); ++g) {
    std::vector<std::int64_t> obs;
    std::vector<double> probs;
    for (const auto& [v, p] : oracle::exact_pmf(3, ts[g])) {
      obs.push_back(counts[g][v]);
      probs.push_back(p);
    }
    CAPTURE(ts[g]);
    CHECK(chi_square_gof(obs, probs).p_value > 1e-3);
  }
}

TEST_CASE("cutting q-blocks") {
  ProcessPrefix flat;
  flat.horizon = 0.5;
  flat.paths.assign(6, BirthPath{{}, 0.5});
  const auto fb = cut_q_blocks(flat, 0.5);
  CHECK(fb.blocks.size() == 6);
  CHECK(fb.remainder == 0);

  RngStream rng(77, 0);
  for (int rep = 0; rep < 100; ++rep) {
    const auto pre = sample_process_prefix(60, 0.7, rng);
    const auto bundle = cut_q_blocks(pre, 0.5);
    std::vector<Permutation> parts;
    int used = 0;
    for (const auto& b : bundle.blocks) {
      const auto at_q = b.at(0.5);
      REQUIRE(is_indecomposable(at_q));
      parts.push_back(at_q);
      used += b.size();
      REQUIRE(b.at(0.2).size() == b.size());
    }
    REQUIRE(used + bundle.remainder == 60);
    if (!parts.empty()) {
      const auto head = direct_sum(parts);
      const auto tau = tau_nt(pre, 60, 0.5);
      std::vector<int> idx(static_cast<std::size_t>(used));
      for (int i = 0; i < used; ++i) idx[static_cast<std::size_t>(i)] = i + 1;
      CHECK(pattern_at(tau, idx) == head);
      // the same cut holds at every earlier time
      std::vector<Permutation> early;
      for (const auto& b : bundle.blocks) early.push_back(b.at(0.3));
      CHECK(pattern_at(tau_nt(pre, 60, 0.3), idx) == direct_sum(early));
    }
  }
}

TEST_CASE("block size law from cutting matches the block sampler") {
  RngStream ra(78, 0), rb(78, 1);
  const int cells = 12;
  std::vector<std::int64_t> a(cells, 0), b(cells, 0);
  int have = 0;
  while (have < 50000) {
    const auto bundle = cut_q_blocks(sample_process_prefix(500, 0.5, ra), 0.5);
    for (const auto& blk : bundle.blocks) {
      if (have == 50000) break;
      ++a[static_cast<std::size_t>(std::min(blk.size(), cells) - 1)];
      ++have;
    }
  }
  for (int i = 0; i < 50000; ++i) ++b[static_cast<std::size_t>(std::min(sample_block(0.5, rb).size(), cells) - 1)];
  CHECK(chi_square_two_sample(a, b).p_value > 1e-3);

  std::vector<std::int64_t> c(cells, 0);
  for (int i = 0; i < 50000; ++i) ++c[static_cast<std::size_t>(std::min(sample_q_block_process(0.5, ra).size(), cells) - 1)];
  CHECK(chi_square_two_sample(c, b).p_value > 1e-3);
}

TEST_CASE("block-level inversion increments") {
  const double q = 0.6, s = 0.3;
  const std::vector<double> hs{0.0125, 0.025, 0.05, 0.1, 0.2, 0.3};
  std::vector<MomentAccumulator> inc(hs.size()), sq(hs.size());
  MomentAccumulator size;
  RngStream rng(79, 0);
  const int N = 200000;
  for (int i = 0; i < N; ++i) {
    const auto blk = sample_q_block_process(q, rng);
    size.add(blk.size());
    const auto inv_s = inversion_number(blk.at(s));
    for (std::size_t h = 0; h < hs.size(); ++h) {
      const auto d = static_cast<long double>(inversion_number(blk.at(s + hs[h])) - inv_s);
      inc[h].add(d);
      sq[h].add(d * d);
    }
  }
  std::vector<double> lx, ly;
  for (std::size_t h = 0; h < hs.size(); ++h) {
    const double t = s + hs[h];
    const double factor = (t - s) / ((1 - s) * (1 - t));
    // the SE combines the increment and the block-size fluctuations
    const double se = std::hypot(inc[h].standard_error(), factor * size.standard_error());
    CAPTURE(t);
    CHECK(std::abs(inc[h].mean() - size.mean() * factor) < 4 * se);
    lx.push_back(std::log(hs[h]));
    ly.push_back(std::log(sq[h].mean()));
  }
  // second moment decays at least linearly as the gap shrinks
  std::vector<double> sx(lx.begin(), lx.begin() + 4), sy(ly.begin(), ly.begin() + 4);
  CHECK(ols_slope(sx, sy) > 0.8);
}

TEST_CASE("single jumps act as value swaps") {
  RngStream rng(80, 0);
  int checked = 0;
  while (checked < 2000) {
    const auto blk = sample_q_block_process(0.8, rng);
    std::vector<double> jumps;
    for (const auto& p : blk.paths) jumps.insert(jumps.end(), p.jump_times.begin(), p.jump_times.end());
    std::sort(jumps.begin(), jumps.end());
    for (std::size_t k = 0; k < jumps.size(); ++k) {
      const auto a = blk.at(k == 0 ? 0.0 : jumps[k - 1]);
      const auto b = blk.at(jumps[k]);
      std::vector<int> moved;
      for (int i = 1; i <= a.size(); ++i)
        if (a(i) != b(i)) moved.push_back(i);
      REQUIRE(moved.size() == 2);
      REQUIRE(a(moved[0]) == b(moved[1]));
      REQUIRE(a(moved[1]) == b(moved[0]));
      REQUIRE(inversion_number(b) == inversion_number(a) + 1);
      ++checked;
    }
  }
}

TEST_CASE("pattern counts along the process") {
  const auto pi21 = Permutation::parse("21");
  std::vector<double> grid;
  for (int i = 0; i <= 8; ++i) grid.push_back(0.1 * i);
  std::vector<MomentAccumulator> ratio(grid.size());
  for (int rep = 0; rep < 20; ++rep) {
    RngStream rng(81, static_cast<std::uint64_t>(rep));
    const auto pre = sample_process_prefix(500, 0.8, rng);
    const auto series = occ_process(pi21, 500, grid, pre);
    REQUIRE(series.front().occ == 0);
    for (std::size_t g = 0; g < grid.size(); ++g) ratio[g].add(series[g].occ.convert_to<long double>() / 500);
  }
  for (std::size_t g = 1; g + 1 < grid.size(); ++g) {
    const double t = grid[g];
    CHECK(ratio[g].mean() == doctest::Approx(t / (1 - t)).epsilon(0.1));
  }

  RngStream rng(82, 0);
  const auto pre = sample_process_prefix(30, 0.9, rng);
  const auto pi = Permutation::parse("231");
  const std::vector<double> g2{0.1, 0.5, 0.9};
  const std::vector<double> e{0.5, 1.0, 2.0};
  const auto pts = occ_process(pi, 30, g2, pre, e);
  for (std::size_t i = 0; i < g2.size(); ++i) {
    const auto tau = tau_nt(pre, 30, g2[i]);
    CHECK(pts[i].occ == oracle::naive_occ(pi.values(), tau.values()));
    REQUIRE(pts[i].centered.has_value());
    CHECK(*pts[i].centered == doctest::Approx(pts[i].occ.convert_to<double>() - 30 * e[i]));
  }
  CHECK_THROWS(occ_process(pi, 30, {0.5, 0.1}, pre));
}

#include "mallows/pattern_count.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "mallows/errors.hpp"
#include "mallows/fenwick.hpp"

namespace mallows {

namespace {

using u128 = unsigned __int128;

BigInt to_big(u128 x) {
  BigInt hi = static_cast<std::uint64_t>(x >> 64);
  return (hi << 64) + static_cast<std::uint64_t>(x);
}

BigInt to_big(__int128 x) {
  if (x < 0) return -to_big(static_cast<u128>(-x));
  return to_big(static_cast<u128>(x));
}

struct Neighbourhood {
  // smaller-before, larger-before, smaller-after, larger-after per position
  std::vector<std::int64_t> sb, lb, sa, la;
};

Neighbourhood neighbourhood(const Permutation& p) {
  const int n = p.size();
  Neighbourhood nb;
  nb.sb.resize(static_cast<std::size_t>(n));
  nb.lb.resize(nb.sb.size());
  nb.sa.resize(nb.sb.size());
  nb.la.resize(nb.sb.size());
  Fenwick<int> seen(static_cast<std::size_t>(n));
  for (int j = 1; j <= n; ++j) {
    auto k = static_cast<std::size_t>(j - 1);
    const std::int64_t v = p(j);
    nb.sb[k] = seen.prefix(static_cast<std::size_t>(v));
    nb.lb[k] = (j - 1) - nb.sb[k];
    nb.sa[k] = (v - 1) - nb.sb[k];
    nb.la[k] = (n - j) - nb.sa[k];
    seen.add(static_cast<std::size_t>(v), 1);
  }
  return nb;
}

std::array<__int128, 6> occ3_wide(const Permutation& p) {
  std::array<__int128, 6> c{};
  if (p.size() < 3) return c;
  auto nb = neighbourhood(p);
  __int128 s123 = 0, s321 = 0, peak = 0, valley = 0, up_pairs_after = 0, low_pairs_before = 0;
  for (std::size_t k = 0; k < nb.sb.size(); ++k) {
    s123 += static_cast<__int128>(nb.sb[k]) * nb.la[k];
    s321 += static_cast<__int128>(nb.lb[k]) * nb.sa[k];
    peak += static_cast<__int128>(nb.sb[k]) * nb.sa[k];
    valley += static_cast<__int128>(nb.lb[k]) * nb.la[k];
    up_pairs_after += static_cast<__int128>(nb.la[k]) * (nb.la[k] - 1) / 2;
    low_pairs_before += static_cast<__int128>(nb.sb[k]) * (nb.sb[k] - 1) / 2;
  }
  const __int128 s132 = up_pairs_after - s123;
  const __int128 s213 = low_pairs_before - s123;
  c = {s123, s132, s213, peak - s132, valley - s213, s321};
  return c;
}

std::int64_t lex_rank(const std::vector<int>& pat) {
  const std::size_t r = pat.size();
  std::int64_t rank = 0;
  for (std::size_t i = 0; i < r; ++i) {
    std::int64_t smaller_after = 0;
    for (std::size_t j = i + 1; j < r; ++j) smaller_after += pat[j] < pat[i];
    rank = rank * static_cast<std::int64_t>(r - i) + smaller_after;
  }
  return rank;
}

template <class T>
T increasing_dp(int r, const Permutation& p) {
  const int n = p.size();
  std::vector<T> f(static_cast<std::size_t>(n), T(1)), g(static_cast<std::size_t>(n));
  for (int layer = 2; layer <= r; ++layer) {
    Fenwick<T> tree(static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i) {
      auto k = static_cast<std::size_t>(i - 1);
      g[k] = tree.prefix(static_cast<std::size_t>(p(i) - 1));
      tree.add(static_cast<std::size_t>(p(i)), f[k]);
    }
    std::swap(f, g);
  }
  T total(0);
  for (const auto& x : f) total += x;
  return total;
}

}  // namespace

BigInt binomial(std::int64_t n, std::int64_t k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  BigInt b = 1;
  for (std::int64_t i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

BigInt inv(const Permutation& p) { return BigInt(inversion_number(p)); }

BigInt occ_bruteforce(const Permutation& pi, const Permutation& p, std::uint64_t budget) {
  const int r = pi.size();
  const int n = p.size();
  if (r > n) return 0;
  std::vector<int> chosen(static_cast<std::size_t>(r));
  std::uint64_t expansions = 0;
  BigInt total = 0;
  std::uint64_t local = 0;
  // depth-first over index tuples; a partial tuple survives only while its pattern agrees with pi
  auto dfs = [&](auto&& self, int depth, int from) -> void {
    for (int i = from; i <= n - (r - depth) + 1; ++i) {
      if (++expansions > budget) throw BudgetExceeded("occ_bruteforce exceeded " + std::to_string(budget) + " expansions");
      const int v = p(i);
      bool ok = true;
      for (int t = 0; t < depth && ok; ++t)
        ok = (p(chosen[static_cast<std::size_t>(t)]) < v) == (pi(t + 1) < pi(depth + 1));
      if (!ok) continue;
      if (depth + 1 == r) {
        ++local;
        continue;
      }
      chosen[static_cast<std::size_t>(depth)] = i;
      self(self, depth + 1, i + 1);
    }
  };
  dfs(dfs, 0, 1);
  total = local;
  return total;
}

std::vector<BigInt> occ_bruteforce_all(int r, const Permutation& p, std::uint64_t budget) {
  const int n = p.size();
  if (r < 1) throw DomainError("pattern size must be positive");
  std::int64_t fact = 1;
  for (int i = 2; i <= r; ++i) fact *= i;
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(fact), 0);
  if (r <= n) {
    if (binomial(n, r) > budget) throw BudgetExceeded("occ_bruteforce_all: C(n,r) above budget");
    std::vector<int> idx(static_cast<std::size_t>(r));
    std::iota(idx.begin(), idx.end(), 1);
    std::vector<int> vals(static_cast<std::size_t>(r));
    while (true) {
      for (int t = 0; t < r; ++t) vals[static_cast<std::size_t>(t)] = p(idx[static_cast<std::size_t>(t)]);
      ++counts[static_cast<std::size_t>(lex_rank(vals))];
      int t = r - 1;
      while (t >= 0 && idx[static_cast<std::size_t>(t)] == n - (r - 1 - t)) --t;
      if (t < 0) break;
      ++idx[static_cast<std::size_t>(t)];
      for (int u = t + 1; u < r; ++u) idx[static_cast<std::size_t>(u)] = idx[static_cast<std::size_t>(u - 1)] + 1;
    }
  }
  return std::vector<BigInt>(counts.begin(), counts.end());
}

std::array<Permutation, 6> size3_patterns() {
  return {Permutation::trusted({1, 2, 3}), Permutation::trusted({1, 3, 2}), Permutation::trusted({2, 1, 3}),
          Permutation::trusted({2, 3, 1}), Permutation::trusted({3, 1, 2}), Permutation::trusted({3, 2, 1})};
}

std::array<BigInt, 6> occ3_all(const Permutation& p) {
  auto w = occ3_wide(p);
  std::array<BigInt, 6> out;
  for (std::size_t i = 0; i < 6; ++i) out[i] = to_big(w[i]);
  return out;
}

std::array<std::int64_t, 6> occ3_all_i64(const Permutation& p) {
  if (p.size() > 2'000'000) throw DomainError("occ3_all_i64: size too large for 64-bit counts");
  auto w = occ3_wide(p);
  std::array<std::int64_t, 6> out;
  for (std::size_t i = 0; i < 6; ++i) out[i] = static_cast<std::int64_t>(w[i]);
  return out;
}

BigInt occ_increasing(int r, const Permutation& p) {
  const int n = p.size();
  if (r < 1 || r > n) throw DomainError("occ_increasing: r outside [1,n]");
  if (r == 1) return n;
  if (binomial(n, r) < (BigInt(1) << 126)) return to_big(increasing_dp<u128>(r, p));
  return increasing_dp<BigInt>(r, p);
}

BigInt ordered_product_sum(const std::vector<std::vector<BigInt>>& counts) {
  const std::size_t d = counts.size();
  if (d == 0) return 1;
  const std::size_t K = counts[0].size();
  std::vector<BigInt> s(d + 1, 0);
  s[0] = 1;
  for (std::size_t k = 0; k < K; ++k)
    for (std::size_t j = d; j >= 1; --j)
      if (counts[j - 1][k] != 0) s[j] += s[j - 1] * counts[j - 1][k];
  return s[d];
}

BigInt occ_blockwise(const std::vector<Permutation>& pi_blocks, const std::vector<Permutation>& blocks) {
  std::vector<std::vector<BigInt>> counts(pi_blocks.size(), std::vector<BigInt>(blocks.size()));
  for (std::size_t j = 0; j < pi_blocks.size(); ++j)
    for (std::size_t k = 0; k < blocks.size(); ++k) counts[j][k] = occ(pi_blocks[j], blocks[k]);
  return ordered_product_sum(counts);
}

BigInt occ(const Permutation& pi, const Permutation& p) {
  const int r = pi.size();
  const int n = p.size();
  if (r > n) return 0;
  if (r == 1) return n;
  if (pi.is_identity()) return occ_increasing(r, p);
  if (reverse(pi).is_identity()) return occ_increasing(r, reverse(p));
  if (r == 3) {
    auto all = occ3_all(p);
    auto pats = size3_patterns();
    for (std::size_t i = 0; i < 6; ++i)
      if (pats[i] == pi) return all[i];
  }
  return occ_bruteforce(pi, p);
}

BigInt occ_swap_delta_bound(const Permutation& pi, const Permutation& p, const Permutation& p_prime) {
  if (p.size() != p_prime.size()) throw PreconditionViolated("sizes differ");
  auto a = inversion_counts(p, Side::Right).counts;
  auto b = inversion_counts(p_prime, Side::Right).counts;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] > b[i]) throw PreconditionViolated("right counts not dominated at position " + std::to_string(i + 1));
  BigInt d = inv(p_prime) - inv(p);
  BigInt scale = boost::multiprecision::pow(BigInt(p.size()), static_cast<unsigned>(pi.size() - 1));
  return 2 * d * scale;
}

std::vector<Permutation> all_permutations(int r) {
  std::vector<int> v(static_cast<std::size_t>(r));
  std::iota(v.begin(), v.end(), 1);
  std::vector<Permutation> out;
  do {
    out.push_back(Permutation::trusted(v));
  } while (std::next_permutation(v.begin(), v.end()));
  return out;
}

}  // namespace mallows

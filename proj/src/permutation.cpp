#include "mallows/permutation.hpp"

#include <charconv>
#include <numeric>

#include "mallows/errors.hpp"
#include "mallows/fenwick.hpp"

namespace mallows {

Permutation Permutation::from_one_line(std::vector<int> values) {
  const std::size_t n = values.size();
  if (n == 0) throw NotAPermutation("empty permutation");
  std::vector<char> seen(n + 1, 0);
  for (int v : values) {
    if (v < 1 || static_cast<std::size_t>(v) > n)
      throw NotAPermutation("value " + std::to_string(v) + " outside [1," + std::to_string(n) + "]");
    if (seen[static_cast<std::size_t>(v)]) throw NotAPermutation("duplicate value " + std::to_string(v));
    seen[static_cast<std::size_t>(v)] = 1;
  }
  return trusted(std::move(values));
}

Permutation Permutation::identity(int n) {
  if (n < 1) throw NotAPermutation("identity of size < 1");
  std::vector<int> v(static_cast<std::size_t>(n));
  std::iota(v.begin(), v.end(), 1);
  return trusted(std::move(v));
}

Permutation Permutation::trusted(std::vector<int> values) {
  Permutation p;
  p.v_ = std::move(values);
  return p;
}

Permutation Permutation::parse(std::string_view text) {
  std::vector<int> vals;
  bool has_sep = text.find_first_of(", ") != std::string_view::npos;
  if (!has_sep) {
    for (char c : text) {
      if (c < '0' || c > '9') throw NotAPermutation("bad character in permutation: " + std::string(text));
      vals.push_back(c - '0');
    }
    return from_one_line(std::move(vals));
  }
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && (text[i] == ',' || text[i] == ' ')) ++i;
    if (i >= text.size()) break;
    int v = 0;
    auto [ptr, ec] = std::from_chars(text.data() + i, text.data() + text.size(), v);
    if (ec != std::errc()) throw NotAPermutation("bad token in permutation: " + std::string(text));
    vals.push_back(v);
    i = static_cast<std::size_t>(ptr - text.data());
  }
  return from_one_line(std::move(vals));
}

std::string Permutation::to_string() const {
  std::string s;
  for (std::size_t i = 0; i < v_.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(v_[i]);
  }
  return s;
}

bool Permutation::is_identity() const {
  for (std::size_t i = 0; i < v_.size(); ++i)
    if (v_[i] != static_cast<int>(i + 1)) return false;
  return true;
}

InversionCounts inversion_counts(const Permutation& p, Side side) {
  const int n = p.size();
  InversionCounts out{side, std::vector<int>(static_cast<std::size_t>(n))};
  Fenwick<int> seen(static_cast<std::size_t>(n));
  if (side == Side::Left) {
    for (int i = 1; i <= n; ++i) {
      int smaller = seen.prefix(static_cast<std::size_t>(p(i)));
      out.counts[static_cast<std::size_t>(i - 1)] = (i - 1) - smaller;
      seen.add(static_cast<std::size_t>(p(i)), 1);
    }
  } else {
    for (int i = n; i >= 1; --i) {
      out.counts[static_cast<std::size_t>(i - 1)] = seen.prefix(static_cast<std::size_t>(p(i)));
      seen.add(static_cast<std::size_t>(p(i)), 1);
    }
  }
  return out;
}

InversionCounts inversion_counts_quadratic(const Permutation& p, Side side) {
  const int n = p.size();
  InversionCounts out{side, std::vector<int>(static_cast<std::size_t>(n), 0)};
  for (int i = 1; i <= n; ++i) {
    int c = 0;
    if (side == Side::Left) {
      for (int j = 1; j < i; ++j) c += p(j) > p(i);
    } else {
      for (int j = i + 1; j <= n; ++j) c += p(j) < p(i);
    }
    out.counts[static_cast<std::size_t>(i - 1)] = c;
  }
  return out;
}

std::int64_t inversion_number(const Permutation& p) {
  const int n = p.size();
  Fenwick<int> seen(static_cast<std::size_t>(n));
  std::int64_t total = 0;
  for (int i = n; i >= 1; --i) {
    total += seen.prefix(static_cast<std::size_t>(p(i)));
    seen.add(static_cast<std::size_t>(p(i)), 1);
  }
  return total;
}

Permutation from_right_inversions(const std::vector<int>& counts) {
  const int n = static_cast<int>(counts.size());
  if (n == 0) throw NotAPermutation("empty inversion sequence");
  for (int i = 1; i <= n; ++i) {
    int c = counts[static_cast<std::size_t>(i - 1)];
    if (c < 0 || c > n - i)
      throw RangeViolation("right count r_" + std::to_string(i) + "=" + std::to_string(c) +
                           " outside [0," + std::to_string(n - i) + "]");
  }
  auto unused = Fenwick<int>::ones(static_cast<std::size_t>(n));
  std::vector<int> v(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) {
    auto pos = unused.find_kth(counts[static_cast<std::size_t>(i - 1)] + 1);
    v[static_cast<std::size_t>(i - 1)] = static_cast<int>(pos);
    unused.add(pos, -1);
  }
  return Permutation::trusted(std::move(v));
}

Permutation from_left_inversions(const std::vector<int>& counts) {
  const int n = static_cast<int>(counts.size());
  if (n == 0) throw NotAPermutation("empty inversion sequence");
  for (int i = 1; i <= n; ++i) {
    int c = counts[static_cast<std::size_t>(i - 1)];
    if (c < 0 || c > i - 1)
      throw RangeViolation("left count l_" + std::to_string(i) + "=" + std::to_string(c) +
                           " outside [0," + std::to_string(i - 1) + "]");
  }
  // Position i receives the (i - l_i)-th smallest value not used by positions after i.
  auto unused = Fenwick<int>::ones(static_cast<std::size_t>(n));
  std::vector<int> v(static_cast<std::size_t>(n));
  for (int i = n; i >= 1; --i) {
    auto pos = unused.find_kth(i - counts[static_cast<std::size_t>(i - 1)]);
    v[static_cast<std::size_t>(i - 1)] = static_cast<int>(pos);
    unused.add(pos, -1);
  }
  return Permutation::trusted(std::move(v));
}

Permutation from_inversion_counts(const InversionCounts& c) {
  return c.side == Side::Left ? from_left_inversions(c.counts) : from_right_inversions(c.counts);
}

std::vector<std::int64_t> prefix_values_from_right_inversions(const std::vector<std::int64_t>& r) {
  const std::size_t n = r.size();
  std::int64_t max_r = 0;
  for (auto x : r) {
    if (x < 0) throw RangeViolation("negative right-inversion count");
    max_r = std::max(max_r, x);
  }
  auto unused = Fenwick<std::int64_t>::ones(n + static_cast<std::size_t>(max_r));
  std::vector<std::int64_t> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    auto pos = unused.find_kth(r[k] + 1);
    out[k] = static_cast<std::int64_t>(pos);
    unused.add(pos, -1);
  }
  return out;
}

Permutation pattern_at(const Permutation& p, const std::vector<int>& indices) {
  if (indices.empty()) throw IndexOutOfRange("empty index set");
  std::vector<int> vals;
  vals.reserve(indices.size());
  int prev = 0;
  for (int i : indices) {
    if (i < 1 || i > p.size()) throw IndexOutOfRange("index " + std::to_string(i) + " outside [1," + std::to_string(p.size()) + "]");
    if (i <= prev) throw IndexOutOfRange("indices must be strictly increasing");
    prev = i;
    vals.push_back(p(i));
  }
  return rank_reduce(vals);
}

Permutation direct_sum(const std::vector<Permutation>& parts) {
  if (parts.empty()) throw NotAPermutation("direct sum of nothing");
  std::vector<int> v;
  int shift = 0;
  for (const auto& part : parts) {
    for (int x : part.values()) v.push_back(x + shift);
    shift += part.size();
  }
  return Permutation::trusted(std::move(v));
}

Permutation reverse(const Permutation& p) {
  std::vector<int> v(p.values().rbegin(), p.values().rend());
  return Permutation::trusted(std::move(v));
}

BlockDecomposition block_decomposition(const Permutation& p) {
  BlockDecomposition out;
  out.offsets.push_back(0);
  auto r = inversion_counts(p, Side::Right);
  BoundaryTracker tracker;
  int start = 0;
  for (int i = 1; i <= p.size(); ++i) {
    if (!tracker.push(r.counts[static_cast<std::size_t>(i - 1)])) continue;
    std::vector<int> v;
    v.reserve(static_cast<std::size_t>(i - start));
    for (int j = start + 1; j <= i; ++j) v.push_back(p(j) - start);
    out.blocks.push_back(Permutation::trusted(std::move(v)));
    out.offsets.push_back(i);
    start = i;
  }
  return out;
}

bool is_indecomposable(const Permutation& p) {
  int running_max = 0;
  for (int k = 1; k < p.size(); ++k) {
    running_max = std::max(running_max, p(k));
    if (running_max == k) return false;
  }
  return true;
}

}  // namespace mallows

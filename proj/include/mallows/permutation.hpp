#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace mallows {

// One-line permutation of [n]; positions and values are 1-based.
class Permutation {
 public:
  static Permutation from_one_line(std::vector<int> values);
  static Permutation identity(int n);
  // Skips validation; callers guarantee a bijection of [n].
  static Permutation trusted(std::vector<int> values);
  // Accepts "2,4,1,3" and, when every value is a single digit, "2413".
  static Permutation parse(std::string_view text);

  int size() const { return static_cast<int>(v_.size()); }
  int operator()(int i) const { return v_[static_cast<std::size_t>(i - 1)]; }
  const std::vector<int>& values() const { return v_; }

  std::string to_string() const;
  bool is_identity() const;

  friend bool operator==(const Permutation&, const Permutation&) = default;
  friend auto operator<=>(const Permutation&, const Permutation&) = default;

 private:
  std::vector<int> v_;
};

enum class Side { Left, Right };

struct InversionCounts {
  Side side = Side::Left;
  std::vector<int> counts;
};

struct BlockDecomposition {
  std::vector<Permutation> blocks;
  std::vector<int> offsets;  // offsets[k] = total size of blocks 0..k-1; size blocks+1
};

InversionCounts inversion_counts(const Permutation& p, Side side);
InversionCounts inversion_counts_quadratic(const Permutation& p, Side side);
std::int64_t inversion_number(const Permutation& p);

Permutation from_right_inversions(const std::vector<int>& counts);
Permutation from_left_inversions(const std::vector<int>& counts);
Permutation from_inversion_counts(const InversionCounts& c);

// Sigma(1..n) of the infinite permutation of N* whose right-inversion counts start with r.
std::vector<std::int64_t> prefix_values_from_right_inversions(const std::vector<std::int64_t>& r);

// Pattern of a sequence of distinct integers.
template <class Int>
Permutation rank_reduce(const std::vector<Int>& values);

Permutation pattern_at(const Permutation& p, const std::vector<int>& indices);
Permutation direct_sum(const std::vector<Permutation>& parts);
Permutation reverse(const Permutation& p);
BlockDecomposition block_decomposition(const Permutation& p);
bool is_indecomposable(const Permutation& p);

// Streaming block boundary detector over right-inversion counts.
class BoundaryTracker {
 public:
  // Feeds r_i for the next index i; returns true when a block closes at i.
  bool push(std::int64_t r) {
    ++index_;
    if (index_ + r > reach_) reach_ = index_ + r;
    return reach_ == index_;
  }
  std::int64_t index() const { return index_; }

 private:
  std::int64_t index_ = 0;
  std::int64_t reach_ = 0;
};

template <class Int>
Permutation rank_reduce(const std::vector<Int>& values) {
  std::vector<std::size_t> order(values.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<int> out(values.size());
  for (std::size_t r = 0; r < order.size(); ++r) out[order[r]] = static_cast<int>(r + 1);
  return Permutation::trusted(std::move(out));
}

}  // namespace mallows

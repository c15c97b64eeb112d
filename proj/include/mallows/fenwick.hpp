#pragma once

#include <cstddef>
#include <vector>

namespace mallows {

// Binary indexed tree over positions 1..n. find_kth assumes nonnegative entries.
template <class T>
class Fenwick {
 public:
  explicit Fenwick(std::size_t n) : n_(n), tree_(n + 1, T(0)) {
    top_ = 1;
    while (top_ * 2 <= n_) top_ *= 2;
  }

  // Every position holds 1; built in O(n).
  static Fenwick ones(std::size_t n) {
    Fenwick f(n);
    for (std::size_t i = 1; i <= n; ++i) {
      f.tree_[i] += T(1);
      std::size_t j = i + (i & (~i + 1));
      if (j <= n) f.tree_[j] += f.tree_[i];
    }
    return f;
  }

  std::size_t size() const { return n_; }

  void add(std::size_t i, const T& v) {
    for (; i <= n_; i += i & (~i + 1)) tree_[i] += v;
  }

  T prefix(std::size_t i) const {
    T s(0);
    for (; i > 0; i -= i & (~i + 1)) s += tree_[i];
    return s;
  }

  // Smallest i with prefix(i) >= k; returns n+1 when the total is below k.
  std::size_t find_kth(T k) const {
    std::size_t pos = 0;
    for (std::size_t step = top_; step > 0; step >>= 1) {
      std::size_t nxt = pos + step;
      if (nxt <= n_ && tree_[nxt] < k) {
        pos = nxt;
        k -= tree_[nxt];
      }
    }
    return pos + 1;
  }

 private:
  std::size_t n_;
  std::size_t top_ = 1;
  std::vector<T> tree_;
};

}  // namespace mallows

#pragma once

namespace quantobs {

// Weighted incremental mean / variance accumulator.
//
// Holds (count, mean, m2) where count is the cumulative observation weight and
// m2 the sum of weighted squared deviations from the mean. Observing uses
// Welford's recurrence; two accumulators over disjoint data can be merged
// (Chan et al.) and a merged part can be subtracted back out again, which is
// what lets attribute observers derive right-branch statistics from the
// parent total.
//
// count == 0 always means the canonical empty state {0, 0, 0}.
class VarStats {
public:
  VarStats() = default;

  // Raw constructor, mostly for tests. Throws InvalidInput on a state that
  // breaks the invariants (negative count/m2, non-finite fields).
  static VarStats from_moments(double count, double mean, double m2);

  // Adds one observation y with weight w > 0. Throws InvalidInput otherwise.
  void observe(double y, double w = 1.0);

  VarStats& operator+=(const VarStats& other);
  VarStats& operator-=(const VarStats& other);

  [[nodiscard]] double count() const noexcept { return count_; }
  [[nodiscard]] double mean() const noexcept { return mean_; }
  [[nodiscard]] double m2() const noexcept { return m2_; }
  [[nodiscard]] bool empty() const noexcept { return count_ == 0.0; }

  // Sample variance m2 / (count - 1); 0 when count <= 1.
  [[nodiscard]] double variance() const noexcept;

  friend bool operator==(const VarStats&, const VarStats&) = default;

private:
  VarStats(double count, double mean, double m2) : count_(count), mean_(mean), m2_(m2) {}

  double count_ = 0.0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

// Statistics of the union of two disjoint groups.
[[nodiscard]] VarStats merge(const VarStats& a, const VarStats& b);

// Statistics of the group A such that merge(A, b) == ab, assuming b was
// merged into ab earlier. Throws UnderflowError when b carries more weight
// than ab.
[[nodiscard]] VarStats difference(const VarStats& ab, const VarStats& b);

inline VarStats operator+(VarStats a, const VarStats& b) { return a += b; }
inline VarStats operator-(VarStats ab, const VarStats& b) { return ab -= b; }

}  // namespace quantobs

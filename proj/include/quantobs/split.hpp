#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include "quantobs/var_stats.hpp"

namespace quantobs {

// A candidate binary partition x <= cut_point / x > cut_point.
struct SplitSuggestion {
  double cut_point = 0.0;
  double merit = 0.0;
  VarStats left;
  VarStats right;
};

// Variance reduction of splitting `parent` into `left` and `right`:
//   s2(parent) - |left|/|parent| * s2(left) - |right|/|parent| * s2(right)
// Returns 0 when the parent holds weight <= 1. Throws ContractViolation when
// the branch weights do not add up to the parent weight.
[[nodiscard]] double variance_reduction(const VarStats& parent, const VarStats& left,
                                        const VarStats& right);

// Per-feature monitor of (x, y) pairs that can propose a split point.
//
// update() is meant to be called once per stream element; best_split() is a
// read-only query and may be called at any time between updates.
class AttributeObserver {
public:
  virtual ~AttributeObserver() = default;

  // Validates the pair and weight, then hands them to the concrete observer.
  // Throws InvalidInput on non-finite x/y or non-positive weight.
  void update(double x, double y, double w = 1.0);

  // Best split given `total`, the target statistics of everything observed.
  // std::nullopt when the structure holds fewer than two candidates.
  [[nodiscard]] virtual std::optional<SplitSuggestion> best_split(const VarStats& total) const = 0;

  // Stored elements: tree nodes or hash slots.
  [[nodiscard]] virtual std::size_t n_elements() const noexcept = 0;

  [[nodiscard]] virtual std::string name() const = 0;

protected:
  virtual void do_update(double x, double y, double w) = 0;
};

}  // namespace quantobs

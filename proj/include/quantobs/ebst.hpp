#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "quantobs/split.hpp"

namespace quantobs {

// Drops fractional digits beyond `digits`, rounding toward zero.
[[nodiscard]] double truncate_decimals(double x, unsigned digits);

struct EbstNode {
  static constexpr std::int32_t kNone = -1;

  double threshold = 0.0;
  // Targets of every observation with x <= threshold that passed this node.
  VarStats stats_le;
  std::int32_t left = kNone;
  std::int32_t right = kNone;
};

// Extended binary search tree observer. Unbalanced: insertion cost depends on
// arrival order. With `truncation_digits` set it becomes TE-BST, which
// truncates x before insertion so near-duplicates share a node.
//
// Nodes live in a flat pool; index 0 is the root once anything was inserted.
class EbstObserver final : public AttributeObserver {
public:
  EbstObserver() = default;
  explicit EbstObserver(std::optional<unsigned> truncation_digits)
      : truncation_digits_(truncation_digits) {}

  [[nodiscard]] std::optional<SplitSuggestion> best_split(const VarStats& total) const override;
  [[nodiscard]] std::size_t n_elements() const noexcept override { return nodes_.size(); }
  [[nodiscard]] std::string name() const override;

  [[nodiscard]] std::optional<unsigned> truncation_digits() const noexcept { return truncation_digits_; }
  [[nodiscard]] std::span<const EbstNode> nodes() const noexcept { return nodes_; }

protected:
  void do_update(double x, double y, double w) override;

private:
  std::optional<unsigned> truncation_digits_;
  std::vector<EbstNode> nodes_;
};

}  // namespace quantobs

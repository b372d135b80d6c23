#include "quantobs/ebst.hpp"

#include <cmath>
#include <limits>
#include <utility>

#include "quantobs/errors.hpp"

namespace quantobs {

double truncate_decimals(double x, unsigned digits) {
  const double scale = std::pow(10.0, static_cast<double>(digits));
  return std::copysign(std::floor(std::abs(x) * scale) / scale, x);
}

std::string EbstObserver::name() const { return truncation_digits_ ? "TEBST" : "EBST"; }

void EbstObserver::do_update(double x, double y, double w) {
  if (truncation_digits_) {
    x = truncate_decimals(x, *truncation_digits_);
  }
  if (nodes_.size() >= static_cast<std::size_t>(std::numeric_limits<std::int32_t>::max())) {
    throw ConfigError("E-BST node pool exhausted");
  }

  VarStats single;
  single.observe(y, w);
  if (nodes_.empty()) {
    nodes_.push_back({x, single});
    return;
  }

  std::int32_t current = 0;
  for (;;) {
    EbstNode& node = nodes_[current];
    std::int32_t* child = nullptr;
    if (x <= node.threshold) {
      node.stats_le += single;
      if (x == node.threshold) {
        return;
      }
      child = &node.left;
    } else {
      child = &node.right;
    }
    if (*child == EbstNode::kNone) {
      // push_back may reallocate; store the index first.
      *child = static_cast<std::int32_t>(nodes_.size());
      nodes_.push_back({x, single});
      return;
    }
    current = *child;
  }
}

std::optional<SplitSuggestion> EbstObserver::best_split(const VarStats& total) const {
  if (nodes_.size() < 2) {
    return std::nullopt;
  }

  // In-order walk. Each stack entry carries the statistics of everything
  // known to lie left of the entry's subtree (from ancestors).
  std::optional<SplitSuggestion> best;
  std::vector<std::pair<std::int32_t, VarStats>> stack;
  stack.reserve(64);
  std::int32_t current = 0;
  VarStats ancestors;

  while (current != EbstNode::kNone || !stack.empty()) {
    while (current != EbstNode::kNone) {
      stack.emplace_back(current, ancestors);
      current = nodes_[current].left;
    }
    auto [index, acc] = stack.back();
    stack.pop_back();
    const EbstNode& node = nodes_[index];

    VarStats left = acc + node.stats_le;
    VarStats right = difference(total, left);
    const double merit = variance_reduction(total, left, right);
    if (!best || merit > best->merit) {
      best = SplitSuggestion{node.threshold, merit, left, right};
    }

    ancestors = left;
    current = node.right;
  }
  return best;
}

}  // namespace quantobs

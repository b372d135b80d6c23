#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <variant>

#include "quantobs/split.hpp"

namespace quantobs {

// Slot index of x for quantization radius r: floor(x / r).
// Throws ConfigError for r <= 0 and InvalidInput when x / r does not fit
// an int64 key.
[[nodiscard]] std::int64_t hash_slot(double x, double radius);

struct QoSlot {
  double sum_x = 0.0;  // weighted sum of member x values
  VarStats stats;      // targets of the members

  [[nodiscard]] double prototype() const noexcept { return sum_x / stats.count(); }
};

// Quantization observer: one hash slot per radius-wide interval of x.
// O(1) amortized insertion; a split query sorts the |H| slot keys and scans
// them once, proposing midpoints between consecutive slot prototypes.
class QuantizationObserver final : public AttributeObserver {
public:
  using SlotMap = std::unordered_map<std::int64_t, QoSlot>;

  // Throws ConfigError unless radius is positive and finite.
  explicit QuantizationObserver(double radius);

  [[nodiscard]] std::optional<SplitSuggestion> best_split(const VarStats& total) const override;
  [[nodiscard]] std::size_t n_elements() const noexcept override { return slots_.size(); }
  [[nodiscard]] std::string name() const override { return "QO"; }

  [[nodiscard]] double radius() const noexcept { return radius_; }
  [[nodiscard]] const SlotMap& slots() const noexcept { return slots_; }

protected:
  void do_update(double x, double y, double w) override;

private:
  double radius_;
  SlotMap slots_;
};

// How the harness picks a radius for a feature.
struct FixedRadius {
  double value;
};
struct StdFraction {
  double divisor;
};
using RadiusPolicy = std::variant<FixedRadius, StdFraction>;

// Radius used when a std-based policy degenerates (constant feature).
inline constexpr double kFallbackRadius = 0.01;

// fixed(v) -> v; std_fraction(k) -> sample_std / k, or kFallbackRadius when
// that is zero or not finite. Throws ConfigError for a non-positive fixed
// value or divisor.
[[nodiscard]] double resolve_radius(const RadiusPolicy& policy, double sample_std);

}  // namespace quantobs

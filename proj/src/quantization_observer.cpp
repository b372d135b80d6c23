#include "quantobs/quantization_observer.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "quantobs/errors.hpp"

namespace quantobs {

namespace {

// 2^63 is exactly representable; anything at or beyond it overflows int64.
constexpr double kKeyLimit = 9223372036854775808.0;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

std::int64_t hash_slot(double x, double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw ConfigError("quantization radius must be positive and finite");
  }
  const double q = std::floor(x / radius);
  if (!(q >= -kKeyLimit && q < kKeyLimit)) {
    throw InvalidInput("x / radius does not fit a 64-bit slot key");
  }
  return static_cast<std::int64_t>(q);
}

QuantizationObserver::QuantizationObserver(double radius) : radius_(radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw ConfigError("quantization radius must be positive and finite, got " + std::to_string(radius));
  }
}

void QuantizationObserver::do_update(double x, double y, double w) {
  QoSlot& slot = slots_[hash_slot(x, radius_)];
  slot.sum_x += x * w;
  slot.stats.observe(y, w);
}

std::optional<SplitSuggestion> QuantizationObserver::best_split(const VarStats& total) const {
  if (slots_.size() < 2) {
    return std::nullopt;
  }

  std::vector<std::pair<std::int64_t, const QoSlot*>> ordered;
  ordered.reserve(slots_.size());
  for (const auto& [key, slot] : slots_) {
    ordered.emplace_back(key, &slot);
  }
  std::sort(ordered.begin(), ordered.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  std::optional<SplitSuggestion> best;
  VarStats left;
  double previous_prototype = ordered.front().second->prototype();
  left += ordered.front().second->stats;

  for (std::size_t i = 1; i < ordered.size(); ++i) {
    const QoSlot& slot = *ordered[i].second;
    const double prototype = slot.prototype();
    const double cut = (previous_prototype + prototype) / 2.0;
    VarStats right = difference(total, left);
    const double merit = variance_reduction(total, left, right);
    if (!best || merit > best->merit) {
      best = SplitSuggestion{cut, merit, left, right};
    }
    previous_prototype = prototype;
    left += slot.stats;
  }
  return best;
}

double resolve_radius(const RadiusPolicy& policy, double sample_std) {
  return std::visit(
      overloaded{
          [](const FixedRadius& p) {
            if (!(p.value > 0.0) || !std::isfinite(p.value)) {
              throw ConfigError("fixed radius must be positive and finite");
            }
            return p.value;
          },
          [sample_std](const StdFraction& p) {
            if (!(p.divisor > 0.0) || !std::isfinite(p.divisor)) {
              throw ConfigError("radius divisor must be positive and finite");
            }
            const double r = sample_std / p.divisor;
            if (!std::isfinite(r) || r <= 0.0) {
              return kFallbackRadius;
            }
            return r;
          },
      },
      policy);
}

}  // namespace quantobs

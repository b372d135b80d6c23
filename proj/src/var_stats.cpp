#include "quantobs/var_stats.hpp"

#include <cmath>
#include <string>

#include "quantobs/errors.hpp"

namespace quantobs {

namespace {

// Weight residue left after subtracting equal float sums is treated as zero.
constexpr double kCountResidue = 1e-12;

}  // namespace

VarStats VarStats::from_moments(double count, double mean, double m2) {
  if (!std::isfinite(count) || !std::isfinite(mean) || !std::isfinite(m2)) {
    throw InvalidInput("VarStats fields must be finite");
  }
  if (count < 0.0 || m2 < 0.0) {
    throw InvalidInput("VarStats count and m2 must be non-negative");
  }
  if (count == 0.0) {
    return {};
  }
  return {count, mean, m2};
}

void VarStats::observe(double y, double w) {
  if (!std::isfinite(y)) {
    throw InvalidInput("observed value is not finite");
  }
  if (!std::isfinite(w) || w <= 0.0) {
    throw InvalidInput("observation weight must be positive and finite, got " + std::to_string(w));
  }
  count_ += w;
  const double delta = y - mean_;
  mean_ += delta * (w / count_);
  m2_ += w * delta * (y - mean_);
}

double VarStats::variance() const noexcept {
  if (count_ <= 1.0) {
    return 0.0;
  }
  return m2_ / (count_ - 1.0);
}

VarStats& VarStats::operator+=(const VarStats& other) {
  if (other.empty()) {
    return *this;
  }
  if (empty()) {
    *this = other;
    return *this;
  }
  const double n_ab = count_ + other.count_;
  const double delta = other.mean_ - mean_;
  const double m2_ab = m2_ + other.m2_ + delta * delta * (count_ * other.count_ / n_ab);
  mean_ = (count_ * mean_ + other.count_ * other.mean_) / n_ab;
  m2_ = m2_ab;
  count_ = n_ab;
  return *this;
}

VarStats& VarStats::operator-=(const VarStats& other) {
  if (other.empty()) {
    return *this;
  }
  const double n_ab = count_;
  const double n_a = n_ab - other.count_;
  if (n_a < -kCountResidue * n_ab) {
    throw UnderflowError("cannot subtract statistics of weight " + std::to_string(other.count_) +
                         " from statistics of weight " + std::to_string(n_ab));
  }
  if (n_a <= kCountResidue * n_ab) {
    *this = VarStats{};
    return *this;
  }
  const double mean_a = (n_ab * mean_ - other.count_ * other.mean_) / n_a;
  const double delta = other.mean_ - mean_a;
  double m2_a = m2_ - other.m2_ - delta * delta * (n_a * other.count_ / n_ab);
  if (m2_a < 0.0) {
    m2_a = 0.0;
  }
  count_ = n_a;
  mean_ = mean_a;
  m2_ = m2_a;
  return *this;
}

VarStats merge(const VarStats& a, const VarStats& b) { return a + b; }

VarStats difference(const VarStats& ab, const VarStats& b) { return ab - b; }

}  // namespace quantobs

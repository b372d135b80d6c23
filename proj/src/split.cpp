#include "quantobs/split.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "quantobs/errors.hpp"

namespace quantobs {

namespace {

constexpr double kCountTolerance = 1e-9;

}  // namespace

double variance_reduction(const VarStats& parent, const VarStats& left, const VarStats& right) {
  const double n = parent.count();
  const double branch_sum = left.count() + right.count();
  if (std::abs(n - branch_sum) > kCountTolerance * std::max(1.0, n)) {
    throw ContractViolation("branch weights " + std::to_string(branch_sum) +
                            " do not add up to parent weight " + std::to_string(n));
  }
  if (n <= 1.0) {
    return 0.0;
  }
  return parent.variance() - (left.count() / n) * left.variance() -
         (right.count() / n) * right.variance();
}

void AttributeObserver::update(double x, double y, double w) {
  if (!std::isfinite(x) || !std::isfinite(y)) {
    throw InvalidInput("observer input must be finite");
  }
  if (!std::isfinite(w) || w <= 0.0) {
    throw InvalidInput("observer weight must be positive and finite");
  }
  do_update(x, y, w);
}

}  // namespace quantobs

#pragma once

#include <optional>
#include <vector>

namespace gwtree {

/// Least-squares line through (x, ln y) over the points with y > 0.
struct LogLinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  int points = 0;
};

/// nullopt when fewer than two points have y > 0.
std::optional<LogLinearFit> fit_log_linear(const std::vector<double>& xs,
                                           const std::vector<double>& ys);

}  // namespace gwtree

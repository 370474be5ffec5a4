#pragma once

// Closed-form reference values for Poisson Galton-Watson trees.

namespace gwtree {

/// Principal branch W_0 of the Lambert W function: w e^w = x with w >= -1.
/// Throws std::domain_error for x < -1/e.
double lambert_w0(double x);

struct SurvivalResult {
  double lambda = 0.0;
  /// Root of s = 1 - exp(-lambda s) found by bracketing; exactly 0 for lambda <= 1.
  double s_fixed_point = 0.0;
  /// 1 + W_0(-lambda e^{-lambda}) / lambda, clamped to [0, 1].
  double s_lambert = 0.0;
  /// |s - 1 + exp(-lambda s)| at s_fixed_point.
  double residual = 0.0;
};

/// Probability that the tree is infinite, by both routes.
SurvivalResult survival_prob(double lambda);

/// Probability that the root has exactly one child: lambda e^{-lambda}.
double one_child_prob(double lambda);

/// Extinction probability by generation g: g iterates of s -> exp(lambda (s - 1)) from 0.
double extinction_by_generation(double lambda, int generations);

}  // namespace gwtree

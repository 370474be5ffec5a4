#include "gwtree/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace gwtree {

namespace {

constexpr double kInvE = 1.0 / std::numbers::e;

double w0_initial_guess(double x) {
  // Branch-point expansion in p = sqrt(2 (1 + e x)).
  if (x < -0.25) {
    const double p = std::sqrt(std::max(0.0, 2.0 * std::fma(std::numbers::e, x, 1.0)));
    return -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0 + p * (-43.0 / 540.0))));
  }
  if (x < 0.0) return x * (1.0 + x * (-1.0 + x * 1.5));
  if (x < 3.0) {
    // Winitzki.
    const double l = std::log1p(x);
    return l * (1.0 - std::log1p(l) / (2.0 + l));
  }
  const double l = std::log(x);
  const double ll = std::log(l);
  return l - ll + ll / l;
}

// s - 1 + exp(-lambda s), written to keep precision at small s.
double survival_defect(double lambda, double s) { return s + std::expm1(-lambda * s); }

}  // namespace

double lambert_w0(double x) {
  if (std::isnan(x)) throw std::domain_error("lambert_w0: NaN argument");
  const double branch_gap = std::fma(std::numbers::e, x, 1.0);
  if (x < -kInvE) {
    // -1/e itself is not representable; accept arguments within rounding of it.
    if (branch_gap > -4.0 * std::numeric_limits<double>::epsilon()) return -1.0;
    throw std::domain_error("lambert_w0: argument " + std::to_string(x) + " is below -1/e");
  }
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return x;
  if (branch_gap <= 0.0) return -1.0;

  double w = w0_initial_guess(x);
  for (int iter = 0; iter < 64; ++iter) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    const double wp1 = w + 1.0;
    if (wp1 == 0.0) break;
    const double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
    const double step = f / denom;
    w -= step;
    if (!(std::abs(step) > 2.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(w)))) {
      break;
    }
  }
  return std::max(w, -1.0);
}

SurvivalResult survival_prob(double lambda) {
  if (!std::isfinite(lambda) || lambda <= 0.0) {
    throw std::invalid_argument("survival_prob: lambda must be finite and positive");
  }
  SurvivalResult r;
  r.lambda = lambda;
  if (lambda <= 1.0) {
    // s = 0 is the only root in [0, 1]. On the Lambert side -lambda is on the
    // principal branch, so W0(-lambda e^-lambda) = -lambda exactly; evaluating
    // it in floating point near lambda = 1 would only add branch-point noise.
    r.s_fixed_point = 0.0;
    r.s_lambert = 0.0;
    r.residual = 0.0;
    return r;
  }
  const double w = lambert_w0(-lambda * std::exp(-lambda));
  r.s_lambert = std::clamp(1.0 + w / lambda, 0.0, 1.0);

  // The defect is negative on (0, s*) and positive on (s*, 1]; find a left
  // end strictly inside the negative stretch.
  double hi = 1.0;
  double lo = std::min(0.5, (lambda - 1.0) / (lambda * lambda));
  while (survival_defect(lambda, lo) >= 0.0 && lo > 0.0) lo *= 0.5;
  for (int iter = 0; iter < 200 && hi - lo > 1e-16; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (survival_defect(lambda, mid) < 0.0 ? lo : hi) = mid;
  }
  double s = 0.5 * (lo + hi);
  // One Newton polish where the root is simple enough to trust it.
  const double slope = 1.0 - lambda * std::exp(-lambda * s);
  if (std::abs(slope) > 1e-3) {
    const double polished = s - survival_defect(lambda, s) / slope;
    if (polished >= lo && polished <= hi) s = polished;
  }
  r.s_fixed_point = s;
  r.residual = std::abs(survival_defect(lambda, s));
  return r;
}

double one_child_prob(double lambda) {
  if (!std::isfinite(lambda) || lambda < 0.0) {
    throw std::invalid_argument("one_child_prob: lambda must be finite and non-negative");
  }
  return lambda * std::exp(-lambda);
}

double extinction_by_generation(double lambda, int generations) {
  double q = 0.0;
  for (int g = 0; g < generations; ++g) q = std::exp(lambda * (q - 1.0));
  return q;
}

}  // namespace gwtree

#pragma once

#include <cmath>

namespace gwtree {

/// P(X = m) for X ~ Poisson(lambda), through log-gamma so large m cannot overflow.
inline long double poisson_pmf(long double lambda, int m) {
  if (m < 0) return 0.0L;
  if (lambda == 0.0L) return m == 0 ? 1.0L : 0.0L;
  return std::exp(static_cast<long double>(m) * std::log(lambda) - lambda -
                  std::lgamma(static_cast<long double>(m) + 1.0L));
}

/// An upper bound on P(X > cap), tight to a few ulps.
///
/// Past the mode the terms shrink geometrically, so the sum is cut off once
/// the geometric remainder is negligible and that remainder is added on top.
inline long double poisson_upper_tail(long double lambda, int cap) {
  if (cap < 0) return 1.0L;
  if (lambda == 0.0L) return 0.0L;
  if (static_cast<long double>(cap) + 1.0L <= lambda) {
    long double head = 0.0L;
    for (int m = 0; m <= cap; ++m) head += poisson_pmf(lambda, m);
    return head >= 1.0L ? 0.0L : 1.0L - head;
  }
  long double term = poisson_pmf(lambda, cap + 1);
  long double sum = 0.0L;
  for (int m = cap + 1;; ++m) {
    sum += term;
    const long double ratio = lambda / static_cast<long double>(m + 1);
    const long double next = term * ratio;
    const long double bound = next / (1.0L - ratio);
    if (bound <= sum * 1e-21L || next == 0.0L) return sum + bound;
    term = next;
  }
}

}  // namespace gwtree

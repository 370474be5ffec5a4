#pragma once

// Exact probabilities of k-tautologically determined events.
//
// Both engines walk the breadth-first exploration node by node, keeping for
// every reachable (generated count, level boundary, level, automaton state)
// the total weight of the seed prefixes that lead there. Prefixes whose
// verdict is fixed leave the frontier early; their remaining coordinates are
// free and integrate out.

#include <complex>
#include <functional>
#include <vector>

#include <gmpxx.h>

#include "gwtree/properties.hpp"

namespace gwtree {

/// Rigorous enclosure [lower, upper] of a probability. `tail_mass` is the
/// weight the computation could not attribute (Poisson mass above the
/// per-node cap, plus anything left undetermined at the horizon).
struct ProbInterval {
  double lower = 0.0;
  double upper = 0.0;
  double tail_mass = 0.0;
  /// Set when tail_mass > 0.5: the cap is too small for this lambda.
  bool cap_warning = false;

  bool contains(double x) const { return lower <= x && x <= upper; }
  double width() const { return upper - lower; }
};

/// max(20, ceil(3 lambda) + 10 ceil(sqrt(3 lambda)))
int default_cap(double lambda);

/// P_lambda(prop). Child counts above `per_node_cap` are dropped and their
/// mass is accounted in tail_mass. Throws std::invalid_argument for a
/// non-finite or non-positive lambda, or cap < 1.
ProbInterval exact_prob(const TautProperty& prop, double lambda, int per_node_cap);

/// sum_l tilt^l P_lambda(prop, X_1 + ... + X_k = l). With tilt = 1 this is
/// exact_prob. The bounds enclose the weighted sum, which can exceed 1.
ProbInterval tilted_prob(const TautProperty& prop, double lambda, double tilt, int per_node_cap);

/// Coefficients of P_z(prop) = exp(-k z) sum_n a_n z^n / n!, kept as exact
/// integers: a_n counts the membership set weighted by multinomials.
class SeriesCoeffs {
 public:
  SeriesCoeffs(int k, std::vector<mpz_class> a);

  int k() const { return k_; }
  int nmax() const { return static_cast<int>(a_.size()) - 1; }
  const mpz_class& a(int n) const { return a_[static_cast<std::size_t>(n)]; }
  /// ln(a_n); -infinity when a_n = 0.
  long double log_a(int n) const;
  /// a_n / k^n, in [0, 1].
  double ratio_to_bound(int n) const;
  /// 0 <= a_n <= k^n, checked exactly.
  bool within_bound(int n) const;

 private:
  int k_;
  std::vector<mpz_class> a_;
};

/// Throws std::invalid_argument if nmax < 0 or nmax > kMaxSeriesTerms.
SeriesCoeffs series_coeffs(const TautProperty& prop, int nmax);
inline constexpr int kMaxSeriesTerms = 4000;

struct SeriesValue {
  std::complex<double> value;
  /// Bound on the discarded terms, from a_n <= k^n.
  double remainder = 0.0;
  bool within_tolerance = true;
};

SeriesValue eval_series(const SeriesCoeffs& c, std::complex<double> z, double tolerance = 1e-10);

/// exp(-k re_z) sum_{n > nmax} (k abs_z)^n / n!
double series_remainder_bound(int k, int nmax, double abs_z, double re_z);
/// Smallest nmax whose remainder bound is <= tolerance for every z with
/// |z| <= abs_z_max and Re z >= re_z_min.
int series_terms_for(int k, double abs_z_max, double re_z_min, double tolerance);

/// Radius of the disc around lambda on which each Poisson factor is
/// dominated by (1 + epsilon)^r times its real value:
/// min(lambda epsilon / 2, ln((1 + epsilon) / (1 + epsilon / 2))).
double disc_radius(double lambda, double epsilon);

struct DiscSample {
  std::complex<double> z;
  std::complex<double> f;
  double abs_f = 0.0;
  double remainder = 0.0;
  double ratio = 0.0;  // (abs_f + remainder) / rhs_lower
};

struct DiscReport {
  double lambda = 0.0;
  double epsilon = 0.0;
  double delta = 0.0;
  /// Lower end of the enclosure of sum_l (1 + epsilon)^l P_lambda(prop, total l).
  double rhs_lower = 0.0;
  double rhs_upper = 0.0;
  int nmax = 0;
  std::vector<DiscSample> samples;
  double max_ratio = 0.0;

  bool passes(double slack = 1e-8) const { return max_ratio <= 1.0 + slack; }
};

/// Samples |P_z(prop)| on the circle |z - lambda| = delta and compares it with
/// the real-axis majorant sum_l (1 + epsilon)^l P_lambda(prop, total l).
DiscReport disc_bound_check(const TautProperty& prop, double lambda, double epsilon,
                            int samples = 64);

struct ComplexDecayRow {
  int k = 0;
  /// max over the sampled circle of |P_z(A_k \ A_{k-1})|.
  double sup_abs = 0.0;
  double remainder = 0.0;
  /// Series value at z = lambda, and the exact enclosure it should fall in.
  double real_value = 0.0;
  ProbInterval exact;
};

/// For each k, the disc supremum of the difference event A_k \ A_{k-1}. The
/// family must be increasing; family(k) is only called for k >= 1 (A_0 is
/// empty).
std::vector<ComplexDecayRow> complex_decay(const std::function<TautProperty(int)>& family,
                                           double lambda, double epsilon,
                                           const std::vector<int>& ks, int samples = 64);

}  // namespace gwtree

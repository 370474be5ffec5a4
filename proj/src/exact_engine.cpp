#include "gwtree/exact_engine.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "exploration_dp.hpp"
#include "gwtree/poisson.hpp"

namespace gwtree {

namespace {

void require_lambda(double lambda) {
  if (!std::isfinite(lambda) || lambda <= 0.0) {
    throw std::invalid_argument("lambda must be finite and positive, got " + std::to_string(lambda));
  }
}

std::size_t verdict_slot(Verdict v) { return static_cast<std::size_t>(v); }

// Weights e^{-lambda} (lambda tilt)^m / m! per node; free coordinates sum to
// e^{lambda (tilt - 1)}.
class ProbabilityPolicy {
 public:
  using Value = long double;

  ProbabilityPolicy(long double lambda, long double tilt, int cap) : weights_(cap + 1) {
    const long double scale = std::exp(lambda * (tilt - 1.0L));
    for (int m = 0; m <= cap; ++m) weights_[m] = scale * poisson_pmf(lambda * tilt, m);
    tail_weight_ = scale * poisson_upper_tail(lambda * tilt, cap);
    free_weight_ = scale;
  }

  Value unit() const { return 1.0L; }
  Value zero() const { return 0.0L; }
  int child_limit(const Value&) const { return static_cast<int>(weights_.size()) - 1; }
  void on_expand(const Value& v) { dropped_ += v * tail_weight_; }
  void add_child(Value& dst, const Value& src, int m) const { dst += src * weights_[m]; }
  void settle(Verdict verdict, const Value& src, int m, int free_coords) {
    mass_[verdict_slot(verdict)] += src * weights_[m] * free_factor(free_coords);
  }
  void settle_all(Verdict verdict, int free_coords) {
    mass_[verdict_slot(verdict)] += free_factor(free_coords);
  }

  ProbInterval interval(bool clamp_to_unit) const {
    const long double lower = mass_[verdict_slot(Verdict::True)];
    const long double unaccounted = dropped_ + mass_[verdict_slot(Verdict::Undetermined)];
    long double upper = lower + unaccounted;
    if (clamp_to_unit) upper = std::min(upper, 1.0L);
    ProbInterval out;
    // Rounding to double must not shrink the enclosure.
    out.lower = std::max(0.0, std::nextafter(static_cast<double>(lower), -HUGE_VAL));
    out.upper = std::nextafter(static_cast<double>(upper), HUGE_VAL);
    if (clamp_to_unit) {
      out.lower = std::clamp(out.lower, 0.0, 1.0);
      out.upper = std::min(out.upper, 1.0);
    }
    out.tail_mass = std::nextafter(static_cast<double>(unaccounted), HUGE_VAL);
    out.cap_warning = unaccounted > 0.5L;
    return out;
  }

 private:
  long double free_factor(int free_coords) const {
    return free_weight_ == 1.0L ? 1.0L : std::pow(free_weight_, free_coords);
  }

  std::vector<long double> weights_;
  long double tail_weight_ = 0.0L;
  long double free_weight_ = 1.0L;
  long double dropped_ = 0.0L;
  std::array<long double, 3> mass_{};
};

ProbInterval run_probability(const TautProperty& prop, double lambda, double tilt, int cap) {
  require_lambda(lambda);
  if (cap < 1) throw std::invalid_argument("per-node cap must be >= 1");
  if (!std::isfinite(tilt) || tilt <= 0.0) throw std::invalid_argument("tilt must be positive");
  ProbabilityPolicy policy(lambda, tilt, cap);
  detail::explore(prop, policy);
  return policy.interval(tilt == 1.0);
}

// Exact integer coefficients. A prefix (m_1..m_i) carries the multinomial
// (m_1 + ... + m_i)! / (m_1! ... m_i!) at degree m_1 + ... + m_i, built up
// one factor C(d + m, m) at a time.
class SeriesPolicy {
 public:
  using Value = std::vector<mpz_class>;

  explicit SeriesPolicy(int nmax, int k) : nmax_(nmax), settled_(static_cast<std::size_t>(k) + 1) {
    binom_.resize(static_cast<std::size_t>(nmax) + 1);
    for (int n = 0; n <= nmax; ++n) {
      auto& row = binom_[static_cast<std::size_t>(n)];
      row.resize(static_cast<std::size_t>(n) + 1);
      row[0] = 1;
      row[static_cast<std::size_t>(n)] = 1;
      for (int j = 1; j < n; ++j) {
        row[static_cast<std::size_t>(j)] = binom_[static_cast<std::size_t>(n - 1)][static_cast<std::size_t>(j - 1)] +
                                           binom_[static_cast<std::size_t>(n - 1)][static_cast<std::size_t>(j)];
      }
    }
  }

  Value unit() const {
    Value v = zero();
    v[0] = 1;
    return v;
  }
  Value zero() const { return Value(static_cast<std::size_t>(nmax_) + 1); }
  int child_limit(const Value& v) const { return nmax_ - min_degree(v); }
  void on_expand(const Value&) {}
  void add_child(Value& dst, const Value& src, int m) const {
    for (int d = min_degree(src); d + m <= nmax_; ++d) {
      const auto& a = src[static_cast<std::size_t>(d)];
      if (sgn(a) == 0) continue;
      mpz_addmul(dst[static_cast<std::size_t>(d + m)].get_mpz_t(), a.get_mpz_t(),
                 binomial(d + m, m).get_mpz_t());
    }
  }
  void settle(Verdict verdict, const Value& src, int m, int free_coords) {
    if (verdict != Verdict::True) return;
    auto& bin = bin_for(free_coords);
    add_child(bin, src, m);
  }
  void settle_all(Verdict verdict, int free_coords) {
    if (verdict != Verdict::True) return;
    bin_for(free_coords)[0] += 1;
  }

  /// Integrates out the free coordinates: r free coordinates contribute
  /// C(n, j) r^j at degree j on top of a settled prefix.
  std::vector<mpz_class> coefficients() const {
    std::vector<mpz_class> a(static_cast<std::size_t>(nmax_) + 1);
    for (std::size_t r = 0; r < settled_.size(); ++r) {
      const Value& bin = settled_[r];
      if (bin.empty()) continue;
      std::vector<mpz_class> powers(static_cast<std::size_t>(nmax_) + 1);
      powers[0] = 1;
      for (int j = 1; j <= nmax_; ++j) powers[static_cast<std::size_t>(j)] = powers[static_cast<std::size_t>(j - 1)] * static_cast<unsigned long>(r);
      for (int d = 0; d <= nmax_; ++d) {
        const auto& base = bin[static_cast<std::size_t>(d)];
        if (sgn(base) == 0) continue;
        for (int j = 0; d + j <= nmax_; ++j) {
          if (r == 0 && j > 0) break;
          a[static_cast<std::size_t>(d + j)] += base * binomial(d + j, j) * powers[static_cast<std::size_t>(j)];
        }
      }
    }
    return a;
  }

 private:
  int min_degree(const Value& v) const {
    int d = 0;
    while (d <= nmax_ && sgn(v[static_cast<std::size_t>(d)]) == 0) ++d;
    return d;
  }
  const mpz_class& binomial(int n, int j) const {
    return binom_[static_cast<std::size_t>(n)][static_cast<std::size_t>(j)];
  }
  Value& bin_for(int free_coords) {
    auto& bin = settled_[static_cast<std::size_t>(free_coords)];
    if (bin.empty()) bin = zero();
    return bin;
  }

  int nmax_;
  std::vector<std::vector<mpz_class>> binom_;
  std::vector<Value> settled_;  // indexed by number of free coordinates
};

long double log_abs_mpz(const mpz_class& a) {
  if (sgn(a) == 0) return -HUGE_VALL;
  long exp2 = 0;
  const double mant = mpz_get_d_2exp(&exp2, a.get_mpz_t());
  return std::log(static_cast<long double>(mant)) +
         static_cast<long double>(exp2) * std::numbers::ln2_v<long double>;
}

}  // namespace

int default_cap(double lambda) {
  const double three = 3.0 * lambda;
  return std::max(20, static_cast<int>(std::ceil(three)) + 10 * static_cast<int>(std::ceil(std::sqrt(three))));
}

ProbInterval exact_prob(const TautProperty& prop, double lambda, int per_node_cap) {
  return run_probability(prop, lambda, 1.0, per_node_cap);
}

ProbInterval tilted_prob(const TautProperty& prop, double lambda, double tilt, int per_node_cap) {
  return run_probability(prop, lambda, tilt, per_node_cap);
}

SeriesCoeffs::SeriesCoeffs(int k, std::vector<mpz_class> a) : k_(k), a_(std::move(a)) {
  if (k_ < 1) throw std::invalid_argument("series coefficients need k >= 1");
  if (a_.empty()) throw std::invalid_argument("series coefficients need at least a_0");
}

long double SeriesCoeffs::log_a(int n) const { return log_abs_mpz(a(n)); }

double SeriesCoeffs::ratio_to_bound(int n) const {
  if (sgn(a(n)) == 0) return 0.0;
  mpz_class bound;
  mpz_ui_pow_ui(bound.get_mpz_t(), static_cast<unsigned long>(k_), static_cast<unsigned long>(n));
  return static_cast<double>(std::exp(log_a(n) - log_abs_mpz(bound)));
}

bool SeriesCoeffs::within_bound(int n) const {
  mpz_class bound;
  mpz_ui_pow_ui(bound.get_mpz_t(), static_cast<unsigned long>(k_), static_cast<unsigned long>(n));
  return sgn(a(n)) >= 0 && a(n) <= bound;
}

SeriesCoeffs series_coeffs(const TautProperty& prop, int nmax) {
  if (nmax < 0 || nmax > kMaxSeriesTerms) {
    throw std::invalid_argument("nmax must lie in [0, " + std::to_string(kMaxSeriesTerms) +
                                "], got " + std::to_string(nmax));
  }
  SeriesPolicy policy(nmax, prop.k);
  detail::explore(prop, policy);
  return SeriesCoeffs(prop.k, policy.coefficients());
}

double series_remainder_bound(int k, int nmax, double abs_z, double re_z) {
  const long double kz = static_cast<long double>(k) * abs_z;
  // exp(-k Re z) * e^{k|z|} * P(Poisson(k|z|) > nmax)
  return static_cast<double>(std::exp(kz - static_cast<long double>(k) * re_z) *
                             poisson_upper_tail(kz, nmax));
}

int series_terms_for(int k, double abs_z_max, double re_z_min, double tolerance) {
  int n = static_cast<int>(std::ceil(k * abs_z_max));
  while (n < kMaxSeriesTerms && series_remainder_bound(k, n, abs_z_max, re_z_min) > tolerance) ++n;
  return n;
}

SeriesValue eval_series(const SeriesCoeffs& c, std::complex<double> z, double tolerance) {
  using cld = std::complex<long double>;
  const cld zl(z.real(), z.imag());
  const long double k = c.k();
  SeriesValue out;
  cld sum = 0.0L;
  // a_0 e^{-kz}
  if (sgn(c.a(0)) != 0) sum += std::exp(c.log_a(0) - k * zl);
  if (z != 0.0) {
    const long double log_abs_z = std::log(std::abs(zl));
    const long double arg_z = std::arg(zl);
    for (int n = 1; n <= c.nmax(); ++n) {
      if (sgn(c.a(n)) == 0) continue;
      const long double log_mag = c.log_a(n) + n * log_abs_z - std::lgamma(n + 1.0L) - k * zl.real();
      const long double phase = n * arg_z - k * zl.imag();
      sum += std::polar(std::exp(log_mag), phase);
    }
  }
  out.value = {static_cast<double>(sum.real()), static_cast<double>(sum.imag())};
  out.remainder = series_remainder_bound(c.k(), c.nmax(), std::abs(z), z.real());
  out.within_tolerance = out.remainder <= tolerance;
  return out;
}

double disc_radius(double lambda, double epsilon) {
  require_lambda(lambda);
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  return std::min(lambda * epsilon / 2.0, std::log((1.0 + epsilon) / (1.0 + epsilon / 2.0)));
}

namespace {

std::vector<std::complex<double>> circle_points(double centre, double radius, int samples) {
  std::vector<std::complex<double>> pts;
  pts.reserve(static_cast<std::size_t>(samples));
  for (int j = 0; j < samples; ++j) {
    const double theta = 2.0 * std::numbers::pi * j / samples;
    pts.push_back(centre + std::polar(radius, theta));
  }
  return pts;
}

}  // namespace

DiscReport disc_bound_check(const TautProperty& prop, double lambda, double epsilon, int samples) {
  if (samples < 1) throw std::invalid_argument("need at least one disc sample");
  DiscReport report;
  report.lambda = lambda;
  report.epsilon = epsilon;
  report.delta = disc_radius(lambda, epsilon);

  const double tilt = 1.0 + epsilon;
  const ProbInterval rhs = tilted_prob(prop, lambda, tilt, default_cap(lambda * tilt));
  report.rhs_lower = rhs.lower;
  report.rhs_upper = rhs.upper;

  const double abs_max = lambda + report.delta;
  const double re_min = lambda - report.delta;
  // Remainder small next to the majorant; floor keeps the loop finite for empty events.
  const double tol = std::max(rhs.lower * 1e-12, 1e-300);
  report.nmax = series_terms_for(prop.k, abs_max, re_min, tol);
  const SeriesCoeffs coeffs = series_coeffs(prop, report.nmax);
  // No member seed with total <= nmax and no mass on the real axis: the
  // event is empty and both sides vanish.
  bool empty = rhs.lower == 0.0;
  for (int n = 0; empty && n <= coeffs.nmax(); ++n) empty = coeffs.a(n) == 0;

  for (const auto z : circle_points(lambda, report.delta, samples)) {
    const SeriesValue v = eval_series(coeffs, z, tol);
    DiscSample s;
    s.z = z;
    s.f = v.value;
    s.abs_f = std::abs(v.value);
    s.remainder = v.remainder;
    const double lhs = s.abs_f + s.remainder;
    if (rhs.lower > 0.0) {
      s.ratio = lhs / rhs.lower;
    } else {
      s.ratio = lhs > 0.0 && !empty ? HUGE_VAL : 0.0;
    }
    report.max_ratio = std::max(report.max_ratio, s.ratio);
    report.samples.push_back(s);
  }
  return report;
}

std::vector<ComplexDecayRow> complex_decay(const std::function<TautProperty(int)>& family,
                                           double lambda, double epsilon,
                                           const std::vector<int>& ks, int samples) {
  const double delta = disc_radius(lambda, epsilon);
  const auto points = circle_points(lambda, delta, samples);
  std::vector<ComplexDecayRow> rows;
  for (const int k : ks) {
    if (k < 1) throw std::invalid_argument("complex_decay needs k >= 1");
    const TautProperty current = family(k);
    const TautProperty diff =
        k == 1 ? current : combine(BoolOp::Diff, current, family(k - 1));
    const double tol = 1e-15;
    const int nmax = series_terms_for(diff.k, lambda + delta, lambda - delta, tol);
    const SeriesCoeffs coeffs = series_coeffs(diff, nmax);

    ComplexDecayRow row;
    row.k = k;
    for (const auto z : points) {
      const SeriesValue v = eval_series(coeffs, z, tol);
      row.sup_abs = std::max(row.sup_abs, std::abs(v.value));
      row.remainder = std::max(row.remainder, v.remainder);
    }
    row.real_value = eval_series(coeffs, {lambda, 0.0}, tol).value.real();
    row.exact = exact_prob(diff, lambda, default_cap(lambda));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace gwtree

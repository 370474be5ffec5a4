#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gwtree/exact_engine.hpp"
#include "oracle.hpp"

using namespace gwtree;

namespace {

TautProperty root1(int k = 1) { return determined_by(root_one_child(), k); }

TautProperty size_eq(int n, int k) { return determined_by(size_equals(n), k); }

}  // namespace

TEST_CASE("closed forms are enclosed") {
  const auto iv = exact_prob(root1(), 1.0, 50);
  CHECK(iv.contains(std::exp(-1.0)));
  CHECK(iv.width() < 1e-12);
  CHECK(exact_prob(determined_by(size_less_than(2), 1), 2.0, 50).contains(std::exp(-2.0)));
  for (double lambda : {0.3, 1.0, 2.5}) {
    const double expect = 1.5 * lambda * lambda * std::exp(-3.0 * lambda);
    for (int k : {3, 4, 6}) {
      CAPTURE(lambda);
      CAPTURE(k);
      CHECK(exact_prob(size_eq(3, k), lambda, 50).contains(expect));
    }
  }
}

TEST_CASE("argument checks and cap warning") {
  CHECK_THROWS_AS(exact_prob(root1(), 0.0, 50), std::invalid_argument);
  CHECK_THROWS_AS(exact_prob(root1(), NAN, 50), std::invalid_argument);
  CHECK_THROWS_AS(exact_prob(root1(), 1.0, 0), std::invalid_argument);
  const auto iv = exact_prob(truncate_by_size(always(true), 6), 30.0, 1);
  CHECK(iv.cap_warning);
}

TEST_CASE("enclosures contain the enumerated probability") {
  for (const auto& p : oracle::all_props()) {
    CAPTURE(p.spec());
    const auto aut = parse_property(p.spec());
    for (int k = 1; k <= 4; ++k) {
      const auto witness = aut.monotone() ? truncate_by_witness(aut, k) : determined_by(aut, k);
      const auto size = truncate_by_size(aut, k);
      for (double lambda : {0.4, 1.3}) {
        const int box = 14;
        const auto w = oracle::box_probability(k, box, lambda,
                                               [&](const std::vector<int>& s) { return oracle::witness_member(p, s, k); });
        const auto z = oracle::box_probability(k, box, lambda,
                                               [&](const std::vector<int>& s) { return oracle::size_member(p, s, k); });
        const auto iw = exact_prob(witness, lambda, default_cap(lambda));
        const auto iz = exact_prob(size, lambda, default_cap(lambda));
        CHECK(iw.upper >= w.inside - 1e-15);
        CHECK(iw.lower <= (w.inside + w.outside) * (1 + 1e-12));
        CHECK(iz.upper >= z.inside - 1e-15);
        CHECK(iz.lower <= (z.inside + z.outside) * (1 + 1e-12));
        CHECK(std::abs(iw.lower - w.inside) < 1e-10);
        CHECK(std::abs(iz.lower - z.inside) < 1e-10);
      }
    }
  }
}

TEST_CASE("normalization and complements") {
  for (double lambda : {0.5, 1.0, 3.0, 8.0}) {
    for (int k : {1, 3, 6}) {
      const auto all = truncate_by_size(always(true), k);
      const auto full = determined_by(always(true), k);
      const auto one = exact_prob(full, lambda, default_cap(lambda));
      CHECK(one.lower + one.tail_mass >= 1.0 - 1e-12);
      const auto a = exact_prob(all, lambda, default_cap(lambda));
      const auto not_a = exact_prob(combine(BoolOp::Diff, full, all), lambda, default_cap(lambda));
      CHECK(std::abs(a.lower + not_a.lower - 1.0) <= 2.0 * (a.tail_mass + not_a.tail_mass) + 1e-12);
    }
  }
}

TEST_CASE("differences of an increasing family telescope") {
  const auto base = even_level_one_child();
  for (double lambda : {0.7, 2.0}) {
    double sum = 0.0;
    double slack = 0.0;
    for (int k = 1; k <= 7; ++k) {
      const auto cur = truncate_by_witness(base, k);
      const auto diff = k == 1 ? cur : combine(BoolOp::Diff, cur, truncate_by_witness(base, k - 1));
      const auto iv = exact_prob(diff, lambda, default_cap(lambda));
      sum += iv.lower;
      slack += iv.tail_mass + 1e-15;
      const auto whole = exact_prob(cur, lambda, default_cap(lambda));
      CHECK(std::abs(sum - whole.lower) <= slack + whole.tail_mass + 1e-14);
    }
  }
}

TEST_CASE("series coefficients") {
  SUBCASE("always true gives k^n") {
    for (int k : {1, 2, 5}) {
      const auto c = series_coeffs(determined_by(always(true), k), 30);
      for (int n = 0; n <= 30; ++n) {
        mpz_class kn;
        mpz_ui_pow_ui(kn.get_mpz_t(), static_cast<unsigned long>(k), static_cast<unsigned long>(n));
        CHECK(c.a(n) == kn);
      }
    }
  }
  SUBCASE("single seed (1)") {
    const auto c = series_coeffs(root1(), 10);
    for (int n = 0; n <= 10; ++n) CHECK(c.a(n) == (n == 1 ? 1 : 0));
  }
  SUBCASE("size three") {
    const auto c = series_coeffs(size_eq(3, 3), 12);
    for (int n = 0; n <= 12; ++n) CHECK(c.a(n) == (n == 2 ? 3 : 0));
  }
  SUBCASE("argument range") {
    CHECK_THROWS_AS(series_coeffs(root1(), -1), std::invalid_argument);
    CHECK_THROWS_AS(series_coeffs(root1(), kMaxSeriesTerms + 1), std::invalid_argument);
  }
}

TEST_CASE("coefficients match the enumerated membership set") {
  // a_n = sum over members with total n of n! / prod m_i!
  for (const auto& p : oracle::all_props()) {
    const auto aut = parse_property(p.spec());
    for (int k = 1; k <= 3; ++k) {
      const auto tp = truncate_by_size(aut, k);
      const int nmax = 9;
      std::vector<mpz_class> expect(nmax + 1, 0);
      oracle::for_each_seed(k, nmax, [&](const std::vector<int>& s) {
        int total = 0;
        for (int x : s) total += x;
        if (total > nmax || !oracle::size_member(p, s, k)) return;
        mpz_class term;
        mpz_fac_ui(term.get_mpz_t(), static_cast<unsigned long>(total));
        for (int x : s) {
          mpz_class f;
          mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(x));
          term /= f;
        }
        expect[static_cast<std::size_t>(total)] += term;
      });
      const auto c = series_coeffs(tp, nmax);
      for (int n = 0; n <= nmax; ++n) {
        CAPTURE(p.spec());
        CAPTURE(k);
        CAPTURE(n);
        CHECK(c.a(n) == expect[static_cast<std::size_t>(n)]);
        CHECK(c.within_bound(n));
      }
    }
  }
}

TEST_CASE("series evaluation") {
  const auto c = series_coeffs(root1(), 40);
  CHECK(std::abs(eval_series(c, 0.0).value) == 0.0);
  CHECK(std::abs(eval_series(series_coeffs(determined_by(always(true), 3), 5), 0.0).value - 1.0) < 1e-15);
  for (double lambda : {0.5, 1.0, 2.0}) {
    const auto v = eval_series(c, lambda);
    CHECK(v.within_tolerance);
    CHECK(std::abs(v.value.real() - lambda * std::exp(-lambda)) <= v.remainder + 1e-15);
  }
  // Entire: always-true equals 1 everywhere.
  const auto one = series_coeffs(determined_by(always(true), 2), 200);
  const auto v = eval_series(one, {3.0, 4.0});
  CHECK(std::abs(v.value - std::complex<double>(1.0, 0.0)) <= v.remainder + 1e-10);
  // Too few terms is flagged.
  CHECK_FALSE(eval_series(series_coeffs(determined_by(always(true), 2), 3), 5.0, 1e-10).within_tolerance);
}

TEST_CASE("series and exact engine agree on the real axis") {
  for (const auto& p : oracle::all_props()) {
    const auto aut = parse_property(p.spec());
    for (int k = 1; k <= 6; ++k) {
      for (const auto& tp : {truncate_by_size(aut, k), determined_by(aut, k)}) {
        for (double lambda : {0.5, 1.0, 2.0}) {
          const int nmax = series_terms_for(k, lambda, lambda, 1e-12);
          const auto v = eval_series(series_coeffs(tp, nmax), lambda, 1e-12);
          const auto iv = exact_prob(tp, lambda, default_cap(lambda));
          CAPTURE(tp.description());
          CHECK(v.value.real() >= iv.lower - v.remainder - 1e-12);
          CHECK(v.value.real() <= iv.upper + v.remainder + 1e-12);
        }
      }
    }
  }
}

TEST_CASE("remainder bound and term count") {
  CHECK(series_remainder_bound(1, 0, 0.0, 0.0) == 0.0);
  const int n = series_terms_for(4, 2.0, 2.0, 1e-12);
  CHECK(series_remainder_bound(4, n, 2.0, 2.0) <= 1e-12);
  CHECK(series_remainder_bound(4, n - 1, 2.0, 2.0) > 1e-12);
}

TEST_CASE("disc bound") {
  SUBCASE("one child at the root") {
    const auto r = disc_bound_check(root1(), 1.0, 0.1);
    CHECK(r.samples.size() == 64);
    CHECK(r.delta == doctest::Approx(std::min(0.05, std::log(1.1 / 1.05))));
    CHECK(r.passes());
  }
  SUBCASE("always true: majorant is exp(k lambda epsilon)") {
    const auto r = disc_bound_check(determined_by(always(true), 3), 2.0, 0.1);
    CHECK(r.rhs_lower == doctest::Approx(std::exp(3 * 2.0 * 0.1)).epsilon(1e-12));
    CHECK(r.passes());
  }
  SUBCASE("real axis with a large epsilon") {
    const auto r = disc_bound_check(root1(), 1.0, 50.0, 1);
    CHECK(r.samples[0].z.imag() == 0.0);
    CHECK(r.passes());
  }
  SUBCASE("a forced leaf at the root exceeds the majorant") {
    // |exp(-z)| = exp(delta - lambda) at z = lambda - delta, while the
    // majorant is exp(-lambda).
    const auto r = disc_bound_check(determined_by(size_less_than(2), 1), 1.0, 0.1);
    CHECK_FALSE(r.passes());
    CHECK(r.max_ratio == doctest::Approx(std::exp(r.delta)).epsilon(1e-9));
  }
}

TEST_CASE("complex decay rows") {
  auto constant = [](int k) { return determined_by(root_one_child(), k); };
  const auto rows = complex_decay(constant, 1.0, 0.1, {1, 2, 3});
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].sup_abs > 0.0);
  CHECK(rows[1].sup_abs == 0.0);
  CHECK(rows[2].sup_abs == 0.0);
  auto family = [](int k) { return truncate_by_witness(even_level_one_child(), k); };
  for (const auto& r : complex_decay(family, 2.0, 0.1, {2, 4, 6})) {
    CHECK(r.real_value >= r.exact.lower - r.remainder - 1e-12);
    CHECK(r.real_value <= r.exact.upper + r.remainder + 1e-12);
  }
}

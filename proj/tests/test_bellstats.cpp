#include "doctest.h"

#include <cmath>
#include <vector>

#include "hydrobell/bellstats.hpp"
#include "hydrobell/rng.hpp"

using namespace hydrobell;

namespace {

// Independent brute-force route for M: enumerate the outcome alphabet and
// sum x*y*n(x,y), dividing by N once (the empirical probabilities are
// rationals, so this is the exact evaluation).
double brute_force_m(const OutcomeCounts& c) {
  const int xs[4] = {1, 1, -1, -1};
  const int ys[4] = {1, -1, 1, -1};
  const std::int64_t ns[4] = {c.pp, c.pm, c.mp, c.mm};
  double numerator = 0.0;
  for (int i = 0; i < 4; ++i) {
    numerator += static_cast<double>(xs[i] * ys[i]) * static_cast<double>(ns[i]);
  }
  return numerator / static_cast<double>(c.total());
}

}  // namespace

TEST_CASE("correlation: perfect, null, and distribution-derived values") {
  CHECK(correlation({50, 0, 0, 0}).m_hat == 1.0);
  CHECK(correlation({50, 0, 0, 0}).std_error == 0.0);
  CHECK(correlation({25, 25, 25, 25}).m_hat == 0.0);

  // Singlet-style distribution (1 - xy cos(theta))/4 at theta = pi/3:
  // brute-force expectation is -cos(theta) = -1/2.
  const double theta = 3.14159265358979323846 / 3.0;
  const double c = std::cos(theta);
  double m_exact = 0.0;
  for (const int x : {1, -1}) {
    for (const int y : {1, -1}) {
      m_exact += x * y * 0.25 * (1.0 - x * y * c);
    }
  }
  CHECK(m_exact == doctest::Approx(-0.5).epsilon(1e-15));

  const std::int64_t n = 4'000'000;
  OutcomeCounts counts;
  counts.pp = static_cast<std::int64_t>(std::llround(n * 0.25 * (1.0 - c)));
  counts.mm = counts.pp;
  counts.pm = static_cast<std::int64_t>(std::llround(n * 0.25 * (1.0 + c)));
  counts.mp = counts.pm;
  CHECK(correlation(counts).m_hat == doctest::Approx(-0.5).epsilon(1e-6));
}

TEST_CASE("correlation: empty sample is an error") {
  CHECK_THROWS_AS(correlation({0, 0, 0, 0}), ConfigError);
}

TEST_CASE("correlation: exhaustive exact agreement with brute force, N <= 6") {
  int tables = 0;
  for (int n1 = 0; n1 <= 6; ++n1) {
    for (int n2 = 0; n1 + n2 <= 6; ++n2) {
      for (int n3 = 0; n1 + n2 + n3 <= 6; ++n3) {
        for (int n4 = 0; n1 + n2 + n3 + n4 <= 6; ++n4) {
          const OutcomeCounts c{n1, n2, n3, n4};
          if (c.total() == 0) continue;
          const CorrelationEstimate e = correlation(c);
          CHECK(e.m_hat == brute_force_m(c));
          CHECK(std::fabs(e.m_hat) <= 1.0);
          ++tables;
        }
      }
    }
  }
  CHECK(tables == 209);
}

TEST_CASE("correlation: outcome-flip symmetries") {
  const OutcomeCounts c{7, 3, 11, 5};
  const double m = correlation(c).m_hat;
  // Flip both outcomes: (x,y) -> (-x,-y) swaps pp<->mm and pm<->mp.
  CHECK(correlation({c.mm, c.mp, c.pm, c.pp}).m_hat == m);
  // Flip one side: x -> -x swaps pp<->mp and pm<->mm.
  CHECK(correlation({c.mp, c.mm, c.pp, c.pm}).m_hat == -m);
}

TEST_CASE("correlation: N^{-1/2} convergence on synthetic draws") {
  // Fixed four-outcome distribution with m = 0.3.
  const double p[4] = {0.4, 0.15, 0.2, 0.25};  // pp, pm, mp, mm -> m = 0.3
  const double m_true = p[0] - p[1] - p[2] + p[3];
  CHECK(m_true == doctest::Approx(0.3).epsilon(1e-12));

  SplitMix64 rng(123);
  double prev_se = 1.0;
  for (const std::int64_t n : {100LL, 10'000LL, 1'000'000LL}) {
    OutcomeCounts c;
    for (std::int64_t i = 0; i < n; ++i) {
      const double u = rng.next_unit();
      if (u < p[0]) {
        c.pp++;
      } else if (u < p[0] + p[1]) {
        c.pm++;
      } else if (u < p[0] + p[1] + p[2]) {
        c.mp++;
      } else {
        c.mm++;
      }
    }
    const CorrelationEstimate e = correlation(c);
    CHECK(std::fabs(e.m_hat - m_true) < 4.0 * e.std_error + 1e-12);
    // Standard error shrinks by ~10x per 100x sample growth.
    if (n > 100) CHECK(e.std_error < prev_se * 0.15);
    CHECK(e.std_error ==
          doctest::Approx(std::sqrt((1.0 - e.m_hat * e.m_hat) / n)));
    prev_se = e.std_error;
  }
}

TEST_CASE("chsh: algebraic cases") {
  const auto est = [](double m) {
    CorrelationEstimate e;
    e.m_hat = m;
    e.std_error = 0.0;
    e.n_samples = 1;
    return e;
  };
  CHECK(chsh(est(1), est(1), est(1), est(-1)).s_value == 4.0);
  CHECK(chsh(est(0), est(0), est(0), est(0)).s_value == 0.0);

  // Singlet M = -cos(angle difference) at the CHSH-optimal quartet
  // a=0, a'=pi/2, b=pi/4, b'=-pi/4.
  const double pi = 3.14159265358979323846;
  const double a = 0.0, ap = pi / 2.0, b = pi / 4.0, bp = -pi / 4.0;
  const auto m_of = [](double ta, double tb) { return -std::cos(ta - tb); };
  const ChshResult r =
      chsh(est(m_of(a, b)), est(m_of(ap, b)), est(m_of(a, bp)), est(m_of(ap, bp)));
  CHECK(r.s_value == doctest::Approx(-2.0 * std::sqrt(2.0)).epsilon(1e-12));
  CHECK(std::fabs(r.s_value) == doctest::Approx(2.8284271247461903).epsilon(1e-12));
}

TEST_CASE("chsh: exact linearity in each component") {
  SplitMix64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    double m[4], d[4];
    for (int i = 0; i < 4; ++i) {
      m[i] = 2.0 * rng.next_unit() - 1.0;
      d[i] = 2.0 * rng.next_unit() - 1.0;
    }
    const auto est = [](double v) {
      CorrelationEstimate e;
      e.m_hat = v;
      return e;
    };
    const double s1 = chsh(est(m[0]), est(m[1]), est(m[2]), est(m[3])).s_value;
    const double s2 = chsh(est(d[0]), est(d[1]), est(d[2]), est(d[3])).s_value;
    const double s12 = chsh(est(m[0] + d[0]), est(m[1] + d[1]),
                            est(m[2] + d[2]), est(m[3] + d[3]))
                           .s_value;
    CHECK(s12 == doctest::Approx(s1 + s2).epsilon(1e-12));
  }
}

TEST_CASE("chsh: error combines in quadrature") {
  CorrelationEstimate e;
  e.m_hat = 0.0;
  e.std_error = 0.03;
  const ChshResult r = chsh(e, e, e, e);
  CHECK(r.s_error == doctest::Approx(0.06).epsilon(1e-12));
}

TEST_CASE("bound_check: verdicts around |S| = 2") {
  const auto result = [](double s, double err) {
    ChshResult r;
    r.s_value = s;
    r.s_error = err;
    return r;
  };
  const BoundCheck violated = bound_check(result(2.49, 0.04));
  CHECK(violated.verdict == BoundVerdict::Violated);
  CHECK(violated.margin == doctest::Approx(0.49).epsilon(1e-12));

  CHECK(bound_check(result(1.0, 0.01)).verdict == BoundVerdict::Satisfied);
  CHECK(bound_check(result(2.02, 0.05)).verdict == BoundVerdict::Inconclusive);
  CHECK(bound_check(result(-2.49, 0.04)).verdict == BoundVerdict::Violated);
  // Degenerate zero-error point exactly on the bound: not violated.
  CHECK(bound_check(result(2.0, 0.0)).verdict != BoundVerdict::Violated);
}

#pragma once

// Bell/CHSH estimators over binary outcome pairs: the correlation
// M = <X_A X_B>, the four-term CHSH combination
// S = M(a,b) + M(a',b) + M(a,b') - M(a',b'), and the |S| <= 2 verdict.

#include <array>
#include <cstdint>

#include "hydrobell/errors.hpp"

namespace hydrobell {

struct OutcomeCounts {
  std::int64_t pp = 0;  // (+1, +1)
  std::int64_t pm = 0;  // (+1, -1)
  std::int64_t mp = 0;  // (-1, +1)
  std::int64_t mm = 0;  // (-1, -1)

  std::int64_t total() const { return pp + pm + mp + mm; }
  void add(int x_a, int x_b) {
    if (x_a > 0) {
      (x_b > 0 ? pp : pm) += 1;
    } else {
      (x_b > 0 ? mp : mm) += 1;
    }
  }
};

struct CorrelationEstimate {
  double m_hat = 0.0;
  double std_error = 0.0;
  std::int64_t n_samples = 0;
};

struct ChshResult {
  double s_value = 0.0;
  double s_error = 0.0;
  std::array<CorrelationEstimate, 4> components{};  // ab, a'b, ab', a'b'
};

enum class BoundVerdict : std::uint8_t { Satisfied, Violated, Inconclusive };

const char* to_string(BoundVerdict v);

struct BoundCheck {
  BoundVerdict verdict = BoundVerdict::Inconclusive;
  double margin = 0.0;  // |S| - 2
};

// m_hat = [n(+,+) + n(-,-) - n(+,-) - n(-,+)] / N with the binomial-derived
// standard error sqrt((1 - m_hat^2)/N). Throws ConfigError on N == 0.
CorrelationEstimate correlation(const OutcomeCounts& counts);

ChshResult chsh(const CorrelationEstimate& m_ab, const CorrelationEstimate& m_apb,
                const CorrelationEstimate& m_abp, const CorrelationEstimate& m_apbp);

// Two-sigma decision rule around |S| = 2.
BoundCheck bound_check(const ChshResult& result);

}  // namespace hydrobell

#include "hydrobell/bellstats.hpp"

#include <cmath>

namespace hydrobell {

const char* to_string(BoundVerdict v) {
  switch (v) {
    case BoundVerdict::Satisfied: return "satisfied";
    case BoundVerdict::Violated: return "violated";
    case BoundVerdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

CorrelationEstimate correlation(const OutcomeCounts& counts) {
  const std::int64_t n = counts.total();
  if (n < 1) throw ConfigError("bellstats: correlation of an empty sample");
  CorrelationEstimate e;
  e.n_samples = n;
  e.m_hat = static_cast<double>(counts.pp + counts.mm - counts.pm - counts.mp) /
            static_cast<double>(n);
  const double var = std::max(0.0, 1.0 - e.m_hat * e.m_hat);
  e.std_error = std::sqrt(var / static_cast<double>(n));
  return e;
}

ChshResult chsh(const CorrelationEstimate& m_ab, const CorrelationEstimate& m_apb,
                const CorrelationEstimate& m_abp, const CorrelationEstimate& m_apbp) {
  ChshResult r;
  r.components = {m_ab, m_apb, m_abp, m_apbp};
  r.s_value = m_ab.m_hat + m_apb.m_hat + m_abp.m_hat - m_apbp.m_hat;
  r.s_error = std::sqrt(m_ab.std_error * m_ab.std_error +
                        m_apb.std_error * m_apb.std_error +
                        m_abp.std_error * m_abp.std_error +
                        m_apbp.std_error * m_apbp.std_error);
  return r;
}

BoundCheck bound_check(const ChshResult& result) {
  BoundCheck c;
  c.margin = std::fabs(result.s_value) - 2.0;
  if (c.margin > 2.0 * result.s_error) {
    c.verdict = BoundVerdict::Violated;
  } else if (-c.margin > 2.0 * result.s_error) {
    c.verdict = BoundVerdict::Satisfied;
  } else {
    c.verdict = BoundVerdict::Inconclusive;
  }
  return c;
}

}  // namespace hydrobell

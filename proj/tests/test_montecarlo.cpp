#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <set>

#include "hydrobell/config.hpp"
#include "hydrobell/montecarlo.hpp"

using namespace hydrobell;

namespace {

Topography paper_bath() { return Topography::build(0.099, 0.099, LayoutConfig{}); }

RunRecord stub_record(std::int64_t idx, int xa, int xb) {
  RunRecord r;
  r.run_index = idx;
  r.seed = static_cast<std::uint64_t>(idx);
  r.x_a = xa;
  r.x_b = xb;
  return r;
}

// A small, fast physics cell for smoke tests.
BathContext tiny_bath(bool decoupled = false) {
  FluidParams fluid;
  LayoutConfig layout;
  DropletParams droplet;
  return BathContext(fluid, layout, droplet, 1.0 / 32.0, 8, 256, 0.2, 0.2,
                     decoupled);
}

}  // namespace

TEST_CASE("sample_initials: degenerate interval gives the exact centers") {
  const Topography topo = paper_bath();
  for (const SamplingMode mode :
       {SamplingMode::Independent, SamplingMode::Mirrored}) {
    SplitMix64 rng(1);
    const auto [ua, ub] = sample_initials_centered(mode, 0.0, topo, rng);
    CHECK(ua == -topo.outer_center_offset());
    CHECK(ub == topo.outer_center_offset());
    CHECK(ub == -ua);
  }
}

TEST_CASE("sample_initials: mirrored draws are exact mirrors") {
  const Topography topo = paper_bath();
  SplitMix64 rng(42);
  for (int i = 0; i < 1000; ++i) {
    const auto [xa, xb] =
        sample_initials(SamplingMode::Mirrored, 1.0, topo, rng);
    CHECK(xb == topo.mirror(xa));
  }
  SplitMix64 rng2(42);
  for (int i = 0; i < 1000; ++i) {
    const auto [ua, ub] =
        sample_initials_centered(SamplingMode::Mirrored, 1.0, topo, rng2);
    CHECK(ub == -ua);
  }
}

TEST_CASE("sample_initials: independent draws are uncorrelated and in-cavity") {
  const Topography topo = paper_bath();
  SplitMix64 rng(7);
  const double c = topo.outer_center_offset();
  const int n = 10000;
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    const auto [ua, ub] =
        sample_initials_centered(SamplingMode::Independent, 1.0, topo, rng);
    CHECK(topo.classify_centered(ua) == Region::OuterA);
    CHECK(topo.classify_centered(ub) == Region::OuterB);
    const double x = ua + c;  // offset from the left center
    const double y = ub - c;
    sx += x;
    sy += y;
    sxx += x * x;
    syy += y * y;
    sxy += x * y;
  }
  const double corr = (n * sxy - sx * sy) /
                      std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
  CHECK(std::fabs(corr) < 0.03);
}

TEST_CASE("sample_initials: interval exiting the cavity is rejected") {
  const Topography topo = paper_bath();
  SplitMix64 rng(1);
  CHECK_THROWS_AS(
      sample_initials(SamplingMode::Independent, 1.2, topo, rng),
      ConfigError);
  CHECK_THROWS_AS(sample_initials(SamplingMode::Mirrored, -0.1, topo, rng),
                  ConfigError);
}

TEST_CASE("per-run seed derivation is collision-free over the used range") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 100000; ++i) {
    seen.insert(derive_run_seed(20240801, i));
  }
  CHECK(seen.size() == 100000);
  CHECK(derive_run_seed(1, 5) != derive_run_seed(2, 5));
}

TEST_CASE("estimate_M: zero-variance stub stops at exactly n_min") {
  ConvergenceRule rule;
  rule.n_min = 40;
  rule.n_max = 400;
  const EstimateResult r = estimate_M(
      [](std::int64_t i) { return stub_record(i, 1, 1); }, rule, {});
  CHECK(r.converged);
  CHECK(r.estimate.m_hat == 1.0);
  CHECK(r.estimate.std_error == 0.0);
  CHECK(r.estimate.n_samples == 40);
  CHECK(r.reason == StopReason::RelTol);
}

TEST_CASE("estimate_M: m = 0 stops through the absolute branch") {
  ConvergenceRule rule;
  rule.n_min = 40;
  rule.n_max = 2000;
  const EstimateResult r = estimate_M(
      [](std::int64_t i) { return stub_record(i, 1, (i % 2 == 0) ? 1 : -1); },
      rule, {});
  CHECK(r.converged);
  CHECK(r.reason == StopReason::AbsTol);
  CHECK(r.estimate.m_hat == 0.0);
  // First batch multiple where sqrt(1/n) < 0.03.
  CHECK(r.estimate.n_samples == 1112);
}

TEST_CASE("estimate_M: Bernoulli stub with m = 0.5 lands within 2 sigma") {
  ConvergenceRule rule;
  rule.n_min = 40;
  rule.n_max = 4000;
  const EstimateResult r = estimate_M(
      [](std::int64_t i) {
        SplitMix64 rng(derive_run_seed(99, static_cast<std::uint64_t>(i)));
        // P(xy = +1) = 0.75 -> m = 0.5
        const int prod = rng.next_unit() < 0.75 ? 1 : -1;
        return stub_record(i, 1, prod);
      },
      rule, {});
  CHECK(r.converged);
  CHECK(std::fabs(r.estimate.m_hat - 0.5) <= 2.0 * r.estimate.std_error);
}

TEST_CASE("estimate_M: n_max cap flags the result unconverged") {
  ConvergenceRule rule;
  rule.n_min = 40;
  rule.n_max = 50;
  rule.abs_tol = 1e-6;
  rule.rel_tol = 1e-6;
  const EstimateResult r = estimate_M(
      [](std::int64_t i) { return stub_record(i, 1, (i % 2 == 0) ? 1 : -1); },
      rule, {});
  CHECK_FALSE(r.converged);
  CHECK(r.reason == StopReason::MaxRuns);
  CHECK(r.estimate.n_samples == 50);
}

TEST_CASE("estimate_M: failed runs are excluded and counted") {
  ConvergenceRule rule;
  rule.n_min = 10;
  rule.n_max = 20;
  const EstimateResult r = estimate_M(
      [](std::int64_t i) {
        if (i % 3 == 2) {
          RunRecord rec = stub_record(i, 0, 0);
          rec.failed = true;
          rec.failure = "synthetic divergence";
          return rec;
        }
        return stub_record(i, 1, 1);
      },
      rule, {});
  CHECK(r.n_failed > 0);
  CHECK(r.estimate.m_hat == 1.0);
  CHECK(r.estimate.n_samples + r.n_failed >= 10);
}

TEST_CASE("estimate_M: result is independent of the worker count") {
  ConvergenceRule rule;
  rule.n_min = 24;
  rule.n_max = 120;
  const OutcomeFn fn = [](std::int64_t i) {
    SplitMix64 rng(derive_run_seed(5, static_cast<std::uint64_t>(i)));
    return stub_record(i, rng.next_unit() < 0.5 ? 1 : -1,
                       rng.next_unit() < 0.5 ? 1 : -1);
  };
  EstimateOptions w1;
  w1.workers = 1;
  EstimateOptions w4;
  w4.workers = 4;
  const EstimateResult r1 = estimate_M(fn, rule, w1);
  const EstimateResult r4 = estimate_M(fn, rule, w4);
  CHECK(r1.estimate.m_hat == r4.estimate.m_hat);
  CHECK(r1.estimate.n_samples == r4.estimate.n_samples);
  CHECK(r1.converged == r4.converged);
  CHECK(r1.reason == r4.reason);
}

TEST_CASE("run_once: deterministic, mirrored symmetry, codomain") {
  const BathContext bath = tiny_bath();
  BathContext::CellSpec cell;
  cell.mode = SamplingMode::Mirrored;
  cell.delta_lambda = 0.0;
  cell.t_m_periods = 2;
  cell.master_seed = 11;

  const RunRecord r1 = bath.run_once(cell, 0);
  const RunRecord r2 = bath.run_once(cell, 0);
  REQUIRE_FALSE(r1.failed);
  CHECK(r1.x_a == r2.x_a);
  CHECK(r1.x_b == r2.x_b);
  CHECK(r1.seed == r2.seed);
  CHECK(std::abs(r1.x_a) == 1);
  CHECK(std::abs(r1.x_b) == 1);
  // Exact symmetry: mirrored initials force identical outcomes.
  CHECK(r1.x_a == r1.x_b);
}

TEST_CASE("run_once: mirrored mode with spread keeps X_A == X_B") {
  const BathContext bath = tiny_bath();
  BathContext::CellSpec cell;
  cell.mode = SamplingMode::Mirrored;
  cell.delta_lambda = 1.0;
  cell.t_m_periods = 2;
  cell.master_seed = 123;
  for (std::int64_t i = 0; i < 3; ++i) {
    const RunRecord r = bath.run_once(cell, i);
    REQUIRE_FALSE(r.failed);
    CHECK(r.x_a == r.x_b);
    CHECK(r.x_b0 == doctest::Approx(bath.topo().total_length() - r.x_a0));
  }
}

TEST_CASE("ledger: round trip and resume skips completed runs") {
  namespace fs = std::filesystem;
  const std::string path = "test_ledger.jsonl";
  fs::remove(path);
  {
    LedgerWriter writer(path, "deadbeef", "{\"profile\":\"test\"}");
    RunRecord r = stub_record(3, 1, -1);
    r.tunnel_a = 2;
    r.x_a0 = 0.51;
    writer.append("cellhash", r);
    RunRecord f = stub_record(4, 0, 0);
    f.failed = true;
    f.failure = "boom";
    writer.append("cellhash", f);
  }
  const LedgerData data = LedgerData::load(path);
  CHECK(data.config_hash == "deadbeef");
  REQUIRE(data.find("cellhash", 3) != nullptr);
  CHECK(data.find("cellhash", 3)->x_b == -1);
  CHECK(data.find("cellhash", 3)->tunnel_a == 2);
  REQUIRE(data.find("cellhash", 4) != nullptr);
  CHECK(data.find("cellhash", 4)->failed);
  CHECK(data.find("cellhash", 5) == nullptr);
  CHECK(data.find("other", 3) == nullptr);

  // Resume: the outcome function must not be called for stored indices.
  ConvergenceRule rule;
  rule.n_min = 4;
  rule.n_max = 4;
  LedgerData resume;
  for (std::int64_t i = 0; i < 4; ++i) {
    resume.runs[LedgerData::key("cell", i)] = stub_record(i, 1, 1);
  }
  EstimateOptions opts;
  opts.resume = &resume;
  opts.spec_hash = "cell";
  const EstimateResult r = estimate_M(
      [](std::int64_t) -> RunRecord {
        throw std::logic_error("resume should have skipped this");
      },
      rule, opts);
  CHECK(r.estimate.m_hat == 1.0);
  CHECK(r.estimate.n_samples == 4);
  fs::remove(path);
}

TEST_CASE("sweep_dlambda: deterministic table, same seed twice") {
  const BathContext bath = tiny_bath();
  BathContext::CellSpec base;
  base.mode = SamplingMode::Independent;
  base.t_m_periods = 1;
  base.master_seed = 77;
  ConvergenceRule rule;
  rule.n_min = 2;
  rule.n_max = 2;
  SweepOptions opts;
  opts.workers = 2;
  opts.config_hash = "cfg";

  const SweepTable t1 =
      sweep_dlambda(bath, base, {0.0, 1.0}, {1}, rule, opts);
  const SweepTable t2 =
      sweep_dlambda(bath, base, {0.0, 1.0}, {1}, rule, opts);
  REQUIRE(t1.rows.size() == 2);
  CHECK(t1.to_csv("cfg") == t2.to_csv("cfg"));
  for (const auto& row : t1.rows) {
    CHECK(std::fabs(row.estimate.m_hat) <= 1.0);
    CHECK(row.estimate.n_samples == 2);
  }
  // CSV carries the header comments and the declared columns.
  const std::string csv = t1.to_csv("cfg");
  CHECK(csv.find("# tool=hydrobell") != std::string::npos);
  CHECK(csv.find("# config_hash=cfg") != std::string::npos);
  CHECK(csv.find("delta_lambda_over_L,t_m_periods,m_hat,std_error,n_samples,"
                 "converged,stop_reason,n_failed") != std::string::npos);
}

TEST_CASE("stub harness: empirical frequencies match prescribed probabilities") {
  // Bernoulli oracle on the harness itself: prescribed P(++) = 0.7,
  // P(--) = 0.3 gives m = 1 regardless, so use mixed outcomes:
  // P(X_A = X_B) = 0.7 -> m = 0.4.
  ConvergenceRule rule;
  rule.n_min = 2000;
  rule.n_max = 2000;
  rule.batch_size = 100;
  const EstimateResult r = estimate_M(
      [](std::int64_t i) {
        SplitMix64 rng(derive_run_seed(31337, static_cast<std::uint64_t>(i)));
        const bool agree = rng.next_unit() < 0.7;
        const int xa = rng.next_unit() < 0.5 ? 1 : -1;
        return stub_record(i, xa, agree ? xa : -xa);
      },
      rule, {});
  const double expect = 0.4;
  const double sigma = std::sqrt((1.0 - expect * expect) / 2000.0);
  CHECK(std::fabs(r.estimate.m_hat - expect) < 3.0 * sigma);
}

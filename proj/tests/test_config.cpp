#include "doctest.h"

#include <string>

#include "hydrobell/config.hpp"

using namespace hydrobell;

TEST_CASE("profiles: paper and desk defaults validate") {
  const RunConfig paper = RunConfig::from_profile("paper");
  paper.validate();
  CHECK(paper.fluid.rho == 0.95);
  CHECK(paper.fluid.sigma == 20.9);
  CHECK(paper.fluid.nu == doctest::Approx(0.16));
  CHECK(paper.fluid.forcing_gamma == doctest::Approx(4.23));
  CHECK(paper.alpha == 0.099);
  CHECK(paper.layout.coupling_barrier_depth == 0.045);
  CHECK(paper.grid.nz == 24);
  CHECK(paper.experiment.convergence.rel_tol == 0.03);

  const RunConfig desk = RunConfig::from_profile("desk");
  desk.validate();
  CHECK(desk.grid.nz == 12);
  CHECK(desk.grid.steps_per_period == 256);
  CHECK(desk.experiment.t_m_periods == 100);

  CHECK_THROWS_AS(RunConfig::from_profile("nope"), ConfigError);
}

TEST_CASE("json: overrides land on top of the profile defaults") {
  const std::string text = R"({
    "profile": "desk",
    "fluid": {"nu": 0.2},
    "geometry": {"alpha": 0.15, "beta": 0.11},
    "experiment": {"mode": "mirrored", "master_seed": 99,
                   "convergence": {"n_min": 8, "n_max": 16}}
  })";
  const RunConfig c = RunConfig::from_json_text(text);
  CHECK(c.fluid.nu == 0.2);
  CHECK(c.fluid.rho == 0.95);  // inherited
  CHECK(c.alpha == 0.15);
  CHECK(c.beta == 0.11);
  CHECK(c.experiment.mode == SamplingMode::Mirrored);
  CHECK(c.experiment.master_seed == 99);
  CHECK(c.experiment.convergence.n_min == 8);
  CHECK(c.grid.nz == 12);  // desk default retained
}

TEST_CASE("json: errors name the offending field") {
  CHECK_THROWS_WITH_AS(RunConfig::from_json_text("{\"fluid\": {\"rho\": 0.0}}"),
                       doctest::Contains("rho"), ConfigError);
  CHECK_THROWS_WITH_AS(RunConfig::from_json_text("{\"fluid\": {\"rho\": \"x\"}}"),
                       doctest::Contains("rho"), ConfigError);
  CHECK_THROWS_WITH_AS(RunConfig::from_json_text("{\"fluid\": {\"rhoo\": 1}}"),
                       doctest::Contains("rhoo"), ConfigError);
  CHECK_THROWS_AS(RunConfig::from_json_text("{nope"), ConfigError);
  CHECK_THROWS_WITH_AS(
      RunConfig::from_json_text("{\"grid\": {\"dx_over_lambda\": 0.05}}"),
      doctest::Contains("dx_over_lambda"), ConfigError);
  CHECK_THROWS_WITH_AS(
      RunConfig::from_json_text(
          "{\"experiment\": {\"delta_lambda_over_L\": 1.5}}"),
      doctest::Contains("delta_lambda_over_L"), ConfigError);
  CHECK_THROWS_AS(RunConfig::from_json_text("{\"schema_version\": 2}"),
                  ConfigError);
}

TEST_CASE("config hash: stable, sensitive, and round-trippable") {
  const RunConfig a = RunConfig::from_profile("desk");
  const RunConfig b = RunConfig::from_profile("desk");
  CHECK(a.config_hash() == b.config_hash());

  RunConfig c = a;
  c.experiment.master_seed += 1;
  CHECK(c.config_hash() != a.config_hash());

  // The resolved document parses back to an identical configuration.
  const RunConfig back = RunConfig::from_json_text(a.resolved_json());
  CHECK(back.config_hash() == a.config_hash());
}

TEST_CASE("config: cell-spec and sweep-params projections") {
  RunConfig c = RunConfig::from_profile("desk");
  c.experiment.delta_lambda_over_L = 0.5;
  const BathContext::CellSpec cell = c.to_cell_spec();
  CHECK(cell.delta_lambda == doctest::Approx(0.5 * c.layout.cavity_length));
  CHECK(cell.t_m_periods == c.experiment.t_m_periods);
  const AlphaSweepParams p = c.to_sweep_params();
  CHECK(p.nz == c.grid.nz);
  CHECK(p.decoupled == c.experiment.decoupled);
}

#pragma once

// Run configuration: one versioned JSON document with two named presets.
// The "paper" profile carries the published bath (density 0.95 g/cm^3,
// 16 cS, 20.9 dyn/cm, 80 Hz drive at 4.23 g, 0.099 cm detector barriers) at
// production resolution; "desk" is a coarser, faster preset for interactive
// work and the acceptance suite. Every defaulted field is materialized into
// the resolved document so runs are self-describing, and the FNV-1a hash of
// that document stamps every output file.

#include <cstdint>
#include <string>
#include <vector>

#include "hydrobell/droplet.hpp"
#include "hydrobell/geometry.hpp"
#include "hydrobell/montecarlo.hpp"
#include "hydrobell/wavefield.hpp"

namespace hydrobell {

struct GridConfig {
  double dx_over_lambda = 1.0 / 48.0;
  int nz = 24;
  int steps_per_period = 512;
};

struct ExperimentConfig {
  SamplingMode mode = SamplingMode::Independent;
  double delta_lambda_over_L = 0.0;
  std::vector<double> delta_lambda_grid = {0.0, 0.5, 1.0};
  std::vector<int> t_m_list;                // defaults to {t_m_periods}
  std::vector<double> alpha_grid;           // defaults to {alpha}
  int t_m_periods = 1000;
  BellSettings settings;
  std::uint64_t master_seed = 20240801;
  ConvergenceRule convergence;
  bool decoupled = false;
};

struct OutputConfig {
  bool trajectory_csv = false;
  bool field_dump = false;
  int trajectory_stride = 8;
  int field_stride = 64;
};

struct RunConfig {
  FluidParams fluid;
  LayoutConfig layout;
  double alpha = 0.099;
  double beta = 0.099;
  DropletParams droplet;
  GridConfig grid;
  ExperimentConfig experiment;
  OutputConfig output;
  std::string profile = "paper";

  static RunConfig from_profile(const std::string& name);
  // Parses the document over the profile defaults (the file may itself name
  // a "profile"). Unknown keys are rejected, errors name the field.
  static RunConfig from_json_text(const std::string& text);
  static RunConfig from_file(const std::string& path);

  std::string resolved_json() const;  // every field materialized
  std::string config_hash() const;    // fnv1a64 hex of resolved_json()
  void validate() const;

  AlphaSweepParams to_sweep_params() const;
  BathContext::CellSpec to_cell_spec() const;
};

}  // namespace hydrobell

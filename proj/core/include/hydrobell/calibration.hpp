#pragma once

// Calibration probes: gravity-capillary dispersion and viscous decay of
// standing modes in a flat bath, the Faraday threshold of the Bell bath, and
// the wavelength of the fastest-growing subharmonic mode under supercritical
// forcing. The CLI's `calibrate` subcommand and the acceptance suite both
// run these.

#include <vector>

#include "hydrobell/geometry.hpp"
#include "hydrobell/wavefield.hpp"

namespace hydrobell {

// A uniform-depth bath of the given total length (the nine segments all
// carry the same depth).
Topography make_flat_bath(double total_length, double depth);

struct ModeProbe {
  double k = 0.0;                 // 1/cm, admissible cosine mode
  double omega_analytic = 0.0;    // rad/s from the dispersion relation
  double omega_measured = 0.0;    // rad/s from zero crossings
  double freq_rel_err = 0.0;
  double decay_rate_expected = 0.0;  // 1/s, modal energy rate 2*(2 nu k^2)
  double decay_rate_measured = 0.0;  // 1/s, log-energy fit (negated slope)
  double decay_rel_err = 0.0;
};

struct ModeProbeOptions {
  double depth = 0.5;
  double domain_length = 2.0;
  double dx_over_lambda = 1.0 / 32.0;
  int nz = 24;  // the high-k dispersion probes need the vertical resolution
  int steps_per_period = 256;
  int periods = 10;               // of the probed mode
  double amplitude = 1e-4;        // cm
};

// Unforced free oscillation of the admissible mode nearest k_target.
ModeProbe probe_standing_mode(const FluidParams& fluid, double k_target,
                              const ModeProbeOptions& opts = {});

struct FaradayModeScan {
  double wavelength = 0.0;  // cm
  double k_peak = 0.0;
  double gamma_used = 0.0;  // g-units
};

struct FaradayScanOptions {
  double depth = 0.5;
  double domain_length = 12.0;
  double dx_over_lambda = 1.0 / 32.0;
  int nz = 12;
  int steps_per_period = 256;
  int periods = 40;  // Faraday periods of growth
  std::uint64_t seed = 11;
  double k_min = 4.0;
  double k_max = 40.0;
};

// Seeds noise on a flat bath, drives it at `gamma` (above threshold), and
// returns the dominant standing-mode wavelength.
FaradayModeScan measure_faraday_mode(const FluidParams& fluid, double gamma,
                                     const FaradayScanOptions& opts = {});

struct CalibrationOptions {
  FluidParams fluid;
  LayoutConfig layout;
  double alpha = 0.099;
  double beta = 0.099;
  double dx_over_lambda = 1.0 / 32.0;
  int nz = 12;
  int steps_per_period = 256;
  ThresholdOptions threshold;           // applied to the Bell bath
  ModeProbeOptions mode_probe;
  FaradayScanOptions faraday_scan;
  double freq_tol = 0.02;
  double decay_tol = 0.05;
  double wavelength_tol = 0.05;
  double gamma_warn_tol = 0.20;
  double lambda_f_reference = 0.475;    // cm
  double gamma_f_reference = 4.69;      // g-units
};

struct CalibrationReport {
  double lambda_f_dispersion = 0.0;  // cm, root of the dispersion relation
  std::vector<ModeProbe> modes;
  ThresholdEstimate bath_threshold;      // Bell bath
  ThresholdEstimate flat_threshold;      // flat bath (drives the mode scan)
  FaradayModeScan mode_scan;
  bool dispersion_pass = false;
  bool decay_pass = false;
  bool wavelength_pass = false;
  bool gamma_within_warn = false;
  double gamma_rel_dev = 0.0;  // (estimate - reference)/reference
};

CalibrationReport run_calibration(const CalibrationOptions& opts);

}  // namespace hydrobell

#include "hydrobell/calibration.hpp"

#include <cmath>

#include "hydrobell/rng.hpp"

namespace hydrobell {

namespace {
constexpr double kPi = 3.14159265358979323846;

// Least-squares slope of y over x.
double lsq_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

Topography make_flat_bath(double total_length, double depth) {
  LayoutConfig layout;
  layout.cavity_length = 0.19 * total_length;
  layout.barrier_width = 0.05 * total_length;
  layout.central_length = 0.04 * total_length;
  layout.cavity_depth = depth;
  layout.central_depth = depth;
  layout.coupling_barrier_depth = depth;
  return Topography::build(depth, depth, layout);
}

ModeProbe probe_standing_mode(const FluidParams& fluid, double k_target,
                              const ModeProbeOptions& opts) {
  FluidParams quiet = fluid;
  quiet.forcing_gamma = 0.0;

  const Topography topo = make_flat_bath(opts.domain_length, opts.depth);
  const GridSpec grid = GridSpec::make(topo, quiet, opts.dx_over_lambda,
                                       opts.nz, opts.steps_per_period);
  const DtnOperator dtn = DtnOperator::build(topo, grid);

  const double length = grid.total_length;
  const int mode_n =
      std::max(1, static_cast<int>(std::lround(k_target * length / kPi)));
  const double k = static_cast<double>(mode_n) * kPi / length;

  ModeProbe probe;
  probe.k = k;
  probe.omega_analytic = dispersion_omega(quiet, k, opts.depth);
  probe.decay_rate_expected = 2.0 * (2.0 * quiet.nu * k * k);

  WaveState state = WaveState::zero(grid);
  const int n = grid.nodes();
  std::vector<double> mode_shape(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double x = grid.node_u(i) + 0.5 * length;
    mode_shape[static_cast<std::size_t>(i)] = std::cos(k * x);
    state.eta[i] = opts.amplitude * mode_shape[static_cast<std::size_t>(i)];
  }

  const double mode_period = 2.0 * kPi / probe.omega_analytic;
  const std::int64_t total_steps = static_cast<std::int64_t>(
      std::ceil(opts.periods * mode_period / grid.dt));

  const double g_eff = quiet.g0 + (quiet.sigma / quiet.rho) * k * k;
  const double w_k = k * std::tanh(k * opts.depth);

  const auto project = [&](const Eigen::ArrayXd& f) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
      s += w * f[i] * mode_shape[static_cast<std::size_t>(i)];
    }
    return s * grid.dx;
  };

  std::vector<double> cross_times;
  std::vector<double> ts, log_e;
  double c_prev = project(state.eta);
  const std::vector<PressureSource> no_sources;
  for (std::int64_t s = 0; s < total_steps; ++s) {
    wave_step(state, dtn, grid, quiet, no_sources);
    const double c = project(state.eta);
    if ((c_prev < 0.0 && c >= 0.0) || (c_prev > 0.0 && c <= 0.0)) {
      const double frac = c_prev / (c_prev - c);
      cross_times.push_back(state.t - grid.dt + frac * grid.dt);
    }
    c_prev = c;
    if (s % 4 == 0) {
      const double d = project(state.phi);
      const double e = g_eff * c * c + w_k * d * d;
      ts.push_back(state.t);
      log_e.push_back(std::log(std::max(e, 1e-300)));
    }
  }

  if (cross_times.size() >= 3) {
    const double half_period = (cross_times.back() - cross_times.front()) /
                               static_cast<double>(cross_times.size() - 1);
    probe.omega_measured = kPi / half_period;
  }
  probe.freq_rel_err =
      std::fabs(probe.omega_measured - probe.omega_analytic) /
      probe.omega_analytic;

  // Skip the first quarter (projection transients).
  const std::size_t start = ts.size() / 4;
  std::vector<double> tx(ts.begin() + start, ts.end());
  std::vector<double> ly(log_e.begin() + start, log_e.end());
  probe.decay_rate_measured = -lsq_slope(tx, ly);
  probe.decay_rel_err =
      std::fabs(probe.decay_rate_measured - probe.decay_rate_expected) /
      probe.decay_rate_expected;
  return probe;
}

FaradayModeScan measure_faraday_mode(const FluidParams& fluid, double gamma,
                                     const FaradayScanOptions& opts) {
  FluidParams driven = fluid;
  driven.forcing_gamma = gamma;

  const Topography topo = make_flat_bath(opts.domain_length, opts.depth);
  const GridSpec grid = GridSpec::make(topo, driven, opts.dx_over_lambda,
                                       opts.nz, opts.steps_per_period);
  const DtnOperator dtn = DtnOperator::build(topo, grid);
  const double length = grid.total_length;
  const int n = grid.nodes();

  WaveState state = WaveState::zero(grid);
  SplitMix64 rng(opts.seed);
  for (int i = 0; i < n; ++i) {
    state.eta[i] = 1e-6 * (2.0 * rng.next_unit() - 1.0);
  }

  const int n_min = std::max(1, static_cast<int>(opts.k_min * length / kPi));
  const int n_max = std::min(grid.columns / 2,
                             static_cast<int>(opts.k_max * length / kPi));
  std::vector<double> power(static_cast<std::size_t>(n_max - n_min + 1), 0.0);

  const std::int64_t total_steps =
      static_cast<std::int64_t>(opts.periods) * grid.steps_per_period;
  const std::int64_t accumulate_from =
      total_steps - 2 * grid.steps_per_period;
  const std::vector<PressureSource> no_sources;
  for (std::int64_t s = 0; s < total_steps; ++s) {
    wave_step(state, dtn, grid, driven, no_sources);
    if (s >= accumulate_from && s % 4 == 0) {
      for (int m = n_min; m <= n_max; ++m) {
        const double k = static_cast<double>(m) * kPi / length;
        double proj = 0.0;
        for (int i = 0; i < n; ++i) {
          const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
          proj += w * state.eta[i] * std::cos(k * (grid.node_u(i) + 0.5 * length));
        }
        power[static_cast<std::size_t>(m - n_min)] += proj * proj;
      }
    }
  }

  int best = n_min;
  double best_power = -1.0;
  for (int m = n_min; m <= n_max; ++m) {
    const double p = power[static_cast<std::size_t>(m - n_min)];
    if (p > best_power) {
      best_power = p;
      best = m;
    }
  }

  FaradayModeScan scan;
  scan.k_peak = static_cast<double>(best) * kPi / length;
  scan.wavelength = 2.0 * kPi / scan.k_peak;
  scan.gamma_used = gamma;
  return scan;
}

CalibrationReport run_calibration(const CalibrationOptions& opts) {
  CalibrationReport report;
  report.lambda_f_dispersion =
      faraday_wavelength(opts.fluid, opts.layout.cavity_depth);

  // Three admissible wavenumbers around the Faraday mode.
  const double k_f = 2.0 * kPi / report.lambda_f_dispersion;
  report.dispersion_pass = true;
  report.decay_pass = true;
  for (const double frac : {0.6, 1.0, 1.5}) {
    ModeProbeOptions mp = opts.mode_probe;
    mp.depth = opts.layout.cavity_depth;
    const ModeProbe probe = probe_standing_mode(opts.fluid, frac * k_f, mp);
    report.dispersion_pass =
        report.dispersion_pass && probe.freq_rel_err < opts.freq_tol;
    report.decay_pass = report.decay_pass && probe.decay_rel_err < opts.decay_tol;
    report.modes.push_back(probe);
  }

  // Faraday threshold of the Bell bath.
  const Topography bath = Topography::build(opts.alpha, opts.beta, opts.layout);
  const GridSpec bath_grid = GridSpec::make(bath, opts.fluid, opts.dx_over_lambda,
                                            opts.nz, opts.steps_per_period);
  report.bath_threshold = faraday_threshold(bath, opts.fluid, bath_grid,
                                            opts.threshold);
  report.gamma_rel_dev =
      (report.bath_threshold.gamma_f - opts.gamma_f_reference) /
      opts.gamma_f_reference;
  report.gamma_within_warn =
      std::fabs(report.gamma_rel_dev) <= opts.gamma_warn_tol;

  // Subharmonic wavelength from a flat bath driven just above its own
  // threshold.
  const Topography flat =
      make_flat_bath(opts.faraday_scan.domain_length, opts.faraday_scan.depth);
  const GridSpec flat_grid = GridSpec::make(flat, opts.fluid, opts.dx_over_lambda,
                                            opts.nz, opts.steps_per_period);
  ThresholdOptions flat_opts = opts.threshold;
  flat_opts.horizon_periods = 20;
  report.flat_threshold =
      faraday_threshold(flat, opts.fluid, flat_grid, flat_opts);
  report.mode_scan = measure_faraday_mode(
      opts.fluid, 1.08 * report.flat_threshold.gamma_f, opts.faraday_scan);
  report.wavelength_pass =
      std::fabs(report.mode_scan.wavelength - opts.lambda_f_reference) /
          opts.lambda_f_reference <
      opts.wavelength_tol;
  return report;
}

}  // namespace hydrobell

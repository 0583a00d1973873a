#pragma once

// Free-surface wave dynamics over the variable-depth bath:
//
//   d(eta)/dt = w + 2 nu d2(eta)/dx2
//   d(phi)/dt = -g(t) eta + (sigma/rho) d2(eta)/dx2 + 2 nu d2(phi)/dx2
//               - sum_j P_j(x - x_j(t)) / rho
//
// with g(t) = g0 (1 - Gamma sin(omega t)) and w = d(phi)/dz at z = 0 supplied
// by a Dirichlet-to-Neumann closure of Laplace's equation in the fluid bulk.
//
// The DtN map is a bilinear FEM discretization on a terrain-following
// (sigma) grid, piecewise-constant depth per column, no-flux bottom and end
// walls, direct sparse LDLT factorized once per (topography, grid) and
// reused every step. For a mirror-symmetric topography the operator is built
// as even/odd half-domain solvers, so mirror-symmetric surface data produces
// exactly mirror-symmetric output in floating point.

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "hydrobell/errors.hpp"
#include "hydrobell/geometry.hpp"

namespace hydrobell {

struct FluidParams {
  double rho = 0.95;      // g/cm^3
  double sigma = 20.9;    // dyn/cm
  double nu = 0.16;       // cm^2/s (16 cS)
  double g0 = 981.0;      // cm/s^2
  double forcing_gamma = 4.23;       // peak vibrational acceleration / g0
  double omega = 2.0 * 3.14159265358979323846 * 80.0;  // rad/s

  double faraday_period() const { return 4.0 * 3.14159265358979323846 / omega; }
  // Effective gravity in the bath frame.
  double g_of(double t) const {
    return g0 * (1.0 - forcing_gamma * std::sin(omega * t));
  }
};

// omega(k)^2 = (g0 k + (sigma/rho) k^3) tanh(k h)
double dispersion_omega(const FluidParams& fluid, double k, double depth);

// Wavelength of the subharmonic mode: solves dispersion at omega/2.
double faraday_wavelength(const FluidParams& fluid, double depth);

struct GridSpec {
  int columns = 0;           // horizontal elements; always even
  int nz = 24;               // vertical sigma elements
  int steps_per_period = 512;
  double dx = 0.0;           // cm; columns * dx == total_length
  double dt = 0.0;           // s;  dt * steps_per_period == faraday period
  double total_length = 0.0;
  double faraday_period = 0.0;
  double faraday_wavelength = 0.0;

  int nodes() const { return columns + 1; }
  int center_node() const { return columns / 2; }
  // Centered coordinate of node i; exact negation under i -> columns - i.
  double node_u(int i) const {
    return static_cast<double>(i - columns / 2) * dx;
  }

  // Builds a grid for the given bath: dx <= faraday_wavelength/32 enforced,
  // columns even, dt = T_F / steps_per_period, plus an explicit-RK4
  // stability validation. Throws ConfigError on violations.
  static GridSpec make(const Topography& topo, const FluidParams& fluid,
                       double dx_over_lambda, int nz, int steps_per_period);
};

struct WaveState {
  Eigen::ArrayXd eta;   // cm
  Eigen::ArrayXd phi;   // cm^2/s, surface potential
  double t = 0.0;
  std::int64_t step = 0;

  static WaveState zero(const GridSpec& grid) {
    WaveState s;
    s.eta = Eigen::ArrayXd::Zero(grid.nodes());
    s.phi = Eigen::ArrayXd::Zero(grid.nodes());
    return s;
  }
};

// Surface pressure source of one droplet: raised-cosine bump of half-width
// `halfwidth` centered at `center_u` (centered coordinate), spatial integral
// equal to `total_force`.
struct PressureSource {
  double center_u = 0.0;     // cm, centered coordinate
  double total_force = 0.0;  // dyn
  double halfwidth = 0.05;   // cm

  // Profile value at signed offset r from the center (dyn/cm).
  double value(double r) const;
};

class DtnOperator {
 public:
  // Throws ConfigError if nz < 4 (barrier under-resolved) and
  // NumericalError on a singular factorization.
  static DtnOperator build(const Topography& topo, const GridSpec& grid,
                           bool decoupled = false);

  DtnOperator();
  DtnOperator(DtnOperator&&) noexcept;
  DtnOperator& operator=(DtnOperator&&) noexcept;
  ~DtnOperator();

  // w = d(phi)/dz at the surface. Thread-safe for concurrent use on a shared
  // operator (the factorization is immutable).
  void apply(const Eigen::ArrayXd& phi_s, Eigen::ArrayXd& w) const;
  Eigen::ArrayXd apply(const Eigen::ArrayXd& phi_s) const;

  // Active node ranges [lo, hi] (one, or two in decoupled mode). Nodes
  // outside any range are inert (solid wall).
  const std::vector<std::pair<int, int>>& ranges() const;
  bool decoupled() const;
  int nodes() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Second derivative with no-flux (reflecting) ends on each active range;
// zero on inert nodes.
void surface_laplacian(const Eigen::ArrayXd& f,
                       const std::vector<std::pair<int, int>>& ranges,
                       double inv_dx2, Eigen::ArrayXd& out);

// Nodal centered-difference slope of eta at node j (0 at range ends).
double nodal_slope(const Eigen::ArrayXd& eta, int j,
                   const std::pair<int, int>& range, double inv_2dx);

// d(eta)/dx at centered coordinate u: piecewise-linear interpolation of the
// nodal centered differences. Exactly odd under (eta mirrored, u -> -u).
double slope_at(const Eigen::ArrayXd& eta, const GridSpec& grid,
                const std::pair<int, int>& range, double u);

// Wave-only advance by one RK4 step with frozen pressure sources (sources
// are evaluated at state.t and held through the stages). The coupled
// droplet+wave integrator lives in simulation.hpp.
void wave_step(WaveState& state, const DtnOperator& dtn, const GridSpec& grid,
               const FluidParams& fluid,
               const std::vector<PressureSource>& sources);

struct ThresholdOptions {
  double gamma_lo = 3.5;        // g-units
  double gamma_hi = 6.0;
  double width_tol = 0.05;      // g-units
  int horizon_periods = 30;
  std::uint64_t seed = 7;
  double seed_amplitude = 1e-6;  // cm
};

struct ThresholdEstimate {
  double gamma_f = 0.0;       // bracket midpoint, g-units
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  double bracket_width = 0.0;
  double rate_lo = 0.0;       // energy growth rate at the initial endpoints
  double rate_hi = 0.0;
};

// Bisection between decay and growth of seeded wave energy over a fixed
// horizon. Throws BracketError when the initial endpoints do not straddle
// the threshold.
ThresholdEstimate faraday_threshold(const Topography& topo,
                                    const FluidParams& fluid,
                                    const GridSpec& grid,
                                    const ThresholdOptions& opts = {});

// Exponential growth rate (1/s) of the seeded wave energy at the given
// forcing, from a log-energy fit over the second half of the horizon.
double wave_energy_growth_rate(const Topography& topo, const FluidParams& fluid,
                               const GridSpec& grid, double gamma,
                               const ThresholdOptions& opts);

// Binary record stream of eta profiles. Little-endian layout:
// header {u32 magic 'HBWF', u32 version, u64 nx, f64 dx, f64 dt},
// frames {u64 step, nx * f64 eta}.
class FieldDumpWriter {
 public:
  FieldDumpWriter(const std::string& path, const GridSpec& grid);
  ~FieldDumpWriter();
  void frame(const WaveState& state);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace hydrobell

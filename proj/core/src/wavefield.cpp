#include "hydrobell/wavefield.hpp"

#include <Eigen/Sparse>

#include <cmath>
#include <cstring>
#include <fstream>
#include <vector>

#include "hydrobell/rng.hpp"

namespace hydrobell {

double dispersion_omega(const FluidParams& fluid, double k, double depth) {
  const double s = (fluid.g0 * k + (fluid.sigma / fluid.rho) * k * k * k) *
                   std::tanh(k * depth);
  return std::sqrt(s);
}

double faraday_wavelength(const FluidParams& fluid, double depth) {
  const double target = 0.5 * fluid.omega;
  double lo = 1e-3, hi = 1e4;
  if (dispersion_omega(fluid, hi, depth) < target) {
    throw ConfigError("wavefield: dispersion bracket too small for omega/2");
  }
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (dispersion_omega(fluid, mid, depth) < target ? lo : hi) = mid;
  }
  return 2.0 * 3.14159265358979323846 / (0.5 * (lo + hi));
}

GridSpec GridSpec::make(const Topography& topo, const FluidParams& fluid,
                        double dx_over_lambda, int nz, int steps_per_period) {
  if (!(dx_over_lambda > 0.0)) {
    throw ConfigError("grid: dx_over_lambda must be positive");
  }
  if (dx_over_lambda > 1.0 / 32.0 + 1e-12) {
    throw ConfigError("grid: dx_over_lambda exceeds 1/32; the Faraday mode would be under-resolved");
  }
  if (nz < 4) {
    throw ConfigError("grid: nz must be >= 4 to resolve the shallowest barrier");
  }
  if (steps_per_period < 8) {
    throw ConfigError("grid: steps_per_period must be >= 8");
  }

  GridSpec g;
  g.nz = nz;
  g.steps_per_period = steps_per_period;
  g.total_length = topo.total_length();
  g.faraday_period = fluid.faraday_period();
  g.faraday_wavelength =
      hydrobell::faraday_wavelength(fluid, topo.layout().cavity_depth);

  const double dx_target = g.faraday_wavelength * dx_over_lambda;
  // Even column count so the bath center is a grid node (required by the
  // mirror-equivariant solver split).
  int cols = 2 * static_cast<int>(std::ceil(g.total_length / (2.0 * dx_target)));
  g.columns = cols;
  g.dx = g.total_length / static_cast<double>(cols);
  g.dt = g.faraday_period / static_cast<double>(steps_per_period);

  // Explicit RK4 stability screen for the stiffest resolved mode. The
  // surface stencil eigenvalue is bounded by 4/dx^2. The discrete DtN
  // eigenvalue follows k*tanh(kh) for resolved modes (consistent-mass bound
  // sqrt(12)/dx) but grows like k_hat^2 * dz/3 once the vertical decay of a
  // sawtooth mode is under-resolved; both branches are screened.
  const double k2_hat = 4.0 / (g.dx * g.dx);
  const double dz_max = topo.max_depth() / static_cast<double>(nz);
  const double w_bound = std::max(std::sqrt(12.0) / g.dx,
                                  (12.0 / (g.dx * g.dx)) * dz_max / 3.0);
  const double g_max = fluid.g0 * (1.0 + fluid.forcing_gamma);
  const double omega_max =
      std::sqrt(w_bound * (g_max + (fluid.sigma / fluid.rho) * k2_hat));
  const double damp_max = 2.0 * fluid.nu * k2_hat;
  if (omega_max * g.dt > 2.7) {
    throw ConfigError(
        "grid: dt violates the capillary-gravity stability bound "
        "(omega_max*dt = " + std::to_string(omega_max * g.dt) +
        " > 2.7); increase steps_per_period or coarsen dx");
  }
  if (damp_max * g.dt > 2.5) {
    throw ConfigError(
        "grid: dt violates the viscous stability bound (rate*dt = " +
        std::to_string(damp_max * g.dt) + " > 2.5); increase steps_per_period");
  }
  return g;
}

double PressureSource::value(double r) const {
  const double arg = std::fabs(r) * (3.14159265358979323846 / halfwidth);
  if (!(arg < 3.14159265358979323846)) return 0.0;
  const double amp = total_force / (2.0 * halfwidth);
  return amp * (1.0 + std::cos(arg));
}

// ---------------------------------------------------------------------------
// DtN operator
// ---------------------------------------------------------------------------

namespace {

// One FEM Laplace problem over an inclusive node range with no-flux sides
// (optionally a zero-Dirichlet left column for the odd half-problem) and
// Dirichlet surface data. Maps surface potential to surface d(phi)/dz.
struct SubSolver {
  int node_lo = 0;
  int node_hi = 0;
  bool dirichlet_left = false;
  int nz = 0;

  Eigen::SparseMatrix<double> a_is;  // interior rows, surface cols
  Eigen::SparseMatrix<double> a_si;  // surface rows, interior cols
  Eigen::SparseMatrix<double> a_ss;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> fact;
  Eigen::VectorXd lump_inv;

  int width() const { return node_hi - node_lo; }

  void assemble(const std::vector<double>& col_depth, const GridSpec& grid) {
    const int w = width();
    nz = grid.nz;
    const double dx = grid.dx;
    const double dz = 1.0 / static_cast<double>(nz);

    // Unknown ids for nodes below the surface; -1 marks the pinned left
    // column of the odd problem.
    std::vector<int> id(static_cast<std::size_t>(w + 1) * nz, -1);
    int n_unknown = 0;
    for (int il = 0; il <= w; ++il) {
      if (dirichlet_left && il == 0) continue;
      for (int k = 0; k < nz; ++k) {
        id[static_cast<std::size_t>(il) * nz + k] = n_unknown++;
      }
    }

    std::vector<Eigen::Triplet<double>> t_ii, t_is, t_si, t_ss;
    t_ii.reserve(static_cast<std::size_t>(w) * nz * 16);

    // 1D linear-element stiffness/mass on [0, len]:
    //   K = (1/len) [[1,-1],[-1,1]],  M = (len/6) [[2,1],[1,2]]
    const auto k1 = [](int i, int j, double len) {
      return (i == j ? 1.0 : -1.0) / len;
    };
    const auto m1 = [](int i, int j, double len) {
      return len * (i == j ? 2.0 : 1.0) / 6.0;
    };

    for (int c = 0; c < w; ++c) {
      const double h = col_depth[static_cast<std::size_t>(node_lo + c)];
      const double coef_x = h;        // integrand h * phi_x psi_x
      const double coef_z = 1.0 / h;  // integrand (1/h) * phi_s psi_s
      for (int k = 0; k < nz; ++k) {
        // Local corner p = (px, pz), px in {0,1} horizontal, pz vertical.
        for (int p = 0; p < 4; ++p) {
          const int px = p & 1, pz = p >> 1;
          const int pil = c + px, pk = k + pz;
          const bool p_surface = (pk == nz);
          const int p_id = p_surface
                               ? pil
                               : id[static_cast<std::size_t>(pil) * nz + pk];
          if (!p_surface && p_id < 0) continue;  // pinned row
          for (int q = 0; q < 4; ++q) {
            const int qx = q & 1, qz = q >> 1;
            const int qil = c + qx, qk = k + qz;
            const bool q_surface = (qk == nz);
            const int q_id = q_surface
                                 ? qil
                                 : id[static_cast<std::size_t>(qil) * nz + qk];
            if (!q_surface && q_id < 0) continue;  // pinned value is zero
            const double v = coef_x * k1(px, qx, dx) * m1(pz, qz, dz) +
                             coef_z * m1(px, qx, dx) * k1(pz, qz, dz);
            if (p_surface && q_surface) {
              t_ss.emplace_back(p_id, q_id, v);
            } else if (p_surface) {
              t_si.emplace_back(p_id, q_id, v);
            } else if (q_surface) {
              t_is.emplace_back(p_id, q_id, v);
            } else {
              t_ii.emplace_back(p_id, q_id, v);
            }
          }
        }
      }
    }

    Eigen::SparseMatrix<double> a_ii(n_unknown, n_unknown);
    a_ii.setFromTriplets(t_ii.begin(), t_ii.end());
    a_is.resize(n_unknown, w + 1);
    a_is.setFromTriplets(t_is.begin(), t_is.end());
    a_si.resize(w + 1, n_unknown);
    a_si.setFromTriplets(t_si.begin(), t_si.end());
    a_ss.resize(w + 1, w + 1);
    a_ss.setFromTriplets(t_ss.begin(), t_ss.end());

    fact.compute(a_ii);
    if (fact.info() != Eigen::Success) {
      throw NumericalError(
          "wavefield: singular DtN factorization (columns " +
          std::to_string(node_lo) + ".." + std::to_string(node_hi) + ", nz " +
          std::to_string(nz) + ")");
    }

    lump_inv.resize(w + 1);
    for (int il = 0; il <= w; ++il) {
      const double weight =
          grid.dx * 0.5 * ((il > 0 ? 1.0 : 0.0) + (il < w ? 1.0 : 0.0));
      lump_inv[il] = 1.0 / weight;
    }
  }

  // phi and w are local slices of length width()+1.
  void apply(const Eigen::VectorXd& phi, Eigen::VectorXd& w_out) const {
    const Eigen::VectorXd rhs = -(a_is * phi);
    const Eigen::VectorXd x = fact.solve(rhs);
    w_out = a_si * x + a_ss * phi;
    w_out.array() *= lump_inv.array();
  }
};

}  // namespace

struct DtnOperator::Impl {
  enum class Mode { General, Symmetric, DecoupledSym, DecoupledGen };
  Mode mode = Mode::General;
  int columns = 0;
  bool decoupled = false;
  std::vector<std::pair<int, int>> ranges;
  SubSolver full, even, odd, left, right;
};

DtnOperator::DtnOperator() = default;
DtnOperator::DtnOperator(DtnOperator&&) noexcept = default;
DtnOperator& DtnOperator::operator=(DtnOperator&&) noexcept = default;
DtnOperator::~DtnOperator() = default;

DtnOperator DtnOperator::build(const Topography& topo, const GridSpec& grid,
                               bool decoupled) {
  if (grid.nz < 4) {
    throw ConfigError("wavefield: nz < 4 under-resolves the shallowest barrier");
  }
  DtnOperator op;
  op.impl_ = std::make_unique<Impl>();
  Impl& im = *op.impl_;
  im.columns = grid.columns;
  im.decoupled = decoupled;
  const std::vector<double> depth = topo.column_depths(grid.columns);
  const int ic = grid.center_node();

  if (!decoupled) {
    im.ranges = {{0, grid.columns}};
    if (topo.mirror_symmetric()) {
      im.mode = Impl::Mode::Symmetric;
      im.even.node_lo = ic;
      im.even.node_hi = grid.columns;
      im.even.dirichlet_left = false;
      im.even.assemble(depth, grid);
      im.odd.node_lo = ic;
      im.odd.node_hi = grid.columns;
      im.odd.dirichlet_left = true;
      im.odd.assemble(depth, grid);
    } else {
      im.mode = Impl::Mode::General;
      im.full.node_lo = 0;
      im.full.node_hi = grid.columns;
      im.full.assemble(depth, grid);
    }
  } else {
    // Solid wall replacing the central cavity: wall faces snapped to the
    // grid nodes nearest the cavity edges.
    const int off = static_cast<int>(
        std::lround(topo.central_half_length() / grid.dx));
    const int i_right = ic + std::max(1, off);
    const int i_left = grid.columns - i_right;
    if (i_left < 4) {
      throw ConfigError("wavefield: decoupled wall leaves no left bath");
    }
    im.ranges = {{0, i_left}, {i_right, grid.columns}};
    im.right.node_lo = i_right;
    im.right.node_hi = grid.columns;
    im.right.assemble(depth, grid);
    if (topo.mirror_symmetric()) {
      im.mode = Impl::Mode::DecoupledSym;
    } else {
      im.mode = Impl::Mode::DecoupledGen;
      im.left.node_lo = 0;
      im.left.node_hi = i_left;
      im.left.assemble(depth, grid);
    }
  }
  return op;
}

const std::vector<std::pair<int, int>>& DtnOperator::ranges() const {
  return impl_->ranges;
}
bool DtnOperator::decoupled() const { return impl_->decoupled; }
int DtnOperator::nodes() const { return impl_->columns + 1; }

void DtnOperator::apply(const Eigen::ArrayXd& phi_s, Eigen::ArrayXd& w) const {
  const Impl& im = *impl_;
  const int n = im.columns + 1;
  if (phi_s.size() != n) {
    throw ConfigError("wavefield: DtN input size mismatch");
  }
  w.setZero(n);

  switch (im.mode) {
    case Impl::Mode::General: {
      Eigen::VectorXd in = phi_s.matrix();
      Eigen::VectorXd out;
      im.full.apply(in, out);
      w = out.array();
      break;
    }
    case Impl::Mode::Symmetric: {
      const int ic = im.columns / 2;
      const int h = im.columns / 2;
      Eigen::VectorXd even(h + 1), odd(h + 1);
      for (int j = 0; j <= h; ++j) {
        even[j] = 0.5 * (phi_s[ic + j] + phi_s[ic - j]);
        odd[j] = 0.5 * (phi_s[ic + j] - phi_s[ic - j]);
      }
      Eigen::VectorXd we, wo;
      im.even.apply(even, we);
      im.odd.apply(odd, wo);
      wo[0] = 0.0;  // odd flux vanishes on the symmetry axis
      w[ic] = we[0];
      for (int j = 1; j <= h; ++j) {
        w[ic + j] = we[j] + wo[j];
        w[ic - j] = we[j] - wo[j];
      }
      break;
    }
    case Impl::Mode::DecoupledSym: {
      const int i_right = im.ranges[1].first;
      const int i_left = im.ranges[0].second;
      const int wdt = im.columns - i_right;
      Eigen::VectorXd in(wdt + 1), out;
      for (int j = 0; j <= wdt; ++j) in[j] = phi_s[i_right + j];
      im.right.apply(in, out);
      for (int j = 0; j <= wdt; ++j) w[i_right + j] = out[j];
      // Left bath through the fold: it is the exact mirror of the right one.
      for (int j = 0; j <= wdt; ++j) in[j] = phi_s[i_left - j];
      im.right.apply(in, out);
      for (int j = 0; j <= wdt; ++j) w[i_left - j] = out[j];
      break;
    }
    case Impl::Mode::DecoupledGen: {
      const int i_right = im.ranges[1].first;
      const int i_left = im.ranges[0].second;
      const int wr = im.columns - i_right;
      Eigen::VectorXd in(wr + 1), out;
      for (int j = 0; j <= wr; ++j) in[j] = phi_s[i_right + j];
      im.right.apply(in, out);
      for (int j = 0; j <= wr; ++j) w[i_right + j] = out[j];
      Eigen::VectorXd inl(i_left + 1), outl;
      for (int j = 0; j <= i_left; ++j) inl[j] = phi_s[j];
      im.left.apply(inl, outl);
      for (int j = 0; j <= i_left; ++j) w[j] = outl[j];
      break;
    }
  }
}

Eigen::ArrayXd DtnOperator::apply(const Eigen::ArrayXd& phi_s) const {
  Eigen::ArrayXd w;
  apply(phi_s, w);
  return w;
}

// ---------------------------------------------------------------------------
// Surface stencils
// ---------------------------------------------------------------------------

void surface_laplacian(const Eigen::ArrayXd& f,
                       const std::vector<std::pair<int, int>>& ranges,
                       double inv_dx2, Eigen::ArrayXd& out) {
  out.setZero(f.size());
  for (const auto& [lo, hi] : ranges) {
    // No-flux ends via ghost reflection; the two-addend forms keep mirrored
    // evaluations bit-exact (IEEE addition is commutative).
    out[lo] = ((f[lo + 1] + f[lo + 1]) - 2.0 * f[lo]) * inv_dx2;
    for (int i = lo + 1; i < hi; ++i) {
      out[i] = ((f[i - 1] + f[i + 1]) - 2.0 * f[i]) * inv_dx2;
    }
    out[hi] = ((f[hi - 1] + f[hi - 1]) - 2.0 * f[hi]) * inv_dx2;
  }
}

double nodal_slope(const Eigen::ArrayXd& eta, int j,
                   const std::pair<int, int>& range, double inv_2dx) {
  if (j <= range.first || j >= range.second) return 0.0;
  return (eta[j + 1] - eta[j - 1]) * inv_2dx;
}

double slope_at(const Eigen::ArrayXd& eta, const GridSpec& grid,
                const std::pair<int, int>& range, double u) {
  const double xi = u / grid.dx;
  double fl = std::floor(xi);
  int j = grid.center_node() + static_cast<int>(fl);
  double theta = xi - fl;
  if (j < range.first) {
    j = range.first;
    theta = 0.0;
  } else if (j >= range.second) {
    j = range.second - 1;
    theta = 1.0;
  }
  const double inv_2dx = 0.5 / grid.dx;
  const double s0 = nodal_slope(eta, j, range, inv_2dx);
  const double s1 = nodal_slope(eta, j + 1, range, inv_2dx);
  const double w0 = 1.0 - theta;
  return w0 * s0 + theta * s1;
}

// ---------------------------------------------------------------------------
// Wave-only stepper (frozen sources) and energy probes
// ---------------------------------------------------------------------------

namespace {

struct WaveRhs {
  const DtnOperator* dtn;
  const GridSpec* grid;
  const FluidParams* fluid;
  const Eigen::ArrayXd* pressure;  // frozen over the step; may be null
  mutable Eigen::ArrayXd w, le, lp;

  void operator()(double t, const Eigen::ArrayXd& eta, const Eigen::ArrayXd& phi,
                  Eigen::ArrayXd& deta, Eigen::ArrayXd& dphi) const {
    dtn->apply(phi, w);
    const double inv_dx2 = 1.0 / (grid->dx * grid->dx);
    surface_laplacian(eta, dtn->ranges(), inv_dx2, le);
    surface_laplacian(phi, dtn->ranges(), inv_dx2, lp);
    const double two_nu = 2.0 * fluid->nu;
    const double sr = fluid->sigma / fluid->rho;
    const double gt = fluid->g_of(t);
    deta = w + two_nu * le;
    dphi = (-gt) * eta + sr * le + two_nu * lp;
    if (pressure != nullptr) {
      dphi -= (1.0 / fluid->rho) * (*pressure);
    }
  }
};

}  // namespace

void wave_step(WaveState& state, const DtnOperator& dtn, const GridSpec& grid,
               const FluidParams& fluid,
               const std::vector<PressureSource>& sources) {
  const int n = grid.nodes();
  if (state.eta.size() != n || state.phi.size() != n) {
    throw ConfigError("wavefield: state size does not match the grid");
  }

  Eigen::ArrayXd p;
  const Eigen::ArrayXd* p_ptr = nullptr;
  if (!sources.empty()) {
    p = Eigen::ArrayXd::Zero(n);
    for (const auto& s : sources) {
      if (s.total_force == 0.0) continue;
      const int jmin = static_cast<int>(std::ceil((s.center_u - s.halfwidth) / grid.dx));
      const int jmax = static_cast<int>(std::floor((s.center_u + s.halfwidth) / grid.dx));
      for (int jr = jmin; jr <= jmax; ++jr) {
        const int j = grid.center_node() + jr;
        if (j < 0 || j >= n) continue;
        p[j] += s.value(static_cast<double>(jr) * grid.dx - s.center_u);
      }
    }
    p_ptr = &p;
  }

  WaveRhs rhs{&dtn, &grid, &fluid, p_ptr, {}, {}, {}};
  const double dt = grid.dt;
  Eigen::ArrayXd k1e(n), k1p(n), k2e(n), k2p(n), k3e(n), k3p(n), k4e(n), k4p(n);
  Eigen::ArrayXd se(n), sp(n);

  rhs(state.t, state.eta, state.phi, k1e, k1p);
  se = state.eta + (0.5 * dt) * k1e;
  sp = state.phi + (0.5 * dt) * k1p;
  rhs(state.t + 0.5 * dt, se, sp, k2e, k2p);
  se = state.eta + (0.5 * dt) * k2e;
  sp = state.phi + (0.5 * dt) * k2p;
  rhs(state.t + 0.5 * dt, se, sp, k3e, k3p);
  se = state.eta + dt * k3e;
  sp = state.phi + dt * k3p;
  rhs(state.t + dt, se, sp, k4e, k4p);

  state.eta += (dt / 6.0) * ((k1e + k4e) + 2.0 * (k2e + k3e));
  state.phi += (dt / 6.0) * ((k1p + k4p) + 2.0 * (k2p + k3p));
  state.t += dt;
  state.step += 1;

  const double m = state.eta.abs().maxCoeff();
  if (!(m < 1e3)) {
    throw NumericalError("wavefield: wave-only step diverged", state.step, m);
  }
}

double wave_energy_growth_rate(const Topography& topo, const FluidParams& fluid,
                               const GridSpec& grid, double gamma,
                               const ThresholdOptions& opts) {
  FluidParams f = fluid;
  f.forcing_gamma = gamma;
  const DtnOperator dtn = DtnOperator::build(topo, grid);
  WaveState state = WaveState::zero(grid);
  SplitMix64 rng(opts.seed);
  for (const auto& [lo, hi] : dtn.ranges()) {
    for (int i = lo; i <= hi; ++i) {
      state.eta[i] = opts.seed_amplitude * (2.0 * rng.next_unit() - 1.0);
    }
  }

  std::vector<double> log_e;
  log_e.reserve(static_cast<std::size_t>(opts.horizon_periods) + 1);
  const std::vector<PressureSource> no_sources;
  for (int period = 0; period < opts.horizon_periods; ++period) {
    for (int s = 0; s < grid.steps_per_period; ++s) {
      try {
        wave_step(state, dtn, grid, f, no_sources);
      } catch (const NumericalError&) {
        // Amplitude overflow deep inside the instability tongue: report an
        // unambiguous growth so the bisection moves down.
        return 1e3;
      }
    }
    const double e = std::max(1e-300, static_cast<double>(state.eta.square().sum()));
    log_e.push_back(std::log(e));
  }

  // Least-squares slope over the second half, in 1/s.
  const std::size_t n = log_e.size();
  const std::size_t start = n / 2;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  double count = 0;
  for (std::size_t i = start; i < n; ++i) {
    const double x = static_cast<double>(i + 1) * grid.faraday_period;
    sx += x;
    sy += log_e[i];
    sxx += x * x;
    sxy += x * log_e[i];
    count += 1;
  }
  const double denom = count * sxx - sx * sx;
  return (count * sxy - sx * sy) / denom;
}

ThresholdEstimate faraday_threshold(const Topography& topo,
                                    const FluidParams& fluid,
                                    const GridSpec& grid,
                                    const ThresholdOptions& opts) {
  ThresholdEstimate est;
  est.rate_lo = wave_energy_growth_rate(topo, fluid, grid, opts.gamma_lo, opts);
  est.rate_hi = wave_energy_growth_rate(topo, fluid, grid, opts.gamma_hi, opts);
  if (!(est.rate_lo < 0.0) || !(est.rate_hi > 0.0)) {
    throw BracketError(
        "wavefield: Faraday bracket has no sign change: rate(" +
        std::to_string(opts.gamma_lo) + " g) = " + std::to_string(est.rate_lo) +
        " 1/s, rate(" + std::to_string(opts.gamma_hi) +
        " g) = " + std::to_string(est.rate_hi) + " 1/s");
  }
  double lo = opts.gamma_lo, hi = opts.gamma_hi;
  while (hi - lo > opts.width_tol) {
    const double mid = 0.5 * (lo + hi);
    const double r = wave_energy_growth_rate(topo, fluid, grid, mid, opts);
    (r > 0.0 ? hi : lo) = mid;
  }
  est.bracket_lo = lo;
  est.bracket_hi = hi;
  est.bracket_width = hi - lo;
  est.gamma_f = 0.5 * (lo + hi);
  return est;
}

// ---------------------------------------------------------------------------
// Field dump
// ---------------------------------------------------------------------------

struct FieldDumpWriter::Impl {
  std::ofstream out;
};

FieldDumpWriter::FieldDumpWriter(const std::string& path, const GridSpec& grid)
    : impl_(std::make_unique<Impl>()) {
  impl_->out.open(path, std::ios::binary | std::ios::trunc);
  if (!impl_->out) {
    throw ConfigError("wavefield: cannot open field dump '" + path + "'");
  }
  const std::uint32_t magic = 0x48425746u;  // "HBWF"
  const std::uint32_t version = 1u;
  const std::uint64_t nx = static_cast<std::uint64_t>(grid.nodes());
  impl_->out.write(reinterpret_cast<const char*>(&magic), 4);
  impl_->out.write(reinterpret_cast<const char*>(&version), 4);
  impl_->out.write(reinterpret_cast<const char*>(&nx), 8);
  impl_->out.write(reinterpret_cast<const char*>(&grid.dx), 8);
  impl_->out.write(reinterpret_cast<const char*>(&grid.dt), 8);
}

FieldDumpWriter::~FieldDumpWriter() = default;

void FieldDumpWriter::frame(const WaveState& state) {
  const std::uint64_t step = static_cast<std::uint64_t>(state.step);
  impl_->out.write(reinterpret_cast<const char*>(&step), 8);
  impl_->out.write(reinterpret_cast<const char*>(state.eta.data()),
                   static_cast<std::streamsize>(sizeof(double)) * state.eta.size());
}

}  // namespace hydrobell

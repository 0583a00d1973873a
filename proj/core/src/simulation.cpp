#include "hydrobell/simulation.hpp"

#include <cmath>

namespace hydrobell {

CoupledSim::CoupledSim(const Topography& topo, const GridSpec& grid,
                       const FluidParams& fluid, const DropletParams& droplet,
                       const DtnOperator& dtn, bool with_droplets)
    : topo_(&topo),
      grid_(&grid),
      fluid_(&fluid),
      dtn_(&dtn),
      droplet_(droplet),
      with_droplets_(with_droplets) {
  droplet_.validate();
  const int n = grid.nodes();
  if (dtn.nodes() != n) {
    throw ConfigError("simulation: DtN operator does not match the grid");
  }
  wave_ = WaveState::zero(grid);
  p_.setZero(n);
  w_.setZero(n);
  le_.setZero(n);
  lp_.setZero(n);
  se_.setZero(n);
  sp_.setZero(n);
  for (auto& k : ke_) k.setZero(n);
  for (auto& k : kp_) k.setZero(n);

  const auto& ranges = dtn.ranges();
  if (ranges.size() == 2) {
    drop_range_ = {ranges[0], ranges[1]};
  } else {
    drop_range_ = {ranges[0], ranges[0]};
  }
  for (int d = 0; d < 2; ++d) {
    drop_walls_[d] = {grid.node_u(drop_range_[d].first),
                      grid.node_u(drop_range_[d].second)};
  }
}

void CoupledSim::reset(double u_a, double u_b) {
  wave_ = WaveState::zero(*grid_);
  drops_[0] = {u_a, 0.0};
  drops_[1] = {u_b, 0.0};
  wall_reflections_ = 0;
  for (int d = 0; d < 2; ++d) {
    const auto& [lo, hi] = drop_walls_[d];
    if (!(drops_[d].u > lo) || !(drops_[d].u < hi)) {
      throw ConfigError("simulation: droplet placed outside its bath");
    }
  }
}

void CoupledSim::deposit_pressure(double center_u, double force,
                                  const std::pair<int, int>& range) {
  if (force == 0.0) return;
  const double hw = droplet_.pressure_halfwidth;
  const double amp = force / (2.0 * hw);
  const double inv_hw_pi = 3.14159265358979323846 / hw;
  const int jmin = static_cast<int>(std::ceil((center_u - hw) / grid_->dx));
  const int jmax = static_cast<int>(std::floor((center_u + hw) / grid_->dx));
  const int ic = grid_->center_node();
  for (int jr = jmin; jr <= jmax; ++jr) {
    const int j = ic + jr;
    if (j < range.first || j > range.second) continue;
    // fabs keeps the bump exactly even about the droplet.
    const double arg =
        std::fabs(static_cast<double>(jr) * grid_->dx - center_u) * inv_hw_pi;
    if (arg < 3.14159265358979323846) {
      p_[j] += amp * (1.0 + std::cos(arg));
    }
  }
}

void CoupledSim::rhs(double t, const Eigen::ArrayXd& eta,
                     const Eigen::ArrayXd& phi,
                     const std::array<DropletDyn, 2>& drops,
                     Eigen::ArrayXd& deta, Eigen::ArrayXd& dphi,
                     std::array<DropletDyn, 2>& ddrops) {
  double force = 0.0;
  if (with_droplets_) {
    force = contact_force(droplet_, fluid_->g0, grid_->faraday_period, t);
    p_.setZero();
    if (force != 0.0) {
      deposit_pressure(drops[0].u, force, drop_range_[0]);
      deposit_pressure(drops[1].u, force, drop_range_[1]);
    }
  }

  dtn_->apply(phi, w_);
  const double inv_dx2 = 1.0 / (grid_->dx * grid_->dx);
  surface_laplacian(eta, dtn_->ranges(), inv_dx2, le_);
  surface_laplacian(phi, dtn_->ranges(), inv_dx2, lp_);

  const double two_nu = 2.0 * fluid_->nu;
  const double sr = fluid_->sigma / fluid_->rho;
  const double gt = fluid_->g_of(t);
  deta = w_ + two_nu * le_;
  if (with_droplets_) {
    dphi = (-gt) * eta + sr * le_ + two_nu * lp_ - (1.0 / fluid_->rho) * p_;
  } else {
    dphi = (-gt) * eta + sr * le_ + two_nu * lp_;
  }

  if (with_droplets_) {
    const double inv_m = 1.0 / droplet_.mass;
    for (int d = 0; d < 2; ++d) {
      const double slope = slope_at(eta, *grid_, drop_range_[d], drops[d].u);
      ddrops[d].u = drops[d].v;
      ddrops[d].v =
          ((-force) * slope - droplet_.drag_coeff * force * drops[d].v) * inv_m;
    }
  } else {
    ddrops[0] = {0.0, 0.0};
    ddrops[1] = {0.0, 0.0};
  }
}

void CoupledSim::reflect_walls() {
  if (!with_droplets_) return;
  for (int d = 0; d < 2; ++d) {
    auto& s = drops_[d];
    const auto& [lo, hi] = drop_walls_[d];
    for (int guard = 0; guard < 4; ++guard) {
      if (s.u < lo) {
        s.u = (lo + lo) - s.u;
        s.v = -s.v;
        ++wall_reflections_;
      } else if (s.u > hi) {
        s.u = (hi + hi) - s.u;
        s.v = -s.v;
        ++wall_reflections_;
      } else {
        break;
      }
    }
    if (!(s.u >= lo) || !(s.u <= hi)) {
      throw NumericalError("simulation: droplet left the bath", wave_.step,
                           max_abs_eta());
    }
  }
}

void CoupledSim::step() {
  const double dt = grid_->dt;
  const double t0 = wave_.t;

  rhs(t0, wave_.eta, wave_.phi, drops_, ke_[0], kp_[0], kd_[0]);

  se_ = wave_.eta + (0.5 * dt) * ke_[0];
  sp_ = wave_.phi + (0.5 * dt) * kp_[0];
  for (int d = 0; d < 2; ++d) {
    sd_[d].u = drops_[d].u + (0.5 * dt) * kd_[0][d].u;
    sd_[d].v = drops_[d].v + (0.5 * dt) * kd_[0][d].v;
  }
  rhs(t0 + 0.5 * dt, se_, sp_, sd_, ke_[1], kp_[1], kd_[1]);

  se_ = wave_.eta + (0.5 * dt) * ke_[1];
  sp_ = wave_.phi + (0.5 * dt) * kp_[1];
  for (int d = 0; d < 2; ++d) {
    sd_[d].u = drops_[d].u + (0.5 * dt) * kd_[1][d].u;
    sd_[d].v = drops_[d].v + (0.5 * dt) * kd_[1][d].v;
  }
  rhs(t0 + 0.5 * dt, se_, sp_, sd_, ke_[2], kp_[2], kd_[2]);

  se_ = wave_.eta + dt * ke_[2];
  sp_ = wave_.phi + dt * kp_[2];
  for (int d = 0; d < 2; ++d) {
    sd_[d].u = drops_[d].u + dt * kd_[2][d].u;
    sd_[d].v = drops_[d].v + dt * kd_[2][d].v;
  }
  rhs(t0 + dt, se_, sp_, sd_, ke_[3], kp_[3], kd_[3]);

  const double w6 = dt / 6.0;
  wave_.eta += w6 * ((ke_[0] + ke_[3]) + 2.0 * (ke_[1] + ke_[2]));
  wave_.phi += w6 * ((kp_[0] + kp_[3]) + 2.0 * (kp_[1] + kp_[2]));
  for (int d = 0; d < 2; ++d) {
    drops_[d].u += w6 * ((kd_[0][d].u + kd_[3][d].u) +
                         2.0 * (kd_[1][d].u + kd_[2][d].u));
    drops_[d].v += w6 * ((kd_[0][d].v + kd_[3][d].v) +
                         2.0 * (kd_[1][d].v + kd_[2][d].v));
  }
  wave_.t += dt;
  wave_.step += 1;

  reflect_walls();

  if ((wave_.step & 31) == 0) {
    const double m = max_abs_eta();
    if (!(m < 1e3)) {
      throw NumericalError("simulation: wave field diverged", wave_.step, m);
    }
  }
}

}  // namespace hydrobell

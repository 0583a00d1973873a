#pragma once

// Synchronized RK4 integration of the coupled surface-wave + two-droplet
// system. Both droplets read the same stage wave field; all per-node
// arithmetic is arranged so that a mirror-symmetric configuration (alpha ==
// beta, mirrored droplets, mirrored fields) stays exactly mirror-symmetric
// in floating point, step after step.

#include <Eigen/Dense>
#include <array>
#include <utility>

#include "hydrobell/droplet.hpp"
#include "hydrobell/geometry.hpp"
#include "hydrobell/wavefield.hpp"

namespace hydrobell {

class CoupledSim {
 public:
  // `dtn` must outlive the simulation and match (topo, grid, decoupled).
  CoupledSim(const Topography& topo, const GridSpec& grid,
             const FluidParams& fluid, const DropletParams& droplet,
             const DtnOperator& dtn, bool with_droplets = true);

  // Initial droplet placement in centered coordinates; resets the clock and
  // the wave field to rest.
  void reset(double u_a, double u_b);

  void step();  // one dt; wall reflections applied; throws on divergence

  double t() const { return wave_.t; }
  std::int64_t step_index() const { return wave_.step; }
  const WaveState& wave() const { return wave_; }
  const DropletDyn& droplet(Side s) const {
    return drops_[static_cast<int>(s)];
  }
  double droplet_x(Side s) const {  // physical coordinate for I/O
    return drops_[static_cast<int>(s)].u + topo_->half_length();
  }
  const std::pair<int, int>& droplet_range(Side s) const {
    return drop_range_[static_cast<int>(s)];
  }
  const GridSpec& grid() const { return *grid_; }
  const Topography& topo() const { return *topo_; }
  bool with_droplets() const { return with_droplets_; }
  int wall_reflections() const { return wall_reflections_; }
  double max_abs_eta() const { return wave_.eta.abs().maxCoeff(); }

 private:
  void rhs(double t, const Eigen::ArrayXd& eta, const Eigen::ArrayXd& phi,
           const std::array<DropletDyn, 2>& drops, Eigen::ArrayXd& deta,
           Eigen::ArrayXd& dphi, std::array<DropletDyn, 2>& ddrops);
  void deposit_pressure(double center_u, double force,
                        const std::pair<int, int>& range);
  void reflect_walls();

  const Topography* topo_;
  const GridSpec* grid_;
  const FluidParams* fluid_;
  const DtnOperator* dtn_;
  DropletParams droplet_;
  bool with_droplets_;

  WaveState wave_;
  std::array<DropletDyn, 2> drops_{};
  std::array<std::pair<int, int>, 2> drop_range_{};
  std::array<std::pair<double, double>, 2> drop_walls_{};
  int wall_reflections_ = 0;

  // scratch
  Eigen::ArrayXd p_, w_, le_, lp_;
  Eigen::ArrayXd se_, sp_;
  std::array<Eigen::ArrayXd, 4> ke_, kp_;
  std::array<std::array<DropletDyn, 2>, 4> kd_{};
  std::array<DropletDyn, 2> sd_{};
};

}  // namespace hydrobell

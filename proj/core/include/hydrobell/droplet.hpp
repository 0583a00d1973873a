#pragma once

// One bouncing droplet: resonant periodic contact force, horizontal motion
//   m x'' = -F(t) d(eta)/dx - c F(t) x'
// under the wave slope during contacts, the raised-cosine pressure source it
// feeds back into the wave equation, inner/outer cavity bookkeeping with
// tunneling events, and the binary Bell readout at measurement time.
//
// Droplet positions are carried in centered coordinates u = x - total/2 so a
// mirrored pair is an exact floating-point negation.

#include <span>
#include <vector>

#include "hydrobell/errors.hpp"
#include "hydrobell/geometry.hpp"
#include "hydrobell/wavefield.hpp"

namespace hydrobell {

enum class Side : int { A = 0, B = 1 };

struct DropletParams {
  double mass = 1.71e-4;          // g (radius 0.035 cm at bath density)
  double drag_coeff = 0.17;       // s/cm, multiplies F(t) x'
  double radius = 0.035;          // cm
  double contact_fraction = 0.25; // fraction of the Faraday period in contact
  double impact_phase = 0.0;      // radians within the Faraday period
  double pressure_halfwidth = 0.05;  // cm

  void validate() const;
};

struct DropletDyn {
  double u = 0.0;  // cm, centered
  double v = 0.0;  // cm/s
};

struct TunnelEvent {
  double t = 0.0;
  Region from = Region::OuterA;
  Region to = Region::InnerA;
};

struct TrajectoryPoint {
  double t = 0.0;
  double x = 0.0;  // cm, physical
  double v = 0.0;  // cm/s
};

// Half-sine contact pulse, period T_F, nonzero on the contact_fraction
// window; its mean over one period is exactly m*g0 (weight balance).
double contact_force(const DropletParams& p, double g0, double faraday_period,
                     double t);

// One RK4 step of the horizontal ODE with slope and force frozen over the
// step (the coupled integrator in simulation.hpp re-evaluates them per
// stage).
DropletDyn trajectory_step(const DropletDyn& state, double slope, double force,
                           const DropletParams& p, double dt);

// Raised-cosine source centered at the droplet, spatial integral = force.
PressureSource emit_pressure(double center_u, double force,
                             const DropletParams& p);

// Incremental cavity bookkeeping along a trajectory. observe() throws
// ModelViolation when a droplet reaches the central cavity or the far
// subsystem (mis-calibrated parameters), unless walled_center is set (the
// decoupled geometry blocks the center physically).
class CavityTracker {
 public:
  CavityTracker(Side side, bool walled_center)
      : side_(side), walled_center_(walled_center) {}

  void observe(double t, double u, const Topography& topo);

  bool has_cavity() const { return has_cavity_; }
  Region last_cavity() const { return last_cavity_; }
  int tunnel_count() const { return static_cast<int>(events_.size()); }
  const std::vector<TunnelEvent>& events() const { return events_; }

 private:
  Side side_;
  bool walled_center_;
  bool has_cavity_ = false;
  Region last_cavity_ = Region::Barrier;
  std::vector<TunnelEvent> events_;
};

// Binary Bell readout: -1 in the inner cavity, +1 in the outer one; over the
// detector barrier the last visited cavity decides. Throws ModelViolation in
// the central region or on the wrong side.
int measure_outcome(double u, const Topography& topo, Side side,
                    const CavityTracker& tracker);

// Completed inner<->outer transitions of a sampled trajectory; barrier
// excursions that return to the originating cavity are not events.
std::vector<TunnelEvent> detect_tunneling(std::span<const TrajectoryPoint> traj,
                                          const Topography& topo, Side side);

}  // namespace hydrobell

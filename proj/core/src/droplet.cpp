#include "hydrobell/droplet.hpp"

#include <cmath>
#include <string>

namespace hydrobell {

namespace {
constexpr double kPi = 3.14159265358979323846;

bool is_cavity(Region r) {
  return r == Region::InnerA || r == Region::OuterA || r == Region::InnerB ||
         r == Region::OuterB;
}

bool own_side(Region r, Side s) {
  if (s == Side::A) return r == Region::InnerA || r == Region::OuterA;
  return r == Region::InnerB || r == Region::OuterB;
}

bool is_inner(Region r) { return r == Region::InnerA || r == Region::InnerB; }

}  // namespace

void DropletParams::validate() const {
  if (!(mass > 0.0)) throw ConfigError("droplet: field 'mass' must be positive");
  if (!(drag_coeff > 0.0)) {
    throw ConfigError("droplet: field 'drag_coeff' must be positive");
  }
  if (!(radius > 0.0)) throw ConfigError("droplet: field 'radius' must be positive");
  if (!(contact_fraction > 0.0) || !(contact_fraction < 1.0)) {
    throw ConfigError("droplet: field 'contact_fraction' must be in (0, 1)");
  }
  if (!(pressure_halfwidth > 0.0)) {
    throw ConfigError("droplet: field 'pressure_halfwidth' must be positive");
  }
}

double contact_force(const DropletParams& p, double g0, double faraday_period,
                     double t) {
  // Phase fraction within the period, shifted by the impact phase.
  const double cycles = t / faraday_period - p.impact_phase / (2.0 * kPi);
  const double tau = cycles - std::floor(cycles);
  if (!(tau < p.contact_fraction)) return 0.0;
  const double peak = (p.mass * g0 / p.contact_fraction) * (kPi / 2.0);
  return peak * std::sin(kPi * tau / p.contact_fraction);
}

DropletDyn trajectory_step(const DropletDyn& state, double slope, double force,
                           const DropletParams& p, double dt) {
  const double inv_m = 1.0 / p.mass;
  const auto accel = [&](double v) {
    return ((-force) * slope - p.drag_coeff * force * v) * inv_m;
  };
  const double k1u = state.v, k1v = accel(state.v);
  const double k2u = state.v + 0.5 * dt * k1v, k2v = accel(k2u);
  const double k3u = state.v + 0.5 * dt * k2v, k3v = accel(k3u);
  const double k4u = state.v + dt * k3v, k4v = accel(k4u);
  DropletDyn next;
  next.u = state.u + (dt / 6.0) * ((k1u + k4u) + 2.0 * (k2u + k3u));
  next.v = state.v + (dt / 6.0) * ((k1v + k4v) + 2.0 * (k2v + k3v));
  return next;
}

PressureSource emit_pressure(double center_u, double force,
                             const DropletParams& p) {
  if (!(force >= 0.0)) throw ConfigError("droplet: emit_pressure needs F >= 0");
  PressureSource s;
  s.center_u = center_u;
  s.total_force = force;
  s.halfwidth = p.pressure_halfwidth;
  return s;
}

void CavityTracker::observe(double t, double u, const Topography& topo) {
  const Region r = topo.classify_centered(u);
  if (r == Region::Central) {
    if (walled_center_) return;  // unreachable behind the wall, but harmless
    throw ModelViolation(
        "droplet: entered the central cavity at t = " + std::to_string(t) +
        " s (mis-calibrated parameters?)");
  }
  if (r == Region::Barrier) return;
  if (!own_side(r, side_)) {
    throw ModelViolation("droplet: crossed to the far subsystem at t = " +
                         std::to_string(t) + " s");
  }
  if (has_cavity_ && r != last_cavity_) {
    events_.push_back({t, last_cavity_, r});
  }
  has_cavity_ = true;
  last_cavity_ = r;
}

int measure_outcome(double u, const Topography& topo, Side side,
                    const CavityTracker& tracker) {
  const Region r = topo.classify_centered(u);
  if (r == Region::Central) {
    throw ModelViolation("droplet: measured inside the central region");
  }
  if (r == Region::Barrier) {
    if (!tracker.has_cavity()) {
      throw ModelViolation("droplet: measured over a barrier with no cavity history");
    }
    return is_inner(tracker.last_cavity()) ? -1 : 1;
  }
  if (!own_side(r, side)) {
    throw ModelViolation("droplet: measured on the far side");
  }
  return is_inner(r) ? -1 : 1;
}

std::vector<TunnelEvent> detect_tunneling(std::span<const TrajectoryPoint> traj,
                                          const Topography& topo, Side side) {
  std::vector<TunnelEvent> events;
  bool has_cavity = false;
  Region last = Region::Barrier;
  for (const auto& p : traj) {
    const Region r = topo.classify(p.x);
    if (!is_cavity(r) || !own_side(r, side)) continue;
    if (has_cavity && r != last) events.push_back({p.t, last, r});
    has_cavity = true;
    last = r;
  }
  return events;
}

}  // namespace hydrobell

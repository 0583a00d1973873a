#include "doctest.h"

#include <cmath>

#include "hydrobell/simulation.hpp"

using namespace hydrobell;

namespace {

struct Rig {
  Topography topo;
  FluidParams fluid;
  DropletParams droplet;
  GridSpec grid;
  DtnOperator dtn;

  explicit Rig(bool decoupled = false, double alpha = 0.2, double beta = 0.2)
      : topo(Topography::build(alpha, beta, LayoutConfig{})),
        fluid(),
        droplet(),
        grid(GridSpec::make(topo, fluid, 1.0 / 32.0, 8, 256)),
        dtn(DtnOperator::build(topo, grid, decoupled)) {}
};

}  // namespace

TEST_CASE("coupled step: exact mirror symmetry, wave and droplets") {
  Rig rig;
  CoupledSim sim(rig.topo, rig.grid, rig.fluid, rig.droplet, rig.dtn, true);
  const double u0 = rig.topo.outer_center_offset() + 0.21;
  sim.reset(-u0, u0);

  const int ic = rig.grid.center_node();
  for (int block = 0; block < 8; ++block) {
    for (int s = 0; s < 64; ++s) sim.step();
    const auto& a = sim.droplet(Side::A);
    const auto& b = sim.droplet(Side::B);
    CHECK(b.u == -a.u);
    CHECK(b.v == -a.v);
    const auto& eta = sim.wave().eta;
    const auto& phi = sim.wave().phi;
    bool eta_ok = true, phi_ok = true;
    for (int j = 0; j <= ic; ++j) {
      eta_ok = eta_ok && (eta[ic + j] == eta[ic - j]);
      phi_ok = phi_ok && (phi[ic + j] == phi[ic - j]);
    }
    CHECK(eta_ok);
    CHECK(phi_ok);
  }
  // The field is alive (droplets actually force it).
  CHECK(sim.max_abs_eta() > 0.0);
}

TEST_CASE("coupled step: exact mirror symmetry in the decoupled geometry") {
  Rig rig(true);
  CoupledSim sim(rig.topo, rig.grid, rig.fluid, rig.droplet, rig.dtn, true);
  const double u0 = rig.topo.outer_center_offset() - 0.13;
  sim.reset(-u0, u0);
  for (int s = 0; s < 256; ++s) sim.step();
  CHECK(sim.droplet(Side::B).u == -sim.droplet(Side::A).u);
  CHECK(sim.droplet(Side::B).v == -sim.droplet(Side::A).v);
  const int ic = rig.grid.center_node();
  for (int j = 0; j <= ic; ++j) {
    CHECK(sim.wave().eta[ic + j] == sim.wave().eta[ic - j]);
  }
}

TEST_CASE("coupled step: deterministic bit-identical reruns") {
  Rig rig;
  CoupledSim s1(rig.topo, rig.grid, rig.fluid, rig.droplet, rig.dtn, true);
  CoupledSim s2(rig.topo, rig.grid, rig.fluid, rig.droplet, rig.dtn, true);
  s1.reset(-2.43, 2.61);
  s2.reset(-2.43, 2.61);
  for (int s = 0; s < 300; ++s) {
    s1.step();
    s2.step();
  }
  CHECK(s1.droplet(Side::A).u == s2.droplet(Side::A).u);
  CHECK(s1.droplet(Side::B).v == s2.droplet(Side::B).v);
  for (int i = 0; i < rig.grid.nodes(); ++i) {
    CHECK(s1.wave().eta[i] == s2.wave().eta[i]);
  }
}

TEST_CASE("coupled step: asymmetric starts break symmetry (sanity)") {
  Rig rig;
  CoupledSim sim(rig.topo, rig.grid, rig.fluid, rig.droplet, rig.dtn, true);
  sim.reset(-2.43, 2.61);  // not mirrored
  for (int s = 0; s < 512; ++s) sim.step();
  CHECK(sim.droplet(Side::B).u != -sim.droplet(Side::A).u);
}

TEST_CASE("coupled step: droplets stay inside their baths") {
  Rig rig(true);
  CoupledSim sim(rig.topo, rig.grid, rig.fluid, rig.droplet, rig.dtn, true);
  const double u0 = rig.topo.outer_center_offset();
  sim.reset(-u0, u0);
  const auto [lo_a, hi_a] = sim.droplet_range(Side::A);
  const auto [lo_b, hi_b] = sim.droplet_range(Side::B);
  for (int s = 0; s < 1024; ++s) {
    sim.step();
    CHECK(sim.droplet(Side::A).u >= rig.grid.node_u(lo_a));
    CHECK(sim.droplet(Side::A).u <= rig.grid.node_u(hi_a));
    CHECK(sim.droplet(Side::B).u >= rig.grid.node_u(lo_b));
    CHECK(sim.droplet(Side::B).u <= rig.grid.node_u(hi_b));
  }
}

TEST_CASE("coupled step: placement outside the bath is rejected") {
  Rig rig;
  CoupledSim sim(rig.topo, rig.grid, rig.fluid, rig.droplet, rig.dtn, true);
  CHECK_THROWS_AS(sim.reset(-3.5, 2.5), ConfigError);
}

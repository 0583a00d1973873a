#include "hydrobell/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace hydrobell {

const char* to_string(SegmentKind k) {
  switch (k) {
    case SegmentKind::OuterCavity: return "outer_cavity";
    case SegmentKind::DetectorBarrier: return "detector_barrier";
    case SegmentKind::InnerCavity: return "inner_cavity";
    case SegmentKind::CouplingBarrier: return "coupling_barrier";
    case SegmentKind::CentralCavity: return "central_cavity";
  }
  return "?";
}

const char* to_string(Region r) {
  switch (r) {
    case Region::OuterA: return "outer_A";
    case Region::InnerA: return "inner_A";
    case Region::OuterB: return "outer_B";
    case Region::InnerB: return "inner_B";
    case Region::Barrier: return "barrier";
    case Region::Central: return "central";
  }
  return "?";
}

namespace {

void require_positive(double v, const char* field) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ConfigError(std::string("geometry: field '") + field +
                      "' must be positive and finite");
  }
}

}  // namespace

Topography Topography::build(double alpha, double beta,
                             const LayoutConfig& layout) {
  require_positive(layout.cavity_length, "cavity_length");
  require_positive(layout.cavity_depth, "cavity_depth");
  require_positive(layout.barrier_width, "barrier_width");
  require_positive(layout.coupling_barrier_depth, "coupling_barrier_depth");
  require_positive(layout.central_length, "central_length");
  require_positive(layout.central_depth, "central_depth");
  require_positive(alpha, "alpha");
  require_positive(beta, "beta");
  // Equality is allowed so a uniform-depth (flat) bath is constructible;
  // the CHSH settings validation applies the strict bound.
  if (alpha > layout.cavity_depth) {
    throw ConfigError("geometry: field 'alpha' is oversized (deeper than cavity_depth)");
  }
  if (beta > layout.cavity_depth) {
    throw ConfigError("geometry: field 'beta' is oversized (deeper than cavity_depth)");
  }
  if (layout.coupling_barrier_depth > layout.cavity_depth) {
    throw ConfigError(
        "geometry: field 'coupling_barrier_depth' is oversized (deeper than cavity_depth)");
  }

  Topography topo;
  topo.layout_ = layout;
  topo.alpha_ = alpha;
  topo.beta_ = beta;

  // Cumulative fold boundaries, center outward. One array serves both
  // sides, which is what makes mirrored lookups exact.
  topo.fold_bounds_[0] = 0.5 * layout.central_length;
  topo.fold_bounds_[1] = topo.fold_bounds_[0] + layout.barrier_width;
  topo.fold_bounds_[2] = topo.fold_bounds_[1] + layout.cavity_length;
  topo.fold_bounds_[3] = topo.fold_bounds_[2] + layout.barrier_width;
  topo.fold_bounds_[4] = topo.fold_bounds_[3] + layout.cavity_length;
  topo.half_length_ = topo.fold_bounds_[4];
  topo.total_length_ = 2.0 * topo.half_length_;

  topo.fold_depth_right_ = {layout.central_depth, layout.coupling_barrier_depth,
                            layout.cavity_depth, beta, layout.cavity_depth};
  topo.fold_depth_left_ = {layout.central_depth, layout.coupling_barrier_depth,
                           layout.cavity_depth, alpha, layout.cavity_depth};

  topo.segments_ = {
      {layout.cavity_length, layout.cavity_depth, SegmentKind::OuterCavity},
      {layout.barrier_width, alpha, SegmentKind::DetectorBarrier},
      {layout.cavity_length, layout.cavity_depth, SegmentKind::InnerCavity},
      {layout.barrier_width, layout.coupling_barrier_depth, SegmentKind::CouplingBarrier},
      {layout.central_length, layout.central_depth, SegmentKind::CentralCavity},
      {layout.barrier_width, layout.coupling_barrier_depth, SegmentKind::CouplingBarrier},
      {layout.cavity_length, layout.cavity_depth, SegmentKind::InnerCavity},
      {layout.barrier_width, beta, SegmentKind::DetectorBarrier},
      {layout.cavity_length, layout.cavity_depth, SegmentKind::OuterCavity},
  };
  return topo;
}

int Topography::fold_index(double abs_u) const {
  if (!(abs_u <= half_length_)) {
    throw DomainError("geometry: coordinate outside the bath domain");
  }
  for (int i = 0; i < 4; ++i) {
    if (abs_u < fold_bounds_[i]) return i;
  }
  return 4;  // includes the end wall itself
}

double Topography::depth_centered(double u) const {
  const double a = std::fabs(u);
  const int i = fold_index(a);
  return u < 0.0 ? fold_depth_left_[i] : fold_depth_right_[i];
}

double Topography::depth_at(double x) const {
  if (!(x >= 0.0) || !(x <= total_length_)) {
    throw DomainError("geometry: x outside [0, total_length]");
  }
  return depth_centered(x - half_length_);
}

double Topography::mirror(double x) const {
  if (!(x >= 0.0) || !(x <= total_length_)) {
    throw DomainError("geometry: x outside [0, total_length]");
  }
  return total_length_ - x;
}

Region Topography::classify_centered(double u) const {
  const double a = std::fabs(u);
  switch (fold_index(a)) {
    case 0: return Region::Central;
    case 1: return Region::Barrier;
    case 2: return u < 0.0 ? Region::InnerA : Region::InnerB;
    case 3: return Region::Barrier;
    default: return u < 0.0 ? Region::OuterA : Region::OuterB;
  }
}

Region Topography::classify(double x) const {
  if (!(x >= 0.0) || !(x <= total_length_)) {
    throw DomainError("geometry: x outside [0, total_length]");
  }
  return classify_centered(x - half_length_);
}

std::vector<double> Topography::column_depths(int columns) const {
  if (columns < 2) throw ConfigError("geometry: column_depths needs >= 2 columns");
  std::vector<double> d(static_cast<std::size_t>(columns));
  const double width = total_length_ / static_cast<double>(columns);
  for (int i = 0; i < columns; ++i) {
    // Midpoint in centered coordinates; (2i+1-C) is an exact integer, so the
    // midpoints of columns i and C-1-i are exact negations of each other.
    const double u = (0.5 * static_cast<double>(2 * i + 1 - columns)) * width;
    d[static_cast<std::size_t>(i)] = depth_centered(u);
  }
  return d;
}

double Topography::min_depth() const {
  double m = segments_.front().fluid_depth;
  for (const auto& s : segments_) m = std::min(m, s.fluid_depth);
  return m;
}

double Topography::max_depth() const {
  double m = segments_.front().fluid_depth;
  for (const auto& s : segments_) m = std::max(m, s.fluid_depth);
  return m;
}

double Topography::outer_center_offset() const {
  return 0.5 * (fold_bounds_[3] + fold_bounds_[4]);
}

double Topography::inner_center_offset() const {
  return 0.5 * (fold_bounds_[1] + fold_bounds_[2]);
}

}  // namespace hydrobell

#pragma once

// Bath topography for the two-droplet Bell geometry: nine piecewise-constant
// depth segments, left to right
//
//   outer_A | detector_A | inner_A | coupling | central | coupling |
//   inner_B | detector_B | outer_B
//
// The detector barrier depths (alpha on the left, beta on the right) are the
// measurement settings. Segment lengths are always left/right symmetric, so
// internally the profile is stored folded about the bath center; lookups go
// through |u| of the centered coordinate u = x - total/2. That makes
// depth/classification queries *exactly* mirror-equivariant in floating
// point, which the symmetric-run invariants rely on.

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hydrobell/errors.hpp"

namespace hydrobell {

enum class SegmentKind : std::uint8_t {
  OuterCavity,
  DetectorBarrier,
  InnerCavity,
  CouplingBarrier,
  CentralCavity,
};

enum class Region : std::uint8_t {
  OuterA,
  InnerA,
  OuterB,
  InnerB,
  Barrier,
  Central,
};

const char* to_string(SegmentKind k);
const char* to_string(Region r);

struct Segment {
  double length;       // cm, > 0
  double fluid_depth;  // cm, > 0
  SegmentKind kind;
};

// All lengths/depths in cm (CGS throughout).
struct LayoutConfig {
  double cavity_length = 1.0;           // each of the four outer/inner cavities
  double cavity_depth = 0.5;
  double barrier_width = 0.4;           // all four barriers
  double coupling_barrier_depth = 0.045;
  double central_length = 0.4;
  double central_depth = 0.5;           // not published; sweepable
};

// The four candidate detector depths of a CHSH experiment.
struct BellSettings {
  double a = 0.099;
  double a_prime = 0.15;
  double b = 0.099;
  double b_prime = 0.15;
};

class Topography {
 public:
  // build_bath: construct the canonical 9-segment profile. Throws
  // ConfigError naming the offending field on non-positive or oversized
  // depths.
  static Topography build(double alpha, double beta,
                          const LayoutConfig& layout = {});

  double total_length() const { return total_length_; }
  double half_length() const { return half_length_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  const LayoutConfig& layout() const { return layout_; }

  std::span<const Segment> segments() const { return segments_; }

  // Depth at physical x in [0, total_length]. Interval convention is
  // half-open measured from the fold axis; exact boundary hits are
  // measure-zero for the dynamics.
  double depth_at(double x) const;
  // Same lookup in centered coordinates u = x - half_length.
  double depth_centered(double u) const;

  // total_length - x, with domain check.
  double mirror(double x) const;

  Region classify(double x) const;
  Region classify_centered(double u) const;

  // Depth profile sampled at the midpoints of `columns` equal columns.
  // Exactly palindromic whenever the depths are (alpha == beta).
  std::vector<double> column_depths(int columns) const;

  bool mirror_symmetric() const { return alpha_ == beta_; }

  double min_depth() const;
  double max_depth() const;

  // Centered coordinate of the outer-right cavity midpoint (> 0); the
  // outer-left midpoint is its exact negation.
  double outer_center_offset() const;
  double inner_center_offset() const;
  // Centered coordinate of the central cavity's right edge (the wall
  // position used by the decoupled-bath control geometry).
  double central_half_length() const { return fold_bounds_[0]; }

 private:
  Topography() = default;

  // Folded profile: fold_bounds_ are cumulative distances from the center to
  // the right ends of {central half, coupling, inner, detector, outer};
  // fold_bounds_[4] == half_length_. fold_depth_right_/left_ give the depth
  // of fold band i on each side (they differ only in the detector band when
  // alpha != beta).
  int fold_index(double abs_u) const;

  std::array<double, 5> fold_bounds_{};
  std::array<double, 5> fold_depth_right_{};
  std::array<double, 5> fold_depth_left_{};
  double half_length_ = 0.0;
  double total_length_ = 0.0;
  double alpha_ = 0.0;
  double beta_ = 0.0;
  LayoutConfig layout_{};
  std::vector<Segment> segments_;
};

}  // namespace hydrobell

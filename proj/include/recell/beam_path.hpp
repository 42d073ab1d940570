#pragma once
#include <string>
#include <utility>
#include <vector>

#include "recell/cell.hpp"
#include "recell/optics.hpp"

namespace recell {

// Within-segment beam-parameter evolution for the correlation integrals.
// piecewise: q advances through every element along the pass (focusing kicks
//   applied where they physically sit) and each pass carries unit power.
// amplitude_literal: q propagates freely from the pass's start value, and the
//   intensity keeps its unnormalized (a^2 + b^2) amplitude weights.
enum class EvolutionMode { piecewise, amplitude_literal };

// maximal free-propagation stretch: q(z) = q_at_z0 + (z - z0) on [z0, z1]
struct FreeSpan {
  double z0 = 0.0, z1 = 0.0;  // mm
  Complex q_xi{0.0, 1.0}, q_eta{0.0, 1.0};  // at z0
};

// One pass through the cell, axial coordinate z in [-d, d] (path length 2d).
struct PassSegment {
  double z_lo = 0.0, z_hi = 0.0;
  std::vector<FreeSpan> spans;  // ordered, covering [z_lo, z_hi]
  std::vector<std::pair<double, double>> exclusions;  // sorted, disjoint
};

struct BeamPath {
  std::vector<PassSegment> passes;
  double wavelength = 780e-6;  // mm
  EvolutionMode mode = EvolutionMode::piecewise;
  double max_radius = 0.0;     // mm, largest mode radius along the path
  double half_length = 0.0;    // d, mm
  std::vector<std::string> warnings;
};

// straight pass between flat mirrors with the concave kick at mid-path
BeamPath build_recirculating_path(const RecirculatingCellConfig& cfg, int passes,
                                  EvolutionMode mode);

// one focused traversal: lens of focal length lens_f placed at the entry
// window, fed with a collimated waist w0; the focus lands at the cell center
BeamPath build_single_pass_path(double d, double lens_f, double w0,
                                double wavelength, EvolutionMode mode);

BeamPath build_cylindrical_path(const CylindricalCellConfig& cfg,
                                EvolutionMode mode);

// removes the intervals from the integration domain of every pass (both the
// numerator and the denominator see the cut).  Empty list returns the path
// unchanged; an interval leaving [-d, d] is a domain error.
BeamPath apply_barrier(const BeamPath& path,
                       const std::vector<std::pair<double, double>>& intervals);

// span minus exclusions: the kept sub-intervals of [s.z0, s.z1]
std::vector<std::pair<double, double>> included_intervals(
    const FreeSpan& s, const std::vector<std::pair<double, double>>& exclusions);

// beam parameter(s) at axial position z inside a span
inline Complex span_q_xi(const FreeSpan& s, double z) { return s.q_xi + (z - s.z0); }
inline Complex span_q_eta(const FreeSpan& s, double z) { return s.q_eta + (z - s.z0); }

}  // namespace recell

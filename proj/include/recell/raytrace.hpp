#pragma once
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "recell/cell.hpp"
#include "recell/optics.hpp"

namespace recell {

using Vec3 = std::array<double, 3>;

struct Ray3 {
  Vec3 origin{0, 0, 0};
  Vec3 dir{0, 0, 1};  // unit
};

enum class SurfaceKind { plane, sphere };

// plane: point + unit normal; sphere: center + radius (R = 2 f for a mirror)
struct Surface3 {
  SurfaceKind kind = SurfaceKind::plane;
  std::string id = "S";
  Vec3 point{0, 0, 0};   // plane anchor or sphere center
  Vec3 normal{0, 0, 1};  // plane only
  double radius = 0.0;   // sphere only, mm
  double half_aperture = kInf;  // transverse bound, mm
};

struct HitRecord {
  int surface = 0;  // index into the surface list
  Vec3 point{0, 0, 0};
};

struct TraceResult {
  std::vector<std::vector<HitRecord>> ray_hits;  // ordered per ray
  std::vector<std::string> surface_ids;
  // flat-mirror reflections aggregated per spot index (fixed ray order)
  std::vector<std::array<double, 2>> centroid;  // mm
  std::vector<double> spread;                   // rms distance to centroid, mm
  std::vector<int> rays_at_spot;
  int n_reflections = 0;  // chief-ray flat hits, exit record included
  std::vector<int> ray_exit_index;  // flat hits per ray
  int sideways_escapes = 0;
};

// how rays are handed to the two tilted flat mirrors
enum class FlatAssignment {
  schedule,  // every ray sees the bounce-index schedule (default)
  by_side,   // pick mirror by the sign of the hit's y coordinate
};

// Gaussian bundle around the entry ray: ray 0 is the exact chief ray, the rest
// jitter position with sigma = w0/2 and slope with sigma = lambda/(2 pi w0).
// Rays start on the first flat mirror's plane (tilt plane_tilt about y).
std::vector<Ray3> sample_beam_rays(const BeamSpec& beam, double x0, double y0,
                                   double x0p, double y0p, double plane_tilt,
                                   int n_rays, std::uint64_t seed);

// generic specular tracer over an explicit surface list; each step reflects at
// the nearest surface along the ray (used for the single-element checks)
std::vector<std::vector<HitRecord>> trace_surfaces(
    const std::vector<Surface3>& surfaces, const std::vector<Ray3>& rays,
    int max_hits);

// full recirculating-cell trace: tilted flat planes near z=0, spherical cap
// (R = 2 f2) at z=d; exit when a flat hit has x < -x0
TraceResult trace_recirculating_cell(const RecirculatingCellConfig& cfg,
                                     const std::vector<Ray3>& rays, int max_hits,
                                     FlatAssignment assign = FlatAssignment::schedule);

struct TraceComparison {
  bool count_match = false;
  int n_trace = 0;
  int n_analytic = 0;
  double mean_error = 0.0;  // mm, centroid vs analytic over compared spots
  double max_error = 0.0;   // mm
  double containment = 0.0;  // fraction of (ray, spot) samples inside 1/e2 radius
  std::vector<double> per_spot_containment;
};

TraceComparison compare_to_analytic(const TraceResult& trace,
                                    const std::vector<SpotRecord>& spots);

}  // namespace recell

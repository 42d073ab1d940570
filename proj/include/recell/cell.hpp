#pragma once
#include <array>
#include <string>
#include <vector>

#include "recell/optics.hpp"

namespace recell {

// Three-mirror recirculating cell: two flat mirrors (tilted about y by
// tilt_x / tilt_x2) facing one concave mirror of focal length f2 at
// separation d.  Entry ray (x0, x0p, y0, y0p) hits a flat mirror first.
struct RecirculatingCellConfig {
  double f2 = 1000.0;  // mm
  double d = 30.0;     // mm
  double tilt_x = 0.0;   // rad, first flat mirror
  double tilt_x2 = 0.0;  // rad, second flat mirror (canonical: -tilt_x)
  double x0 = 10.0;    // mm; also the exit threshold |x| scale
  double y0 = 0.0;     // mm
  double x0p = 0.0;    // rad
  double y0p = 0.0;    // rad
  BeamSpec beam;
};

// Two cylindrical mirrors, curved axes twisted by `twist`, separation d.
struct CylindricalCellConfig {
  double f = 50.0;      // mm, both mirrors
  double twist = 0.87;  // rad
  double d = 30.0;      // mm
  int round_trips = 21;
  double w_xi0 = 1.0, w_eta0 = 1.0;  // mm, launch widths per principal axis
  double x0 = 1.0, y0 = 0.0;   // mm, entry ray for spot patterns
  double x0p = 0.0, y0p = 0.0; // rad
  BeamSpec beam;
};

struct SpotRecord {
  int n = 0;
  std::string mirror;  // "M1", "M1p", "M2"
  double x = 0.0, y = 0.0;       // mm
  double w_xi = 0.0, w_eta = 0.0;  // mm (equal when stigmatic)
  ComplexBeamParam q_xi, q_eta;
};

struct CirculationIndex {
  int k = 0;  // floor(n * theta / pi); parity selects the flat mirror
};

double cell_half_trace(const RecirculatingCellConfig& cfg);
double cell_theta(const RecirculatingCellConfig& cfg);   // arccos(1 - d/f2)
double cell_scale(const RecirculatingCellConfig& cfg);   // sqrt(2 d f2 - d^2)

CirculationIndex circulation_index(int n, double theta);

// tilt of the flat mirror met at reflection n (sign alternates per circulation)
double tilt_at(int n, const RecirculatingCellConfig& cfg, double theta);

double spot_y(int n, const RecirculatingCellConfig& cfg);
double spot_x(int n, const RecirculatingCellConfig& cfg);

// per-reflection ray states (x, xp, y, yp) at flat-mirror hits, recursion form
std::vector<std::array<double, 4>> spot_states(const RecirculatingCellConfig& cfg,
                                               int n_max);

// cumulative tilt-induced spot offset after n reflections: 2 tx S sum sin(i theta)
double tilt_offset_delta_n(int n, double tilt_x, double d, double f2);

// optical-center offset, half that sum; n defaults to one half circulation
double center_offset(double tilt_x, double d, double f2, int n);

// the per-half-circulation center offset (the walk-off step per mirror block)
double half_circulation_offset(const RecirculatingCellConfig& cfg);

// geometric exit counting: first reflection with x < -x0 terminates the table;
// that exit record is included in the count.  Throws NoExit when untilted.
int total_reflections(const RecirculatingCellConfig& cfg);

// closed-form count (2 pi / theta) * ceil(x0 / (2 Delta)); kept for comparison
double closed_form_reflections(const RecirculatingCellConfig& cfg);

struct SweepResult {
  std::vector<double> d_mm;
  std::vector<double> y0p_rad;
  std::vector<int> n_refl;  // row-major: [i_d * ny + i_y]; -1 where a cell failed
  std::vector<std::string> cell_errors;  // "i_d,i_y: message"
};

SweepResult reflection_sweep(const RecirculatingCellConfig& base,
                             const std::vector<double>& d_values,
                             const std::vector<double>& y0p_values);

// plateau extraction: maximal contiguous y0p runs of constant count, one list per d
struct Plateau {
  int n_refl = 0;
  double y0p_lo = 0.0, y0p_hi = 0.0;
};
std::vector<std::vector<Plateau>> sweep_plateaus(const SweepResult& grid);

struct CylindricalDecomposition {
  TransferMatrix2 m_xi, m_eta;       // det-1 principal-axis blocks
  double azimuth = 0.0;              // rad, principal frame rotation
  double theta_xi = 0.0, theta_eta = 0.0;  // per-axis phase advance per round trip
  double scale_xi = 0.0, scale_eta = 0.0;  // mm; block = [[cos, L sin], [-sin/L, cos]]
  std::array<std::array<double, 4>, 4> round_trip{};  // full 4x4
  std::array<std::array<double, 4>, 4> basis{};       // modal basis columns
  double reconstruction_residual = 0.0;
};

CylindricalDecomposition cylindrical_round_trip(const CylindricalCellConfig& cfg);

std::vector<SpotRecord> spot_table(const RecirculatingCellConfig& cfg);
std::vector<SpotRecord> spot_table(const CylindricalCellConfig& cfg);

}  // namespace recell

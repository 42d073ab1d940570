#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "recell/beam_path.hpp"
#include "recell/cell.hpp"
#include "recell/spin_noise.hpp"

namespace recell {

enum class CellKind { recirculating, cylindrical, single_pass };

struct NoiseSpec {
  EvolutionMode mode = EvolutionMode::piecewise;
  double tau_min_s = 1e-6;
  double tau_max_s = 1e-2;
  int tau_points = 60;
  bool tau_log = true;  // log spacing; false -> linear
  double freq_max_hz = 0.0;
  int freq_points = 0;
  std::vector<std::pair<double, double>> exclude_mm;
};

struct SweepSpec {
  double d_min_mm = 0.0, d_max_mm = 0.0;
  int d_points = 1;
  double y0p_min_rad = 0.0, y0p_max_rad = 0.0;
  int y0p_points = 1;
};

struct OutputSpec {
  std::string dir = "out";
  std::string formats = "csv,json";
};

struct RunConfig {
  std::uint64_t seed = 1;

  CellKind kind = CellKind::recirculating;
  RecirculatingCellConfig recirc;
  CylindricalCellConfig cyl;
  double sp_d = 45.0;        // mm, single-pass half length
  double sp_lens_f = 1300.0; // mm
  int passes = 1;            // recirculating traversals used for noise

  GasSpec gas;
  double larmor_hz = 0.0;  // kept in the parsed unit so round-trips are exact
  double t2_s = 0.01;
  NoiseSpec noise;
  OutputSpec output;
  SweepSpec sweep;
  bool has_sweep = false;
};

// '#' comments, [section] headers, key = value.  Numeric keys carry a unit
// suffix; a bare key is rejected with a message that names the suffixed form.
// Angle keys accept either _rad or _deg (converted); the canonical text below
// always carries _rad.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// canonical text: fixed key order, %.17g numerics.  parse(serialize(c))
// reproduces c exactly.
std::string serialize_config(const RunConfig& cfg);

// grids derived from [noise]
std::vector<double> tau_grid(const NoiseSpec& n);
std::vector<double> freq_grid(const NoiseSpec& n);

SpinDynamics dynamics_of(const RunConfig& cfg);

// %.17g, the round-trip-exact double format used across all outputs
std::string fmt_g17(double v);

const char* cell_kind_name(CellKind k);

}  // namespace recell

#include "recell/beam_path.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace recell {

namespace {

void check_physical(const Complex& q, int pass, const char* what) {
  if (!(q.imag() > 0.0)) {
    std::ostringstream os;
    os << "nonphysical beam parameter (" << what << ") at pass " << pass
       << ": Im q = " << q.imag() << " mm";
    throw DomainError(os.str());
  }
}

// largest mode radius on a span: check both ends and the in-span waist
double span_max_radius(const FreeSpan& s, double wavelength) {
  auto w_of = [&](const Complex& q) {
    return beam_radius(ComplexBeamParam{q}, wavelength);
  };
  double m = std::max(w_of(span_q_xi(s, s.z0)), w_of(span_q_xi(s, s.z1)));
  m = std::max({m, w_of(span_q_eta(s, s.z0)), w_of(span_q_eta(s, s.z1))});
  return m;
}

void finalize(BeamPath& path, double d) {
  path.half_length = d;
  double m = 0.0;
  for (const auto& p : path.passes)
    for (const auto& s : p.spans) m = std::max(m, span_max_radius(s, path.wavelength));
  path.max_radius = m;
  // transverse-infinite premise: the kernels treat the cell as unbounded
  // sideways, which needs the beam to stay well clear of the walls
  if (m > d / 5.0) {
    std::ostringstream os;
    os << "beam radius reaches " << m << " mm, above the d/5 = " << d / 5.0
       << " mm transverse-infinite premise; correlation tails are approximate";
    path.warnings.push_back(os.str());
  }
}

}  // namespace

BeamPath build_recirculating_path(const RecirculatingCellConfig& cfg, int passes,
                                  EvolutionMode mode) {
  if (passes < 1) throw DomainError("path needs at least one pass");
  BeamPath path;
  path.wavelength = cfg.beam.wavelength;
  path.mode = mode;
  const double d = cfg.d;
  const double zr = rayleigh_range(cfg.beam.waist, cfg.beam.wavelength);
  Complex q(-cfg.beam.waist_z, zr);  // at the first flat mirror

  for (int p = 0; p < passes; ++p) {
    check_physical(q, p, "pass start");
    PassSegment seg;
    seg.z_lo = -d;
    seg.z_hi = d;
    const Complex q_mid = q + d;
    const Complex q_kicked = 1.0 / (1.0 / q_mid - 1.0 / cfg.f2);
    if (mode == EvolutionMode::piecewise) {
      seg.spans.push_back({-d, 0.0, q, q});
      seg.spans.push_back({0.0, d, q_kicked, q_kicked});
    } else {
      seg.spans.push_back({-d, d, q, q});
    }
    path.passes.push_back(std::move(seg));
    q = q_kicked + d;  // equals the Mobius round trip applied to q
  }
  finalize(path, d);
  return path;
}

BeamPath build_single_pass_path(double d, double lens_f, double w0,
                                double wavelength, EvolutionMode mode) {
  if (!(d > 0.0 && lens_f > 0.0 && w0 > 0.0))
    throw DomainError("single pass needs positive d, lens_f, w0");
  BeamPath path;
  path.wavelength = wavelength;
  path.mode = mode;
  // collimated waist w0 at the lens focuses to w_f at the cell center
  const double zr0 = rayleigh_range(w0, wavelength);
  const double wf = w0 / std::sqrt(1.0 + (zr0 / lens_f) * (zr0 / lens_f));
  const double zrf = rayleigh_range(wf, wavelength);
  PassSegment seg;
  seg.z_lo = -d;
  seg.z_hi = d;
  const Complex q(-d, zrf);  // waist at z = 0
  seg.spans.push_back({-d, d, q, q});
  path.passes.push_back(std::move(seg));
  finalize(path, d);
  return path;
}

BeamPath build_cylindrical_path(const CylindricalCellConfig& cfg,
                                EvolutionMode mode) {
  if (cfg.round_trips < 1) throw DomainError("path needs at least one round trip");
  const auto dec = cylindrical_round_trip(cfg);
  BeamPath path;
  path.wavelength = cfg.beam.wavelength;
  path.mode = mode;
  const double d = cfg.d;
  Complex qx = waist_q(cfg.w_xi0, cfg.beam.wavelength).q;
  Complex qe = waist_q(cfg.w_eta0, cfg.beam.wavelength).q;
  for (int p = 0; p < cfg.round_trips; ++p) {
    check_physical(qx, p, "xi axis");
    check_physical(qe, p, "eta axis");
    PassSegment seg;
    seg.z_lo = -d;
    seg.z_hi = d;
    // the twist couples the axes only at the mirrors, so within one round
    // trip the principal-frame parameters propagate freely in either mode
    seg.spans.push_back({-d, d, qx, qe});
    path.passes.push_back(std::move(seg));
    qx = propagate_q(ComplexBeamParam{qx}, dec.m_xi).q;
    qe = propagate_q(ComplexBeamParam{qe}, dec.m_eta).q;
  }
  finalize(path, d);
  return path;
}

BeamPath apply_barrier(const BeamPath& path,
                       const std::vector<std::pair<double, double>>& intervals) {
  if (intervals.empty()) return path;
  const double d = path.half_length;
  auto sorted = intervals;
  std::sort(sorted.begin(), sorted.end());
  for (const auto& [lo, hi] : sorted) {
    if (!(lo < hi))
      throw DomainError("barrier interval must have lo < hi");
    if (lo < -d - 1e-12 || hi > d + 1e-12) {
      std::ostringstream os;
      os << "barrier [" << lo << ", " << hi << "] mm leaves the cell [-" << d
         << ", " << d << "] mm";
      throw DomainError(os.str());
    }
  }
  // merge overlaps
  std::vector<std::pair<double, double>> merged;
  for (const auto& iv : sorted) {
    if (!merged.empty() && iv.first <= merged.back().second)
      merged.back().second = std::max(merged.back().second, iv.second);
    else
      merged.push_back(iv);
  }
  BeamPath out = path;
  for (auto& p : out.passes) p.exclusions = merged;
  return out;
}

std::vector<std::pair<double, double>> included_intervals(
    const FreeSpan& s, const std::vector<std::pair<double, double>>& exclusions) {
  std::vector<std::pair<double, double>> kept;
  double cursor = s.z0;
  for (const auto& [lo, hi] : exclusions) {
    if (hi <= cursor) continue;
    if (lo >= s.z1) break;
    if (lo > cursor) kept.emplace_back(cursor, std::min(lo, s.z1));
    cursor = std::max(cursor, hi);
    if (cursor >= s.z1) break;
  }
  if (cursor < s.z1) kept.emplace_back(cursor, s.z1);
  return kept;
}

}  // namespace recell

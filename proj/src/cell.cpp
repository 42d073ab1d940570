#include "recell/cell.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <sstream>

namespace recell {

namespace {
constexpr double kPi = std::numbers::pi;

TransferMatrix2 flat_round_trip(const RecirculatingCellConfig& cfg) {
  // flat -> d -> concave -> d -> flat
  return compose_round_trip(kInf, cfg.f2, cfg.d);
}
}  // namespace

double cell_half_trace(const RecirculatingCellConfig& cfg) {
  return flat_round_trip(cfg).half_trace();
}

double cell_theta(const RecirculatingCellConfig& cfg) {
  return stability_angle(flat_round_trip(cfg));
}

double cell_scale(const RecirculatingCellConfig& cfg) {
  return std::sqrt(cfg.d * (2.0 * cfg.f2 - cfg.d));
}

CirculationIndex circulation_index(int n, double theta) {
  if (!(theta > 0.0 && theta < kPi))
    throw DomainError("circulation index needs theta in (0, pi)");
  return {static_cast<int>(std::floor(n * theta / kPi))};
}

double tilt_at(int n, const RecirculatingCellConfig& cfg, double theta) {
  const int k = circulation_index(n, theta).k;
  return (k % 2 == 0) ? cfg.tilt_x : cfg.tilt_x2;
}

double spot_y(int n, const RecirculatingCellConfig& cfg) {
  const double th = cell_theta(cfg);
  return cfg.y0 * std::cos(n * th) + cell_scale(cfg) * cfg.y0p * std::sin(n * th);
}

double spot_x(int n, const RecirculatingCellConfig& cfg) {
  const double th = cell_theta(cfg);
  const double S = cell_scale(cfg);
  double x = cfg.x0 * std::cos(n * th) + S * cfg.x0p * std::sin(n * th);
  // every reflection s < n kicks the slope by 2*tilt(s); the kick reaches
  // position n as S sin((n-s) theta)
  for (int s = 0; s < n; ++s)
    x += 2.0 * S * tilt_at(s, cfg, th) * std::sin((n - s) * th);
  return x;
}

std::vector<std::array<double, 4>> spot_states(const RecirculatingCellConfig& cfg,
                                               int n_max) {
  const double th = cell_theta(cfg);
  const TransferMatrix2 m = flat_round_trip(cfg);
  std::vector<std::array<double, 4>> out;
  out.reserve(n_max + 1);
  double x = cfg.x0, xp = cfg.x0p, y = cfg.y0, yp = cfg.y0p;
  for (int s = 0; s <= n_max; ++s) {
    out.push_back({x, xp, y, yp});
    const double xp2 = xp + 2.0 * tilt_at(s, cfg, th);
    const double xn = m.a * x + m.b * xp2;
    const double xpn = m.c * x + m.d * xp2;
    const double yn = m.a * y + m.b * yp;
    const double ypn = m.c * y + m.d * yp;
    x = xn;
    xp = xpn;
    y = yn;
    yp = ypn;
  }
  return out;
}

double tilt_offset_delta_n(int n, double tilt_x, double d, double f2) {
  const double th = stability_angle(compose_round_trip(kInf, f2, d));
  const double S = std::sqrt(d * (2.0 * f2 - d));
  double s = 0.0;
  for (int i = 1; i <= n; ++i) s += std::sin(i * th);
  return 2.0 * tilt_x * S * s;
}

double center_offset(double tilt_x, double d, double f2, int n) {
  return 0.5 * tilt_offset_delta_n(n, tilt_x, d, f2);
}

double half_circulation_offset(const RecirculatingCellConfig& cfg) {
  const double th = cell_theta(cfg);
  const int n_half = static_cast<int>(std::floor(kPi / th));
  return std::fabs(center_offset(cfg.tilt_x, cfg.d, cfg.f2, n_half));
}

int total_reflections(const RecirculatingCellConfig& cfg) {
  if (cfg.tilt_x == 0.0 && cfg.tilt_x2 == 0.0)
    throw NoExit("untilted cell: the spot pattern closes on itself and never exits");
  const double th = cell_theta(cfg);
  const TransferMatrix2 m = flat_round_trip(cfg);
  double x = cfg.x0, xp = cfg.x0p;
  constexpr int kCap = 1000000;
  for (int s = 0; s < kCap; ++s) {
    if (x < -cfg.x0) return s + 1;  // the exit record itself is counted
    const double xp2 = xp + 2.0 * tilt_at(s, cfg, th);
    const double xn = m.a * x + m.b * xp2;
    xp = m.c * x + m.d * xp2;
    x = xn;
  }
  throw NoExit("no exit within 1e6 reflections");
}

double closed_form_reflections(const RecirculatingCellConfig& cfg) {
  const double th = cell_theta(cfg);
  const double delta = half_circulation_offset(cfg);
  if (delta == 0.0)
    throw NoExit("untilted cell: zero walk-off step, closed-form count diverges");
  return (2.0 * kPi / th) * std::ceil(cfg.x0 / (2.0 * delta));
}

SweepResult reflection_sweep(const RecirculatingCellConfig& base,
                             const std::vector<double>& d_values,
                             const std::vector<double>& y0p_values) {
  SweepResult r;
  r.d_mm = d_values;
  r.y0p_rad = y0p_values;
  r.n_refl.assign(d_values.size() * y0p_values.size(), -1);
  for (size_t i = 0; i < d_values.size(); ++i) {
    for (size_t j = 0; j < y0p_values.size(); ++j) {
      RecirculatingCellConfig c = base;
      c.d = d_values[i];
      c.y0p = y0p_values[j];
      try {
        r.n_refl[i * y0p_values.size() + j] = total_reflections(c);
      } catch (const Error& e) {
        std::ostringstream os;
        os << i << "," << j << ": " << e.what();
        r.cell_errors.push_back(os.str());
      }
    }
  }
  return r;
}

std::vector<std::vector<Plateau>> sweep_plateaus(const SweepResult& grid) {
  std::vector<std::vector<Plateau>> out(grid.d_mm.size());
  const size_t ny = grid.y0p_rad.size();
  for (size_t i = 0; i < grid.d_mm.size(); ++i) {
    size_t j = 0;
    while (j < ny) {
      const int c = grid.n_refl[i * ny + j];
      size_t j2 = j;
      while (j2 + 1 < ny && grid.n_refl[i * ny + j2 + 1] == c) ++j2;
      if (c >= 0) out[i].push_back({c, grid.y0p_rad[j], grid.y0p_rad[j2]});
      j = j2 + 1;
    }
  }
  return out;
}

namespace {

Eigen::Matrix4d cyl_kick(double f, double alpha) {
  Eigen::Matrix4d k = Eigen::Matrix4d::Identity();
  Eigen::Vector2d c(std::cos(alpha), std::sin(alpha));
  k.block<2, 2>(2, 0) = -(c * c.transpose()) / f;
  return k;
}

Eigen::Matrix4d prop4(double d) {
  Eigen::Matrix4d p = Eigen::Matrix4d::Identity();
  p.block<2, 2>(0, 2) = d * Eigen::Matrix2d::Identity();
  return p;
}

}  // namespace

CylindricalDecomposition cylindrical_round_trip(const CylindricalCellConfig& cfg) {
  if (!(cfg.twist > 0.0 && cfg.twist < kPi / 2.0 + 1e-12))
    throw InvalidGeometry("cylindrical twist must lie in (0, pi/2]");
  if (!(cfg.d > 0.0)) throw InvalidGeometry("cylindrical cell needs d > 0");

  const Eigen::Matrix4d t =
      cyl_kick(cfg.f, 0.0) * prop4(cfg.d) * cyl_kick(cfg.f, cfg.twist) * prop4(cfg.d);

  Eigen::EigenSolver<Eigen::Matrix4d> es(t);
  const auto lam = es.eigenvalues();
  const auto vec = es.eigenvectors();

  std::vector<int> up;
  for (int i = 0; i < 4; ++i)
    if (lam(i).imag() > 1e-9) up.push_back(i);
  auto eig_diag = [&]() {
    std::ostringstream os;
    os << "round-trip eigenvalues:";
    for (int i = 0; i < 4; ++i)
      os << " (" << lam(i).real() << (lam(i).imag() < 0 ? "" : "+") << lam(i).imag()
         << "i)";
    return os.str();
  };
  if (up.size() != 2)
    throw InvalidGeometry("degenerate twist: cannot split the round trip into two "
                          "oscillating axes; " + eig_diag());
  for (int i : up)
    if (std::fabs(std::abs(lam(i)) - 1.0) > 1e-6)
      throw InvalidGeometry("unstable cylindrical cell; " + eig_diag());

  Eigen::Matrix2cd u, w;
  double theta_mode[2];
  for (int m = 0; m < 2; ++m) {
    const auto v = vec.col(up[m]);
    u.col(m) = v.head<2>();
    w.col(m) = v.tail<2>();
    theta_mode[m] = std::atan2(lam(up[m]).imag(), lam(up[m]).real());
  }

  // mode matrix from the conjugate branch so the width form is negative definite
  Eigen::Matrix2cd sigma = w.conjugate() * u.conjugate().inverse();
  sigma = 0.5 * (sigma + sigma.transpose().eval());
  Eigen::Matrix2d im = sigma.imag();

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> sa(im);
  if (!(sa.eigenvalues()(0) < 0.0 && sa.eigenvalues()(1) < 0.0))
    throw InvalidGeometry("cylindrical mode width form not negative definite; " +
                          eig_diag());
  Eigen::Matrix2d rot = sa.eigenvectors();
  if (rot.determinant() < 0.0) rot.col(1) *= -1.0;
  const double scale_axis[2] = {-1.0 / sa.eigenvalues()(0), -1.0 / sa.eigenvalues()(1)};

  // pair each oscillation angle to the principal axis its position part lives on
  int axis_of_mode[2];
  for (int m = 0; m < 2; ++m) {
    Eigen::Vector2cd uh = rot.transpose() * u.col(m);
    axis_of_mode[m] = (std::abs(uh(0)) >= std::abs(uh(1))) ? 0 : 1;
  }
  if (axis_of_mode[0] == axis_of_mode[1]) {
    axis_of_mode[0] = 0;
    axis_of_mode[1] = 1;
  }

  CylindricalDecomposition out;
  double theta_axis[2] = {0.0, 0.0};
  int mode_of_axis[2] = {0, 1};
  for (int m = 0; m < 2; ++m) {
    theta_axis[axis_of_mode[m]] = theta_mode[m];
    mode_of_axis[axis_of_mode[m]] = m;
  }
  out.theta_xi = theta_axis[0];
  out.theta_eta = theta_axis[1];
  out.scale_xi = scale_axis[0];
  out.scale_eta = scale_axis[1];
  out.azimuth = std::atan2(rot(1, 0), rot(0, 0));
  auto canonical = [](double th, double L) {
    return TransferMatrix2{std::cos(th), L * std::sin(th), -std::sin(th) / L,
                           std::cos(th)};
  };
  out.m_xi = canonical(out.theta_xi, out.scale_xi);
  out.m_eta = canonical(out.theta_eta, out.scale_eta);

  // modal basis: columns (Re w, Im w) per axis; the round trip acts on each pair
  // as a pure rotation [[cos, sin], [-sin, cos]]
  Eigen::Matrix4d basis;
  Eigen::Matrix4d blocks = Eigen::Matrix4d::Zero();
  for (int ax = 0; ax < 2; ++ax) {
    const auto v = vec.col(up[mode_of_axis[ax]]);
    basis.col(2 * ax) = v.real();
    basis.col(2 * ax + 1) = v.imag();
    const double th = theta_axis[ax];
    blocks(2 * ax, 2 * ax) = std::cos(th);
    blocks(2 * ax, 2 * ax + 1) = std::sin(th);
    blocks(2 * ax + 1, 2 * ax) = -std::sin(th);
    blocks(2 * ax + 1, 2 * ax + 1) = std::cos(th);
  }
  out.reconstruction_residual =
      (t - basis * blocks * basis.inverse()).cwiseAbs().maxCoeff();

  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      out.round_trip[i][j] = t(i, j);
      out.basis[i][j] = basis(i, j);
    }
  return out;
}

std::vector<SpotRecord> spot_table(const RecirculatingCellConfig& cfg) {
  const int n_r = total_reflections(cfg);
  const double th = cell_theta(cfg);
  const auto states = spot_states(cfg, n_r - 1);
  const TransferMatrix2 m = flat_round_trip(cfg);

  const double zr = rayleigh_range(cfg.beam.waist, cfg.beam.wavelength);
  ComplexBeamParam q{Complex(-cfg.beam.waist_z, zr)};

  std::vector<SpotRecord> out;
  out.reserve(n_r);
  for (int n = 0; n < n_r; ++n) {
    SpotRecord rec;
    rec.n = n;
    rec.mirror = (circulation_index(n, th).k % 2 == 0) ? "M1" : "M1p";
    rec.x = states[n][0];
    rec.y = states[n][2];
    rec.q_xi = rec.q_eta = q;
    rec.w_xi = rec.w_eta = beam_radius(q, cfg.beam.wavelength);
    out.push_back(rec);
    q = propagate_q(q, m);
  }
  return out;
}

std::vector<SpotRecord> spot_table(const CylindricalCellConfig& cfg) {
  const auto dec = cylindrical_round_trip(cfg);
  Eigen::Matrix4d t;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) t(i, j) = dec.round_trip[i][j];

  Eigen::Vector4d v(cfg.x0, cfg.y0, cfg.x0p, cfg.y0p);
  ComplexBeamParam qx = waist_q(cfg.w_xi0, cfg.beam.wavelength);
  ComplexBeamParam qe = waist_q(cfg.w_eta0, cfg.beam.wavelength);

  std::vector<SpotRecord> out;
  out.reserve(cfg.round_trips);
  for (int n = 0; n < cfg.round_trips; ++n) {
    SpotRecord rec;
    rec.n = n;
    rec.mirror = "M1";
    rec.x = v(0);
    rec.y = v(1);
    rec.q_xi = qx;
    rec.q_eta = qe;
    rec.w_xi = beam_radius(qx, cfg.beam.wavelength);
    rec.w_eta = beam_radius(qe, cfg.beam.wavelength);
    out.push_back(rec);
    v = t * v;
    qx = propagate_q(qx, dec.m_xi);
    qe = propagate_q(qe, dec.m_eta);
  }
  return out;
}

}  // namespace recell

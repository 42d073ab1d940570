#include "recell/raytrace.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace recell {

namespace {

constexpr double kPi = std::numbers::pi;

double dot(const Vec3& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

Vec3 axpy(const Vec3& p, double t, const Vec3& d) {
  return {p[0] + t * d[0], p[1] + t * d[1], p[2] + t * d[2]};
}

void reflect(Vec3& d, const Vec3& n) {
  const double s = 2.0 * dot(d, n);
  d[0] -= s * n[0];
  d[1] -= s * n[1];
  d[2] -= s * n[2];
}

constexpr double kPathTol = 1e-12;  // mm, minimum accepted path length

// plane through `point` with unit `normal`; returns path length or -1
double plane_hit(const Surface3& s, const Ray3& r) {
  const double denom = dot(r.dir, s.normal);
  if (std::fabs(denom) < 1e-15) return -1.0;
  const Vec3 rel{r.origin[0] - s.point[0], r.origin[1] - s.point[1],
                 r.origin[2] - s.point[2]};
  const double t = -dot(rel, s.normal) / denom;
  return (t > kPathTol) ? t : -1.0;
}

// sphere, ray starting inside: the single positive root
double sphere_hit_inside(const Surface3& s, const Ray3& r) {
  const Vec3 rel{r.origin[0] - s.point[0], r.origin[1] - s.point[1],
                 r.origin[2] - s.point[2]};
  const double b = dot(r.dir, rel);
  const double c = dot(rel, rel) - s.radius * s.radius;
  const double disc = b * b - c;
  if (disc < 0.0) return -1.0;
  const double t = -b + std::sqrt(disc);
  return (t > kPathTol) ? t : -1.0;
}

double sphere_hit_nearest(const Surface3& s, const Ray3& r) {
  const Vec3 rel{r.origin[0] - s.point[0], r.origin[1] - s.point[1],
                 r.origin[2] - s.point[2]};
  const double b = dot(r.dir, rel);
  const double c = dot(rel, rel) - s.radius * s.radius;
  const double disc = b * b - c;
  if (disc < 0.0) return -1.0;
  const double rt = std::sqrt(disc);
  const double t1 = -b - rt, t2 = -b + rt;
  if (t1 > kPathTol) return t1;
  if (t2 > kPathTol) return t2;
  return -1.0;
}

Vec3 surface_normal(const Surface3& s, const Vec3& p) {
  if (s.kind == SurfaceKind::plane) return s.normal;
  Vec3 n{p[0] - s.point[0], p[1] - s.point[1], p[2] - s.point[2]};
  const double len = std::sqrt(dot(n, n));
  return {n[0] / len, n[1] / len, n[2] / len};
}

}  // namespace

std::vector<Ray3> sample_beam_rays(const BeamSpec& beam, double x0, double y0,
                                   double x0p, double y0p, double plane_tilt,
                                   int n_rays, std::uint64_t seed) {
  if (n_rays < 1) throw DomainError("sample_beam_rays needs n_rays >= 1");
  const double sig_pos = 0.5 * beam.waist;
  const double sig_slope = beam.wavelength / (2.0 * kPi * beam.waist);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<Ray3> rays;
  rays.reserve(n_rays);
  const double ta = std::tan(plane_tilt);
  for (int i = 0; i < n_rays; ++i) {
    double x = x0, y = y0, xp = x0p, yp = y0p;
    if (i > 0) {  // ray 0 stays the exact chief ray
      x += sig_pos * gauss(rng);
      y += sig_pos * gauss(rng);
      xp += sig_slope * gauss(rng);
      yp += sig_slope * gauss(rng);
    }
    Ray3 r;
    r.origin = {x, y, -x * ta};  // on the first flat mirror's plane
    // incoming beam travels toward -z; the first reflection applies the kick
    const double nrm = std::sqrt(xp * xp + yp * yp + 1.0);
    r.dir = {xp / nrm, yp / nrm, -1.0 / nrm};
    rays.push_back(r);
  }
  return rays;
}

std::vector<std::vector<HitRecord>> trace_surfaces(
    const std::vector<Surface3>& surfaces, const std::vector<Ray3>& rays,
    int max_hits) {
  std::vector<std::vector<HitRecord>> out(rays.size());
  for (size_t ir = 0; ir < rays.size(); ++ir) {
    Ray3 r = rays[ir];
    for (int h = 0; h < max_hits; ++h) {
      double best_t = kInf;
      int best = -1;
      for (size_t is = 0; is < surfaces.size(); ++is) {
        const auto& s = surfaces[is];
        const double t = (s.kind == SurfaceKind::plane) ? plane_hit(s, r)
                                                        : sphere_hit_nearest(s, r);
        if (t > 0.0 && t < best_t) {
          const Vec3 p = axpy(r.origin, t, r.dir);
          const double tr = std::hypot(p[0], p[1]);
          if (tr <= s.half_aperture) {
            best_t = t;
            best = static_cast<int>(is);
          }
        }
      }
      if (best < 0) break;  // no intersection: ray leaves the system
      const Vec3 p = axpy(r.origin, best_t, r.dir);
      out[ir].push_back({best, p});
      Vec3 n = surface_normal(surfaces[best], p);
      r.origin = p;
      reflect(r.dir, n);
    }
  }
  return out;
}

TraceResult trace_recirculating_cell(const RecirculatingCellConfig& cfg,
                                     const std::vector<Ray3>& rays, int max_hits,
                                     FlatAssignment assign) {
  const double theta = cell_theta(cfg);

  // surface ids: 0 = M1, 1 = M1p, 2 = M2
  auto flat_plane = [&](double tilt) {
    Surface3 s;
    s.kind = SurfaceKind::plane;
    s.point = {0, 0, 0};
    s.normal = {std::sin(tilt), 0.0, std::cos(tilt)};
    return s;
  };
  Surface3 m2;
  m2.kind = SurfaceKind::sphere;
  m2.id = "M2";
  m2.point = {0.0, 0.0, cfg.d - 2.0 * cfg.f2};  // cap vertex at z = d
  m2.radius = 2.0 * cfg.f2;

  TraceResult res;
  res.surface_ids = {"M1", "M1p", "M2"};
  res.ray_hits.resize(rays.size());
  res.ray_exit_index.assign(rays.size(), 0);

  std::vector<std::vector<std::array<double, 2>>> spot_pts;  // [spot][ray order]

  for (size_t ir = 0; ir < rays.size(); ++ir) {
    Ray3 r = rays[ir];
    int spot = 0;
    bool exited = false;
    for (int h = 0; h < max_hits && !exited; ++h) {
      // next flat hit; the mirror seen is either scheduled or chosen by side
      int side;
      if (assign == FlatAssignment::schedule) {
        side = circulation_index(spot, theta).k % 2;
      } else {
        const Surface3 probe = flat_plane(cfg.tilt_x);
        const double tp = plane_hit(probe, r);
        if (tp <= 0.0 && h > 0) {
          ++res.sideways_escapes;
          break;
        }
        const double yh = (tp > 0.0) ? axpy(r.origin, tp, r.dir)[1] : r.origin[1];
        side = (yh >= 0.0) ? 0 : 1;
      }
      const double tilt = (side == 0) ? cfg.tilt_x : cfg.tilt_x2;
      const Surface3 flat = flat_plane(tilt);

      const double tf = plane_hit(flat, r);
      if (tf <= 0.0) {
        if (h == 0) {
          // rays are sampled on the plane itself: reflect in place
        } else {
          ++res.sideways_escapes;
          break;
        }
      }
      Vec3 pf = (tf > 0.0) ? axpy(r.origin, tf, r.dir) : r.origin;
      r.origin = pf;
      reflect(r.dir, flat.normal);
      res.ray_hits[ir].push_back({side, pf});

      if (static_cast<int>(spot_pts.size()) <= spot) spot_pts.resize(spot + 1);
      spot_pts[spot].push_back({pf[0], pf[1]});
      res.ray_exit_index[ir] = spot + 1;
      if (pf[0] < -cfg.x0) {
        exited = true;  // exit record is kept, then the ray leaves
        break;
      }

      const double tm = sphere_hit_inside(m2, r);
      if (tm <= 0.0) {
        ++res.sideways_escapes;
        break;
      }
      const Vec3 pm = axpy(r.origin, tm, r.dir);
      res.ray_hits[ir].push_back({2, pm});
      r.origin = pm;
      reflect(r.dir, surface_normal(m2, pm));
      ++spot;
    }
  }

  res.centroid.resize(spot_pts.size());
  res.spread.resize(spot_pts.size());
  res.rays_at_spot.resize(spot_pts.size());
  for (size_t s = 0; s < spot_pts.size(); ++s) {
    double cx = 0.0, cy = 0.0;  // fixed ray order keeps the sums bit-stable
    for (const auto& p : spot_pts[s]) {
      cx += p[0];
      cy += p[1];
    }
    const double n = static_cast<double>(spot_pts[s].size());
    cx /= n;
    cy /= n;
    double rr = 0.0;
    for (const auto& p : spot_pts[s])
      rr += (p[0] - cx) * (p[0] - cx) + (p[1] - cy) * (p[1] - cy);
    res.centroid[s] = {cx, cy};
    res.spread[s] = std::sqrt(rr / n);
    res.rays_at_spot[s] = static_cast<int>(spot_pts[s].size());
  }
  res.n_reflections = rays.empty() ? 0 : res.ray_exit_index[0];
  return res;
}

TraceComparison compare_to_analytic(const TraceResult& trace,
                                    const std::vector<SpotRecord>& spots) {
  TraceComparison c;
  c.n_trace = trace.n_reflections;
  c.n_analytic = static_cast<int>(spots.size());
  c.count_match = (c.n_trace == c.n_analytic);

  const size_t n = std::min(trace.centroid.size(), spots.size());
  double acc = 0.0, mx = 0.0;
  for (size_t s = 0; s < n; ++s) {
    const double dx = trace.centroid[s][0] - spots[s].x;
    const double dy = trace.centroid[s][1] - spots[s].y;
    const double e = std::hypot(dx, dy);
    acc += e;
    mx = std::max(mx, e);
  }
  c.mean_error = (n > 0) ? acc / static_cast<double>(n) : 0.0;
  c.max_error = mx;

  // containment against the analytic mode radius, centered on the analytic spot
  std::int64_t inside = 0, total = 0;
  c.per_spot_containment.assign(n, 0.0);
  for (const auto& hits : trace.ray_hits) {
    int spot = 0;
    for (const auto& h : hits) {
      if (h.surface == 2) continue;  // curved-mirror hits are not spots
      if (static_cast<size_t>(spot) < n) {
        const double dx = h.point[0] - spots[spot].x;
        const double dy = h.point[1] - spots[spot].y;
        const bool in = (dx * dx + dy * dy) <=
                        spots[spot].w_xi * spots[spot].w_xi;
        inside += in ? 1 : 0;
        ++total;
        c.per_spot_containment[spot] += in ? 1.0 : 0.0;
      }
      ++spot;
    }
  }
  for (size_t s = 0; s < n; ++s)
    if (trace.rays_at_spot.size() > s && trace.rays_at_spot[s] > 0)
      c.per_spot_containment[s] /= trace.rays_at_spot[s];
  c.containment = (total > 0) ? static_cast<double>(inside) / total : 0.0;
  return c;
}

}  // namespace recell

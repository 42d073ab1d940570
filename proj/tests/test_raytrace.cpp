#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "recell/cell.hpp"
#include "recell/raytrace.hpp"

using namespace recell;

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kDeg = kPi / 180.0;

RecirculatingCellConfig narrow_cell() {
  RecirculatingCellConfig c;
  c.f2 = 1000.0;
  c.d = 29.8;
  c.tilt_x = 0.04 * kDeg;
  c.tilt_x2 = -c.tilt_x;
  c.x0 = 8.11;
  c.x0p = -0.26 * kDeg;
  c.y0p = 2.21 * kDeg;
  return c;
}

RecirculatingCellConfig wide_cell() {
  RecirculatingCellConfig c;
  c.f2 = 1000.0;
  c.d = 86.46;
  c.tilt_x = 0.02 * kDeg;
  c.tilt_x2 = -c.tilt_x;
  c.x0 = 11.0;
  c.y0p = 1.2 * kDeg;
  return c;
}
}  // namespace

TEST_CASE("a tilted plane deflects a normal ray by twice the tilt") {
  const double t = 0.02 * kDeg;
  Surface3 tilted;
  tilted.id = "T";
  tilted.normal = {std::sin(t), 0.0, std::cos(t)};
  Surface3 screen;
  screen.id = "S";
  screen.point = {0.0, 0.0, 5.0};
  screen.normal = {0.0, 0.0, 1.0};

  Ray3 r;
  r.origin = {0.0, 0.0, 5.0 - 1e-9};
  r.dir = {0.0, 0.0, -1.0};
  const auto hits = trace_surfaces({tilted, screen}, {r}, 2);
  REQUIRE(hits.size() == 1);
  REQUIRE(hits[0].size() == 2);
  CHECK(hits[0][0].point[0] == doctest::Approx(0.0).epsilon(1e-12));
  const double slope = hits[0][1].point[0] / 5.0;
  CHECK(std::fabs(slope - std::tan(2.0 * t)) < 1e-8);
  CHECK(std::fabs(slope - 2.0 * t) < 1e-8);
}

TEST_CASE("mirror sphere reproduces the paraxial matrix bounce by bounce") {
  RecirculatingCellConfig c;
  c.f2 = 1000.0;
  c.d = 30.0;
  c.tilt_x = 0.0;
  c.tilt_x2 = 0.0;
  c.x0 = 0.1;  // small transverse amplitude keeps aberrations tiny
  c.x0p = 0.0;

  const auto rays = sample_beam_rays(c.beam, c.x0, 0.0, 0.0, 0.0, 0.0, 1, 1);
  const int n = 10;
  const auto tr = trace_recirculating_cell(c, rays, n);
  const auto states = spot_states(c, n);

  int flat_seen = 0;
  for (const auto& h : tr.ray_hits[0]) {
    if (h.surface == 2) continue;  // curved-mirror hit
    CHECK(std::fabs(h.point[0] - states[flat_seen][0]) < 1e-6 * (flat_seen + 1));
    ++flat_seen;
  }
  CHECK(flat_seen == n);
}

TEST_CASE("every recorded hit lies on its surface") {
  const auto c = wide_cell();
  const auto rays = sample_beam_rays(c.beam, c.x0, c.y0, c.x0p, c.y0p,
                                     c.tilt_x, 50, 11);
  const auto tr = trace_recirculating_cell(c, rays, 135);

  const Vec3 n1 = {std::sin(c.tilt_x), 0.0, std::cos(c.tilt_x)};
  const Vec3 n2 = {std::sin(c.tilt_x2), 0.0, std::cos(c.tilt_x2)};
  const Vec3 cen = {0.0, 0.0, c.d - 2.0 * c.f2};

  for (const auto& ray : tr.ray_hits) {
    for (const auto& h : ray) {
      const auto& p = h.point;
      if (h.surface == 2) {
        const double rr = std::sqrt((p[0] - cen[0]) * (p[0] - cen[0]) +
                                    (p[1] - cen[1]) * (p[1] - cen[1]) +
                                    (p[2] - cen[2]) * (p[2] - cen[2]));
        CHECK(std::fabs(rr - 2.0 * c.f2) < 1e-9 * 2.0 * c.f2);
      } else {
        const Vec3& nn = (h.surface == 0) ? n1 : n2;
        CHECK(std::fabs(nn[0] * p[0] + nn[1] * p[1] + nn[2] * p[2]) < 1e-9);
      }
    }
  }
}

TEST_CASE("chief ray reproduces the analytic reflection counts") {
  {
    const auto c = narrow_cell();
    const auto rays = sample_beam_rays(c.beam, c.x0, c.y0, c.x0p, c.y0p,
                                       c.tilt_x, 1, 1);
    const auto tr = trace_recirculating_cell(c, rays, 200);
    CHECK(tr.n_reflections == 78);
  }
  {
    const auto c = wide_cell();
    const auto rays = sample_beam_rays(c.beam, c.x0, c.y0, c.x0p, c.y0p,
                                       c.tilt_x, 1, 1);
    const auto tr = trace_recirculating_cell(c, rays, 300);
    CHECK(tr.n_reflections == 135);

    const auto spots = spot_table(c);
    const auto cmp = compare_to_analytic(tr, spots);
    CHECK(cmp.count_match);
    CHECK(cmp.mean_error < 0.05);
  }
}

TEST_CASE("beam sampling: chief ray is exact, spreads match the request") {
  BeamSpec beam;  // 780 nm, 1 mm waist
  const double x0 = 8.11, y0 = 0.0, x0p = -0.26 * kDeg, y0p = 2.21 * kDeg;
  const double tilt = 0.04 * kDeg;
  const int n = 100000;
  const auto rays = sample_beam_rays(beam, x0, y0, x0p, y0p, tilt, n, 42);
  REQUIRE(int(rays.size()) == n);

  const auto& chief = rays[0];
  CHECK(chief.origin[0] == doctest::Approx(x0));
  CHECK(chief.origin[1] == doctest::Approx(y0));
  CHECK(chief.origin[2] == doctest::Approx(-x0 * std::tan(tilt)).epsilon(1e-12));
  CHECK(chief.dir[2] < 0.0);
  CHECK(chief.dir[0] / -chief.dir[2] == doctest::Approx(x0p).epsilon(1e-12));
  CHECK(chief.dir[1] / -chief.dir[2] == doctest::Approx(y0p).epsilon(1e-12));

  double mx = 0.0, my = 0.0;
  for (const auto& r : rays) {
    mx += r.origin[0];
    my += r.origin[1];
  }
  mx /= n;
  my /= n;
  double vx = 0.0, vs = 0.0, ms = 0.0;
  for (const auto& r : rays) {
    vx += (r.origin[0] - mx) * (r.origin[0] - mx);
    ms += r.dir[0] / -r.dir[2];
  }
  ms /= n;
  for (const auto& r : rays) {
    const double s = r.dir[0] / -r.dir[2];
    vs += (s - ms) * (s - ms);
  }
  const double sd_pos = std::sqrt(vx / (n - 1));
  const double sd_slope = std::sqrt(vs / (n - 1));
  CHECK(sd_pos == doctest::Approx(beam.waist / 2.0).epsilon(0.02));
  CHECK(sd_slope ==
        doctest::Approx(beam.wavelength / (2.0 * kPi * beam.waist)).epsilon(0.02));
  CHECK(std::fabs(mx - x0) < 0.01);
  CHECK(std::fabs(my - y0) < 0.01);
}

TEST_CASE("tracing is deterministic and summation-order stable") {
  const auto c = wide_cell();
  auto rays = sample_beam_rays(c.beam, c.x0, c.y0, c.x0p, c.y0p, c.tilt_x, 64, 5);
  const auto a = trace_recirculating_cell(c, rays, 135);
  const auto b = trace_recirculating_cell(c, rays, 135);
  REQUIRE(a.centroid.size() == b.centroid.size());
  for (size_t i = 0; i < a.centroid.size(); ++i) {
    CHECK(a.centroid[i][0] == b.centroid[i][0]);
    CHECK(a.centroid[i][1] == b.centroid[i][1]);
  }
  CHECK(a.n_reflections == b.n_reflections);

  // permuting the jittered rays must not move the aggregate beyond roundoff
  std::reverse(rays.begin() + 1, rays.end());
  const auto p = trace_recirculating_cell(c, rays, 135);
  REQUIRE(p.centroid.size() == a.centroid.size());
  for (size_t i = 0; i < a.centroid.size(); ++i) {
    CHECK(p.centroid[i][0] == doctest::Approx(a.centroid[i][0]).epsilon(1e-9));
    CHECK(p.rays_at_spot[i] == a.rays_at_spot[i]);
  }
}

TEST_CASE("jittered bundle stays near the analytic pattern") {
  const auto c = narrow_cell();
  const auto spots = spot_table(c);
  const auto rays = sample_beam_rays(c.beam, c.x0, c.y0, c.x0p, c.y0p,
                                     c.tilt_x, 200, 7);
  const auto tr = trace_recirculating_cell(c, rays, int(spots.size()));
  const auto cmp = compare_to_analytic(tr, spots);
  CHECK(cmp.count_match);
  CHECK(cmp.n_analytic == 78);
  CHECK(cmp.mean_error < 0.15);
  CHECK(cmp.containment > 0.78);
  CHECK(cmp.containment < 0.95);
}

TEST_CASE("side-based mirror assignment is available") {
  const auto c = narrow_cell();
  const auto rays = sample_beam_rays(c.beam, c.x0, c.y0, c.x0p, c.y0p,
                                     c.tilt_x, 1, 3);
  const auto tr =
      trace_recirculating_cell(c, rays, 200, FlatAssignment::by_side);
  CHECK(tr.n_reflections > 0);
}

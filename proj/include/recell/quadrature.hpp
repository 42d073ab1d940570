#pragma once
#include <cmath>
#include <utility>

namespace recell {

// 7/15-point Gauss-Kronrod pair on [-1, 1]
namespace gk {
extern const double kx[8];   // Kronrod abscissae, nonnegative half
extern const double kw[8];   // Kronrod weights for those abscissae
extern const double gw[4];   // Gauss weights for kx[0], kx[2], kx[4], kx[6]
}  // namespace gk

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
  int max_depth = 0;
};

namespace detail {

template <class F>
std::pair<double, double> gk15(const F& f, double a, double b) {
  const double h = 0.5 * (b - a);
  const double c = 0.5 * (a + b);
  const double f0 = f(c);
  double k = gk::kw[0] * f0;
  double g = gk::gw[0] * f0;
  for (int i = 1; i < 8; ++i) {
    const double fx = f(c - h * gk::kx[i]) + f(c + h * gk::kx[i]);
    k += gk::kw[i] * fx;
    if (i % 2 == 0) g += gk::gw[i / 2] * fx;
  }
  return {k * h, std::fabs(k - g) * h};
}

template <class F>
void adapt(const F& f, double a, double b, double eps, int depth, QuadResult& out) {
  auto [v, e] = gk15(f, a, b);
  out.evaluations += 15;
  out.max_depth = std::max(out.max_depth, depth);
  if (e <= eps || depth >= 48) {
    out.value += v;
    out.error += e;
    return;
  }
  const double m = 0.5 * (a + b);
  adapt(f, a, m, 0.5 * eps, depth + 1, out);
  adapt(f, m, b, 0.5 * eps, depth + 1, out);
}

}  // namespace detail

// adaptive bisection until the local Kronrod-Gauss defect meets
// max(abs_floor, rel_tol * |first whole-interval estimate|)
template <class F>
QuadResult integrate_adaptive(const F& f, double a, double b,
                              double rel_tol = 1e-6, double abs_floor = 1e-12) {
  QuadResult out;
  if (a == b) return out;
  auto [v0, e0] = detail::gk15(f, a, b);
  out.evaluations = 15;
  if (e0 <= std::max(abs_floor, rel_tol * std::fabs(v0))) {
    out.value = v0;
    out.error = e0;
    return out;
  }
  const double eps = std::max(abs_floor, rel_tol * std::fabs(v0));
  out.evaluations = 0;
  detail::adapt(f, a, b, eps, 0, out);
  return out;
}

}  // namespace recell

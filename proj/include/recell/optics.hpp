#pragma once
#include <complex>
#include <limits>
#include <utility>

#include "recell/errors.hpp"

namespace recell {

using Complex = std::complex<double>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// 2x2 paraxial ray-transfer matrix for one transverse axis.
// a, d dimensionless; b in mm; c in 1/mm.  Lossless elements keep det = 1.
struct TransferMatrix2 {
  double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

  double det() const { return a * d - b * c; }
  double half_trace() const { return 0.5 * (a + d); }

  TransferMatrix2 operator*(const TransferMatrix2& r) const {
    return {a * r.a + b * r.c, a * r.b + b * r.d,
            c * r.a + d * r.c, c * r.b + d * r.d};
  }
};

// complex beam parameter, units mm.  Im(q) > 0 for a physical beam.
struct ComplexBeamParam {
  Complex q;
};

// 1/q = a - i b with b = lambda/(pi w^2) > 0, a = 1/R
struct InvQParts {
  double a = 0.0;  // 1/mm, wavefront curvature
  double b = 0.0;  // 1/mm, width term
};

struct BeamSpec {
  double wavelength = 780e-6;  // mm
  double waist = 1.0;          // mm
  double waist_z = 0.0;        // waist position relative to first reflection, mm
};

enum class MirrorKind { flat, spherical, cylindrical };

struct MirrorSpec {
  MirrorKind kind = MirrorKind::flat;
  double f = kInf;          // mm; flat => +inf, never a large finite stand-in
  double curved_axis = 0.0; // rad, azimuth of the curved axis (cylindrical only)
  double tilt_x = 0.0;      // rad
  double center_z = 0.0;    // mm
};

TransferMatrix2 prop(double z);
TransferMatrix2 mirror_kick(double f);  // f = +inf allowed (identity)

// mirror(f1) * prop(d) * mirror(f2) * prop(d); throws InvalidGeometry on d <= 0
TransferMatrix2 compose_round_trip(double f1, double f2, double d);

// theta = arccos((A+D)/2); throws UnstableCavity when |A+D|/2 >= 1
double stability_angle(const TransferMatrix2& m);

// q' = (A q + B)/(C q + D); throws DomainError on a vanishing denominator
ComplexBeamParam propagate_q(const ComplexBeamParam& q, const TransferMatrix2& m);

std::pair<ComplexBeamParam, ComplexBeamParam> propagate_dual_q(
    const ComplexBeamParam& qxi, const ComplexBeamParam& qeta,
    const TransferMatrix2& mxi, const TransferMatrix2& meta);

// w = sqrt(-lambda / (pi * Im(1/q))); throws DomainError if Im(1/q) >= 0
double beam_radius(const ComplexBeamParam& q, double wavelength);

// 1/q = a - i b; throws DomainError on q == 0 or b <= 0
InvQParts inv_q_parts(const ComplexBeamParam& q);

// effective focal lengths of a spherical mirror used at incidence angle phi:
// tangential f cos(phi), sagittal f / cos(phi)
std::pair<double, double> mirror_astigmatic_focals(double f, double phi);

inline double rayleigh_range(double waist, double wavelength) {
  return 3.14159265358979323846 * waist * waist / wavelength;
}

inline ComplexBeamParam waist_q(double waist, double wavelength) {
  return {Complex(0.0, rayleigh_range(waist, wavelength))};
}

}  // namespace recell

#include "recell/optics.hpp"

#include <cmath>
#include <sstream>

namespace recell {

TransferMatrix2 prop(double z) { return {1.0, z, 0.0, 1.0}; }

TransferMatrix2 mirror_kick(double f) {
  if (std::isinf(f)) return {};  // flat mirror: exact identity, no 1/f roundoff
  return {1.0, 0.0, -1.0 / f, 1.0};
}

TransferMatrix2 compose_round_trip(double f1, double f2, double d) {
  if (!(d > 0.0)) {
    std::ostringstream os;
    os << "round trip needs a positive mirror separation, got d=" << d << " mm";
    throw InvalidGeometry(os.str());
  }
  return mirror_kick(f1) * prop(d) * mirror_kick(f2) * prop(d);
}

double stability_angle(const TransferMatrix2& m) {
  const double h = m.half_trace();
  if (!(std::fabs(h) < 1.0)) {
    std::ostringstream os;
    os << "unstable cavity: |A+D|/2 = " << std::fabs(h) << " >= 1"
       << " (A=" << m.a << ", D=" << m.d << ")";
    throw UnstableCavity(os.str());
  }
  return std::acos(h);
}

ComplexBeamParam propagate_q(const ComplexBeamParam& q, const TransferMatrix2& m) {
  const Complex den = m.c * q.q + m.d;
  if (std::abs(den) == 0.0) throw DomainError("singular beam propagation: C q + D = 0");
  return {(m.a * q.q + m.b) / den};
}

std::pair<ComplexBeamParam, ComplexBeamParam> propagate_dual_q(
    const ComplexBeamParam& qxi, const ComplexBeamParam& qeta,
    const TransferMatrix2& mxi, const TransferMatrix2& meta) {
  return {propagate_q(qxi, mxi), propagate_q(qeta, meta)};
}

double beam_radius(const ComplexBeamParam& q, double wavelength) {
  const Complex invq = 1.0 / q.q;
  if (!(invq.imag() < 0.0))
    throw DomainError("nonphysical beam: Im(1/q) >= 0");
  return std::sqrt(-wavelength / (3.14159265358979323846 * invq.imag()));
}

InvQParts inv_q_parts(const ComplexBeamParam& q) {
  if (q.q == Complex(0.0, 0.0)) throw DomainError("inv_q_parts: q = 0");
  const Complex invq = 1.0 / q.q;
  InvQParts p{invq.real(), -invq.imag()};
  if (!(p.b > 0.0)) throw DomainError("inv_q_parts: width term b <= 0 (nonphysical beam)");
  return p;
}

std::pair<double, double> mirror_astigmatic_focals(double f, double phi) {
  const double c = std::cos(phi);
  return {f * c, f / c};
}

}  // namespace recell

#include "recell/spin_noise.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "recell/quadrature.hpp"

namespace recell {

namespace {
constexpr double kPi = std::numbers::pi;
}

double diffusion_constant(const GasSpec& gas) {
  if (!(gas.pressure_torr > 0.0 && gas.temperature_K > 0.0 && gas.p0_torr > 0.0 &&
        gas.t0_K > 0.0 && gas.d0_cm2s > 0.0))
    throw DomainError("diffusion_constant needs positive gas parameters");
  return gas.d0_cm2s * (gas.p0_torr / gas.pressure_torr) *
         std::pow(gas.temperature_K / gas.t0_K, 1.5);
}

double sz2_variance(const AtomSpec& atom, double f_level) {
  const double i = atom.nuclear_spin;
  if (!(i > 0.0)) throw DomainError("sz2_variance needs nuclear spin I > 0");
  const double f_hi = i + 0.5;
  const double f_lo = std::fabs(i - 0.5);
  if (std::fabs(f_level - f_hi) > 1e-9 && std::fabs(f_level - f_lo) > 1e-9) {
    std::ostringstream os;
    os << "F = " << f_level << " is not a hyperfine level of I = " << i;
    throw DomainError(os.str());
  }
  const double g = 2.0 * i + 1.0;
  return ((2.0 * f_level + 1.0) / (2.0 * g)) * (1.0 / (g * g)) *
         (f_level * (f_level + 1.0) / 3.0);
}

double lorentzian_im(double nu, double nu_f, double gamma) {
  if (!(gamma > 0.0)) throw DomainError("lorentzian_im needs gamma > 0");
  const double x = nu - nu_f;
  return x / (x * x + gamma * gamma);
}

double diffusion_green(double dr_mm, double tau_s, double d_cm2s) {
  if (!(tau_s > 0.0)) throw DomainError("diffusion_green needs tau > 0");
  if (!(d_cm2s > 0.0)) throw DomainError("diffusion_green needs D > 0");
  const double d_mm2s = 100.0 * d_cm2s;
  const double s = 4.0 * kPi * d_mm2s * tau_s;
  return std::pow(s, -1.5) * std::exp(-dr_mm * dr_mm / (4.0 * d_mm2s * tau_s));
}

SensitivityScale sensitivity_scaling(double n_v, double volume, double t2,
                                     double gamma_pr, double od0, double gyro) {
  if (!(n_v > 0 && volume > 0 && t2 > 0 && gamma_pr > 0 && od0 > 0 && gyro > 0))
    throw DomainError("sensitivity_scaling needs positive inputs");
  SensitivityScale s;
  s.spn = (1.0 / gyro) * std::sqrt(1.0 / (n_v * volume * t2));
  s.psn = (1.0 / gyro) * (1.0 / t2) / std::sqrt(n_v * volume * gamma_pr * od0);
  return s;
}

namespace {

struct AxisParts {
  double a_xi, b_xi, a_eta, b_eta;
};

AxisParts parts_at(const FreeSpan& s, double z) {
  const Complex ix = 1.0 / span_q_xi(s, z);
  const Complex ie = 1.0 / span_q_eta(s, z);
  return {ix.real(), -ix.imag(), ie.real(), -ie.imag()};
}

// tau-independent weight: unit power sqrt(b_xi b_eta), or the unnormalized
// amplitude form (a^2 + b^2 per axis) / sqrt(b_xi b_eta)
double weight_at(const FreeSpan& s, double z, EvolutionMode mode) {
  const AxisParts p = parts_at(s, z);
  const double root = std::sqrt(p.b_xi * p.b_eta);
  if (mode == EvolutionMode::piecewise) return root;
  const double amp = (p.a_xi * p.a_xi + p.b_xi * p.b_xi) *
                     (p.a_eta * p.a_eta + p.b_eta * p.b_eta);
  return amp / root;
}

double kernel_at(const FreeSpan& s, double z, double dk2, double tau) {
  // dk2 = 2 D k; per-axis transverse spread factor after time tau
  const AxisParts p = parts_at(s, z);
  return 1.0 / std::sqrt((1.0 + dk2 * tau * p.b_xi) * (1.0 + dk2 * tau * p.b_eta));
}

double path_integral(const BeamPath& path, double d_mm2s, double tau,
                     bool with_kernel, const QuadSpec& q) {
  const double k = 2.0 * kPi / path.wavelength;
  const double dk2 = 2.0 * d_mm2s * k;
  double total = 0.0;
  for (const auto& pass : path.passes) {
    for (const auto& s : pass.spans) {
      for (const auto& [lo, hi] : included_intervals(s, pass.exclusions)) {
        auto f = [&](double z) {
          const double w = weight_at(s, z, path.mode);
          return with_kernel ? w * kernel_at(s, z, dk2, tau) : w;
        };
        total += integrate_adaptive(f, lo, hi, q.rel_tol, q.abs_floor).value;
      }
    }
  }
  return total;
}

}  // namespace

double cd_raw(const BeamPath& path, double d_mm2s, double tau, const QuadSpec& q) {
  if (tau == 0.0) return 1.0;  // integrands coincide exactly
  const double den = path_integral(path, d_mm2s, tau, false, q);
  if (!(den > 0.0)) throw DomainError("beam path has empty integration domain");
  return path_integral(path, d_mm2s, tau, true, q) / den;
}

std::vector<double> cd_curve(const BeamPath& path, double d_mm2s,
                             const std::vector<double>& taus, const QuadSpec& q) {
  // normalized by the zero-delay overlap, so C_d(0) = 1 identically even for
  // badly mismatched launches whose tightest foci decorrelate within ns
  const double ref = path_integral(path, d_mm2s, 0.0, false, q);
  if (!(ref > 0.0)) throw DomainError("beam path has empty integration domain");
  std::vector<double> out;
  out.reserve(taus.size());
  for (const double t : taus) {
    if (t < 0.0) throw DomainError("correlation delay tau must be >= 0");
    if (t == 0.0) {
      out.push_back(1.0);
      continue;
    }
    out.push_back(path_integral(path, d_mm2s, t, true, q) / ref);
  }
  return out;
}

std::vector<double> cd_stigmatic(const BeamPath& path, double d_mm2s,
                                 const std::vector<double>& taus,
                                 const QuadSpec& q) {
  return cd_curve(path, d_mm2s, taus, q);
}

std::vector<double> cd_astigmatic(const BeamPath& path, double d_mm2s,
                                  const std::vector<double>& taus,
                                  const QuadSpec& q) {
  return cd_curve(path, d_mm2s, taus, q);
}

double cd_raw_full(const BeamPath& path, double d_mm2s, double tau,
                   const QuadSpec& q) {
  if (path.mode != EvolutionMode::piecewise)
    throw DomainError(
        "the two-point verification integral needs the piecewise unit-power "
        "density");
  if (tau == 0.0) return 1.0;
  const double k = 2.0 * kPi / path.wavelength;
  const double sig = std::sqrt(2.0 * d_mm2s * tau);
  const double reach = 8.0 * sig;

  auto axis_factor = [&](double b1, double b2) {
    return std::sqrt(k * b1 * b2 / kPi) /
           std::sqrt(b1 + b2 + 4.0 * d_mm2s * k * tau * b1 * b2);
  };

  double num = 0.0, den = 0.0;
  for (const auto& pass : path.passes) {
    for (const auto& s1 : pass.spans) {
      for (const auto& [lo1, hi1] : included_intervals(s1, pass.exclusions)) {
        den += integrate_adaptive(
                   [&](double z) { return weight_at(s1, z, path.mode); }, lo1,
                   hi1, q.rel_tol, q.abs_floor)
                   .value;
        auto outer = [&](double z1) {
          const AxisParts p1 = parts_at(s1, z1);
          double inner_total = 0.0;
          for (const auto& s2 : pass.spans) {
            for (auto [lo2, hi2] : included_intervals(s2, pass.exclusions)) {
              lo2 = std::max(lo2, z1 - reach);
              hi2 = std::min(hi2, z1 + reach);
              if (lo2 >= hi2) continue;
              auto inner = [&](double z2) {
                const AxisParts p2 = parts_at(s2, z2);
                const double u = z2 - z1;
                const double g_long = std::exp(-u * u / (4.0 * d_mm2s * tau)) /
                                      std::sqrt(4.0 * kPi * d_mm2s * tau);
                return g_long * axis_factor(p1.b_xi, p2.b_xi) *
                       axis_factor(p1.b_eta, p2.b_eta);
              };
              inner_total +=
                  integrate_adaptive(inner, lo2, hi2, q.rel_tol, q.abs_floor)
                      .value;
            }
          }
          return (2.0 * kPi / k) * inner_total;
        };
        num += integrate_adaptive(outer, lo1, hi1, 10.0 * q.rel_tol, q.abs_floor)
                   .value;
      }
    }
  }
  if (!(den > 0.0)) throw DomainError("beam path has empty integration domain");
  return num / den;
}

namespace {

// kept intervals of one pass with the start-q's, for oracle sampling
struct SampleDomain {
  struct Piece {
    double lo, hi;
    const FreeSpan* span;
  };
  std::vector<Piece> pieces;
  std::vector<double> cum;  // cumulative lengths
  double total = 0.0;

  explicit SampleDomain(const PassSegment& pass) {
    for (const auto& s : pass.spans)
      for (const auto& [lo, hi] : included_intervals(s, pass.exclusions))
        pieces.push_back({lo, hi, &s});
    cum.reserve(pieces.size());
    for (const auto& p : pieces) {
      total += p.hi - p.lo;
      cum.push_back(total);
    }
  }

  // u in [0, total) -> z
  const FreeSpan* locate(double u, double& z) const {
    const auto it = std::upper_bound(cum.begin(), cum.end(), u);
    const size_t i = std::min<size_t>(it - cum.begin(), pieces.size() - 1);
    const double base = (i == 0) ? 0.0 : cum[i - 1];
    z = pieces[i].lo + (u - base);
    return pieces[i].span;
  }

  // membership + span lookup for the diffused coordinate
  const FreeSpan* find(double z) const {
    for (const auto& p : pieces)
      if (z >= p.lo && z <= p.hi) return p.span;
    return nullptr;
  }
};

double amplitude_at(const FreeSpan& s, double z, EvolutionMode mode, double k) {
  const AxisParts p = parts_at(s, z);
  if (mode == EvolutionMode::piecewise)
    return k * std::sqrt(p.b_xi * p.b_eta) / kPi;
  return std::sqrt((p.a_xi * p.a_xi + p.b_xi * p.b_xi) *
                   (p.a_eta * p.a_eta + p.b_eta * p.b_eta));
}

}  // namespace

OracleResult cd_monte_carlo(const BeamPath& path, double d_mm2s,
                            const std::vector<double>& taus,
                            std::int64_t n_samples, std::uint64_t seed) {
  if (n_samples < 10000)
    throw DomainError("cd_monte_carlo needs n_samples >= 1e4");
  const double k = 2.0 * kPi / path.wavelength;
  constexpr int kBatches = 16;
  const int n_pass = static_cast<int>(path.passes.size());
  const std::int64_t per = std::max<std::int64_t>(
      1, n_samples / (static_cast<std::int64_t>(kBatches) * n_pass));

  std::vector<SampleDomain> domains;
  domains.reserve(n_pass);
  for (const auto& pass : path.passes) domains.emplace_back(pass);

  OracleResult res;
  res.cd.reserve(taus.size());
  res.se.reserve(taus.size());

  for (size_t it = 0; it < taus.size(); ++it) {
    const double tau = taus[it];
    const double sdt = std::sqrt(std::max(0.0, 2.0 * d_mm2s * tau));
    double num_b[kBatches] = {0.0}, den_b[kBatches] = {0.0};

    for (int b = 0; b < kBatches; ++b) {
      for (int p = 0; p < n_pass; ++p) {
        const SampleDomain& dom = domains[p];
        if (dom.total <= 0.0) continue;
        std::seed_seq sq{seed, static_cast<std::uint64_t>(it),
                         static_cast<std::uint64_t>(p),
                         static_cast<std::uint64_t>(b)};
        std::mt19937_64 rng(sq);
        std::normal_distribution<double> g(0.0, 1.0);
        std::uniform_real_distribution<double> u(0.0, dom.total);

        for (std::int64_t i = 0; i < per; ++i) {
          double z1;
          const FreeSpan* s1 = dom.locate(u(rng), z1);
          const AxisParts p1 = parts_at(*s1, z1);
          const double sx = 1.0 / std::sqrt(2.0 * k * p1.b_xi);
          const double se = 1.0 / std::sqrt(2.0 * k * p1.b_eta);
          const double xi = sx * g(rng), eta = se * g(rng);
          const double dxi = sdt * g(rng), deta = sdt * g(rng), dz = sdt * g(rng);

          const double f1 = amplitude_at(*s1, z1, path.mode, k);
          const double base = kPi / (k * std::sqrt(p1.b_xi * p1.b_eta));
          den_b[b] += f1 * f1 * base *
                      std::exp(-k * (p1.b_xi * xi * xi + p1.b_eta * eta * eta));

          const double z2 = z1 + dz;
          const FreeSpan* s2 = dom.find(z2);
          if (!s2) continue;  // diffused outside the illuminated path
          const AxisParts p2 = parts_at(*s2, z2);
          const double f2 = amplitude_at(*s2, z2, path.mode, k);
          const double x2 = xi + dxi, e2 = eta + deta;
          num_b[b] += f1 * f2 * base *
                      std::exp(-k * (p2.b_xi * x2 * x2 + p2.b_eta * e2 * e2));
        }
      }
    }

    double num = 0.0, den = 0.0;
    for (int b = 0; b < kBatches; ++b) {
      num += num_b[b];
      den += den_b[b];
    }
    const double est = num / den;
    double var = 0.0;
    for (int b = 0; b < kBatches; ++b) {
      const double r = (den_b[b] > 0.0) ? num_b[b] / den_b[b] : est;
      var += (r - est) * (r - est);
    }
    res.cd.push_back(est);
    res.se.push_back(std::sqrt(var / (kBatches - 1.0) / kBatches));
  }
  return res;
}

std::vector<double> full_correlation(const std::vector<double>& taus,
                                     const std::vector<double>& cd,
                                     const SpinDynamics& dyn) {
  if (taus.size() != cd.size())
    throw DomainError("full_correlation: tau and cd grids differ in length");
  if (!(dyn.t2_s > 0.0)) throw DomainError("full_correlation needs T2 > 0");
  std::vector<double> c(taus.size());
  for (size_t i = 0; i < taus.size(); ++i)
    c[i] = cd[i] * std::cos(dyn.larmor_rad_s * taus[i]) *
           std::exp(-taus[i] / dyn.t2_s);
  return c;
}

PsdResult cosine_psd(const std::vector<double>& taus,
                     const std::vector<double>& corr,
                     const std::vector<double>& freqs) {
  if (taus.size() != corr.size() || taus.size() < 2)
    throw DomainError("cosine_psd needs matching tau/corr grids of length >= 2");
  if (freqs.empty()) throw DomainError("cosine_psd needs a frequency grid");

  PsdResult out;
  if (std::fabs(corr.back()) > 1e-4) {
    std::ostringstream os;
    os << "correlation is " << corr.back() << " at tau_max = " << taus.back()
       << " s; spectrum is truncated (leakage above 1e-4)";
    out.warnings.push_back(os.str());
  }

  out.psd.resize(freqs.size());
  double peak = 0.0;
  for (size_t j = 0; j < freqs.size(); ++j) {
    const double w = 2.0 * kPi * freqs[j];
    double acc = 0.0;
    for (size_t i = 0; i + 1 < taus.size(); ++i) {
      const double h = taus[i + 1] - taus[i];
      acc += 0.5 * h * (corr[i] * std::cos(w * taus[i]) +
                        corr[i + 1] * std::cos(w * taus[i + 1]));
    }
    out.psd[j] = acc;
    peak = std::max(peak, acc);
  }
  if (!(peak > 0.0)) throw DomainError("cosine_psd: spectrum has no positive peak");
  for (double& v : out.psd) v /= peak;
  return out;
}

double psd_half_width(const std::vector<double>& freq_hz,
                      const std::vector<double>& psd) {
  if (freq_hz.size() != psd.size() || psd.empty())
    throw DomainError("psd_half_width needs matching grids");
  size_t ip = 0;
  for (size_t i = 1; i < psd.size(); ++i)
    if (psd[i] > psd[ip]) ip = i;
  for (size_t i = ip; i + 1 < psd.size(); ++i) {
    if (psd[i + 1] < 0.5) {
      const double f = freq_hz[i] + (freq_hz[i + 1] - freq_hz[i]) *
                                        (psd[i] - 0.5) / (psd[i] - psd[i + 1]);
      return f - freq_hz[ip];
    }
  }
  throw DomainError("psd_half_width: spectrum never falls below half maximum");
}

CorrelationResult compute_correlation(const BeamPath& path, double d_mm2s,
                                      const SpinDynamics& dyn,
                                      const std::vector<double>& taus,
                                      const std::vector<double>& freqs,
                                      const QuadSpec& q) {
  CorrelationResult r;
  r.tau_s = taus;
  r.warnings = path.warnings;

  r.cd = cd_curve(path, d_mm2s, taus, q);
  r.norm_ref = cd_raw(path, d_mm2s, kTauRef, q);
  r.c = full_correlation(taus, r.cd, dyn);
  r.freq_hz = freqs;
  if (!freqs.empty()) {
    PsdResult p = cosine_psd(taus, r.c, freqs);
    r.psd = std::move(p.psd);
    for (auto& w : p.warnings) r.warnings.push_back(std::move(w));
  }
  return r;
}

}  // namespace recell

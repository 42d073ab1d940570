#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "recell/beam_path.hpp"

namespace recell {

struct GasSpec {
  double pressure_torr = 760.0;
  double temperature_K = 333.15;
  double d0_cm2s = 0.159;  // reference diffusion constant ...
  double p0_torr = 760.0;  // ... measured at this pressure
  double t0_K = 333.15;    // ... and this temperature
};

// D = D0 (p0/p) (T/T0)^{3/2}, cm^2/s
double diffusion_constant(const GasSpec& gas);

struct AtomSpec {
  double nuclear_spin = 1.5;  // I
};

// equilibrium <s_z^2> within one hyperfine level F
double sz2_variance(const AtomSpec& atom, double f_level);

// dispersive (imaginary-index) line shape (nu - nu_F) / ((nu - nu_F)^2 + G^2)
double lorentzian_im(double nu, double nu_f, double gamma);

// 3D diffusion propagator (4 pi D tau)^{-3/2} exp(-dr^2 / (4 D tau)), mm^-3
double diffusion_green(double dr_mm, double tau_s, double d_cm2s);

struct SpinDynamics {
  double larmor_rad_s = 0.0;  // omega_L
  double t2_s = 0.01;
};

// relative magnetic sensitivity scalings (proportionality only):
// spin-projection noise and photon shot noise contributions
struct SensitivityScale {
  double spn = 0.0;
  double psn = 0.0;
};
SensitivityScale sensitivity_scaling(double n_v, double volume, double t2,
                                     double gamma_pr, double od0, double gyro);

struct CorrelationResult {
  std::vector<double> tau_s;
  std::vector<double> cd;   // normalized to the zero-delay overlap
  std::vector<double> c;    // cd * cos(wL tau) * exp(-tau / T2)
  std::vector<double> freq_hz;
  std::vector<double> psd;  // peak-normalized cosine transform of c
  double norm_ref = 1.0;    // raw overlap ratio at tau_ref (diagnostic)
  std::vector<double> oracle_cd, oracle_se;  // filled when the oracle runs
  std::vector<std::string> warnings;
};

// diagnostic near-zero delay: cd_raw here is < 1 when the path holds foci
// tight enough to decorrelate within a nanosecond
inline constexpr double kTauRef = 1e-9;  // s

struct QuadSpec {
  double rel_tol = 1e-6;
  double abs_floor = 1e-12;
};

// raw beam-overlap ratio num(tau)/den before the tau_ref normalization;
// per-axis closed kernel with both intensities taken at the same z
double cd_raw(const BeamPath& path, double d_mm2s, double tau,
              const QuadSpec& q = {});

// correlation curve normalized by the zero-delay overlap, so C_d(0) = 1 by
// definition.  The same kernel serves stigmatic and astigmatic paths;
// equal-axis astigmatic input lands on the stigmatic integrand identically.
std::vector<double> cd_curve(const BeamPath& path, double d_mm2s,
                             const std::vector<double>& taus,
                             const QuadSpec& q = {});

std::vector<double> cd_stigmatic(const BeamPath& path, double d_mm2s,
                                 const std::vector<double>& taus,
                                 const QuadSpec& q = {});
std::vector<double> cd_astigmatic(const BeamPath& path, double d_mm2s,
                                  const std::vector<double>& taus,
                                  const QuadSpec& q = {});

// two-coordinate (z1, z2) kernel keeping the longitudinal diffusion factor;
// verification path for power-normalized beams
double cd_raw_full(const BeamPath& path, double d_mm2s, double tau,
                   const QuadSpec& q = {});

struct OracleResult {
  std::vector<double> cd;  // raw ratio estimates per tau
  std::vector<double> se;  // batch-mean standard errors
};

// Monte Carlo diffusion oracle: importance-samples atoms from the beam
// intensity, diffuses them with Gaussian steps, and re-weights against the
// displaced intensity.  Deterministic per seed; needs n_samples >= 1e4.
OracleResult cd_monte_carlo(const BeamPath& path, double d_mm2s,
                            const std::vector<double>& taus,
                            std::int64_t n_samples, std::uint64_t seed);

std::vector<double> full_correlation(const std::vector<double>& taus,
                                     const std::vector<double>& cd,
                                     const SpinDynamics& dyn);

struct PsdResult {
  std::vector<double> psd;
  std::vector<std::string> warnings;
};

// trapezoid cosine transform over the tau grid, normalized to its peak
PsdResult cosine_psd(const std::vector<double>& taus,
                     const std::vector<double>& corr,
                     const std::vector<double>& freqs);

// half width at half maximum measured from the spectral peak
double psd_half_width(const std::vector<double>& freq_hz,
                      const std::vector<double>& psd);

// the whole pipeline: C_d, C, PSD, warnings
CorrelationResult compute_correlation(const BeamPath& path, double d_mm2s,
                                      const SpinDynamics& dyn,
                                      const std::vector<double>& taus,
                                      const std::vector<double>& freqs,
                                      const QuadSpec& q = {});

}  // namespace recell

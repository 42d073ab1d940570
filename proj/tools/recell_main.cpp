#include <cmath>
#include <cstdint>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "recell/cell.hpp"
#include "recell/config.hpp"
#include "recell/errors.hpp"
#include "recell/raytrace.hpp"
#include "recell/run_io.hpp"
#include "recell/spin_noise.hpp"

namespace {

using recell::fmt_g17;
using ojson = nlohmann::ordered_json;

struct CommonOpts {
  std::string config_path;
  std::string out_dir;  // empty: take [output] dir from the config
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool force_literal = false;
  bool echo_deg = false;
  std::string command_line;
};

recell::RunConfig load_common(const CommonOpts& o) {
  recell::RunConfig cfg = recell::load_config_or_manifest(o.config_path);
  if (o.seed_set) cfg.seed = o.seed;
  if (o.force_literal) cfg.noise.mode = recell::EvolutionMode::amplitude_literal;
  if (!o.out_dir.empty()) cfg.output.dir = o.out_dir;
  return cfg;
}

std::string echo_angle(double rad, bool deg) {
  if (deg) return fmt_g17(rad * 180.0 / std::numbers::pi) + " deg";
  return fmt_g17(rad) + " rad";
}

void write_manifest(const recell::RunConfig& cfg, const CommonOpts& o,
                    const ojson& derived, const std::vector<std::string>& warnings,
                    std::vector<std::string> outputs) {
  const std::string path = cfg.output.dir + "/manifest.json";
  outputs.push_back("manifest.json");
  recell::ManifestInfo info;
  info.command = o.command_line;
  info.seed = cfg.seed;
  info.config_normalized = recell::serialize_config(cfg);
  info.derived_json = derived.dump();
  info.warnings = warnings;
  info.outputs = std::move(outputs);
  recell::write_text_file(path, recell::manifest_json(info));
}

int run_spots(const CommonOpts& o) {
  recell::RunConfig cfg = load_common(o);
  recell::ensure_dir(cfg.output.dir);
  ojson derived;
  derived["d_cm2s"] = recell::diffusion_constant(cfg.gas);

  std::vector<recell::SpotRecord> spots;
  if (cfg.kind == recell::CellKind::recirculating) {
    spots = recell::spot_table(cfg.recirc);
    const double th = recell::cell_theta(cfg.recirc);
    const double delta = recell::half_circulation_offset(cfg.recirc);
    derived["theta_rad"] = th;
    derived["scale_mm"] = recell::cell_scale(cfg.recirc);
    derived["delta_mm"] = delta;
    derived["n_reflections"] = static_cast<int>(spots.size());
    derived["closed_form_reflections"] = recell::closed_form_reflections(cfg.recirc);
    derived["reflections_per_circulation"] =
        static_cast<int>(std::floor(2.0 * std::numbers::pi / th));
    std::cout << "spots: " << spots.size() << " reflections before exit\n"
              << "  theta = " << echo_angle(th, o.echo_deg)
              << ", walk-off per half circulation = " << fmt_g17(delta)
              << " mm\n";
  } else if (cfg.kind == recell::CellKind::cylindrical) {
    spots = recell::spot_table(cfg.cyl);
    const auto dec = recell::cylindrical_round_trip(cfg.cyl);
    derived["theta_xi_rad"] = dec.theta_xi;
    derived["theta_eta_rad"] = dec.theta_eta;
    derived["scale_xi_mm"] = dec.scale_xi;
    derived["scale_eta_mm"] = dec.scale_eta;
    derived["azimuth_rad"] = dec.azimuth;
    derived["reconstruction_residual"] = dec.reconstruction_residual;
    derived["n_records"] = static_cast<int>(spots.size());
    std::cout << "spots: " << spots.size() << " round trips\n"
              << "  principal phase advances " << echo_angle(dec.theta_xi, o.echo_deg)
              << ", " << echo_angle(dec.theta_eta, o.echo_deg) << "\n";
  } else {
    throw recell::ConfigError(
        "spot tables need a recirculating or cylindrical cell");
  }

  recell::write_text_file(cfg.output.dir + "/spots.csv", recell::spot_csv(spots));
  ojson summary = derived;
  summary["kind"] = recell::cell_kind_name(cfg.kind);
  recell::write_text_file(cfg.output.dir + "/summary.json", summary.dump(2) + "\n");
  write_manifest(cfg, o, derived, {}, {"spots.csv", "summary.json"});
  std::cout << "wrote " << cfg.output.dir << "/spots.csv\n";
  return 0;
}

int run_trace(const CommonOpts& o, int n_rays) {
  recell::RunConfig cfg = load_common(o);
  if (cfg.kind != recell::CellKind::recirculating)
    throw recell::ConfigError("ray tracing needs a recirculating cell");
  if (n_rays < 1) throw recell::ConfigError("--rays must be >= 1");
  recell::ensure_dir(cfg.output.dir);

  const auto spots = recell::spot_table(cfg.recirc);
  const auto rays = recell::sample_beam_rays(
      cfg.recirc.beam, cfg.recirc.x0, cfg.recirc.y0, cfg.recirc.x0p,
      cfg.recirc.y0p, cfg.recirc.tilt_x, n_rays, cfg.seed);
  const auto trace = recell::trace_recirculating_cell(
      cfg.recirc, rays, static_cast<int>(spots.size()));
  const auto cmp = recell::compare_to_analytic(trace, spots);

  ojson report;
  report["mean_error_mm"] = cmp.mean_error;
  report["max_error_mm"] = cmp.max_error;
  report["containment_fraction"] = cmp.containment;
  report["n_reflections"] = trace.n_reflections;
  report["count_match"] = cmp.count_match;
  report["n_trace"] = cmp.n_trace;
  report["n_analytic"] = cmp.n_analytic;
  report["n_rays"] = n_rays;
  report["sideways_escapes"] = trace.sideways_escapes;

  recell::write_text_file(cfg.output.dir + "/trace.csv", recell::trace_csv(trace));
  recell::write_text_file(cfg.output.dir + "/compare.json", report.dump(2) + "\n");
  write_manifest(cfg, o, report, {}, {"trace.csv", "compare.json"});
  std::cout << "trace: " << n_rays << " rays, " << trace.n_reflections
            << " chief reflections (analytic " << cmp.n_analytic << ")\n"
            << "  centroid error mean " << fmt_g17(cmp.mean_error) << " mm, max "
            << fmt_g17(cmp.max_error) << " mm, containment "
            << fmt_g17(cmp.containment) << "\n"
            << "wrote " << cfg.output.dir << "/trace.csv\n";
  return 0;
}

recell::BeamPath build_path(const recell::RunConfig& cfg) {
  const recell::EvolutionMode mode = cfg.noise.mode;
  recell::BeamPath p;
  switch (cfg.kind) {
    case recell::CellKind::recirculating:
      p = recell::build_recirculating_path(cfg.recirc, cfg.passes, mode);
      break;
    case recell::CellKind::single_pass:
      p = recell::build_single_pass_path(cfg.sp_d, cfg.sp_lens_f,
                                         cfg.recirc.beam.waist,
                                         cfg.recirc.beam.wavelength, mode);
      break;
    case recell::CellKind::cylindrical:
      p = recell::build_cylindrical_path(cfg.cyl, mode);
      break;
  }
  return recell::apply_barrier(p, cfg.noise.exclude_mm);
}

int run_noise(const CommonOpts& o, bool oracle, std::int64_t oracle_samples) {
  recell::RunConfig cfg = load_common(o);
  recell::ensure_dir(cfg.output.dir);

  const recell::BeamPath path = build_path(cfg);
  const double d_cm2s = recell::diffusion_constant(cfg.gas);
  const auto taus = recell::tau_grid(cfg.noise);
  const auto freqs = recell::freq_grid(cfg.noise);

  recell::CorrelationResult res = recell::compute_correlation(
      path, 100.0 * d_cm2s, recell::dynamics_of(cfg), taus, freqs, {});

  ojson derived;
  derived["d_cm2s"] = d_cm2s;
  derived["mode"] = cfg.noise.mode == recell::EvolutionMode::piecewise
                        ? "piecewise" : "literal";
  derived["norm_ref"] = res.norm_ref;
  derived["tau_ref_s"] = recell::kTauRef;
  if (!res.psd.empty()) {
    try {
      derived["psd_half_width_hz"] = recell::psd_half_width(res.freq_hz, res.psd);
    } catch (const recell::DomainError&) {
      // spectrum never crosses half maximum inside the window; leave it out
    }
  }

  if (oracle) {
    const auto ora = recell::cd_monte_carlo(path, 100.0 * d_cm2s, taus,
                                            oracle_samples, cfg.seed);
    res.oracle_cd.resize(taus.size());
    res.oracle_se.resize(taus.size());
    double worst = 0.0;
    bool agree = true;
    for (size_t i = 0; i < taus.size(); ++i) {
      res.oracle_cd[i] = ora.cd[i];
      res.oracle_se[i] = ora.se[i];
      const double diff = std::fabs(res.oracle_cd[i] - res.cd[i]);
      worst = std::max(worst, diff);
      if (diff > std::max(3.0 * res.oracle_se[i], 0.02)) agree = false;
    }
    derived["oracle_samples"] = oracle_samples;
    derived["oracle_max_abs_diff"] = worst;
    derived["oracle_verdict"] = agree ? "agree" : "disagree";
    std::cout << "oracle: max |quad - sampled| = " << fmt_g17(worst) << " -> "
              << (agree ? "agree" : "DISAGREE") << "\n";
  }

  std::vector<std::string> outputs = {"correlation.csv"};
  recell::write_text_file(cfg.output.dir + "/correlation.csv",
                          recell::correlation_csv(res));
  if (!res.psd.empty()) {
    recell::write_text_file(cfg.output.dir + "/psd.csv",
                            recell::psd_csv(res.freq_hz, res.psd));
    outputs.push_back("psd.csv");
  }
  write_manifest(cfg, o, derived, res.warnings, outputs);

  for (const auto& w : res.warnings) std::cout << "warning: " << w << "\n";
  std::cout << "noise: " << taus.size() << " delays";
  if (!res.psd.empty()) std::cout << ", " << freqs.size() << " frequencies";
  std::cout << "; Cd(tau_max) = " << fmt_g17(res.cd.back()) << "\n"
            << "wrote " << cfg.output.dir << "/correlation.csv\n";
  return 0;
}

int run_sweep(const CommonOpts& o) {
  recell::RunConfig cfg = load_common(o);
  if (!cfg.has_sweep)
    throw recell::ConfigError("config has no [sweep] section");
  if (cfg.kind != recell::CellKind::recirculating)
    throw recell::ConfigError("reflection sweeps need a recirculating cell");
  recell::ensure_dir(cfg.output.dir);

  auto linspace = [](double a, double b, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i)
      v[i] = (n == 1) ? a : a + (b - a) * i / (n - 1);
    return v;
  };
  const auto ds = linspace(cfg.sweep.d_min_mm, cfg.sweep.d_max_mm, cfg.sweep.d_points);
  const auto ys = linspace(cfg.sweep.y0p_min_rad, cfg.sweep.y0p_max_rad,
                           cfg.sweep.y0p_points);

  const recell::SweepResult grid = recell::reflection_sweep(cfg.recirc, ds, ys);
  const auto plateaus = recell::sweep_plateaus(grid);

  ojson derived;
  derived["plateaus"] = ojson::array();
  for (size_t i = 0; i < ds.size(); ++i) {
    ojson row;
    row["d_mm"] = ds[i];
    row["plateaus"] = ojson::array();
    std::cout << "d = " << fmt_g17(ds[i]) << " mm:";
    for (const auto& p : plateaus[i]) {
      ojson pj;
      pj["n_refl"] = p.n_refl;
      pj["y0p_lo_rad"] = p.y0p_lo;
      pj["y0p_hi_rad"] = p.y0p_hi;
      pj["width_rad"] = p.y0p_hi - p.y0p_lo;
      row["plateaus"].push_back(pj);
      std::cout << "  [" << p.n_refl << " over " << fmt_g17(p.y0p_hi - p.y0p_lo)
                << " rad]";
    }
    std::cout << "\n";
    derived["plateaus"].push_back(row);
  }

  std::vector<std::string> warnings;
  for (const auto& e : grid.cell_errors) warnings.push_back("sweep cell " + e);

  recell::write_text_file(cfg.output.dir + "/sweep.csv", recell::sweep_csv(grid));
  write_manifest(cfg, o, derived, warnings, {"sweep.csv"});
  std::cout << "wrote " << cfg.output.dir << "/sweep.csv\n";
  return 0;
}

int run_nrefl(const CommonOpts& o) {
  recell::RunConfig cfg = load_common(o);
  if (cfg.kind != recell::CellKind::recirculating)
    throw recell::ConfigError("reflection counting needs a recirculating cell");
  const int n = recell::total_reflections(cfg.recirc);
  const double closed = recell::closed_form_reflections(cfg.recirc);
  const double th = recell::cell_theta(cfg.recirc);
  std::cout << "geometric reflections (exit included): " << n << "\n"
            << "closed-form estimate: " << fmt_g17(closed) << "\n"
            << "theta = " << echo_angle(th, o.echo_deg) << "\n";
  const double rel = std::fabs(closed - n) / std::max(1.0, double(n));
  std::cout << (rel <= 0.05
                    ? "the two counts are consistent"
                    : "counts differ by more than 5%; walk-off per pass is "
                      "probably not small against the exit threshold")
            << " (relative gap " << fmt_g17(rel) << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"beam-geometry and spin-noise calculations for multipass cells"};
  app.require_subcommand(1);

  CommonOpts o;
  for (int i = 0; i < argc; ++i) {
    if (i) o.command_line += ' ';
    o.command_line += argv[i];
  }

  int n_rays = 1000;
  bool oracle = false;
  std::int64_t oracle_samples = 200000;
  bool want_deg = false, want_rad = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config_path, "config file or previous manifest")
        ->required();
    sub->add_option("--out", o.out_dir, "output directory (overrides [output])");
    auto* s = sub->add_option("--seed", o.seed, "override the config seed");
    sub->parse_complete_callback([&o, s] { o.seed_set = s->count() > 0; });
    sub->add_flag("--amplitude-literal", o.force_literal,
                  "use the single-span beam evolution in place of the "
                  "piecewise one");
    auto* dg = sub->add_flag("--deg", want_deg, "echo angles in degrees");
    sub->add_flag("--rad", want_rad, "echo angles in radians (default)")
        ->excludes(dg);
  };

  CLI::App* spots = app.add_subcommand("spots", "mirror spot table");
  add_common(spots);
  CLI::App* trace = app.add_subcommand("trace", "3-D ray-trace cross check");
  add_common(trace);
  trace->add_option("--rays", n_rays, "number of sampled rays");
  CLI::App* noise = app.add_subcommand("noise", "diffusion correlation and spectrum");
  add_common(noise);
  noise->add_flag("--oracle", oracle, "append Monte Carlo check columns");
  noise->add_option("--oracle-samples", oracle_samples, "samples per delay");
  CLI::App* sweep = app.add_subcommand("sweep", "reflection-count sweep over d and launch slope");
  add_common(sweep);
  CLI::App* nrefl = app.add_subcommand("nrefl", "reflection count for one geometry");
  add_common(nrefl);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  o.echo_deg = want_deg;
  try {
    if (spots->parsed()) return run_spots(o);
    if (trace->parsed()) return run_trace(o, n_rays);
    if (noise->parsed()) return run_noise(o, oracle, oracle_samples);
    if (sweep->parsed()) return run_sweep(o);
    if (nrefl->parsed()) return run_nrefl(o);
  } catch (const recell::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.code);
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

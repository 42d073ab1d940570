#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <string>

#include "recell/cell.hpp"
#include "recell/config.hpp"
#include "recell/errors.hpp"
#include "recell/run_io.hpp"
#include "recell/spin_noise.hpp"

using namespace recell;

namespace {
constexpr double kDeg = std::numbers::pi / 180.0;

const char* kRecircText = R"(# tilted-mirror cell
seed = 99

[cell]
kind = recirculating
f2_mm = 1000
d_mm = 86.46
tilt_x_deg = 0.02
x0_mm = 11
y0p_deg = 1.2
passes = 50

[beam]
waist_mm = 1.0

[gas]
pressure_torr = 70
temperature_K = 393.15

[noise]
tau_min_s = 1e-6
tau_max_s = 1e-2
tau_points = 13
exclude_mm = -0.5:0.5, 2:3
)";

std::string expect_config_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}
}  // namespace

TEST_CASE("a full config parses with unit conversion and defaults") {
  const RunConfig c = parse_config(kRecircText);
  CHECK(c.seed == 99);
  CHECK(c.kind == CellKind::recirculating);
  CHECK(c.recirc.f2 == 1000.0);
  CHECK(c.recirc.d == 86.46);
  CHECK(c.recirc.tilt_x == doctest::Approx(0.02 * kDeg).epsilon(1e-15));
  CHECK(c.recirc.tilt_x2 == -c.recirc.tilt_x);  // defaults to the opposite tilt
  CHECK(c.recirc.x0 == 11.0);
  CHECK(c.recirc.y0p == doctest::Approx(1.2 * kDeg).epsilon(1e-15));
  CHECK(c.passes == 50);
  CHECK(c.recirc.beam.waist == 1.0);
  CHECK(c.recirc.beam.wavelength == 780e-6);  // default
  CHECK(c.gas.pressure_torr == 70.0);
  CHECK(c.noise.tau_points == 13);
  REQUIRE(c.noise.exclude_mm.size() == 2);
  CHECK(c.noise.exclude_mm[0].first == -0.5);
  CHECK(c.noise.exclude_mm[1].second == 3.0);
  CHECK(c.larmor_hz == 0.0);
  CHECK_FALSE(c.has_sweep);
}

TEST_CASE("a bare key names its suffixed form") {
  const std::string msg = expect_config_error("[cell]\nkind = recirculating\nf2 = 1000\n");
  CHECK(msg.find("f2") != std::string::npos);
  CHECK(msg.find("f2_mm") != std::string::npos);

  const std::string msg2 = expect_config_error("[gas]\npressure = 70\n");
  CHECK(msg2.find("pressure_torr") != std::string::npos);
}

TEST_CASE("malformed inputs are rejected with context") {
  CHECK(!expect_config_error("[cell]\nkind = hexagonal\n").empty());
  CHECK(!expect_config_error("[cavity]\nf2_mm = 1\n").empty());
  CHECK(!expect_config_error("[cell]\nbogus_mm = 1\n").empty());
  CHECK(!expect_config_error("[cell]\nd_mm = fast\n").empty());
  CHECK(!expect_config_error("d_mm = 1\n[cell]\n").empty());  // key before section
  CHECK(!expect_config_error("[cell]\nkind = recirculating\n"
                             "tilt_x_deg = 0.02\ntilt_x_rad = 1\n").empty());
  CHECK(!expect_config_error("[noise]\ntau_min_s = 1\ntau_max_s = 0.1\n").empty());
  CHECK(!expect_config_error("[sweep]\nd_min_mm = 90\nd_max_mm = 80\n").empty());
  CHECK(!expect_config_error("[noise]\nexclude_mm = 1;2\n").empty());
  CHECK(!expect_config_error("[noise]\nmode = quick\n").empty());
}

TEST_CASE("serialization round-trips every kind exactly") {
  {
    const RunConfig a = parse_config(kRecircText);
    const std::string s = serialize_config(a);
    const RunConfig b = parse_config(s);
    CHECK(serialize_config(b) == s);
    CHECK(b.recirc.tilt_x == a.recirc.tilt_x);  // bitwise
    CHECK(b.recirc.d == a.recirc.d);
    CHECK(b.seed == a.seed);
    CHECK(b.noise.exclude_mm == a.noise.exclude_mm);
  }
  {
    const RunConfig a = parse_config(
        "[cell]\nkind = cylindrical\nf_mm = 50\ntwist_deg = 50\n"
        "round_trips = 21\nw_xi0_mm = 1\nw_eta0_mm = 5\n");
    const std::string s = serialize_config(a);
    const RunConfig b = parse_config(s);
    CHECK(serialize_config(b) == s);
    CHECK(b.cyl.twist == a.cyl.twist);
    CHECK(b.cyl.w_eta0 == 5.0);
  }
  {
    const RunConfig a = parse_config(
        "[cell]\nkind = single_pass\nd_mm = 45\nlens_f_mm = 1300\n"
        "[sweep]\nd_min_mm = 80\nd_max_mm = 90\nd_points = 5\n"
        "y0p_min_rad = 0\ny0p_max_rad = 0.04\ny0p_points = 9\n");
    const std::string s = serialize_config(a);
    const RunConfig b = parse_config(s);
    CHECK(serialize_config(b) == s);
    CHECK(b.has_sweep);
    CHECK(b.sweep.y0p_points == 9);
  }
}

TEST_CASE("tau and frequency grids honour spacing and endpoints") {
  NoiseSpec n;
  n.tau_min_s = 1e-6;
  n.tau_max_s = 1e-2;
  n.tau_points = 13;
  const auto log_grid = tau_grid(n);
  REQUIRE(int(log_grid.size()) == 13);
  CHECK(log_grid.front() == doctest::Approx(1e-6).epsilon(1e-12));
  CHECK(log_grid.back() == doctest::Approx(1e-2).epsilon(1e-12));
  CHECK(log_grid[9] == doctest::Approx(1e-3).epsilon(1e-9));

  n.tau_log = false;
  n.tau_min_s = 0.0;
  n.tau_max_s = 1.0;
  n.tau_points = 5;
  const auto lin = tau_grid(n);
  CHECK(lin[0] == 0.0);
  CHECK(lin[2] == doctest::Approx(0.5));
  CHECK(lin[4] == 1.0);

  n.tau_log = true;
  n.tau_min_s = 0.0;
  CHECK_THROWS_AS(tau_grid(n), ConfigError);
  n.tau_log = false;
  n.tau_points = 1;
  CHECK_THROWS_AS(tau_grid(n), ConfigError);

  NoiseSpec f;
  f.freq_points = 0;
  CHECK(freq_grid(f).empty());
  f.freq_points = 11;
  f.freq_max_hz = 100.0;
  const auto fg = freq_grid(f);
  CHECK(fg.front() == 0.0);
  CHECK(fg.back() == 100.0);
}

TEST_CASE("dynamics conversion reaches angular frequency") {
  RunConfig c;
  c.larmor_hz = 1000.0;
  c.t2_s = 0.01;
  const SpinDynamics d = dynamics_of(c);
  CHECK(d.larmor_rad_s == doctest::Approx(2.0 * std::numbers::pi * 1000.0));
  CHECK(d.t2_s == 0.01);
}

TEST_CASE("g17 formatting round-trips doubles bit for bit") {
  for (const double v : {0.1, 1.0 / 3.0, 86.46, 1e300, 5e-324, -0.0, 2.2130}) {
    const std::string s = fmt_g17(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
  }
}

TEST_CASE("csv headers match the published layout") {
  SpotRecord r;
  r.n = 3;
  r.mirror = "M1p";
  r.x = 1.5;
  CHECK(spot_csv({r}).rfind("n,mirror,x_mm,y_mm,w_xi_mm,w_eta_mm\n", 0) == 0);
  CHECK(spot_csv({r}).find("3,M1p,1.5,") != std::string::npos);

  SweepResult g;
  g.d_mm = {80.0};
  g.y0p_rad = {0.0, 0.01};
  g.n_refl = {100, -1};
  const std::string sc = sweep_csv(g);
  CHECK(sc.rfind("d_mm,y0p_rad,n_refl\n", 0) == 0);
  CHECK(sc.find("80,0.01,-1\n") != std::string::npos);

  CHECK(psd_csv({1.0}, {0.5}).rfind("freq_hz,psd_norm\n", 0) == 0);

  CorrelationResult cr;
  cr.tau_s = {1e-3};
  cr.cd = {0.5};
  cr.c = {0.4};
  CHECK(correlation_csv(cr).rfind("tau_s,Cd,C\n", 0) == 0);
  cr.oracle_cd = {0.25};
  cr.oracle_se = {0.03125};
  const std::string oc = correlation_csv(cr);
  CHECK(oc.rfind("tau_s,Cd,C,oracle_Cd,oracle_se\n", 0) == 0);
  CHECK(oc.find("0.25,0.03125") != std::string::npos);
}

TEST_CASE("manifests rerun to the same bytes apart from the clock") {
  ManifestInfo info;
  info.command = "recell spots --config a.cfg";
  info.seed = 7;
  info.config_normalized = serialize_config(RunConfig{});
  info.derived_json = "{\"n_reflections\":78}";
  info.warnings = {"w1"};
  info.outputs = {"spots.csv"};

  std::string a = manifest_json(info);
  std::string b = manifest_json(info);
  auto scrub = [](std::string s) {
    const auto p = s.find("wall_clock_utc");
    const auto q = s.find('\n', p);
    return s.substr(0, p) + s.substr(q);
  };
  CHECK(scrub(a) == scrub(b));
  CHECK(a.find("\"tool_version\"") != std::string::npos);
  CHECK(a.find("recell spots") != std::string::npos);
}

TEST_CASE("a manifest feeds back in as a config") {
  const RunConfig a = parse_config(kRecircText);
  ManifestInfo info;
  info.command = "recell spots";
  info.seed = a.seed;
  info.config_normalized = serialize_config(a);

  const char* dir = std::getenv("TMPDIR");
  const std::string base = dir ? dir : "/tmp";
  const std::string mpath = base + "/recell_test_manifest.json";
  write_text_file(mpath, manifest_json(info));

  const RunConfig b = load_config_or_manifest(mpath);
  CHECK(serialize_config(b) == serialize_config(a));
  CHECK(b.recirc.d == a.recirc.d);
  std::remove(mpath.c_str());

  const std::string bad = base + "/recell_test_bad.json";
  write_text_file(bad, "{\"tool_version\": \"x\"}\n");
  CHECK_THROWS_AS(load_config_or_manifest(bad), ConfigError);
  std::remove(bad.c_str());

  CHECK_THROWS_AS(load_config_or_manifest(base + "/recell_no_such_file.cfg"),
                  ConfigError);
}

TEST_CASE("literal mode and linear spacing parse") {
  const RunConfig c = parse_config(
      "[noise]\nmode = literal\ntau_spacing = linear\ntau_min_s = 0\n"
      "tau_max_s = 1\ntau_points = 3\n");
  CHECK(c.noise.mode == EvolutionMode::amplitude_literal);
  CHECK_FALSE(c.noise.tau_log);
}

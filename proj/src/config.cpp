#include "recell/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

#include "recell/errors.hpp"

namespace recell {

namespace {

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

struct Entry {
  std::string key, value;
  int line = 0;
};

struct Raw {
  std::vector<Entry> global;
  std::vector<std::pair<std::string, std::vector<Entry>>> sections;

  std::vector<Entry>* find(const std::string& name) {
    for (auto& [n, v] : sections)
      if (n == name) return &v;
    return nullptr;
  }
};

Raw tokenize(const std::string& text) {
  Raw raw;
  std::vector<Entry>* cur = &raw.global;
  std::istringstream in(text);
  std::string line;
  int ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("line " + std::to_string(ln) + ": unterminated section header");
      const std::string name = trim(line.substr(1, line.size() - 2));
      raw.sections.emplace_back(name, std::vector<Entry>{});
      cur = &raw.sections.back().second;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(ln) + ": expected key = value");
    Entry e{trim(line.substr(0, eq)), trim(line.substr(eq + 1)), ln};
    if (e.key.empty())
      throw ConfigError("line " + std::to_string(ln) + ": empty key");
    cur->push_back(std::move(e));
  }
  return raw;
}

double to_double(const Entry& e, const std::string& section) {
  char* end = nullptr;
  const double v = std::strtod(e.value.c_str(), &end);
  if (end == e.value.c_str() || *end != '\0')
    throw ConfigError("[" + section + "] " + e.key + ": not a number: '" + e.value + "'");
  return v;
}

long long to_int(const Entry& e, const std::string& section) {
  char* end = nullptr;
  const long long v = std::strtoll(e.value.c_str(), &end, 10);
  if (end == e.value.c_str() || *end != '\0')
    throw ConfigError("[" + section + "] " + e.key + ": not an integer: '" + e.value + "'");
  return v;
}

[[noreturn]] void reject_key(const std::string& section, const Entry& e,
                             const std::vector<std::string>& known) {
  for (const auto& k : known)
    if (k.size() > e.key.size() && k.compare(0, e.key.size(), e.key) == 0 &&
        k[e.key.size()] == '_')
      throw ConfigError("[" + section + "] key '" + e.key +
                        "' is missing its unit suffix; use '" + k + "'");
  throw ConfigError("[" + section + "] unknown key '" + e.key + "'");
}

constexpr double kDeg = std::numbers::pi / 180.0;

// one angle that may arrive in radians or degrees, at most once
struct AngleSlot {
  double* target;
  const char* rad_key;
  const char* deg_key;
  bool seen = false;

  bool accept(const std::string& section, const Entry& e) {
    const bool is_rad = e.key == rad_key;
    const bool is_deg = e.key == deg_key;
    if (!is_rad && !is_deg) return false;
    if (seen)
      throw ConfigError("[" + section + "] '" + e.key +
                        "' repeats an angle already given (give one of " +
                        rad_key + ", " + deg_key + ")");
    *target = to_double(e, section) * (is_deg ? kDeg : 1.0);
    seen = true;
    return true;
  }
};

std::vector<std::pair<double, double>> parse_exclusions(const Entry& e,
                                                        const std::string& section) {
  std::vector<std::pair<double, double>> out;
  std::string v = e.value;
  if (trim(v).empty()) return out;
  std::istringstream in(v);
  std::string piece;
  while (std::getline(in, piece, ',')) {
    piece = trim(piece);
    const auto c = piece.find(':');
    if (c == std::string::npos)
      throw ConfigError("[" + section + "] " + e.key +
                        ": expected lo:hi pairs, got '" + piece + "'");
    Entry lo{e.key, trim(piece.substr(0, c)), e.line};
    Entry hi{e.key, trim(piece.substr(c + 1)), e.line};
    out.emplace_back(to_double(lo, section), to_double(hi, section));
  }
  return out;
}

void parse_cell(const std::vector<Entry>& entries, RunConfig& cfg) {
  const std::string sec = "cell";
  std::string kind = "recirculating";
  for (const auto& e : entries)
    if (e.key == "kind") kind = e.value;

  if (kind == "recirculating")
    cfg.kind = CellKind::recirculating;
  else if (kind == "cylindrical")
    cfg.kind = CellKind::cylindrical;
  else if (kind == "single_pass")
    cfg.kind = CellKind::single_pass;
  else
    throw ConfigError("[cell] kind must be recirculating, cylindrical or "
                      "single_pass, got '" + kind + "'");

  if (cfg.kind == CellKind::recirculating) {
    auto& c = cfg.recirc;
    AngleSlot tilt{&c.tilt_x, "tilt_x_rad", "tilt_x_deg"};
    AngleSlot tilt2{&c.tilt_x2, "tilt_x2_rad", "tilt_x2_deg"};
    AngleSlot x0p{&c.x0p, "x0p_rad", "x0p_deg"};
    AngleSlot y0p{&c.y0p, "y0p_rad", "y0p_deg"};
    const std::vector<std::string> known = {
        "kind", "f2_mm", "d_mm", "tilt_x_rad", "tilt_x_deg", "tilt_x2_rad",
        "tilt_x2_deg", "x0_mm", "y0_mm", "x0p_rad", "x0p_deg", "y0p_rad",
        "y0p_deg", "passes"};
    for (const auto& e : entries) {
      if (e.key == "kind") continue;
      if (tilt.accept(sec, e) || tilt2.accept(sec, e) || x0p.accept(sec, e) ||
          y0p.accept(sec, e))
        continue;
      if (e.key == "f2_mm") c.f2 = to_double(e, sec);
      else if (e.key == "d_mm") c.d = to_double(e, sec);
      else if (e.key == "x0_mm") c.x0 = to_double(e, sec);
      else if (e.key == "y0_mm") c.y0 = to_double(e, sec);
      else if (e.key == "passes") cfg.passes = static_cast<int>(to_int(e, sec));
      else reject_key(sec, e, known);
    }
    if (tilt.seen && !tilt2.seen) c.tilt_x2 = -c.tilt_x;
  } else if (cfg.kind == CellKind::cylindrical) {
    auto& c = cfg.cyl;
    AngleSlot twist{&c.twist, "twist_rad", "twist_deg"};
    AngleSlot x0p{&c.x0p, "x0p_rad", "x0p_deg"};
    AngleSlot y0p{&c.y0p, "y0p_rad", "y0p_deg"};
    const std::vector<std::string> known = {
        "kind", "f_mm", "d_mm", "twist_rad", "twist_deg", "round_trips",
        "w_xi0_mm", "w_eta0_mm", "x0_mm", "y0_mm", "x0p_rad", "x0p_deg",
        "y0p_rad", "y0p_deg"};
    for (const auto& e : entries) {
      if (e.key == "kind") continue;
      if (twist.accept(sec, e) || x0p.accept(sec, e) || y0p.accept(sec, e))
        continue;
      if (e.key == "f_mm") c.f = to_double(e, sec);
      else if (e.key == "d_mm") c.d = to_double(e, sec);
      else if (e.key == "round_trips") c.round_trips = static_cast<int>(to_int(e, sec));
      else if (e.key == "w_xi0_mm") c.w_xi0 = to_double(e, sec);
      else if (e.key == "w_eta0_mm") c.w_eta0 = to_double(e, sec);
      else if (e.key == "x0_mm") c.x0 = to_double(e, sec);
      else if (e.key == "y0_mm") c.y0 = to_double(e, sec);
      else reject_key(sec, e, known);
    }
  } else {
    const std::vector<std::string> known = {"kind", "d_mm", "lens_f_mm"};
    for (const auto& e : entries) {
      if (e.key == "kind") continue;
      if (e.key == "d_mm") cfg.sp_d = to_double(e, sec);
      else if (e.key == "lens_f_mm") cfg.sp_lens_f = to_double(e, sec);
      else reject_key(sec, e, known);
    }
  }
}

void parse_beam(const std::vector<Entry>& entries, BeamSpec& b) {
  const std::string sec = "beam";
  const std::vector<std::string> known = {"wavelength_mm", "waist_mm", "waist_z_mm"};
  for (const auto& e : entries) {
    if (e.key == "wavelength_mm") b.wavelength = to_double(e, sec);
    else if (e.key == "waist_mm") b.waist = to_double(e, sec);
    else if (e.key == "waist_z_mm") b.waist_z = to_double(e, sec);
    else reject_key(sec, e, known);
  }
}

void parse_gas(const std::vector<Entry>& entries, GasSpec& g) {
  const std::string sec = "gas";
  const std::vector<std::string> known = {"pressure_torr", "temperature_K",
                                          "d0_cm2s", "p0_torr", "t0_K"};
  for (const auto& e : entries) {
    if (e.key == "pressure_torr") g.pressure_torr = to_double(e, sec);
    else if (e.key == "temperature_K") g.temperature_K = to_double(e, sec);
    else if (e.key == "d0_cm2s") g.d0_cm2s = to_double(e, sec);
    else if (e.key == "p0_torr") g.p0_torr = to_double(e, sec);
    else if (e.key == "t0_K") g.t0_K = to_double(e, sec);
    else reject_key(sec, e, known);
  }
}

void parse_dynamics(const std::vector<Entry>& entries, RunConfig& cfg) {
  const std::string sec = "dynamics";
  const std::vector<std::string> known = {"larmor_hz", "t2_s"};
  for (const auto& e : entries) {
    if (e.key == "larmor_hz") cfg.larmor_hz = to_double(e, sec);
    else if (e.key == "t2_s") cfg.t2_s = to_double(e, sec);
    else reject_key(sec, e, known);
  }
}

void parse_noise(const std::vector<Entry>& entries, NoiseSpec& n) {
  const std::string sec = "noise";
  const std::vector<std::string> known = {
      "mode", "tau_min_s", "tau_max_s", "tau_points", "tau_spacing",
      "freq_max_hz", "freq_points", "exclude_mm"};
  for (const auto& e : entries) {
    if (e.key == "mode") {
      if (e.value == "piecewise") n.mode = EvolutionMode::piecewise;
      else if (e.value == "literal") n.mode = EvolutionMode::amplitude_literal;
      else throw ConfigError("[noise] mode must be piecewise or literal, got '" +
                             e.value + "'");
    } else if (e.key == "tau_min_s") n.tau_min_s = to_double(e, sec);
    else if (e.key == "tau_max_s") n.tau_max_s = to_double(e, sec);
    else if (e.key == "tau_points") n.tau_points = static_cast<int>(to_int(e, sec));
    else if (e.key == "tau_spacing") {
      if (e.value == "log") n.tau_log = true;
      else if (e.value == "linear") n.tau_log = false;
      else throw ConfigError("[noise] tau_spacing must be log or linear, got '" +
                             e.value + "'");
    } else if (e.key == "freq_max_hz") n.freq_max_hz = to_double(e, sec);
    else if (e.key == "freq_points") n.freq_points = static_cast<int>(to_int(e, sec));
    else if (e.key == "exclude_mm") n.exclude_mm = parse_exclusions(e, sec);
    else reject_key(sec, e, known);
  }
  if (n.tau_min_s > n.tau_max_s)
    throw ConfigError("[noise] tau range is inverted: tau_min_s > tau_max_s");
}

void parse_output(const std::vector<Entry>& entries, OutputSpec& o) {
  const std::vector<std::string> known = {"dir", "formats"};
  for (const auto& e : entries) {
    if (e.key == "dir") o.dir = e.value;
    else if (e.key == "formats") o.formats = e.value;
    else reject_key("output", e, known);
  }
}

void parse_sweep(const std::vector<Entry>& entries, SweepSpec& s) {
  const std::string sec = "sweep";
  const std::vector<std::string> known = {"d_min_mm", "d_max_mm", "d_points",
                                          "y0p_min_rad", "y0p_max_rad",
                                          "y0p_points"};
  for (const auto& e : entries) {
    if (e.key == "d_min_mm") s.d_min_mm = to_double(e, sec);
    else if (e.key == "d_max_mm") s.d_max_mm = to_double(e, sec);
    else if (e.key == "d_points") s.d_points = static_cast<int>(to_int(e, sec));
    else if (e.key == "y0p_min_rad") s.y0p_min_rad = to_double(e, sec);
    else if (e.key == "y0p_max_rad") s.y0p_max_rad = to_double(e, sec);
    else if (e.key == "y0p_points") s.y0p_points = static_cast<int>(to_int(e, sec));
    else reject_key(sec, e, known);
  }
  if (s.d_min_mm > s.d_max_mm)
    throw ConfigError("[sweep] mirror-separation range is inverted: d_min_mm > d_max_mm");
  if (s.y0p_min_rad > s.y0p_max_rad)
    throw ConfigError("[sweep] launch-slope range is inverted: y0p_min_rad > y0p_max_rad");
  if (s.d_points < 1 || s.y0p_points < 1)
    throw ConfigError("[sweep] point counts must be >= 1");
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  Raw raw = tokenize(text);
  RunConfig cfg;

  for (const auto& e : raw.global) {
    if (e.key == "seed") {
      char* end = nullptr;
      cfg.seed = std::strtoull(e.value.c_str(), &end, 10);
      if (end == e.value.c_str() || *end != '\0')
        throw ConfigError("seed: not an integer: '" + e.value + "'");
    } else {
      throw ConfigError("key '" + e.key +
                        "' appears before any [section]; only 'seed' may");
    }
  }

  for (const auto& [name, entries] : raw.sections) {
    if (name == "cell") parse_cell(entries, cfg);
    else if (name == "beam") {
      parse_beam(entries, cfg.recirc.beam);
      cfg.cyl.beam = cfg.recirc.beam;
    } else if (name == "gas") parse_gas(entries, cfg.gas);
    else if (name == "dynamics") parse_dynamics(entries, cfg);
    else if (name == "noise") parse_noise(entries, cfg.noise);
    else if (name == "output") parse_output(entries, cfg.output);
    else if (name == "sweep") { parse_sweep(entries, cfg.sweep); cfg.has_sweep = true; }
    else throw ConfigError("unknown section [" + name + "]");
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const char* cell_kind_name(CellKind k) {
  switch (k) {
    case CellKind::recirculating: return "recirculating";
    case CellKind::cylindrical: return "cylindrical";
    case CellKind::single_pass: return "single_pass";
  }
  return "?";
}

std::string serialize_config(const RunConfig& cfg) {
  std::ostringstream os;
  auto kv = [&](const char* k, const std::string& v) { os << k << " = " << v << "\n"; };
  auto kd = [&](const char* k, double v) { kv(k, fmt_g17(v)); };
  auto ki = [&](const char* k, long long v) { kv(k, std::to_string(v)); };

  os << "seed = " << cfg.seed << "\n\n[cell]\n";
  kv("kind", cell_kind_name(cfg.kind));
  if (cfg.kind == CellKind::recirculating) {
    const auto& c = cfg.recirc;
    kd("f2_mm", c.f2);
    kd("d_mm", c.d);
    kd("tilt_x_rad", c.tilt_x);
    kd("tilt_x2_rad", c.tilt_x2);
    kd("x0_mm", c.x0);
    kd("y0_mm", c.y0);
    kd("x0p_rad", c.x0p);
    kd("y0p_rad", c.y0p);
    ki("passes", cfg.passes);
  } else if (cfg.kind == CellKind::cylindrical) {
    const auto& c = cfg.cyl;
    kd("f_mm", c.f);
    kd("d_mm", c.d);
    kd("twist_rad", c.twist);
    ki("round_trips", c.round_trips);
    kd("w_xi0_mm", c.w_xi0);
    kd("w_eta0_mm", c.w_eta0);
    kd("x0_mm", c.x0);
    kd("y0_mm", c.y0);
    kd("x0p_rad", c.x0p);
    kd("y0p_rad", c.y0p);
  } else {
    kd("d_mm", cfg.sp_d);
    kd("lens_f_mm", cfg.sp_lens_f);
  }

  const BeamSpec& b = cfg.kind == CellKind::cylindrical ? cfg.cyl.beam : cfg.recirc.beam;
  os << "\n[beam]\n";
  kd("wavelength_mm", b.wavelength);
  kd("waist_mm", b.waist);
  kd("waist_z_mm", b.waist_z);

  os << "\n[gas]\n";
  kd("pressure_torr", cfg.gas.pressure_torr);
  kd("temperature_K", cfg.gas.temperature_K);
  kd("d0_cm2s", cfg.gas.d0_cm2s);
  kd("p0_torr", cfg.gas.p0_torr);
  kd("t0_K", cfg.gas.t0_K);

  os << "\n[dynamics]\n";
  kd("larmor_hz", cfg.larmor_hz);
  kd("t2_s", cfg.t2_s);

  os << "\n[noise]\n";
  kv("mode", cfg.noise.mode == EvolutionMode::piecewise ? "piecewise" : "literal");
  kd("tau_min_s", cfg.noise.tau_min_s);
  kd("tau_max_s", cfg.noise.tau_max_s);
  ki("tau_points", cfg.noise.tau_points);
  kv("tau_spacing", cfg.noise.tau_log ? "log" : "linear");
  kd("freq_max_hz", cfg.noise.freq_max_hz);
  ki("freq_points", cfg.noise.freq_points);
  {
    std::string ex;
    for (size_t i = 0; i < cfg.noise.exclude_mm.size(); ++i) {
      if (i) ex += ",";
      ex += fmt_g17(cfg.noise.exclude_mm[i].first) + ":" +
            fmt_g17(cfg.noise.exclude_mm[i].second);
    }
    kv("exclude_mm", ex);
  }

  os << "\n[output]\n";
  kv("dir", cfg.output.dir);
  kv("formats", cfg.output.formats);

  if (cfg.has_sweep) {
    os << "\n[sweep]\n";
    kd("d_min_mm", cfg.sweep.d_min_mm);
    kd("d_max_mm", cfg.sweep.d_max_mm);
    ki("d_points", cfg.sweep.d_points);
    kd("y0p_min_rad", cfg.sweep.y0p_min_rad);
    kd("y0p_max_rad", cfg.sweep.y0p_max_rad);
    ki("y0p_points", cfg.sweep.y0p_points);
  }
  return os.str();
}

std::vector<double> tau_grid(const NoiseSpec& n) {
  if (n.tau_points < 2) throw ConfigError("[noise] tau_points must be >= 2");
  if (!(n.tau_min_s > 0.0) && n.tau_log)
    throw ConfigError("[noise] log tau spacing needs tau_min_s > 0");
  std::vector<double> t(n.tau_points);
  if (n.tau_log) {
    const double l0 = std::log(n.tau_min_s), l1 = std::log(n.tau_max_s);
    for (int i = 0; i < n.tau_points; ++i)
      t[i] = std::exp(l0 + (l1 - l0) * i / (n.tau_points - 1));
  } else {
    for (int i = 0; i < n.tau_points; ++i)
      t[i] = n.tau_min_s +
             (n.tau_max_s - n.tau_min_s) * i / (n.tau_points - 1);
  }
  return t;
}

std::vector<double> freq_grid(const NoiseSpec& n) {
  if (n.freq_points <= 0) return {};
  if (n.freq_points == 1) return {0.0};
  std::vector<double> f(n.freq_points);
  for (int i = 0; i < n.freq_points; ++i)
    f[i] = n.freq_max_hz * i / (n.freq_points - 1);
  return f;
}

SpinDynamics dynamics_of(const RunConfig& cfg) {
  SpinDynamics d;
  d.larmor_rad_s = 2.0 * std::numbers::pi * cfg.larmor_hz;
  d.t2_s = cfg.t2_s;
  return d;
}

}  // namespace recell

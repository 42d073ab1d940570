#include "recell/run_io.hpp"

#include <cctype>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "recell/errors.hpp"

namespace recell {

namespace {
using ojson = nlohmann::ordered_json;
}

std::string spot_csv(const std::vector<SpotRecord>& spots) {
  std::ostringstream os;
  os << "n,mirror,x_mm,y_mm,w_xi_mm,w_eta_mm\n";
  for (const auto& s : spots)
    os << s.n << ',' << s.mirror << ',' << fmt_g17(s.x) << ',' << fmt_g17(s.y)
       << ',' << fmt_g17(s.w_xi) << ',' << fmt_g17(s.w_eta) << '\n';
  return os.str();
}

std::string trace_csv(const TraceResult& trace) {
  std::ostringstream os;
  os << "ray_id,hit_index,surface,x_mm,y_mm,z_mm\n";
  for (size_t r = 0; r < trace.ray_hits.size(); ++r) {
    const auto& hits = trace.ray_hits[r];
    for (size_t h = 0; h < hits.size(); ++h) {
      const auto& p = hits[h].point;
      os << r << ',' << h << ',' << trace.surface_ids.at(hits[h].surface) << ','
         << fmt_g17(p[0]) << ',' << fmt_g17(p[1]) << ',' << fmt_g17(p[2])
         << '\n';
    }
  }
  return os.str();
}

std::string correlation_csv(const CorrelationResult& r) {
  const bool oracle = !r.oracle_cd.empty();
  std::ostringstream os;
  os << "tau_s,Cd,C";
  if (oracle) os << ",oracle_Cd,oracle_se";
  os << '\n';
  for (size_t i = 0; i < r.tau_s.size(); ++i) {
    os << fmt_g17(r.tau_s[i]) << ',' << fmt_g17(r.cd[i]) << ','
       << fmt_g17(r.c[i]);
    if (oracle)
      os << ',' << fmt_g17(r.oracle_cd[i]) << ',' << fmt_g17(r.oracle_se[i]);
    os << '\n';
  }
  return os.str();
}

std::string psd_csv(const std::vector<double>& freq_hz,
                    const std::vector<double>& psd) {
  std::ostringstream os;
  os << "freq_hz,psd_norm\n";
  for (size_t i = 0; i < freq_hz.size(); ++i)
    os << fmt_g17(freq_hz[i]) << ',' << fmt_g17(psd[i]) << '\n';
  return os.str();
}

std::string sweep_csv(const SweepResult& grid) {
  std::ostringstream os;
  os << "d_mm,y0p_rad,n_refl\n";
  const size_t ny = grid.y0p_rad.size();
  for (size_t i = 0; i < grid.d_mm.size(); ++i)
    for (size_t j = 0; j < ny; ++j)
      os << fmt_g17(grid.d_mm[i]) << ',' << fmt_g17(grid.y0p_rad[j]) << ','
         << grid.n_refl[i * ny + j] << '\n';
  return os.str();
}

std::string manifest_json(const ManifestInfo& info) {
  ojson m;
  m["tool_version"] = kToolVersion;
  m["command"] = info.command;
  m["wall_clock_utc"] = utc_timestamp();
  m["seed"] = info.seed;
  m["config_normalized"] = info.config_normalized;
  m["derived"] = ojson::parse(info.derived_json);
  m["warnings"] = info.warnings;
  m["outputs"] = info.outputs;
  return m.dump(2) + "\n";
}

RunConfig load_config_or_manifest(const std::string& path) {
  const std::string text = read_text_file(path);
  size_t i = 0;
  while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  if (i < text.size() && text[i] == '{') {
    ojson m;
    try {
      m = ojson::parse(text);
    } catch (const std::exception& e) {
      throw ConfigError(path + ": JSON manifest did not parse: " + e.what());
    }
    if (!m.contains("config_normalized") || !m["config_normalized"].is_string())
      throw ConfigError(path + ": manifest lacks a config_normalized string");
    return parse_config(m["config_normalized"].get<std::string>());
  }
  return parse_config(text);
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write file: " + path, ExitCode::internal);
  out << content;
  if (!out) throw Error("write failed: " + path, ExitCode::internal);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void ensure_dir(const std::string& path) {
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  if (ec) throw Error("cannot create directory " + path + ": " + ec.message(),
                      ExitCode::internal);
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace recell
